#include "torq/error.hpp"
#include "torq/hamiltonian.hpp"
#include "torq/spectrum.hpp"

#include "cosine_well.hpp"
#include "dense_circuit.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace torq;

namespace {

oracle::Circuit to_oracle(const CircuitParams& p) {
    return {p.c_a, p.c_b, p.c_f, p.e_a, p.e_b, p.e_f, p.e_c_ref_over_e_j, reduced_flux(p)};
}

Eigen::MatrixXcd dense_of(const HamiltonianMatrix& h) {
    return std::visit([](const auto& m) -> Eigen::MatrixXcd { return Eigen::MatrixXcd(m.template cast<std::complex<double>>()); },
                      h.entries);
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected torq::Error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("charge basis matches the dense node-charge oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> c(0.5, 2.0), e(0.3, 1.5), f(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        CircuitParams p;
        p.c_a = c(rng);
        p.c_b = c(rng);
        p.c_f = c(rng) * 0.5;
        p.e_a = e(rng);
        p.e_b = e(rng);
        p.e_f = e(rng);
        p.e_c_ref_over_e_j = 0.2;
        p.bias = ReducedFlux{f(rng)};
        const int n_max = 5;
        const HamiltonianMatrix h = build_charge_basis(p, {n_max});
        const Eigen::MatrixXcd mine = dense_of(h);
        CHECK((mine - mine.adjoint()).norm() < 1e-14);
        const Eigen::VectorXd ours = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(mine).eigenvalues();
        const Eigen::VectorXd theirs = oracle::dense_charge_levels(to_oracle(p), n_max);
        CHECK((ours - theirs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("pure charging limit") {
    CircuitParams p;
    p.e_a = p.e_b = p.e_f = 0.0;
    const ChargeBasisSpec spec{4};
    const HamiltonianMatrix h = build_charge_basis(p, spec);
    const Eigen::MatrixXcd m = dense_of(h);
    CHECK((m - Eigen::MatrixXcd(m.diagonal().asDiagonal())).norm() == 0.0);
    const Spectrum s = solve_lowest(h, 1);
    CHECK(s.energies[0] == doctest::Approx(0.0));
    CHECK(std::abs(s.states(charge_index(spec, 0, 0), 0)) == doctest::Approx(1.0));
}

TEST_CASE("flux periodicity") {
    CircuitParams p;
    p.bias = ReducedFlux{0.37};
    const Spectrum a = solve_lowest(build_charge_basis(p, {6}), 4);
    p.bias = ReducedFlux{1.37};
    const Spectrum b = solve_lowest(build_charge_basis(p, {6}), 4);
    for (int n = 0; n < 4; ++n) {
        CHECK(std::abs(a.energies[n] - b.energies[n]) < 1e-10);
    }
}

TEST_CASE("degeneracy point has a positive gap") {
    const Spectrum s = solve_lowest(build_charge_basis(CircuitParams{}, {8}), 2);
    CHECK(s.gap() > 1e-5);
}

TEST_CASE("decoupled junctions reduce to two single-junction wells") {
    CircuitParams p;
    p.c_f = 0.0;
    p.e_f = 0.0;
    const Eigen::VectorXd well = oracle::cosine_well_plane_wave(p.e_c_ref_over_e_j, 1.0, 40);

    const Spectrum charge = solve_lowest(build_charge_basis(p, {12}), 1);
    CHECK(std::abs(charge.energies[0] - 2.0 * well(0)) < 1e-10);

    // The finite-difference wells agree with the plane-wave answer as well.
    const Eigen::VectorXd fd = oracle::cosine_well_periodic_fd(p.e_c_ref_over_e_j, 1.0, 1600);
    CHECK(std::abs(fd(0) - well(0)) < 1e-6);

    FluxGridSpec wide;
    wide.half_width_a = wide.half_width_b = std::numbers::pi;
    wide.points_a = wide.points_b = 121;
    const Spectrum grid = solve_lowest(build_flux_grid(p, wide), 1);
    CHECK(std::abs(grid.energies[0] - 2.0 * well(0)) < 1e-6);
}

TEST_CASE("deep wells approach the harmonic plasma spacing") {
    CircuitParams p;
    p.bias = ReducedFlux{0.0};
    p.e_c_ref_over_e_j = 1e-3;
    const Eigen::Vector2d w = oracle::harmonic_frequencies_at_origin(
        {p.c_a, p.c_b, p.c_f, p.e_a, p.e_b, p.e_f, p.e_c_ref_over_e_j, 0.0});
    const Spectrum s = solve_lowest(build_charge_basis(p, {14}), 2);
    CHECK(s.gap() == doctest::Approx(w(0)).epsilon(0.05));
}

TEST_CASE("closed_a at zero bias current equals open_b at half flux") {
    FluxGridSpec spec;
    spec.points_a = spec.points_b = 101;
    const Spectrum open = solve_lowest(build_flux_grid(CircuitParams{}, spec), 3);
    CircuitParams closed;
    closed.design = Design::ClosedA;
    closed.bias = BiasCurrent{0.0};
    const Spectrum shut = solve_lowest(build_flux_grid(closed, spec), 3);
    for (int n = 0; n < 3; ++n) {
        CHECK(std::abs(open.energies[n] - shut.energies[n]) < 1e-8);
    }
}

TEST_CASE("potential values and gradient") {
    CircuitParams p;
    const ModeTransform t = compute_transform(p);
    p.bias = ReducedFlux{0.0};
    CHECK(potential_on_grid(p, t, 0.0, 0.0) == doctest::Approx(-2.8));
    p.bias = ReducedFlux{0.5};
    CHECK(potential_on_grid(p, t, 0.0, 0.0) == doctest::Approx(-1.2));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> x(-4.0, 4.0);
    CircuitParams closed;
    closed.design = Design::ClosedA;
    closed.bias = BiasCurrent{0.03};
    closed.c_a = 1.3;
    for (const CircuitParams& q : {p, closed}) {
        const ModeTransform m = compute_transform(q);
        for (int i = 0; i < 50; ++i) {
            const double a = x(rng), b = x(rng);
            const double h = 1e-5;
            const Eigen::Vector2d g = potential_gradient(q, m, a, b);
            const double ga = (potential_on_grid(q, m, a + h, b) - potential_on_grid(q, m, a - h, b)) / (2 * h);
            const double gb = (potential_on_grid(q, m, a, b + h) - potential_on_grid(q, m, a, b - h)) / (2 * h);
            CHECK(std::abs(g.x() - ga) <= 1e-6 * std::max(1.0, std::abs(ga)));
            CHECK(std::abs(g.y() - gb) <= 1e-6 * std::max(1.0, std::abs(gb)));
        }
    }
}

TEST_CASE("closed_a domain centre is a stationary point") {
    CircuitParams p;
    p.design = Design::ClosedA;
    p.bias = BiasCurrent{0.04};
    const ModeTransform t = compute_transform(p);
    const Eigen::Vector2d c = domain_center(p, t);
    CHECK(potential_gradient(p, t, c.x(), c.y()).norm() < 1e-10);
    p.bias = BiasCurrent{0.0};
    CHECK(domain_center(p, t).norm() < 1e-14);
}

TEST_CASE("builder contract errors") {
    CircuitParams closed;
    closed.design = Design::ClosedA;
    closed.bias = BiasCurrent{0.0};
    CHECK(kind_of([&] { build_charge_basis(closed, {8}); }) == ErrorKind::UnsupportedDesign);
    CHECK(kind_of([&] { build_charge_basis(CircuitParams{}, {0}); }) == ErrorKind::InvalidArgument);

    FluxGridSpec coarse;
    coarse.points_a = 21;
    CHECK(kind_of([&] { build_flux_grid(CircuitParams{}, coarse); }) == ErrorKind::GridTooCoarse);
    FluxGridSpec even;
    even.points_b = 100;
    CHECK(kind_of([&] { build_flux_grid(CircuitParams{}, even); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("grid matrix is symmetric and the single cell is smaller than the box") {
    FluxGridSpec spec;
    spec.points_a = spec.points_b = 61;
    const HamiltonianMatrix cell = build_flux_grid(CircuitParams{}, spec);
    spec.domain = GridDomain::FullBox;
    const HamiltonianMatrix box = build_flux_grid(CircuitParams{}, spec);
    CHECK(box.dimension == 61 * 61);
    CHECK(cell.dimension < box.dimension);
    const auto& m = std::get<RealSparse>(cell.entries);
    CHECK((Eigen::MatrixXd(m) - Eigen::MatrixXd(m).transpose()).norm() == 0.0);
}
