#include "torq/observables.hpp"

#include "torq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace torq {

Operator current_operator(const HamiltonianMatrix& h) {
    const CircuitParams& p = h.params;
    const double offset = p.design == Design::ClosedA ? std::numbers::pi : 2.0 * std::numbers::pi * reduced_flux(p);

    if (h.kind == BasisKind::FluxGrid) {
        const GridLayout& g = *h.grid;
        const ModeTransform t = compute_transform(p);
        RealSparse op(h.dimension, h.dimension);
        op.reserve(Eigen::VectorXi::Constant(h.dimension, 1));
        for (int s = 0; s < h.dimension; ++s) {
            const Eigen::Vector2d phi = t.node_phases(g.x_a(s), g.x_b(s));
            op.insert(s, s) = p.e_f * std::sin(offset + phi.x() - phi.y());
        }
        op.makeCompressed();
        return op;
    }

    // sin(theta) = (e^{i theta} - e^{-i theta}) / 2i, with e^{i theta} the loop
    // hop |n_a + 1, n_b - 1><n_a, n_b| times e^{i 2 pi f}.
    using Complex = std::complex<double>;
    const auto& spec = std::get<ChargeBasisSpec>(h.discretization);
    const int n = spec.n_max;
    const Complex raise = p.e_f * std::polar(1.0, offset) / Complex(0.0, 2.0);
    std::vector<Eigen::Triplet<Complex>> triplets;
    for (int na = -n; na < n; ++na) {
        for (int nb = -n + 1; nb <= n; ++nb) {
            const int from = charge_index(spec, na, nb);
            const int to = charge_index(spec, na + 1, nb - 1);
            triplets.emplace_back(to, from, raise);
            triplets.emplace_back(from, to, std::conj(raise));
        }
    }
    ComplexSparse op(h.dimension, h.dimension);
    op.setFromTriplets(triplets.begin(), triplets.end());
    op.prune(Complex(0.0));
    return op;
}

double expectation(const Operator& op, const Eigen::VectorXcd& state) {
    return std::visit(
        [&](const auto& m) -> double {
            const Eigen::VectorXcd applied = m.template cast<std::complex<double>>() * state;
            return std::real(state.dot(applied));
        },
        op);
}

PointSolution solve_point(const CircuitParams& p, const Discretization& d, int k, const SolverOptions& options) {
    const HamiltonianMatrix h = build(p, d);
    const Spectrum s = solve_lowest(h, k, options);
    const Operator current = current_operator(h);

    PointSolution out;
    out.bias = p.design == Design::ClosedA ? bias_current(p) : reduced_flux(p);
    out.energies = s.energies;
    out.residuals = s.residuals;
    out.degenerate = s.degenerate;
    for (int n = 0; n < s.size(); ++n) {
        out.currents.push_back(expectation(current, s.states.col(n)));
    }
    if (h.grid && p.design == Design::ClosedA) {
        out.well_margin = h.grid->boundary_potential_min - s.energies.back();
    }
    return out;
}

double circulating_current(const Discretization& d, const CircuitParams& p, double f, int state_index,
                           const SolverOptions& options) {
    if (state_index != 0 && state_index != 1) {
        throw Error(ErrorKind::InvalidArgument, "state_index", "state_index must be 0 or 1");
    }
    CircuitParams q = p;
    if (q.design == Design::OpenB) {
        q.bias = ReducedFlux{f};
    }
    return solve_point(q, d, 2, options).currents[state_index];
}

int doublet_partner(std::span<const double> currents) {
    // At the symmetry point both doublet currents are zero up to round-off and
    // their signs carry no information.
    if (currents.size() < 2 || std::abs(currents[0]) < kVanishingCurrent) {
        return 1;
    }
    for (std::size_t n = 1; n < currents.size(); ++n) {
        if (currents[n] * currents[0] < 0.0) {
            return static_cast<int>(n);
        }
    }
    return -1;
}

double QubitParams::epsilon_at(double x) const {
    if (f.empty() || x < f.front() || x > f.back()) {
        throw Error(ErrorKind::InvalidArgument, "f", "reduced flux outside the tabulated bias range");
    }
    const auto hi = std::lower_bound(f.begin(), f.end(), x);
    const auto j = static_cast<std::size_t>(hi - f.begin());
    if (*hi == x || j == 0) {
        return epsilon[j];
    }
    const double w = (x - f[j - 1]) / (f[j] - f[j - 1]);
    return (1.0 - w) * epsilon[j - 1] + w * epsilon[j];
}

QubitParams extract_qubit_params(std::span<const DoubletSample> sweep, double fit_window) {
    if (sweep.size() < 3) {
        throw Error(ErrorKind::NoBracket, "f_grid", "need at least three sweep points to bracket the gap minimum");
    }
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (!(sweep[i].f > sweep[i - 1].f)) {
            throw Error(ErrorKind::InvalidArgument, "f_grid", "sweep must be strictly ascending in f");
        }
    }

    const auto gap = [&](std::size_t i) { return sweep[i].e1 - sweep[i].e0; };
    std::size_t imin = 0;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (gap(i) < gap(imin)) {
            imin = i;
        }
    }
    if (imin == 0 || imin + 1 == sweep.size()) {
        throw Error(ErrorKind::NoBracket, "f_grid", "gap minimum lies at an end of the sweep");
    }

    QubitParams q;
    // Parabola through (f, gap^2) at imin-1, imin, imin+1.
    const double x0 = sweep[imin - 1].f, x1 = sweep[imin].f, x2 = sweep[imin + 1].f;
    const double y0 = gap(imin - 1) * gap(imin - 1), y1 = gap(imin) * gap(imin), y2 = gap(imin + 1) * gap(imin + 1);
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    double delta_sq = y1;
    q.f_degeneracy = x1;
    if (curvature > 0.0) {
        // y = y0 + d01 (x - x0) + curvature (x - x0)(x - x1)
        const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
        if (xv > x0 && xv < x2) {
            // Snap to the sample when the vertex differs from it only by round-off.
            q.f_degeneracy = std::abs(xv - x1) <= 1e-9 * (x2 - x0) ? x1 : xv;
            delta_sq = q.f_degeneracy == x1 ? y1 : y0 + d01 * (xv - x0) + curvature * (xv - x0) * (xv - x1);
        }
    }
    q.delta = std::sqrt(std::max(delta_sq, 0.0));

    for (const auto& s : sweep) {
        const double g = s.e1 - s.e0;
        const double magnitude = std::sqrt(std::max(g * g - q.delta * q.delta, 0.0));
        const double sign = s.f > q.f_degeneracy ? 1.0 : (s.f < q.f_degeneracy ? -1.0 : 0.0);
        q.f.push_back(s.f);
        q.epsilon.push_back(sign * magnitude);
    }
    const auto at = std::lower_bound(q.f.begin(), q.f.end(), q.f_degeneracy);
    if (at == q.f.end() || *at != q.f_degeneracy) {
        const auto pos = at - q.f.begin();
        q.f.insert(at, q.f_degeneracy);
        q.epsilon.insert(q.epsilon.begin() + pos, 0.0);
    } else {
        q.epsilon[static_cast<std::size_t>(at - q.f.begin())] = 0.0;
    }

    // Slope through the origin over the fit window; widen to the nearest four
    // samples if the window holds fewer than two.
    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < q.f.size(); ++i) {
        const double d = q.f[i] - q.f_degeneracy;
        if (d != 0.0 && std::abs(d) <= fit_window) {
            window.push_back(i);
        }
    }
    if (window.size() < 2) {
        window.clear();
        std::vector<std::size_t> order(q.f.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(q.f[a] - q.f_degeneracy) < std::abs(q.f[b] - q.f_degeneracy);
        });
        for (const std::size_t i : order) {
            if (q.f[i] != q.f_degeneracy && window.size() < 4) {
                window.push_back(i);
            }
        }
    }
    double num = 0.0, den = 0.0;
    for (const std::size_t i : window) {
        const double d = q.f[i] - q.f_degeneracy;
        num += q.epsilon[i] * d;
        den += d * d;
    }
    q.slope = num / den;
    q.i_p = std::abs(q.slope) / (4.0 * std::numbers::pi);

    // |I_0| away from the avoided crossing (|epsilon| >= 10 Delta), preferring
    // samples close to the degeneracy point.
    std::vector<double> near, far;
    for (const auto& s : sweep) {
        const double eps = std::abs(q.epsilon_at(s.f));
        if (eps < 10.0 * q.delta) {
            continue;
        }
        far.push_back(std::abs(s.i0));
        if (std::abs(s.f - q.f_degeneracy) <= 4.0 * fit_window) {
            near.push_back(std::abs(s.i0));
        }
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    if (!near.empty()) {
        q.i_p_plateau = median(near);
    } else if (!far.empty()) {
        q.i_p_plateau = median(far);
    } else {
        q.i_p_plateau = std::numeric_limits<double>::quiet_NaN();
    }
    q.plateau_consistent = std::abs(q.i_p_plateau - q.i_p) <= 0.05 * q.i_p;
    return q;
}

Eigen::Vector2d TwoLevelHamiltonian::energies() const {
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(matrix).eigenvalues();
}

Eigen::Matrix2d TwoLevelHamiltonian::states() const {
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(matrix).eigenvectors();
}

TwoLevelHamiltonian two_level_hamiltonian(double delta, double epsilon) {
    TwoLevelHamiltonian h;
    h.matrix << -0.5 * epsilon, -0.5 * delta,
        -0.5 * delta, 0.5 * epsilon;
    return h;
}

TwoLevelHamiltonian two_level_hamiltonian(const QubitParams& q, double f) {
    return two_level_hamiltonian(q.delta, q.epsilon_at(f));
}

}  // namespace torq
