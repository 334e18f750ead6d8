#include "torq/hamiltonian.hpp"

#include "torq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace torq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Phase offset of the loop junction: 2 pi f (open_b) or the pi-junction's pi.
double loop_offset(const CircuitParams& p) {
    return p.design == Design::ClosedA ? std::numbers::pi : kTwoPi * reduced_flux(p);
}

double potential_at_nodes(const CircuitParams& p, double phi_a, double phi_b) {
    const double loop = phi_a - phi_b;
    double u = -p.e_a * std::cos(phi_a) - p.e_b * std::cos(phi_b) - p.e_f * std::cos(loop_offset(p) + loop);
    if (p.design == Design::ClosedA) {
        u -= bias_current(p) * loop;
    }
    return u;
}

Eigen::Vector2d gradient_at_nodes(const CircuitParams& p, double phi_a, double phi_b) {
    const double loop_sin = p.e_f * std::sin(loop_offset(p) + phi_a - phi_b);
    const double tilt = p.design == Design::ClosedA ? bias_current(p) : 0.0;
    return {p.e_a * std::sin(phi_a) + loop_sin - tilt, p.e_b * std::sin(phi_b) - loop_sin + tilt};
}

Eigen::Matrix2d hessian_at_nodes(const CircuitParams& p, double phi_a, double phi_b) {
    const double loop_cos = p.e_f * std::cos(loop_offset(p) + phi_a - phi_b);
    Eigen::Matrix2d h;
    h << p.e_a * std::cos(phi_a) + loop_cos, -loop_cos,
        -loop_cos, p.e_b * std::cos(phi_b) + loop_cos;
    return h;
}

void check_grid_spec(const FluxGridSpec& s) {
    const std::pair<const char*, int> axes[] = {{"points_a", s.points_a}, {"points_b", s.points_b}};
    for (const auto& [name, n] : axes) {
        if (n < 31) {
            throw Error(ErrorKind::GridTooCoarse, name,
                        std::string(name) + " must be >= 31, got " + std::to_string(n));
        }
        if (n % 2 == 0) {
            throw Error(ErrorKind::InvalidArgument, name, std::string(name) + " must be odd");
        }
    }
    if (!(s.half_width_a > 0.0) || !(s.half_width_b > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "half_width", "flux-grid half-widths must be > 0");
    }
}

}  // namespace

std::string describe(const Discretization& d) {
    std::ostringstream os;
    if (const auto* c = std::get_if<ChargeBasisSpec>(&d)) {
        os << "charge(n_max=" << c->n_max << ")";
    } else {
        const auto& g = std::get<FluxGridSpec>(d);
        os.precision(17);
        os << "flux_grid(" << g.points_a << "x" << g.points_b << ", half_width=" << g.half_width_a << "/"
           << g.half_width_b << ", " << (g.stencil == Stencil::FivePoint ? "five_point" : "three_point") << ", "
           << (g.domain == GridDomain::SingleCell ? "single_cell" : "full_box") << ")";
    }
    return os.str();
}

double potential_on_grid(const CircuitParams& p, const ModeTransform& t, double x_a, double x_b) {
    const Eigen::Vector2d phi = t.node_phases(x_a, x_b);
    return potential_at_nodes(p, phi.x(), phi.y());
}

Eigen::Vector2d potential_gradient(const CircuitParams& p, const ModeTransform& t, double x_a, double x_b) {
    const Eigen::Vector2d phi = t.node_phases(x_a, x_b);
    // d phi / d x is the rotation matrix, so grad_x = R^T grad_phi.
    return t.rotation().transpose() * gradient_at_nodes(p, phi.x(), phi.y());
}

Eigen::Vector2d domain_center(const CircuitParams& p, const ModeTransform& t) {
    if (p.design == Design::OpenB || bias_current(p) == 0.0) {
        return Eigen::Vector2d::Zero();
    }
    Eigen::Vector2d phi = Eigen::Vector2d::Zero();
    for (int iter = 0; iter < 50; ++iter) {
        const Eigen::Matrix2d h = hessian_at_nodes(p, phi.x(), phi.y());
        if (std::abs(h.determinant()) < 1e-14) {
            break;
        }
        const Eigen::Vector2d step = h.inverse() * (gradient_at_nodes(p, phi.x(), phi.y()));
        phi -= step;
        if (phi.norm() > std::numbers::pi) {
            return Eigen::Vector2d::Zero();  // tilt too strong for a stationary point near the origin
        }
        if (step.norm() < 1e-14) {
            break;
        }
    }
    return t.rotation().transpose() * phi;
}

HamiltonianMatrix build_charge_basis(const CircuitParams& p, const ChargeBasisSpec& spec) {
    validate_params(p);
    if (p.design != Design::OpenB) {
        throw Error(ErrorKind::UnsupportedDesign, "design",
                    "the charge basis needs a periodic potential; closed_a has a bias-current tilt");
    }
    if (spec.n_max < 1) {
        throw Error(ErrorKind::InvalidArgument, "n_max", "n_max must be >= 1");
    }

    using Complex = std::complex<double>;
    const int n = spec.n_max;
    const int dim = spec.dimension();

    // Exact 2x2 inverse of the capacitance matrix.
    const double det = p.c_a * p.c_b + p.c_f * (p.c_a + p.c_b);
    const double inv_aa = (p.c_b + p.c_f) / det;
    const double inv_bb = (p.c_a + p.c_f) / det;
    const double inv_ab = p.c_f / det;

    const Complex loop_hop = -0.5 * p.e_f * std::polar(1.0, kTwoPi * reduced_flux(p));

    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(dim) * 7);
    auto hop = [&](int from, int to, Complex value) {
        triplets.emplace_back(to, from, value);
        triplets.emplace_back(from, to, std::conj(value));
    };

    for (int na = -n; na <= n; ++na) {
        for (int nb = -n; nb <= n; ++nb) {
            const int i = charge_index(spec, na, nb);
            const double kinetic =
                p.e_c_ref_over_e_j * (inv_aa * na * na + 2.0 * inv_ab * na * nb + inv_bb * nb * nb);
            triplets.emplace_back(i, i, kinetic);
            if (na < n) {
                hop(i, charge_index(spec, na + 1, nb), -0.5 * p.e_a);
            }
            if (nb < n) {
                hop(i, charge_index(spec, na, nb + 1), -0.5 * p.e_b);
            }
            if (na < n && nb > -n) {
                hop(i, charge_index(spec, na + 1, nb - 1), loop_hop);
            }
        }
    }

    ComplexSparse h(dim, dim);
    h.setFromTriplets(triplets.begin(), triplets.end());
    h.prune(Complex(0.0));

    HamiltonianMatrix out;
    out.dimension = dim;
    out.entries = std::move(h);
    out.kind = BasisKind::Charge;
    out.discretization = spec;
    out.params = p;
    return out;
}

HamiltonianMatrix build_flux_grid(const CircuitParams& p, const FluxGridSpec& spec) {
    validate_params(p);
    check_grid_spec(spec);

    const ModeTransform t = compute_transform(p);
    const ChargingEnergies ec = charging_energies(p);

    GridLayout layout;
    layout.spec = spec;
    layout.step_a = 2.0 * spec.half_width_a / (spec.points_a - 1);
    layout.step_b = 2.0 * spec.half_width_b / (spec.points_b - 1);
    layout.center = domain_center(p, t);
    const Eigen::Vector2d center_phi = t.node_phases(layout.center.x(), layout.center.y());

    // Map rectangular grid points to unknowns.
    std::vector<int> basis(static_cast<std::size_t>(spec.points_a) * spec.points_b, -1);
    auto flat = [&](int ia, int ib) { return static_cast<std::size_t>(ia) * spec.points_b + ib; };
    const double cell_tol = 1e-12;
    for (int ia = 0; ia < spec.points_a; ++ia) {
        for (int ib = 0; ib < spec.points_b; ++ib) {
            const double xa = layout.center.x() - spec.half_width_a + layout.step_a * ia;
            const double xb = layout.center.y() - spec.half_width_b + layout.step_b * ib;
            if (spec.domain == GridDomain::SingleCell) {
                const Eigen::Vector2d d = t.node_phases(xa, xb) - center_phi;
                if (std::abs(d.x()) > std::numbers::pi + cell_tol || std::abs(d.y()) > std::numbers::pi + cell_tol) {
                    continue;
                }
            }
            basis[flat(ia, ib)] = static_cast<int>(layout.index_a.size());
            layout.index_a.push_back(ia);
            layout.index_b.push_back(ib);
        }
    }
    const int dim = static_cast<int>(layout.index_a.size());

    auto unknown = [&](int ia, int ib) -> int {
        if (ia < 0 || ib < 0 || ia >= spec.points_a || ib >= spec.points_b) {
            return -1;
        }
        return basis[flat(ia, ib)];
    };

    // Coefficients of -d^2/dx^2 by neighbour distance.
    std::vector<double> stencil;
    if (spec.stencil == Stencil::ThreePoint) {
        stencil = {2.0, -1.0};
    } else {
        stencil = {30.0 / 12.0, -16.0 / 12.0, 1.0 / 12.0};
    }
    const double scale_a = ec.mode_a / (layout.step_a * layout.step_a);
    const double scale_b = ec.mode_b / (layout.step_b * layout.step_b);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(dim) * (4 * stencil.size() - 3));
    layout.potential_min = std::numeric_limits<double>::infinity();
    layout.boundary_potential_min = std::numeric_limits<double>::infinity();

    for (int s = 0; s < dim; ++s) {
        const int ia = layout.index_a[s];
        const int ib = layout.index_b[s];
        const double u = potential_on_grid(p, t, layout.x_a(s), layout.x_b(s));
        layout.potential_min = std::min(layout.potential_min, u);
        const bool at_wall = unknown(ia + 1, ib) < 0 || unknown(ia - 1, ib) < 0 || unknown(ia, ib + 1) < 0 ||
                             unknown(ia, ib - 1) < 0;
        if (at_wall) {
            layout.boundary_potential_min = std::min(layout.boundary_potential_min, u);
        }

        triplets.emplace_back(s, s, u + stencil[0] * (scale_a + scale_b));
        for (int d = 1; d < static_cast<int>(stencil.size()); ++d) {
            for (const int sign : {-1, 1}) {
                if (const int j = unknown(ia + sign * d, ib); j >= 0) {
                    triplets.emplace_back(s, j, stencil[d] * scale_a);
                }
                if (const int j = unknown(ia, ib + sign * d); j >= 0) {
                    triplets.emplace_back(s, j, stencil[d] * scale_b);
                }
            }
        }
    }

    RealSparse h(dim, dim);
    h.setFromTriplets(triplets.begin(), triplets.end());

    HamiltonianMatrix out;
    out.dimension = dim;
    out.entries = std::move(h);
    out.kind = BasisKind::FluxGrid;
    out.discretization = spec;
    out.grid = std::move(layout);
    out.params = p;
    return out;
}

HamiltonianMatrix build(const CircuitParams& p, const Discretization& d) {
    if (const auto* c = std::get_if<ChargeBasisSpec>(&d)) {
        return build_charge_basis(p, *c);
    }
    return build_flux_grid(p, std::get<FluxGridSpec>(d));
}

}  // namespace torq
