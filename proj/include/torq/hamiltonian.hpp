#pragma once

// Quantized two-mode Hamiltonian in two independent discretizations.
//
// Charge basis: states |n_A, n_B> of Cooper-pair number on each node,
// |n| <= n_max. Kinetic energy uses the exact inverse capacitance matrix;
// each Josephson cosine is a nearest-neighbour hop, the loop junction
// carrying the flux phase exp(i 2 pi f). Only the flux-biased design is
// periodic and therefore representable here.
//
// Flux grid: finite differences in the decoupled mode coordinates
// (x_A, x_B), so the kinetic operator has no mixed derivative. Points outside
// the grid (and, for the single-cell domain, outside one 2*pi node-phase cell)
// are hard walls.

#include "torq/circuit_model.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace torq {

using RealSparse = Eigen::SparseMatrix<double>;
using ComplexSparse = Eigen::SparseMatrix<std::complex<double>>;

struct ChargeBasisSpec {
    int n_max = 8;

    int states_per_node() const { return 2 * n_max + 1; }
    int dimension() const { return states_per_node() * states_per_node(); }
    bool operator==(const ChargeBasisSpec&) const = default;
};

enum class Stencil {
    ThreePoint,  // second order
    FivePoint,   // fourth order
};

enum class GridDomain {
    /// Only points within one 2*pi cell of node-phase space around the domain
    /// centre. Node phases are compact, so periodic images of the wells are the
    /// same physical state and must not be counted twice.
    SingleCell,
    /// The whole rectangular grid. Contains several periodic images of the
    /// potential when the half-widths exceed pi.
    FullBox,
};

struct FluxGridSpec {
    double half_width_a = 3.0 * std::numbers::pi;
    double half_width_b = 3.0 * std::numbers::pi;
    int points_a = 201;
    int points_b = 201;
    Stencil stencil = Stencil::FivePoint;
    GridDomain domain = GridDomain::SingleCell;

    bool operator==(const FluxGridSpec&) const = default;
};

using Discretization = std::variant<ChargeBasisSpec, FluxGridSpec>;

std::string describe(const Discretization& d);

enum class BasisKind { Charge, FluxGrid };

/// Flux-grid bookkeeping: which rectangular grid points are unknowns.
struct GridLayout {
    FluxGridSpec spec;
    double step_a = 0.0;
    double step_b = 0.0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();  // mode coordinates
    std::vector<int> index_a;  // per basis state
    std::vector<int> index_b;
    /// Lowest potential among points adjacent to a wall, and over the domain.
    /// Their difference bounds how deep a state can sit before it feels the walls.
    double boundary_potential_min = 0.0;
    double potential_min = 0.0;

    double x_a(int state) const { return center.x() - spec.half_width_a + step_a * index_a[state]; }
    double x_b(int state) const { return center.y() - spec.half_width_b + step_b * index_b[state]; }
};

struct HamiltonianMatrix {
    int dimension = 0;
    /// Real symmetric for the flux grid, complex Hermitian for the charge basis.
    std::variant<RealSparse, ComplexSparse> entries;
    BasisKind kind = BasisKind::Charge;
    Discretization discretization;
    std::optional<GridLayout> grid;
    CircuitParams params;

    bool is_complex() const { return std::holds_alternative<ComplexSparse>(entries); }
};

/// Charge-basis index of |n_a, n_b>.
inline int charge_index(const ChargeBasisSpec& s, int n_a, int n_b) {
    return (n_a + s.n_max) * s.states_per_node() + (n_b + s.n_max);
}

/// Throws UnsupportedDesign for ClosedA and InvalidArgument for n_max < 1.
HamiltonianMatrix build_charge_basis(const CircuitParams& p, const ChargeBasisSpec& spec);

/// Throws GridTooCoarse for fewer than 31 points per axis and InvalidArgument
/// for even point counts or non-positive half-widths.
HamiltonianMatrix build_flux_grid(const CircuitParams& p, const FluxGridSpec& spec);

HamiltonianMatrix build(const CircuitParams& p, const Discretization& d);

/// Potential energy (E_J) at mode coordinates (x_a, x_b):
///   -e_a cos(phi_A) - e_b cos(phi_B) - e_f cos(2 pi f + phi_A - phi_B)        open_b
///   -e_a cos(phi_A) - e_b cos(phi_B) - e_f cos(pi + phi_A - phi_B)
///       - i_ext (phi_A - phi_B)                                               closed_a
double potential_on_grid(const CircuitParams& p, const ModeTransform& t, double x_a, double x_b);

/// Analytic gradient of `potential_on_grid` with respect to (x_a, x_b).
Eigen::Vector2d potential_gradient(const CircuitParams& p, const ModeTransform& t, double x_a, double x_b);

/// Mode-coordinate centre of the flux-grid domain. The origin for open_b; for
/// closed_a the stationary point of the tilted potential reached by Newton
/// iteration from the origin, which is the origin itself at zero bias current.
Eigen::Vector2d domain_center(const CircuitParams& p, const ModeTransform& t);

}  // namespace torq
