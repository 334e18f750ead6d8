#pragma once

#include "torq/circuit_model.hpp"
#include "torq/hamiltonian.hpp"
#include "torq/spectrum.hpp"

#include <Eigen/Dense>

#include <span>
#include <variant>
#include <vector>

namespace torq {

using Operator = std::variant<RealSparse, ComplexSparse>;

/// Circulating current through the loop junction in units of I_c:
///   I = e_f sin(2 pi f + phi_A - phi_B) = (1 / 2 pi) dH/df      open_b
///   I = e_f sin(pi + phi_A - phi_B)                            closed_a
/// Positive current means positive dH/dPhi_ext. Diagonal on the flux grid; in
/// the charge basis the sine is the anti-Hermitian part of the loop hop.
Operator current_operator(const HamiltonianMatrix& h);

/// <state| op |state> for a normalized state (imaginary part discarded).
double expectation(const Operator& op, const Eigen::VectorXcd& state);

/// Energies and circulating currents of the lowest `k` states at one bias point.
struct PointSolution {
    double bias = 0.0;
    std::vector<double> energies;
    std::vector<double> currents;
    std::vector<double> residuals;
    bool degenerate = false;
    /// closed_a flux grid only: lowest wall potential minus the highest kept
    /// level. Positive when every kept state is bound below the walls.
    double well_margin = 0.0;
};

PointSolution solve_point(const CircuitParams& p, const Discretization& d, int k, const SolverOptions& options = {});

/// Expectation of the current operator in eigenstate `state_index` (0 or 1) at
/// reduced flux `f`.
double circulating_current(const Discretization& d, const CircuitParams& p, double f, int state_index,
                           const SolverOptions& options = {});

/// Index of the level forming the qubit doublet with the ground state: the
/// lowest excited level whose current opposes the ground-state current. Away
/// from the degeneracy point an intra-well excitation can lie below it. Returns
/// 1 when the ground current vanishes (|I_0| < kVanishingCurrent) and -1 when
/// none of the solved levels carries an opposing current.
inline constexpr double kVanishingCurrent = 1e-6;
int doublet_partner(std::span<const double> currents);

struct DoubletSample {
    double f = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;  // upper doublet level
    double i0 = 0.0;
};

struct QubitParams {
    double delta = 0.0;         // tunnelling splitting, E_J / hbar
    double f_degeneracy = 0.0;  // reduced flux of the minimum gap
    double slope = 0.0;         // d epsilon / d f near the degeneracy point
    double i_p = 0.0;           // persistent current from the slope, I_c
    double i_p_plateau = 0.0;   // median |I_0| outside the avoided crossing, I_c
    bool plateau_consistent = false;
    std::vector<double> f;        // ascending, includes (f_degeneracy, 0)
    std::vector<double> epsilon;  // signed bias, positive above f_degeneracy

    /// Linear interpolation of the tabulated bias. Throws InvalidArgument
    /// outside the sweep.
    double epsilon_at(double f) const;
};

/// Two-level reduction of a sweep bracketing the gap minimum.
///  - f_degeneracy and Delta from the parabola through gap^2 at the three
///    samples around the minimum (exact for a two-level gap).
///  - epsilon = sign(f - f_deg) sqrt(gap^2 - Delta^2).
///  - slope from a least-squares line through the origin over
///    |f - f_deg| <= fit_window; i_p = |slope| / (4 pi).
/// Throws NoBracket when the smallest gap sits at an end of the sweep.
QubitParams extract_qubit_params(std::span<const DoubletSample> sweep, double fit_window = 0.005);

/// -(1/2)(Delta sigma_x + epsilon sigma_z) in the {|L>, |R>} basis, E_J.
struct TwoLevelHamiltonian {
    Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();

    Eigen::Vector2d energies() const;
    /// Columns are eigenvectors, ground state first.
    Eigen::Matrix2d states() const;
};

TwoLevelHamiltonian two_level_hamiltonian(double delta, double epsilon);
TwoLevelHamiltonian two_level_hamiltonian(const QubitParams& q, double f);

}  // namespace torq
