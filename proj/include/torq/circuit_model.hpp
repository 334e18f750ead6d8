#pragma once

// Two-node toroidal flux-qubit circuit: parameters, capacitance matrix and the
// normal-mode rotation that decouples the kinetic terms.
//
// Internal units are dimensionless:
//   capacitances      C_ref
//   energies          E_J
//   phases            x = 2*pi*Phi/Phi_0
//   charges           Cooper pairs (2e)
//   bias current      2*pi*E_J/Phi_0 (= I_c)
//   circulating curr. I_c

#include <Eigen/Dense>

#include <numbers>
#include <string_view>
#include <variant>

namespace torq {

/// CODATA 2018 SI values. e, h and c are exact; mu_0 is the measured value and
/// eps_0 is derived from it so that mu_0*eps_0 = 1/c^2 holds to rounding.
struct PhysicalConstants {
    double electron_charge;       // C
    double planck;                // J s
    double reduced_planck;        // J s
    double flux_quantum;          // Wb
    double speed_of_light;        // m/s
    double vacuum_permeability;   // H/m
    double vacuum_permittivity;   // F/m
};

inline constexpr PhysicalConstants kSi = [] {
    PhysicalConstants k{};
    k.electron_charge = 1.602176634e-19;
    k.planck = 6.62607015e-34;
    k.reduced_planck = k.planck / (2.0 * std::numbers::pi);
    k.flux_quantum = k.planck / (2.0 * k.electron_charge);
    k.speed_of_light = 299792458.0;
    k.vacuum_permeability = 1.25663706212e-6;
    k.vacuum_permittivity = 1.0 / (k.vacuum_permeability * k.speed_of_light * k.speed_of_light);
    return k;
}();

enum class Design {
    ClosedA,  // pi-junction loop, tuned by a bias current
    OpenB,    // gradiometric open torus, tuned by external flux
};

std::string_view to_string(Design design);

struct ReducedFlux {
    double value = 0.0;  // Phi_ext / Phi_0
    bool operator==(const ReducedFlux&) const = default;
};

struct BiasCurrent {
    double value = 0.0;  // units of I_c = 2*pi*E_J/Phi_0
    bool operator==(const BiasCurrent&) const = default;
};

using Bias = std::variant<ReducedFlux, BiasCurrent>;

struct CircuitParams {
    double c_a = 1.0;
    double c_b = 1.0;
    double c_f = 0.5;
    double e_a = 1.0;
    double e_b = 1.0;
    double e_f = 0.8;
    Design design = Design::OpenB;
    Bias bias = ReducedFlux{0.5};
    /// (2e)^2 / (2 C_ref) in units of E_J.
    double e_c_ref_over_e_j = 1.0 / 40.0;

    bool operator==(const CircuitParams&) const = default;
};

/// Reduced flux of an OpenB circuit. For ClosedA this is the built-in half
/// flux quantum of the pi-junction.
double reduced_flux(const CircuitParams& p);
/// Bias current of a ClosedA circuit; zero for OpenB.
double bias_current(const CircuitParams& p);

/// Returns a copy with the bias replaced by `value`, interpreted as f for OpenB
/// and i_ext for ClosedA.
CircuitParams with_bias(CircuitParams p, double value);

/// Throws Error{NonPositiveCapacitance | NegativeJosephsonEnergy |
/// BiasDesignMismatch} naming the first offending field.
const CircuitParams& validate_params(const CircuitParams& raw);

/// [[c_a + c_f, -c_f], [-c_f, c_b + c_f]] in C_ref units.
Eigen::Matrix2d capacitance_matrix(const CircuitParams& p);

struct ModeTransform {
    double theta = 0.0;
    double cos_theta = 1.0;
    double sin_theta = 0.0;
    double delta_c = 0.0;
    double c_bar = 0.0;
    double mass_a = 0.0;  // c_bar + delta_c
    double mass_b = 0.0;  // c_bar - delta_c

    /// Columns are the node-space directions of psi_A and psi_B:
    /// (Phi_A, Phi_B)^T = rotation() * (psi_A, psi_B)^T.
    Eigen::Matrix2d rotation() const;

    /// Node phases for a point given in mode coordinates.
    Eigen::Vector2d node_phases(double x_a, double x_b) const;
};

/// Normal-mode rotation with cos/sin in [0, 1] (theta in [0, pi/2]).
/// When delta_c == 0 the masses are equal and theta is fixed to 0.
ModeTransform compute_transform(const CircuitParams& p);

struct ModeMomenta {
    double p_a = 0.0;
    double p_b = 0.0;
};

struct NodeCharges {
    double q_a = 0.0;
    double q_b = 0.0;
};

NodeCharges node_charges(ModeMomenta momenta, const ModeTransform& t);

struct ChargingEnergies {
    double mode_a = 0.0;  // E_J
    double mode_b = 0.0;  // E_J
};

/// e_c_ref_over_e_j / mass for each mode; the prefactors of p^2 in the
/// decoupled Hamiltonian.
ChargingEnergies charging_energies(const CircuitParams& p);

}  // namespace torq
