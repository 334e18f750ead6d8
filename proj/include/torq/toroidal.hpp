#pragma once

// SI toroidal-moment formulas for a wound toroidal solenoid and for the qubit
// loop, and the coupling of either to a time-varying electric field.

#include "torq/observables.hpp"

#include <Eigen/Dense>

namespace torq {

struct SolenoidGeometry {
    double n_turns = 1.0;
    double current = 0.0;         // A, per turn
    double tube_radius = 0.0;     // m
    double torus_diameter = 0.0;  // m
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
};

/// Throws InvalidArgument naming the field when N < 1, R or D <= 0, or the
/// axis is not a unit vector (1e-12).
void validate_geometry(const SolenoidGeometry& g);

/// Toroidal moment in the Gaussian-style normalization: the magnitude carries
/// a factor (4 pi eps0)^(-1/2), which the coupling multiplies back out.
struct ToroidalMoment {
    double j0 = 0.0;         // N I R^2 D / (4 pi (4 pi eps0)^(1/2))
    double magnitude = 0.0;  // 2 pi^2 |j0|
    /// Unit vector of the moment: -axis for j0 > 0.
    Eigen::Vector3d direction = -Eigen::Vector3d::UnitZ();

    Eigen::Vector3d vector() const { return magnitude * direction; }
};

ToroidalMoment solenoid_moment(const SolenoidGeometry& g);

/// U = -(mu0 eps0)(4 pi eps0)^(1/2) dE/dt . t, in J.
double solenoid_coupling(const ToroidalMoment& m, const Eigen::Vector3d& de_dt);

/// mu0 eps0 pi N I R^2 D / 2 (dE/dt . n): the same energy without the
/// intermediate moment.
double solenoid_coupling_closed_form(const SolenoidGeometry& g, const Eigen::Vector3d& de_dt);

/// v_eff i / (4 pi^3).
double qubit_toroidal_moment(double v_eff, double current);

/// pi^2 D R^2.
double torus_effective_volume(double torus_diameter, double tube_radius);

struct QubitToroidalCoupling {
    double v_eff = 0.0;            // m^3
    double i_j = 0.0;              // A
    double lambda = 0.0;           // s m / V: u_int_prefactor / hbar
    double u_int_prefactor = 0.0;  // J per V m^-1 s^-1

    static QubitToroidalCoupling from(double v_eff, double i_j);
};

struct FieldCoupling {
    double de_dt = 0.0;       // V m^-1 s^-1
    double u_int = 0.0;       // J
    double u_int_hz = 0.0;    // u_int / h
};

/// Energy for a sinusoidal field of amplitude `e_amplitude` (V/m) at
/// `frequency` (Hz). Uses the peak rate 2 pi nu E0 unless `rms` is set, in
/// which case the rate is divided by sqrt(2).
FieldCoupling qubit_field_coupling(const QubitToroidalCoupling& c, double e_amplitude, double frequency,
                                   bool rms = false);

/// diag(+u, -u) with u = prefactor * dE/dt, in the |L>, |R> basis (J).
Eigen::Matrix2d sigma_z_coupling(const QubitParams& q, const QubitToroidalCoupling& c, double de_dt);

/// Values quoted in the literature for V_eff ~ (10 um)^3, I ~ 1 uA.
inline constexpr double kQuotedPrefactor = 2e-38;     // J per V m^-1 s^-1
inline constexpr double kQuotedFieldEnergy = 1.5e-23; // J, at 100 kV/m and 100 GHz
inline constexpr double kQuotedFieldFrequency = 20e9; // Hz, the same energy over h

}  // namespace torq
