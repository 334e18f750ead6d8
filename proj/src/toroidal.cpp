#include "torq/toroidal.hpp"

#include "torq/error.hpp"

#include <cmath>
#include <numbers>

namespace torq {

namespace {

constexpr double kPi = std::numbers::pi;

double mu0_eps0() { return kSi.vacuum_permeability * kSi.vacuum_permittivity; }

double gaussian_norm() { return std::sqrt(4.0 * kPi * kSi.vacuum_permittivity); }

}  // namespace

void validate_geometry(const SolenoidGeometry& g) {
    if (!(g.n_turns >= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "n_turns", "n_turns must be >= 1");
    }
    if (!(g.tube_radius > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "tube_radius", "tube_radius must be > 0");
    }
    if (!(g.torus_diameter > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "torus_diameter", "torus_diameter must be > 0");
    }
    if (std::abs(g.axis.norm() - 1.0) > 1e-12) {
        throw Error(ErrorKind::InvalidArgument, "axis", "axis must be a unit vector");
    }
}

ToroidalMoment solenoid_moment(const SolenoidGeometry& g) {
    validate_geometry(g);
    ToroidalMoment m;
    m.j0 = g.n_turns * g.current * g.tube_radius * g.tube_radius * g.torus_diameter / (4.0 * kPi * gaussian_norm());
    m.magnitude = 2.0 * kPi * kPi * std::abs(m.j0);
    m.direction = m.j0 >= 0.0 ? Eigen::Vector3d(-g.axis) : g.axis;
    return m;
}

double solenoid_coupling(const ToroidalMoment& m, const Eigen::Vector3d& de_dt) {
    return -mu0_eps0() * gaussian_norm() * de_dt.dot(m.vector());
}

double solenoid_coupling_closed_form(const SolenoidGeometry& g, const Eigen::Vector3d& de_dt) {
    validate_geometry(g);
    return mu0_eps0() * kPi * g.n_turns * g.current * g.tube_radius * g.tube_radius * g.torus_diameter / 2.0 *
           de_dt.dot(g.axis);
}

double qubit_toroidal_moment(double v_eff, double current) {
    if (!(v_eff > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "v_eff", "v_eff must be > 0");
    }
    return v_eff * current / (4.0 * kPi * kPi * kPi);
}

double torus_effective_volume(double torus_diameter, double tube_radius) {
    return kPi * kPi * torus_diameter * tube_radius * tube_radius;
}

QubitToroidalCoupling QubitToroidalCoupling::from(double v_eff, double i_j) {
    if (!(v_eff > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "v_eff", "v_eff must be > 0");
    }
    QubitToroidalCoupling c;
    c.v_eff = v_eff;
    c.i_j = i_j;
    c.u_int_prefactor = mu0_eps0() * v_eff * i_j / (2.0 * kPi);
    c.lambda = c.u_int_prefactor / kSi.reduced_planck;
    return c;
}

FieldCoupling qubit_field_coupling(const QubitToroidalCoupling& c, double e_amplitude, double frequency, bool rms) {
    FieldCoupling out;
    out.de_dt = 2.0 * kPi * frequency * e_amplitude;
    if (rms) {
        out.de_dt /= std::numbers::sqrt2;
    }
    out.u_int = c.u_int_prefactor * out.de_dt;
    out.u_int_hz = out.u_int / kSi.planck;
    return out;
}

Eigen::Matrix2d sigma_z_coupling(const QubitParams&, const QubitToroidalCoupling& c, double de_dt) {
    const double u = c.u_int_prefactor * de_dt;
    Eigen::Matrix2d m;
    m << u, 0.0,
        0.0, -u;
    return m;
}

}  // namespace torq
