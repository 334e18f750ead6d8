#include "torq/circuit_model.hpp"

#include "torq/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace torq {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonPositiveCapacitance: return "NonPositiveCapacitance";
        case ErrorKind::NegativeJosephsonEnergy: return "NegativeJosephsonEnergy";
        case ErrorKind::BiasDesignMismatch: return "BiasDesignMismatch";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::UnsupportedDesign: return "UnsupportedDesign";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::NoBracket: return "NoBracket";
        case ErrorKind::InvalidRealization: return "InvalidRealization";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

std::string_view to_string(Design design) {
    return design == Design::ClosedA ? "closed_a" : "open_b";
}

double reduced_flux(const CircuitParams& p) {
    if (p.design == Design::ClosedA) {
        return 0.5;
    }
    return std::get<ReducedFlux>(p.bias).value;
}

double bias_current(const CircuitParams& p) {
    if (const auto* i = std::get_if<BiasCurrent>(&p.bias)) {
        return i->value;
    }
    return 0.0;
}

CircuitParams with_bias(CircuitParams p, double value) {
    if (p.design == Design::ClosedA) {
        p.bias = BiasCurrent{value};
    } else {
        p.bias = ReducedFlux{value};
    }
    return p;
}

const CircuitParams& validate_params(const CircuitParams& raw) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    auto non_negative = [](double v) { return std::isfinite(v) && v >= 0.0; };

    // The node capacitances must be positive; c_f = 0 is the decoupled limit.
    const std::pair<const char*, double> caps[] = {{"c_a", raw.c_a}, {"c_b", raw.c_b}};
    for (const auto& [name, value] : caps) {
        if (!positive(value)) {
            throw Error(ErrorKind::NonPositiveCapacitance, name,
                        std::string(name) + " must be > 0, got " + std::to_string(value));
        }
    }
    if (!non_negative(raw.c_f)) {
        throw Error(ErrorKind::NonPositiveCapacitance, "c_f", "c_f must be >= 0, got " + std::to_string(raw.c_f));
    }
    const std::pair<const char*, double> energies[] = {{"e_a", raw.e_a}, {"e_b", raw.e_b}, {"e_f", raw.e_f}};
    for (const auto& [name, value] : energies) {
        if (!non_negative(value)) {
            throw Error(ErrorKind::NegativeJosephsonEnergy, name,
                        std::string(name) + " must be >= 0, got " + std::to_string(value));
        }
    }
    if (!positive(raw.e_c_ref_over_e_j)) {
        throw Error(ErrorKind::InvalidConfig, "e_c_ref_over_e_j", "e_c_ref_over_e_j must be > 0");
    }

    const bool flux_bias = std::holds_alternative<ReducedFlux>(raw.bias);
    if (raw.design == Design::OpenB && !flux_bias) {
        throw Error(ErrorKind::BiasDesignMismatch, "i_ext", "open_b design is biased by f, not i_ext");
    }
    if (raw.design == Design::ClosedA && flux_bias) {
        throw Error(ErrorKind::BiasDesignMismatch, "f", "closed_a design is biased by i_ext, not f");
    }
    const double bias = flux_bias ? std::get<ReducedFlux>(raw.bias).value : std::get<BiasCurrent>(raw.bias).value;
    if (!std::isfinite(bias)) {
        throw Error(ErrorKind::InvalidConfig, flux_bias ? "f" : "i_ext", "bias must be finite");
    }
    return raw;
}

Eigen::Matrix2d capacitance_matrix(const CircuitParams& p) {
    Eigen::Matrix2d c;
    c << p.c_a + p.c_f, -p.c_f,
        -p.c_f, p.c_b + p.c_f;
    return c;
}

Eigen::Matrix2d ModeTransform::rotation() const {
    Eigen::Matrix2d r;
    r << cos_theta, sin_theta,
        -sin_theta, cos_theta;
    return r;
}

Eigen::Vector2d ModeTransform::node_phases(double x_a, double x_b) const {
    return {x_a * cos_theta + x_b * sin_theta, -x_a * sin_theta + x_b * cos_theta};
}

ModeTransform compute_transform(const CircuitParams& p) {
    ModeTransform t;
    const double diff = p.c_a - p.c_b;
    t.delta_c = 0.5 * std::hypot(diff, 2.0 * p.c_f);
    t.c_bar = p.c_f + 0.5 * (p.c_a + p.c_b);
    t.mass_a = t.c_bar + t.delta_c;
    // det(C) / mass_a avoids the cancellation in c_bar - delta_c when c_f dominates.
    t.mass_b = (p.c_a * p.c_b + p.c_f * (p.c_a + p.c_b)) / t.mass_a;

    if (t.delta_c == 0.0) {
        return t;  // identity rotation
    }
    // |diff| <= 2 delta_c analytically; clamp absorbs rounding.
    const double ratio = std::clamp(diff / t.delta_c, -2.0, 2.0);
    t.cos_theta = 0.5 * std::sqrt(2.0 + ratio);
    t.sin_theta = 0.5 * std::sqrt(2.0 - ratio);
    t.theta = std::atan2(t.sin_theta, t.cos_theta);
    return t;
}

NodeCharges node_charges(ModeMomenta m, const ModeTransform& t) {
    return {m.p_a * t.cos_theta + m.p_b * t.sin_theta, -m.p_a * t.sin_theta + m.p_b * t.cos_theta};
}

ChargingEnergies charging_energies(const CircuitParams& p) {
    const ModeTransform t = compute_transform(p);
    return {p.e_c_ref_over_e_j / t.mass_a, p.e_c_ref_over_e_j / t.mass_b};
}

}  // namespace torq
