#pragma once

#include "torq/circuit_model.hpp"
#include "torq/config.hpp"
#include "torq/hamiltonian.hpp"
#include "torq/spectrum.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

namespace torq {

enum class Distribution {
    UniformPM,  // u uniform in [-1, 1]
    Gaussian,   // u standard normal, truncated at +-3
};

std::string_view to_string(Distribution d);

struct DisorderSpec {
    double spread = 0.1;
    int n_realizations = 1000;
    Distribution distribution = Distribution::UniformPM;
    std::uint64_t seed = 0;
};

/// Throws InvalidArgument unless 0 <= spread < 1 and n_realizations >= 1.
void validate_spec(const DisorderSpec& d);

/// Uniform double in [0, 1) that depends only on its four keys.
double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream, std::uint64_t counter);

/// Scales c_a, c_b, c_f, e_a, e_b and e_f by independent factors (1 + spread u).
/// A realization with a non-positive capacitance or negative Josephson energy
/// is redrawn once from a fresh counter block, then rejected with
/// InvalidRealization.
CircuitParams sample_realization(const CircuitParams& base, const DisorderSpec& d, int index);

struct RealizationCurve {
    int index = 0;
    CircuitParams params;
    std::vector<double> e0, e1, i0, i1;
};

struct EnsembleOptions {
    Discretization discretization = ChargeBasisSpec{8};
    /// Only E0, E1 are kept, so one spare block vector is enough.
    SolverOptions solver = [] {
        SolverOptions o;
        o.block_extra = 1;
        return o;
    }();
    unsigned workers = 1;
};

/// Optional solver settings of the "disorder" section: n_max (charge cutoff
/// per realization) and tolerance.
EnsembleOptions ensemble_options_from_json(const Json& section);

struct EnsembleRaw {
    std::vector<double> f;
    std::vector<RealizationCurve> curves;  // by realization index
};

/// Solves every realization on `f_grid`. Solver errors are rethrown with the
/// realization index in the subject. Requires base.design == open_b and an
/// ascending grid inside [0, 1].
EnsembleRaw run_ensemble(const CircuitParams& base, const DisorderSpec& d, const std::vector<double>& f_grid,
                         const EnsembleOptions& options = {});

inline constexpr double kPercentiles[] = {5.0, 25.0, 50.0, 75.0, 95.0};

struct PercentileBands {
    /// bands[q][j]: percentile kPercentiles[q] at flux point j.
    std::vector<std::vector<double>> bands;
};

struct EnsembleSummary {
    std::vector<double> f;
    PercentileBands i0;
    PercentileBands i1;
    /// Ground-state current zero crossing per realization; empty when I0 has
    /// no sign change on the grid.
    std::vector<std::optional<double>> crossings;
    int no_zero_crossing = 0;
    double window_lo = 0.45;
    double window_hi = 0.55;
    double fraction_in_window = 0.0;
};

/// Zero crossing of a sampled curve: among sign changes, the one with the
/// largest jump, located by linear interpolation.
std::optional<double> zero_crossing(const std::vector<double>& f, const std::vector<double>& current);

/// Linear-interpolation percentile of unsorted samples (q in [0, 100]).
double percentile(std::vector<double> samples, double q);

EnsembleSummary summarize(const EnsembleRaw& raw);

/// Columns realization, f, E0_EJ, E1_EJ, I0_Ic, I1_Ic with 17 significant digits.
void write_raw_csv(const EnsembleRaw& raw, std::ostream& out);

Json summary_to_json(const EnsembleSummary& s, const DisorderSpec& d, const CircuitParams& base);

/// Reads a "disorder" config section: spread, n_realizations, distribution
/// (n_max and tolerance are accepted and read by ensemble_options_from_json).
/// The seed is not part of the config and is left at zero.
DisorderSpec disorder_from_json(const Json& section);

}  // namespace torq
