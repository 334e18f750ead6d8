#pragma once

#include "torq/circuit_model.hpp"
#include "torq/config.hpp"
#include "torq/disorder.hpp"
#include "torq/hamiltonian.hpp"
#include "torq/observables.hpp"
#include "torq/spectrum.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace torq {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Backend { Charge, FluxGrid, Both };

std::string_view to_string(Backend b);
/// "charge", "grid" or "both"; anything else is InvalidConfig.
Backend backend_from_string(std::string_view name);

struct SweepOutputs {
    bool energies = true;
    bool currents = true;
    bool qubit_params = false;
};

struct SweepConfig {
    CircuitParams params;
    /// Reduced flux for open_b, bias current i_ext for closed_a.
    std::vector<double> grid;
    Backend backend = Backend::Charge;
    ChargeBasisSpec charge_basis{10};
    FluxGridSpec flux_grid;
    int k = 4;
    SweepOutputs outputs;
    SolverOptions solver;
    std::optional<DisorderSpec> disorder;
    /// The parsed document; hashed into the output metadata.
    Json source;
};

/// Throws InvalidConfig (naming the key) for an empty or non-ascending grid,
/// k < 2 with currents or qubit_params requested, or a backend the design
/// cannot use (closed_a only runs on the flux grid).
void validate_sweep(const SweepConfig& cfg);

/// Strict parse: circuit keys plus grid, k, backend, charge_basis, flux_grid,
/// outputs, solver and disorder. `grid` is {start, stop, points} or an array.
SweepConfig sweep_from_json(const Json& doc);

struct SweepRecord {
    double bias = 0.0;
    std::vector<double> energies;  // E_J, ascending
    std::vector<double> currents;  // I_c, one per level
    int doublet_partner = 1;        // -1 when no solved level opposes the ground current
};

struct SweepMetadata {
    std::uint64_t config_hash = 0;
    Backend backend = Backend::Charge;
    std::string discretization;
    std::string tool_version{kToolVersion};
    Design design = Design::OpenB;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    /// Flux-grid records when the backend is Both.
    std::vector<SweepRecord> grid_records;
    std::optional<double> max_abs_delta_e;  // Both: largest |E_n charge - E_n grid|
    std::optional<QubitParams> qubit;
    SweepOutputs outputs;
    int k = 0;
    SweepMetadata metadata;
};

/// Solves every grid point on `workers` threads. Solver errors are rethrown
/// with the bias point in the subject.
SweepResult run_sweep(const SweepConfig& cfg, unsigned workers = 1);

/// Reduced flux and doublet levels of each record, for extract_qubit_params.
/// Records whose doublet partner was not among the solved levels are skipped.
std::vector<DoubletSample> doublet_samples(const std::vector<SweepRecord>& records);

enum class Format { Csv, Json };

/// CSV columns: f (or i_ext), E0_EJ..E{k-1}_EJ, I0_Ic, I1_Ic, 17 significant
/// digits. Energy and current columns follow `outputs`. For the Both backend
/// the rows come from the charge basis; the JSON form carries both.
void write_csv(const SweepResult& r, std::ostream& out, const std::vector<SweepRecord>& records);
Json to_json(const SweepResult& r);
Json qubit_to_json(const QubitParams& q);

/// Writes to `path`, or to standard output when `path` is empty. For Both and
/// CSV a second file `<stem>.grid<ext>` receives the flux-grid rows. Throws Io
/// naming the path.
void emit(const SweepResult& r, Format format, const std::filesystem::path& path);

}  // namespace torq
