// Command-line front end: spectrum, sweep, qubit, disorder, coupling, solenoid.

#include "torq/config.hpp"
#include "torq/disorder.hpp"
#include "torq/error.hpp"
#include "torq/sweep.hpp"
#include "torq/toroidal.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace torq;

struct Common {
    std::string config;
    std::string out;
    std::string format;
    std::vector<std::string> overrides;
    unsigned workers = 0;
    std::optional<std::string> backend;
};

struct Physical {
    std::optional<double> v_eff;
    std::optional<double> current;
    std::optional<double> field;
    std::optional<double> freq;
    std::optional<double> n_turns;
    std::optional<double> tube_radius;
    std::optional<double> torus_diameter;
    bool rms = false;
};

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("torq");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("TORQ_LOG")) {
        const std::string level = env;
        if (level == "error") {
            spdlog::set_level(spdlog::level::err);
        } else if (level == "warn") {
            spdlog::set_level(spdlog::level::warn);
        } else if (level == "info") {
            spdlog::set_level(spdlog::level::info);
        } else if (level == "debug") {
            spdlog::set_level(spdlog::level::debug);
        } else {
            spdlog::warn("ignoring TORQ_LOG='{}'; expected error, warn, info or debug", level);
        }
    }
}

Json load_config(const Common& c) {
    if (c.config.empty()) {
        throw Error(ErrorKind::InvalidConfig, "--config", "--config is required");
    }
    Json doc = load_json_file(c.config);
    for (const auto& o : c.overrides) {
        apply_override(doc, o);
    }
    return doc;
}

Format pick_format(const Common& c, Format fallback) {
    if (c.format == "csv") {
        return Format::Csv;
    }
    if (c.format == "json") {
        return Format::Json;
    }
    if (!c.format.empty()) {
        throw Error(ErrorKind::InvalidArgument, "--format", "--format must be csv or json");
    }
    if (c.out.size() >= 5 && c.out.ends_with(".json")) {
        return Format::Json;
    }
    if (c.out.size() >= 4 && c.out.ends_with(".csv")) {
        return Format::Csv;
    }
    return fallback;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw Error(ErrorKind::Io, path, "cannot write '" + path + "'");
    }
}

SweepConfig sweep_config(const Common& c, Json doc, bool single_point) {
    if (single_point) {
        // A spectrum is a one-point sweep at the configured bias.
        const std::string key = doc.contains("i_ext") ? "i_ext" : "f";
        if (doc.contains(key)) {
            doc["grid"] = Json::array({doc[key]});
        }
        doc.erase("disorder");
    }
    if (c.backend) {
        doc["backend"] = *c.backend;
    }
    SweepConfig cfg = sweep_from_json(doc);
    if (single_point) {
        cfg.outputs.qubit_params = false;
    }
    return cfg;
}

int run_spectrum(const Common& c) {
    const SweepConfig cfg = sweep_config(c, load_config(c), true);
    spdlog::info("spectrum: {} levels, backend {}", cfg.k, to_string(cfg.backend));
    const SweepResult r = run_sweep(cfg, c.workers);
    emit(r, pick_format(c, Format::Json), c.out);
    return 0;
}

int run_sweep_command(const Common& c) {
    const SweepConfig cfg = sweep_config(c, load_config(c), false);
    spdlog::info("sweep: {} points, backend {}", cfg.grid.size(), to_string(cfg.backend));
    const SweepResult r = run_sweep(cfg, c.workers);
    if (r.max_abs_delta_e) {
        spdlog::info("max |E_charge - E_grid| = {:.3e} E_J", *r.max_abs_delta_e);
    }
    emit(r, pick_format(c, Format::Csv), c.out);
    return 0;
}

int run_qubit(const Common& c) {
    SweepConfig cfg = sweep_config(c, load_config(c), false);
    cfg.outputs.qubit_params = true;
    validate_sweep(cfg);
    const SweepResult r = run_sweep(cfg, c.workers);
    const QubitParams& q = *r.qubit;
    if (!q.plateau_consistent) {
        spdlog::warn("slope-derived I_p {:.6g} and plateau current {:.6g} differ by more than 5%", q.i_p,
                     q.i_p_plateau);
    }
    if (pick_format(c, Format::Json) == Format::Csv) {
        std::string text = "f,epsilon_EJ\n";
        char line[64];
        for (std::size_t i = 0; i < q.f.size(); ++i) {
            std::snprintf(line, sizeof line, "%.17g,%.17g\n", q.f[i], q.epsilon[i]);
            text += line;
        }
        write_text(c.out, text);
        return 0;
    }
    Json doc = to_json(r);
    doc.erase("records");
    write_text(c.out, doc.dump(2) + "\n");
    return 0;
}

int run_disorder(const Common& c, const std::optional<std::uint64_t>& seed) {
    if (!seed) {
        throw Error(ErrorKind::InvalidArgument, "--seed", "disorder requires --seed");
    }
    Json doc = load_config(c);
    Json section = doc.contains("disorder") ? doc["disorder"] : Json::object();
    DisorderSpec spec = disorder_from_json(section);
    spec.seed = *seed;
    EnsembleOptions options = ensemble_options_from_json(section);
    options.workers = c.workers;

    doc.erase("disorder");
    const SweepConfig cfg = sweep_config(c, doc, false);
    spdlog::info("disorder: {} realizations x {} points, seed {}", spec.n_realizations, cfg.grid.size(), spec.seed);
    const EnsembleRaw raw = run_ensemble(cfg.params, spec, cfg.grid, options);
    if (pick_format(c, Format::Csv) == Format::Csv) {
        std::ostringstream out;
        write_raw_csv(raw, out);
        write_text(c.out, out.str());
        return 0;
    }
    const EnsembleSummary summary = summarize(raw);
    Json js = summary_to_json(summary, spec, cfg.params);
    js["discretization"] = describe(options.discretization);
    js["tool_version"] = std::string(kToolVersion);
    write_text(c.out, js.dump(2) + "\n");
    return 0;
}

double required(const std::optional<double>& flag, const Json& doc, const char* key, const char* flag_name) {
    if (flag) {
        return *flag;
    }
    if (doc.contains(key)) {
        return require_number(doc, key);
    }
    throw Error(ErrorKind::InvalidArgument, flag_name, std::string(flag_name) + " is required");
}

Json optional_config(const Common& c, std::initializer_list<std::string_view> keys) {
    if (c.config.empty()) {
        if (!c.overrides.empty()) {
            throw Error(ErrorKind::InvalidConfig, c.overrides.front(), "overrides need --config");
        }
        return Json::object();
    }
    Json doc = load_config(c);
    require_known_keys(doc, keys);
    return doc;
}

void require_json_format(const Common& c) {
    if (pick_format(c, Format::Json) != Format::Json) {
        throw Error(ErrorKind::InvalidArgument, "--format", "this subcommand only writes JSON");
    }
}

int run_coupling(const Common& c, const Physical& ph) {
    require_json_format(c);
    const Json doc = optional_config(c, {"v_eff", "current", "field", "freq", "rms"});
    const double v_eff = required(ph.v_eff, doc, "v_eff", "--v-eff");
    const double current = required(ph.current, doc, "current", "--current");
    const double field = required(ph.field, doc, "field", "--field");
    const double freq = required(ph.freq, doc, "freq", "--freq");
    const bool rms = ph.rms || doc.value("rms", false);

    const auto coupling = QubitToroidalCoupling::from(v_eff, current);
    const FieldCoupling u = qubit_field_coupling(coupling, field, freq, rms);
    Json out = {
        {"v_eff_m3", v_eff},
        {"current_A", current},
        {"field_V_per_m", field},
        {"frequency_Hz", freq},
        {"rate", rms ? "rms" : "peak"},
        {"dE_dt_V_per_m_s", u.de_dt},
        {"toroidal_moment", qubit_toroidal_moment(v_eff, current)},
        {"prefactor_J_per_V_m_s", coupling.u_int_prefactor},
        {"lambda_s_m_per_V", coupling.lambda},
        {"u_int_J", u.u_int},
        {"u_int_Hz", u.u_int_hz},
        {"reference_prefactor", kQuotedPrefactor},
        {"ratio_to_reference", coupling.u_int_prefactor / kQuotedPrefactor},
        {"reference_u_int_J", kQuotedFieldEnergy},
        {"u_int_ratio_to_reference", u.u_int / kQuotedFieldEnergy},
        {"reference_u_int_Hz", kQuotedFieldFrequency},
    };
    if (std::abs(out["ratio_to_reference"].get<double>() - 1.0) > 0.5) {
        spdlog::warn("derived prefactor {:.4g} differs from the reference value {:.1g} by a factor {:.3g}",
                     coupling.u_int_prefactor, kQuotedPrefactor, coupling.u_int_prefactor / kQuotedPrefactor);
    }
    write_text(c.out, out.dump(2) + "\n");
    return 0;
}

int run_solenoid(const Common& c, const Physical& ph) {
    require_json_format(c);
    const Json doc =
        optional_config(c, {"n_turns", "current", "tube_radius", "torus_diameter", "field", "freq", "rms"});
    SolenoidGeometry g;
    g.n_turns = required(ph.n_turns, doc, "n_turns", "--n-turns");
    g.current = required(ph.current, doc, "current", "--current");
    g.tube_radius = required(ph.tube_radius, doc, "tube_radius", "--tube-radius");
    g.torus_diameter = required(ph.torus_diameter, doc, "torus_diameter", "--torus-diameter");
    const ToroidalMoment m = solenoid_moment(g);

    Json out = {
        {"n_turns", g.n_turns},
        {"current_A", g.current},
        {"tube_radius_m", g.tube_radius},
        {"torus_diameter_m", g.torus_diameter},
        {"j0", m.j0},
        {"moment", m.magnitude},
        {"moment_direction", {m.direction.x(), m.direction.y(), m.direction.z()}},
        {"v_eff_m3", torus_effective_volume(g.torus_diameter, g.tube_radius)},
    };
    const bool has_field = ph.field || doc.contains("field");
    if (has_field) {
        const double field = required(ph.field, doc, "field", "--field");
        const double freq = required(ph.freq, doc, "freq", "--freq");
        double rate = 2.0 * std::numbers::pi * freq * field;
        if (ph.rms || doc.value("rms", false)) {
            rate /= std::numbers::sqrt2;
        }
        const Eigen::Vector3d de_dt = rate * g.axis;
        out["dE_dt_V_per_m_s"] = rate;
        out["u_int_J"] = solenoid_coupling(m, de_dt);
        out["u_int_closed_form_J"] = solenoid_coupling_closed_form(g, de_dt);
        out["u_int_Hz"] = out["u_int_J"].get<double>() / kSi.planck;
    }
    write_text(c.out, out.dump(2) + "\n");
    return 0;
}

int exit_code(const Error& e) { return e.kind() == ErrorKind::Io ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Two-node toroidal flux-qubit simulator"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(kToolVersion));

    Common common;
    Physical physical;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub, bool config_based) {
        sub->add_option("--config", common.config, "JSON config file");
        sub->add_option("--out", common.out, "Output path (default: standard output)");
        sub->add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("overrides", common.overrides, "Config overrides as dotted.key=value");
        if (config_based) {
            sub->add_option("--workers", common.workers, "Worker threads (0: one per core)");
            sub->add_option("--backend", common.backend, "charge, grid or both")
                ->check(CLI::IsMember({"charge", "grid", "both"}));
        }
    };

    auto* spectrum = app.add_subcommand("spectrum", "Lowest levels and currents at the configured bias");
    auto* sweep = app.add_subcommand("sweep", "Energies and currents over the bias grid");
    auto* qubit = app.add_subcommand("qubit", "Two-level parameters from a sweep around the degeneracy point");
    auto* disorder = app.add_subcommand("disorder", "Seeded parameter-disorder ensemble");
    auto* coupling = app.add_subcommand("coupling", "Qubit toroidal coupling to a time-varying field");
    auto* solenoid = app.add_subcommand("solenoid", "Toroidal moment and field coupling of a wound torus");
    for (auto* sub : {spectrum, sweep, qubit, disorder}) {
        add_common(sub, true);
    }
    disorder->add_option("--seed", seed, "RNG seed (required)");
    for (auto* sub : {coupling, solenoid}) {
        add_common(sub, false);
        sub->add_option("--current", physical.current, "Current, A");
        sub->add_option("--field", physical.field, "Field amplitude, V/m");
        sub->add_option("--freq", physical.freq, "Field frequency, Hz");
        sub->add_flag("--rms", physical.rms, "Use the RMS instead of the peak field rate");
    }
    coupling->add_option("--v-eff", physical.v_eff, "Effective volume, m^3");
    solenoid->add_option("--n-turns", physical.n_turns, "Number of turns");
    solenoid->add_option("--tube-radius", physical.tube_radius, "Tube radius, m");
    solenoid->add_option("--torus-diameter", physical.torus_diameter, "Torus diameter, m");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (spectrum->parsed()) return run_spectrum(common);
        if (sweep->parsed()) return run_sweep_command(common);
        if (qubit->parsed()) return run_qubit(common);
        if (disorder->parsed()) return run_disorder(common, seed);
        if (coupling->parsed()) return run_coupling(common, physical);
        if (solenoid->parsed()) return run_solenoid(common, physical);
    } catch (const Error& e) {
        spdlog::error("{}{}", e.what(), e.subject().empty() ? "" : " [" + e.subject() + "]");
        return exit_code(e);
    } catch (const Json::exception& e) {
        spdlog::error("InvalidConfig: {}", e.what());
        return 1;
    }
    return 1;
}
