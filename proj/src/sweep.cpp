#include "torq/sweep.hpp"

#include "torq/error.hpp"
#include "torq/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace torq {

namespace {

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string bias_name(Design d) { return d == Design::ClosedA ? "i_ext" : "f"; }

int require_int(const Json& obj, std::string_view key, std::string_view where) {
    const auto it = obj.find(std::string(key));
    const std::string name = std::string(where) + std::string(key);
    if (it == obj.end() || !it->is_number_integer()) {
        throw Error(ErrorKind::InvalidConfig, name, "config key '" + name + "' must be an integer");
    }
    return it->get<int>();
}

std::vector<double> parse_grid(const Json& g) {
    std::vector<double> out;
    if (g.is_array()) {
        for (const auto& v : g) {
            if (!v.is_number()) {
                throw Error(ErrorKind::InvalidConfig, "grid", "grid entries must be numbers");
            }
            out.push_back(v.get<double>());
        }
        return out;
    }
    require_known_keys(g, {"start", "stop", "points"}, "grid.");
    const double start = require_number(g, "start", "grid.");
    const double stop = require_number(g, "stop", "grid.");
    const int points = require_int(g, "points", "grid.");
    if (points < 1) {
        throw Error(ErrorKind::InvalidConfig, "grid.points", "grid.points must be >= 1");
    }
    for (int j = 0; j < points; ++j) {
        out.push_back(points == 1 ? start : start + (stop - start) * j / (points - 1));
    }
    return out;
}

FluxGridSpec parse_flux_grid(const Json& g) {
    require_known_keys(g, {"half_width_a", "half_width_b", "points_a", "points_b", "stencil", "domain"}, "flux_grid.");
    FluxGridSpec s;
    if (g.contains("half_width_a")) s.half_width_a = require_number(g, "half_width_a", "flux_grid.");
    if (g.contains("half_width_b")) s.half_width_b = require_number(g, "half_width_b", "flux_grid.");
    if (g.contains("points_a")) s.points_a = require_int(g, "points_a", "flux_grid.");
    if (g.contains("points_b")) s.points_b = require_int(g, "points_b", "flux_grid.");
    if (g.contains("stencil")) {
        const auto v = g["stencil"].is_string() ? g["stencil"].get<std::string>() : "";
        if (v == "three_point") {
            s.stencil = Stencil::ThreePoint;
        } else if (v == "five_point") {
            s.stencil = Stencil::FivePoint;
        } else {
            throw Error(ErrorKind::InvalidConfig, "flux_grid.stencil",
                        "flux_grid.stencil must be \"three_point\" or \"five_point\"");
        }
    }
    if (g.contains("domain")) {
        const auto v = g["domain"].is_string() ? g["domain"].get<std::string>() : "";
        if (v == "single_cell") {
            s.domain = GridDomain::SingleCell;
        } else if (v == "full_box") {
            s.domain = GridDomain::FullBox;
        } else {
            throw Error(ErrorKind::InvalidConfig, "flux_grid.domain",
                        "flux_grid.domain must be \"single_cell\" or \"full_box\"");
        }
    }
    return s;
}

SolverOptions parse_solver(const Json& g) {
    require_known_keys(g, {"strategy", "dense_limit", "tolerance"}, "solver.");
    SolverOptions o;
    if (g.contains("strategy")) {
        const auto v = g["strategy"].is_string() ? g["strategy"].get<std::string>() : "";
        if (v == "auto") {
            o.strategy = SolverStrategy::Auto;
        } else if (v == "dense") {
            o.strategy = SolverStrategy::Dense;
        } else if (v == "iterative") {
            o.strategy = SolverStrategy::Iterative;
        } else {
            throw Error(ErrorKind::InvalidConfig, "solver.strategy",
                        "solver.strategy must be \"auto\", \"dense\" or \"iterative\"");
        }
    }
    if (g.contains("dense_limit")) o.dense_limit = require_int(g, "dense_limit", "solver.");
    if (g.contains("tolerance")) o.tolerance = require_number(g, "tolerance", "solver.");
    return o;
}

std::vector<SweepRecord> solve_grid(const SweepConfig& cfg, const Discretization& d, unsigned workers) {
    std::vector<SweepRecord> records(cfg.grid.size());
    parallel_for(cfg.grid.size(), workers, [&](std::size_t j) {
        const double bias = cfg.grid[j];
        try {
            const PointSolution s = solve_point(with_bias(cfg.params, bias), d, cfg.k, cfg.solver);
            records[j] = {bias, s.energies, s.currents, doublet_partner(s.currents)};
        } catch (const Error& e) {
            const std::string where = bias_name(cfg.params.design) + "=" + fmt17(bias);
            throw Error(e.kind(), where, std::string(e.what()) + " (at " + where + ")");
        }
    });
    return records;
}

Json records_json(const std::vector<SweepRecord>& records, const SweepResult& r) {
    Json out = Json::array();
    const double reference = records.empty() ? 0.0 : records.front().energies.front();
    const std::string name = bias_name(r.metadata.design);
    for (const auto& rec : records) {
        Json j;
        j[name] = rec.bias;
        if (r.outputs.energies) {
            j["energies_EJ"] = rec.energies;
            std::vector<double> relative;
            for (const double e : rec.energies) {
                relative.push_back(e - reference);
            }
            j["relative_energies_EJ"] = relative;
        }
        if (r.outputs.currents) {
            j["currents_Ic"] = {rec.currents.at(0), rec.currents.at(1)};
            if (rec.doublet_partner >= 0) {
                j["doublet_partner"] = rec.doublet_partner;
            } else {
                j["doublet_partner"] = nullptr;
            }
        }
        out.push_back(j);
    }
    return out;
}

}  // namespace

std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::Charge:
            return "charge";
        case Backend::FluxGrid:
            return "grid";
        case Backend::Both:
            return "both";
    }
    return "?";
}

Backend backend_from_string(std::string_view name) {
    if (name == "charge") return Backend::Charge;
    if (name == "grid") return Backend::FluxGrid;
    if (name == "both") return Backend::Both;
    throw Error(ErrorKind::InvalidConfig, "backend", "backend must be \"charge\", \"grid\" or \"both\"");
}

void validate_sweep(const SweepConfig& cfg) {
    validate_params(cfg.params);
    if (cfg.grid.empty()) {
        throw Error(ErrorKind::InvalidConfig, "grid", "sweep grid is empty");
    }
    for (std::size_t j = 1; j < cfg.grid.size(); ++j) {
        if (!(cfg.grid[j] > cfg.grid[j - 1])) {
            throw Error(ErrorKind::InvalidConfig, "grid", "sweep grid must be strictly ascending");
        }
    }
    if (cfg.k < 1) {
        throw Error(ErrorKind::InvalidConfig, "k", "k must be >= 1");
    }
    if (cfg.k < 2 && (cfg.outputs.currents || cfg.outputs.qubit_params)) {
        throw Error(ErrorKind::InvalidConfig, "k", "k must be >= 2 when currents or qubit_params are requested");
    }
    if (cfg.params.design == Design::ClosedA) {
        if (cfg.backend != Backend::FluxGrid) {
            throw Error(ErrorKind::InvalidConfig, "backend", "closed_a sweeps run on the flux grid only");
        }
        if (cfg.outputs.qubit_params) {
            throw Error(ErrorKind::InvalidConfig, "outputs", "qubit_params needs a flux sweep (open_b)");
        }
    }
}

SweepConfig sweep_from_json(const Json& doc) {
    SweepConfig cfg;
    cfg.params = params_from_json(
        doc, {"grid", "k", "backend", "charge_basis", "flux_grid", "outputs", "solver", "disorder"});
    cfg.source = doc;

    if (!doc.contains("grid")) {
        throw Error(ErrorKind::InvalidConfig, "grid", "missing config key 'grid'");
    }
    cfg.grid = parse_grid(doc["grid"]);
    if (doc.contains("k")) cfg.k = require_int(doc, "k", "");
    if (doc.contains("backend")) {
        const auto& b = doc["backend"];
        cfg.backend = backend_from_string(b.is_string() ? b.get<std::string>() : "");
    } else if (cfg.params.design == Design::ClosedA) {
        cfg.backend = Backend::FluxGrid;
    }
    if (doc.contains("charge_basis")) {
        require_known_keys(doc["charge_basis"], {"n_max"}, "charge_basis.");
        cfg.charge_basis.n_max = require_int(doc["charge_basis"], "n_max", "charge_basis.");
    }
    if (doc.contains("flux_grid")) cfg.flux_grid = parse_flux_grid(doc["flux_grid"]);
    if (doc.contains("solver")) cfg.solver = parse_solver(doc["solver"]);
    if (doc.contains("outputs")) {
        const auto& o = doc["outputs"];
        if (!o.is_array()) {
            throw Error(ErrorKind::InvalidConfig, "outputs", "outputs must be an array");
        }
        cfg.outputs = {false, false, false};
        for (const auto& item : o) {
            const std::string name = item.is_string() ? item.get<std::string>() : "";
            if (name == "energies") {
                cfg.outputs.energies = true;
            } else if (name == "currents") {
                cfg.outputs.currents = true;
            } else if (name == "qubit_params") {
                cfg.outputs.qubit_params = true;
            } else {
                throw Error(ErrorKind::InvalidConfig, "outputs", "unknown output '" + name + "'");
            }
        }
    }
    if (doc.contains("disorder")) cfg.disorder = disorder_from_json(doc["disorder"]);
    validate_sweep(cfg);
    return cfg;
}

std::vector<DoubletSample> doublet_samples(const std::vector<SweepRecord>& records) {
    std::vector<DoubletSample> out;
    for (const auto& r : records) {
        if (r.doublet_partner < 0) {
            continue;
        }
        const int partner = std::min<int>(r.doublet_partner, static_cast<int>(r.energies.size()) - 1);
        out.push_back({r.bias, r.energies[0], r.energies[static_cast<std::size_t>(partner)],
                       r.currents.empty() ? 0.0 : r.currents[0]});
    }
    return out;
}

SweepResult run_sweep(const SweepConfig& cfg, unsigned workers) {
    validate_sweep(cfg);
    SweepResult r;
    r.k = cfg.k;
    r.outputs = cfg.outputs;
    r.metadata.config_hash = config_hash(cfg.source.is_null() ? params_to_json(cfg.params) : cfg.source);
    r.metadata.backend = cfg.backend;
    r.metadata.design = cfg.params.design;

    const Discretization charge = cfg.charge_basis;
    const Discretization grid = cfg.flux_grid;
    switch (cfg.backend) {
        case Backend::Charge:
            r.metadata.discretization = describe(charge);
            r.records = solve_grid(cfg, charge, workers);
            break;
        case Backend::FluxGrid:
            r.metadata.discretization = describe(grid);
            r.records = solve_grid(cfg, grid, workers);
            break;
        case Backend::Both: {
            r.metadata.discretization = describe(charge) + "; " + describe(grid);
            r.records = solve_grid(cfg, charge, workers);
            r.grid_records = solve_grid(cfg, grid, workers);
            double worst = 0.0;
            for (std::size_t j = 0; j < r.records.size(); ++j) {
                for (int n = 0; n < cfg.k; ++n) {
                    worst = std::max(worst, std::abs(r.records[j].energies[n] - r.grid_records[j].energies[n]));
                }
            }
            r.max_abs_delta_e = worst;
            break;
        }
    }

    if (cfg.outputs.qubit_params) {
        const auto samples = doublet_samples(r.records);
        r.qubit = extract_qubit_params(samples);
    }
    return r;
}

void write_csv(const SweepResult& r, std::ostream& out, const std::vector<SweepRecord>& records) {
    out << bias_name(r.metadata.design);
    if (r.outputs.energies) {
        for (int n = 0; n < r.k; ++n) {
            out << ",E" << n << "_EJ";
        }
    }
    if (r.outputs.currents) {
        out << ",I0_Ic,I1_Ic";
    }
    out << '\n';
    for (const auto& rec : records) {
        out << fmt17(rec.bias);
        if (r.outputs.energies) {
            for (const double e : rec.energies) {
                out << ',' << fmt17(e);
            }
        }
        if (r.outputs.currents) {
            out << ',' << fmt17(rec.currents.at(0)) << ',' << fmt17(rec.currents.at(1));
        }
        out << '\n';
    }
}

Json qubit_to_json(const QubitParams& q) {
    return {
        {"delta_EJ", q.delta},
        {"f_degeneracy", q.f_degeneracy},
        {"slope_EJ_per_f", q.slope},
        {"i_p_Ic", q.i_p},
        {"i_p_plateau_Ic", q.i_p_plateau},
        {"plateau_consistent", q.plateau_consistent},
        {"f", q.f},
        {"epsilon_EJ", q.epsilon},
    };
}

Json to_json(const SweepResult& r) {
    Json doc;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.metadata.config_hash));
    doc["metadata"] = {
        {"config_hash", hash},
        {"backend", std::string(to_string(r.metadata.backend))},
        {"discretization", r.metadata.discretization},
        {"tool_version", r.metadata.tool_version},
        {"design", std::string(to_string(r.metadata.design))},
        {"bias_variable", bias_name(r.metadata.design)},
        {"k", r.k},
    };
    if (r.metadata.design == Design::ClosedA) {
        doc["metadata"]["note"] = "closed_a sweeps the bias current at the fixed half-flux offset of the pi-junction";
    }
    doc["records"] = records_json(r.records, r);
    if (!r.grid_records.empty()) {
        doc["grid_records"] = records_json(r.grid_records, r);
    }
    if (r.max_abs_delta_e) {
        doc["max_abs_delta_e_EJ"] = *r.max_abs_delta_e;
    }
    if (r.qubit) {
        doc["qubit_params"] = qubit_to_json(*r.qubit);
    }
    return doc;
}

void emit(const SweepResult& r, Format format, const std::filesystem::path& path) {
    auto write = [&](const std::filesystem::path& target, auto&& body) {
        if (target.empty()) {
            body(std::cout);
            std::cout.flush();
            return;
        }
        std::ofstream out(target, std::ios::binary);
        if (!out) {
            throw Error(ErrorKind::Io, target.string(), "cannot write '" + target.string() + "'");
        }
        body(out);
        if (!out) {
            throw Error(ErrorKind::Io, target.string(), "write failed for '" + target.string() + "'");
        }
    };

    if (format == Format::Json) {
        write(path, [&](std::ostream& out) { out << to_json(r).dump(2) << '\n'; });
        return;
    }
    write(path, [&](std::ostream& out) { write_csv(r, out, r.records); });
    if (!r.grid_records.empty()) {
        if (path.empty()) {
            std::cout << '\n';
            write_csv(r, std::cout, r.grid_records);
        } else {
            std::filesystem::path second = path;
            second.replace_filename(path.stem().string() + ".grid" + path.extension().string());
            write(second, [&](std::ostream& out) { write_csv(r, out, r.grid_records); });
        }
    }
}

}  // namespace torq
