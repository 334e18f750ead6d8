#include "torq/disorder.hpp"

#include "torq/error.hpp"
#include "torq/observables.hpp"
#include "torq/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace torq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Order of the disordered fields; the position is the RNG stream id.
constexpr std::array<double CircuitParams::*, 6> kFields = {
    &CircuitParams::c_a, &CircuitParams::c_b, &CircuitParams::c_f,
    &CircuitParams::e_a, &CircuitParams::e_b, &CircuitParams::e_f,
};
constexpr const char* kFieldNames[] = {"c_a", "c_b", "c_f", "e_a", "e_b", "e_f"};

// Counters of one realization attempt live in a block of this size, so a redraw
// never reuses the numbers of the first attempt.
constexpr std::uint64_t kCounterBlock = 1ull << 32;

double draw(const DisorderSpec& d, int index, std::uint64_t stream, std::uint64_t block) {
    const std::uint64_t base = block * kCounterBlock;
    if (d.distribution == Distribution::UniformPM) {
        return 2.0 * counter_uniform(d.seed, static_cast<std::uint64_t>(index), stream, base) - 1.0;
    }
    // Box-Muller, redrawn until inside +-3.
    for (std::uint64_t c = base;; c += 2) {
        const double u1 = 1.0 - counter_uniform(d.seed, static_cast<std::uint64_t>(index), stream, c);
        const double u2 = counter_uniform(d.seed, static_cast<std::uint64_t>(index), stream, c + 1);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        if (std::abs(z) <= 3.0) {
            return z;
        }
    }
}

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string_view to_string(Distribution d) {
    return d == Distribution::UniformPM ? "uniform_pm" : "gaussian";
}

void validate_spec(const DisorderSpec& d) {
    if (!(d.spread >= 0.0 && d.spread < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "spread", "spread must lie in [0, 1)");
    }
    if (d.n_realizations < 1) {
        throw Error(ErrorKind::InvalidArgument, "n_realizations", "n_realizations must be >= 1");
    }
}

double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ index);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ counter);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

CircuitParams sample_realization(const CircuitParams& base, const DisorderSpec& d, int index) {
    validate_spec(d);
    if (index < 0 || index >= d.n_realizations) {
        throw Error(ErrorKind::InvalidArgument, "index", "realization index out of range");
    }
    if (d.spread == 0.0) {
        return base;
    }
    for (std::uint64_t block = 0; block < 2; ++block) {
        CircuitParams p = base;
        bool valid = true;
        for (std::size_t s = 0; s < kFields.size(); ++s) {
            double& value = p.*kFields[s];
            value *= 1.0 + d.spread * draw(d, index, s, block);
            const bool capacitance = s < 3;
            if (capacitance ? !(value > 0.0) : !(value >= 0.0)) {
                valid = false;
            }
        }
        if (valid) {
            return p;
        }
    }
    throw Error(ErrorKind::InvalidRealization, "realization " + std::to_string(index),
                "realization " + std::to_string(index) + " has a non-physical parameter after one redraw");
}

EnsembleRaw run_ensemble(const CircuitParams& base, const DisorderSpec& d, const std::vector<double>& f_grid,
                         const EnsembleOptions& options) {
    validate_spec(d);
    if (base.design != Design::OpenB) {
        throw Error(ErrorKind::UnsupportedDesign, "design", "disorder ensembles sweep flux and need open_b");
    }
    if (f_grid.empty()) {
        throw Error(ErrorKind::InvalidArgument, "f_grid", "flux grid is empty");
    }
    for (std::size_t j = 0; j < f_grid.size(); ++j) {
        if (f_grid[j] < 0.0 || f_grid[j] > 1.0 || (j > 0 && !(f_grid[j] > f_grid[j - 1]))) {
            throw Error(ErrorKind::InvalidArgument, "f_grid", "flux grid must be ascending inside [0, 1]");
        }
    }

    EnsembleRaw raw;
    raw.f = f_grid;
    raw.curves.resize(static_cast<std::size_t>(d.n_realizations));
    parallel_for(raw.curves.size(), options.workers, [&](std::size_t r) {
        const int index = static_cast<int>(r);
        RealizationCurve& curve = raw.curves[r];
        curve.index = index;
        curve.params = sample_realization(base, d, index);
        for (const double f : f_grid) {
            try {
                const PointSolution s = solve_point(with_bias(curve.params, f), options.discretization, 2, options.solver);
                curve.e0.push_back(s.energies[0]);
                curve.e1.push_back(s.energies[1]);
                curve.i0.push_back(s.currents[0]);
                curve.i1.push_back(s.currents[1]);
            } catch (const Error& e) {
                throw Error(e.kind(), "realization " + std::to_string(index) + ", f=" + fmt17(f),
                            "realization " + std::to_string(index) + " at f=" + fmt17(f) + ": " + e.what());
            }
        }
    });
    return raw;
}

std::optional<double> zero_crossing(const std::vector<double>& f, const std::vector<double>& current) {
    const auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
    std::optional<double> best;
    double best_jump = -1.0;
    for (std::size_t j = 0; j + 1 < current.size(); ++j) {
        const double a = current[j], b = current[j + 1];
        if (sign(a) == sign(b) || (a == 0.0 && b == 0.0)) {
            continue;
        }
        const double jump = std::abs(b - a);
        if (jump > best_jump) {
            best_jump = jump;
            best = f[j] + (f[j + 1] - f[j]) * a / (a - b);
        }
    }
    return best;
}

double percentile(std::vector<double> samples, double q) {
    if (samples.empty()) {
        throw Error(ErrorKind::InvalidArgument, "samples", "percentile of an empty set");
    }
    std::sort(samples.begin(), samples.end());
    const double pos = q / 100.0 * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return samples[lo] + w * (samples[hi] - samples[lo]);
}

EnsembleSummary summarize(const EnsembleRaw& raw) {
    if (raw.curves.empty()) {
        throw Error(ErrorKind::InvalidArgument, "curves", "cannot summarize an empty ensemble");
    }
    EnsembleSummary s;
    s.f = raw.f;
    const std::size_t points = raw.f.size();
    for (auto* bands : {&s.i0, &s.i1}) {
        bands->bands.assign(std::size(kPercentiles), std::vector<double>(points));
    }
    std::vector<double> column(raw.curves.size());
    for (std::size_t j = 0; j < points; ++j) {
        for (const bool excited : {false, true}) {
            for (std::size_t r = 0; r < raw.curves.size(); ++r) {
                column[r] = excited ? raw.curves[r].i1[j] : raw.curves[r].i0[j];
            }
            auto& bands = excited ? s.i1.bands : s.i0.bands;
            for (std::size_t q = 0; q < std::size(kPercentiles); ++q) {
                bands[q][j] = percentile(column, kPercentiles[q]);
            }
        }
    }

    int inside = 0;
    for (const auto& curve : raw.curves) {
        const auto crossing = zero_crossing(raw.f, curve.i0);
        s.crossings.push_back(crossing);
        if (!crossing) {
            ++s.no_zero_crossing;
        } else if (*crossing >= s.window_lo && *crossing <= s.window_hi) {
            ++inside;
        }
    }
    s.fraction_in_window = static_cast<double>(inside) / static_cast<double>(raw.curves.size());
    return s;
}

void write_raw_csv(const EnsembleRaw& raw, std::ostream& out) {
    out << "realization,f,E0_EJ,E1_EJ,I0_Ic,I1_Ic\n";
    for (const auto& c : raw.curves) {
        for (std::size_t j = 0; j < raw.f.size(); ++j) {
            out << c.index << ',' << fmt17(raw.f[j]) << ',' << fmt17(c.e0[j]) << ',' << fmt17(c.e1[j]) << ','
                << fmt17(c.i0[j]) << ',' << fmt17(c.i1[j]) << '\n';
        }
    }
}

Json summary_to_json(const EnsembleSummary& s, const DisorderSpec& d, const CircuitParams& base) {
    Json doc;
    doc["disorder"] = {
        {"spread", d.spread},
        {"n_realizations", d.n_realizations},
        {"distribution", std::string(to_string(d.distribution))},
        {"seed", d.seed},
        {"correlation", "independent"},
        {"fields", kFieldNames},
    };
    doc["base_params"] = params_to_json(base);
    doc["f"] = s.f;
    for (const auto& [name, bands] : {std::pair{"I0_Ic", &s.i0}, std::pair{"I1_Ic", &s.i1}}) {
        Json b;
        for (std::size_t q = 0; q < std::size(kPercentiles); ++q) {
            b["p" + std::to_string(static_cast<int>(kPercentiles[q]))] = bands->bands[q];
        }
        doc["bands"][name] = b;
    }
    Json crossings = Json::array();
    for (const auto& c : s.crossings) {
        crossings.push_back(c ? Json(*c) : Json(nullptr));
    }
    doc["zero_crossings"] = crossings;
    doc["no_zero_crossing"] = s.no_zero_crossing;
    doc["window"] = {s.window_lo, s.window_hi};
    doc["fraction_in_window"] = s.fraction_in_window;
    return doc;
}

DisorderSpec disorder_from_json(const Json& section) {
    require_known_keys(section, {"spread", "n_realizations", "distribution", "n_max", "tolerance"}, "disorder.");
    DisorderSpec d;
    if (section.contains("spread")) {
        d.spread = require_number(section, "spread", "disorder.");
    }
    if (section.contains("n_realizations")) {
        const auto& n = section["n_realizations"];
        if (!n.is_number_integer()) {
            throw Error(ErrorKind::InvalidConfig, "disorder.n_realizations", "disorder.n_realizations must be an integer");
        }
        d.n_realizations = n.get<int>();
    }
    if (section.contains("distribution")) {
        const auto& v = section["distribution"];
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name == "uniform_pm") {
            d.distribution = Distribution::UniformPM;
        } else if (name == "gaussian") {
            d.distribution = Distribution::Gaussian;
        } else {
            throw Error(ErrorKind::InvalidConfig, "disorder.distribution",
                        "disorder.distribution must be \"uniform_pm\" or \"gaussian\"");
        }
    }
    try {
        validate_spec(d);
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidConfig, "disorder." + e.subject(), e.what());
    }
    return d;
}

EnsembleOptions ensemble_options_from_json(const Json& section) {
    EnsembleOptions o;
    if (section.contains("n_max")) {
        const auto& n = section["n_max"];
        if (!n.is_number_integer() || n.get<int>() < 1) {
            throw Error(ErrorKind::InvalidConfig, "disorder.n_max", "disorder.n_max must be a positive integer");
        }
        o.discretization = ChargeBasisSpec{n.get<int>()};
    }
    if (section.contains("tolerance")) {
        o.solver.tolerance = require_number(section, "tolerance", "disorder.");
    }
    return o;
}

}  // namespace torq
