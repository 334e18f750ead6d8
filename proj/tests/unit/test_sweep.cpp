#include "torq/error.hpp"
#include "torq/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace torq;

namespace {

Json fig3_doc() {
    return Json::parse(R"({"c_a": 1, "c_b": 1, "c_f": 0.5, "e_a": 1, "e_b": 1, "e_f": 0.8,
                           "e_c_ref_over_e_j": 0.025, "design": "open_b", "f": 0.5,
                           "grid": {"start": 0.44, "stop": 0.56, "points": 61}, "k": 4,
                           "charge_basis": {"n_max": 10}})");
}

std::string csv(const SweepResult& r) {
    std::ostringstream out;
    write_csv(r, out, r.records);
    return out.str();
}

}  // namespace

TEST_CASE("single point at degeneracy") {
    Json doc = fig3_doc();
    doc["grid"] = Json::array({0.5});
    const SweepResult r = run_sweep(sweep_from_json(doc));
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].energies[1] > r.records[0].energies[0]);
    CHECK(std::abs(r.records[0].currents[0]) < 1e-8);
}

TEST_CASE("61-point sweep is antisymmetric and worker independent") {
    const SweepConfig cfg = sweep_from_json(fig3_doc());
    const SweepResult r = run_sweep(cfg, 1);
    REQUIRE(r.records.size() == 61);
    for (std::size_t j = 0; j < 61; ++j) {
        const auto& a = r.records[j];
        const auto& b = r.records[60 - j];
        CHECK(std::abs(a.currents[0] + b.currents[0]) < 1e-8);
    }
    const std::string text = csv(r);
    CHECK(std::count(text.begin(), text.end(), '\n') == 62);
    CHECK(text == csv(run_sweep(cfg, 3)));
}

TEST_CASE("both backends agree") {
    Json doc = fig3_doc();
    doc["grid"] = {{"start", 0.45}, {"stop", 0.55}, {"points", 5}};
    doc["backend"] = "both";
    doc["k"] = 2;
    const SweepResult r = run_sweep(sweep_from_json(doc), 0);
    REQUIRE(r.max_abs_delta_e);
    CHECK(*r.max_abs_delta_e < 1e-4);
    CHECK(r.grid_records.size() == 5);
}

TEST_CASE("tunnel splitting is stable across backends") {
    Json doc = fig3_doc();
    doc["grid"] = {{"start", 0.49}, {"stop", 0.51}, {"points", 11}};
    doc["outputs"] = {"energies", "currents", "qubit_params"};
    const SweepResult charge = run_sweep(sweep_from_json(doc), 0);
    doc["backend"] = "grid";
    const SweepResult grid = run_sweep(sweep_from_json(doc), 0);
    CHECK(grid.qubit->delta == doctest::Approx(charge.qubit->delta).epsilon(0.01));
    CHECK(charge.qubit->f_degeneracy == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("output formats") {
    Json doc = fig3_doc();
    doc["grid"] = Json::array({0.45, 0.5});
    const SweepResult r = run_sweep(sweep_from_json(doc));

    std::ostringstream header_only;
    write_csv(r, header_only, {});
    CHECK(header_only.str() == "f,E0_EJ,E1_EJ,E2_EJ,E3_EJ,I0_Ic,I1_Ic\n");

    const Json js = Json::parse(to_json(r).dump());
    CHECK(js["metadata"]["tool_version"] == "0.1.0");
    CHECK(js["metadata"]["config_hash"].get<std::string>().size() == 16);
    for (std::size_t j = 0; j < r.records.size(); ++j) {
        for (int n = 0; n < 4; ++n) {
            CHECK(js["records"][j]["energies_EJ"][n].get<double>() == r.records[j].energies[n]);
        }
    }
    // CSV values survive a text round trip bit for bit.
    std::istringstream in(csv(r));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const double e0 = std::stod(line.substr(line.find(',') + 1));
    CHECK(e0 == r.records[0].energies[0]);
}

TEST_CASE("config validation") {
    auto kind = [](const Json& doc) {
        try {
            sweep_from_json(doc);
        } catch (const Error& e) {
            return e.subject();
        }
        return std::string("<ok>");
    };
    Json doc = fig3_doc();
    doc["grid"] = Json::array({0.5, 0.4});
    CHECK(kind(doc) == "grid");
    doc = fig3_doc();
    doc["k"] = 1;
    CHECK(kind(doc) == "k");
    doc = fig3_doc();
    doc["colour"] = "blue";
    CHECK(kind(doc) == "colour");
    doc = fig3_doc();
    doc["flux_grid"] = {{"stencil", "seven_point"}};
    CHECK(kind(doc).find("stencil") != std::string::npos);

    doc = fig3_doc();
    doc.erase("f");
    doc["design"] = "closed_a";
    doc["i_ext"] = 0.0;
    doc["backend"] = "charge";
    CHECK(kind(doc) == "backend");
    doc.erase("backend");
    CHECK(kind(doc) == "<ok>");
    CHECK(sweep_from_json(doc).backend == Backend::FluxGrid);
}
