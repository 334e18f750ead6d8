#include "torq/config.hpp"

#include "torq/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace torq {

namespace {

std::string qualified(std::string_view where, std::string_view key) {
    return std::string(where) + std::string(key);
}

}  // namespace

void require_known_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) {
        throw Error(ErrorKind::InvalidConfig, std::string(where), "expected a JSON object");
    }
    for (const auto& item : obj.items()) {
        const bool known = std::find(allowed.begin(), allowed.end(), item.key()) != allowed.end();
        if (!known) {
            const auto name = qualified(where, item.key());
            throw Error(ErrorKind::InvalidConfig, name, "unknown config key '" + name + "'");
        }
    }
}

double require_number(const Json& obj, std::string_view key, std::string_view where) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
        const auto name = qualified(where, key);
        throw Error(ErrorKind::InvalidConfig, name, "missing config key '" + name + "'");
    }
    if (!it->is_number()) {
        const auto name = qualified(where, key);
        throw Error(ErrorKind::InvalidConfig, name, "config key '" + name + "' must be a number");
    }
    return it->get<double>();
}

CircuitParams params_from_json(const Json& doc, std::initializer_list<std::string_view> extra_allowed) {
    if (!doc.is_object()) {
        throw Error(ErrorKind::InvalidConfig, "", "config document must be a JSON object");
    }
    for (const auto& item : doc.items()) {
        const auto& key = item.key();
        const bool known = std::find(std::begin(kCircuitKeys), std::end(kCircuitKeys), key) != std::end(kCircuitKeys) ||
                           std::find(extra_allowed.begin(), extra_allowed.end(), key) != extra_allowed.end();
        if (!known) {
            throw Error(ErrorKind::InvalidConfig, key, "unknown config key '" + key + "'");
        }
    }

    CircuitParams p;
    p.c_a = require_number(doc, "c_a");
    p.c_b = require_number(doc, "c_b");
    p.c_f = require_number(doc, "c_f");
    p.e_a = require_number(doc, "e_a");
    p.e_b = require_number(doc, "e_b");
    p.e_f = require_number(doc, "e_f");
    p.e_c_ref_over_e_j = require_number(doc, "e_c_ref_over_e_j");

    const auto design = doc.find("design");
    if (design == doc.end() || !design->is_string()) {
        throw Error(ErrorKind::InvalidConfig, "design", "config key 'design' must be \"closed_a\" or \"open_b\"");
    }
    const auto name = design->get<std::string>();
    if (name == "open_b") {
        p.design = Design::OpenB;
    } else if (name == "closed_a") {
        p.design = Design::ClosedA;
    } else {
        throw Error(ErrorKind::InvalidConfig, "design", "unknown design '" + name + "'");
    }

    const bool has_f = doc.contains("f");
    const bool has_i = doc.contains("i_ext");
    if (has_f && has_i) {
        throw Error(ErrorKind::BiasDesignMismatch, "i_ext", "config must carry exactly one of 'f' and 'i_ext'");
    }
    if (has_f) {
        p.bias = ReducedFlux{require_number(doc, "f")};
    } else if (has_i) {
        p.bias = BiasCurrent{require_number(doc, "i_ext")};
    } else {
        throw Error(ErrorKind::InvalidConfig, p.design == Design::OpenB ? "f" : "i_ext", "missing bias key");
    }
    return validate_params(p);
}

Json params_to_json(const CircuitParams& p) {
    Json doc = {
        {"c_a", p.c_a}, {"c_b", p.c_b}, {"c_f", p.c_f},
        {"e_a", p.e_a}, {"e_b", p.e_b}, {"e_f", p.e_f},
        {"design", std::string(to_string(p.design))},
        {"e_c_ref_over_e_j", p.e_c_ref_over_e_j},
    };
    if (const auto* f = std::get_if<ReducedFlux>(&p.bias)) {
        doc["f"] = f->value;
    } else {
        doc["i_ext"] = std::get<BiasCurrent>(p.bias).value;
    }
    return doc;
}

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, path.string(), "cannot open '" + path.string() + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::InvalidConfig, path.string(), "malformed JSON in '" + path.string() + "': " + e.what());
    }
}

void apply_override(Json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw Error(ErrorKind::InvalidConfig, std::string(assignment), "override must look like key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));

    Json* node = &doc;
    std::stringstream path(key);
    std::string part;
    while (std::getline(path, part, '.')) {
        if (!node->is_object() || !node->contains(part)) {
            throw Error(ErrorKind::InvalidConfig, key, "override key '" + key + "' does not exist in the config");
        }
        node = &(*node)[part];
    }

    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }
    *node = value;
}

std::uint64_t config_hash(const Json& doc) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const unsigned char c : doc.dump()) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

}  // namespace torq
