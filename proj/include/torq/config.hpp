#pragma once

#include "torq/circuit_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

namespace torq {

using Json = nlohmann::json;

/// The exact key set of a circuit document.
inline constexpr std::string_view kCircuitKeys[] = {
    "c_a", "c_b", "c_f", "e_a", "e_b", "e_f", "design", "f", "i_ext", "e_c_ref_over_e_j",
};

/// Parses and validates circuit parameters. Keys outside `kCircuitKeys` and
/// `extra_allowed` raise InvalidConfig naming the key. Pass the sweep/disorder
/// section names as `extra_allowed` when the document carries them.
CircuitParams params_from_json(const Json& doc, std::initializer_list<std::string_view> extra_allowed = {});

Json params_to_json(const CircuitParams& p);

/// Throws InvalidConfig naming the first key of `obj` not in `allowed`.
/// `where` prefixes the key in the error subject (e.g. "flux_grid.").
void require_known_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                        std::string_view where = {});

/// Reads a required number, throwing InvalidConfig with the key on failure.
double require_number(const Json& obj, std::string_view key, std::string_view where = {});

Json load_json_file(const std::filesystem::path& path);

/// Applies one "dotted.key=value" override in place. The key must already exist
/// in `doc`; the value is parsed as JSON and falls back to a plain string.
void apply_override(Json& doc, std::string_view assignment);

/// 64-bit FNV-1a over the canonical (sorted-key) dump of `doc`.
std::uint64_t config_hash(const Json& doc);

}  // namespace torq
