#pragma once

// JSON system configurations: parsing with located errors, the hand
// instances and seeded random tracial systems.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relmix/vnalg.hpp"

namespace relmix {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct SystemConfig {
  std::string name;
  Json document;
  SystemSpec system;
  MatrixStarAlgebra subsystem;
  std::string subsystem_kind;
};

/// Complex matrices are arrays of rows whose entries are [re, im] or plain numbers.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& path);

/// Validates the document; errors are InputError / ValidationError carrying
/// the JSON path of the offending field.
SystemConfig parse_config(const Json& doc);
SystemConfig load_config(const std::string& path);

/// The three small instances with known answers.
std::vector<Json> hand_instances();

/// Deterministic tracial system of ambient dimension at most max_dim.
Json random_system(std::uint64_t seed, Index max_dim = 4);

}  // namespace relmix
