#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "semimarkov/process.hpp"

namespace semimarkov {

/// {n_states, h (row-major, flat), lambda, laws: [{kind, alpha?, lambda?,
/// builtin_exponent?}], diagonal_jumps_allowed}. General laws must be built-ins.
nlohmann::json model_to_json(const SemiMarkovModel& model);
/// Accepts h flat (row-major) or nested; the result is validated.
SemiMarkovModel model_from_json(const nlohmann::json& doc);

std::string serialize_model(const SemiMarkovModel& model);
SemiMarkovModel parse_model(std::string_view text);

}  // namespace semimarkov
