#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "ojs/model.hpp"
#include "ojs/scheduler.hpp"

namespace ojs {

/// Parses JSON text, reporting syntax errors as
/// Error(InvalidInput, "<origin>:<line>:<column>: ...").
nlohmann::json parse_json_text(std::string_view text, std::string_view origin);
std::string read_file(const std::string& path);

/// Instance from its JSON form; rejects unknown keys and any instance that
/// fails validate_instance. Throws InvalidInput.
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::string& path);
nlohmann::json instance_to_json(const Instance& inst);

nlohmann::json schedule_to_json(const Instance& inst, const Schedule& sched);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace ojs
