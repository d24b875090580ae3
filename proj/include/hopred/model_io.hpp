#pragma once

#include <string>
#include <variant>

#include "hopred/model.hpp"

namespace hopred {

using AnyModel = std::variant<HoppingModel, ContinuousModel>;

/// Parses a model file (JSON, UTF-8). Unknown fields are rejected.
/// Throws Error(parse_error) on malformed JSON and Error(schema_error)
/// naming the missing/invalid field.
AnyModel load_model(const std::string& path);

void save_model(const HoppingModel& model, const std::string& path);
void save_model(const ContinuousModel& model, const std::string& path);
void save_model(const AnyModel& model, const std::string& path);

/// In-memory versions used by the file API and by tests.
AnyModel parse_model(const std::string& json_text);
std::string serialize_model(const AnyModel& model);

}  // namespace hopred
