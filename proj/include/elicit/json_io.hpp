#pragma once

#include <json.hpp>

#include "elicit/domain.hpp"
#include "elicit/ingest.hpp"

// nlohmann::json conversions for the domain records. Decoding failures throw
// Error{InvalidArgument}.
namespace elicit {

void to_json(nlohmann::json& j, const Selection& s);
void from_json(const nlohmann::json& j, Selection& s);

void to_json(nlohmann::json& j, const Question& q);
void from_json(const nlohmann::json& j, Question& q);

void to_json(nlohmann::json& j, const Annotation& a);
void from_json(const nlohmann::json& j, Annotation& a);

namespace ingest {
void to_json(nlohmann::json& j, const IngestConfig& c);
void from_json(const nlohmann::json& j, IngestConfig& c);
} // namespace ingest

// Parses a request body or stored record, mapping syntax errors to
// Error{InvalidArgument}.
nlohmann::json parse_json(std::string_view text);

// Reads a field with a type check; throws Error{InvalidArgument} naming it.
template <typename T>
T field(const nlohmann::json& j, const char* name);

} // namespace elicit
