#pragma once

#include "veechcomb/flatgeom.hpp"
#include "veechcomb/groupcore.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace veechcomb {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int precondition = 2;
inline constexpr int verification = 3;
inline constexpr int usage = 64;
inline constexpr int malformed_word = 65;
inline constexpr int internal = 70;
}  // namespace exit_code

struct CommandResult {
  std::string schema_version = kSchemaVersion;
  std::string command;
  Json payload = Json::object();
  std::vector<std::string> assumptions;
  int exit_code = 0;
  std::string diagnostics;  // for stderr

  Json to_json() const;
};

/// Runs one command line (without the program name). Never throws.
CommandResult run(const std::vector<std::string>& args);

// JSON encodings shared by the commands and the bundled data files.
Json rational_json(const Rational& q);
Json element_json(const FieldElement& x);
FieldElement element_from_json(const NumberField& f, const Json& j);
Json field_json(const NumberField& f);
NumberField field_from_json(const Json& j);
Json vec_json(const Vec2& v);
Json surface_json(const HalfTranslationSurface& s);
HalfTranslationSurface surface_from_json(const Json& j);
Json saddle_json(const SaddleConnection& sc);
Presentation presentation_from_json(const Json& j);
AmalgamSpec amalgam_spec_from_json(const Json& j);

}  // namespace veechcomb
