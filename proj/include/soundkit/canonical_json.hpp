#pragma once

// Canonical document form shared by indexes, manifests and reports:
//   - UTF-8, object keys sorted bytewise ascending
//   - two-space indentation, "\n" line endings, trailing newline
//   - arrays holding only scalars, and empty containers, stay on one line
//   - everything else is expanded one member per line

#include <string>
#include <string_view>

#include <json.hpp>

namespace soundkit {

using Json = nlohmann::json;

std::string to_canonical(const Json& document);

// Strict parse: rejects invalid UTF-8 and duplicate object keys.
// Throws Error{schema}.
Json parse_strict(std::string_view text);

// Helpers for schema checks over parsed documents. `where` is a key path
// such as "clips.clip-0001.audio" used in error messages.
void require_object(const Json& value, const std::string& where);
void require_keys(const Json& object, std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional, const std::string& where);
const std::string& require_string(const Json& value, const std::string& where);

}  // namespace soundkit
