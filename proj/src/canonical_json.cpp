#include "soundkit/canonical_json.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "soundkit/error.hpp"

namespace soundkit {

namespace {

bool is_scalar(const Json& v) { return !v.is_object() && !v.is_array(); }

std::string scalar_text(const Json& v) {
  return v.dump(-1, ' ', false, Json::error_handler_t::strict);
}

void write(const Json& v, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    // nlohmann's default object_t is a std::map<std::string, ...>, whose
    // ordering is bytewise (char_traits<char> compares as unsigned char).
    out += "{\n";
    bool first = true;
    for (const auto& [key, member] : v.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      out += scalar_text(Json(key));
      out += ": ";
      write(member, depth + 1, out);
    }
    out += "\n" + close_pad + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    if (std::all_of(v.begin(), v.end(), is_scalar)) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i != 0) out += ", ";
        out += scalar_text(v[i]);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i != 0) out += ",\n";
      out += pad;
      write(v[i], depth + 1, out);
    }
    out += "\n" + close_pad + "]";
  } else {
    out += scalar_text(v);
  }
}

}  // namespace

std::string to_canonical(const Json& document) {
  std::string out;
  write(document, 0, out);
  out += "\n";
  return out;
}

Json parse_strict(std::string_view text) {
  std::vector<std::set<std::string>> open_objects;
  std::string duplicate;
  auto callback = [&](int /*depth*/, Json::parse_event_t event, Json& parsed) {
    switch (event) {
      case Json::parse_event_t::object_start:
        open_objects.emplace_back();
        break;
      case Json::parse_event_t::object_end:
        if (!open_objects.empty()) open_objects.pop_back();
        break;
      case Json::parse_event_t::key:
        if (!open_objects.empty() && !open_objects.back().insert(parsed.get<std::string>()).second &&
            duplicate.empty()) {
          duplicate = parsed.get<std::string>();
        }
        break;
      default:
        break;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), callback);
  } catch (const Json::exception& e) {
    fail(ErrorKind::schema, std::string("malformed document: ") + e.what());
  }
  if (!duplicate.empty()) fail(ErrorKind::schema, "duplicate key '" + duplicate + "'");
  return doc;
}

void require_object(const Json& value, const std::string& where) {
  if (!value.is_object()) fail(ErrorKind::schema, where + ": expected an object");
}

void require_keys(const Json& object, std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional, const std::string& where) {
  require_object(object, where);
  const auto prefix = where.empty() ? std::string() : where + ".";
  for (auto key : required) {
    if (!object.contains(std::string(key))) {
      fail(ErrorKind::schema, prefix + std::string(key) + ": missing required key");
    }
  }
  for (const auto& [key, _] : object.items()) {
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) fail(ErrorKind::schema, prefix + key + ": unknown key");
  }
}

const std::string& require_string(const Json& value, const std::string& where) {
  if (!value.is_string()) fail(ErrorKind::schema, where + ": expected a string");
  return value.get_ref<const std::string&>();
}

}  // namespace soundkit
