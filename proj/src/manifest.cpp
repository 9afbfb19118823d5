#include "soundkit/manifest.hpp"

#include "soundkit/canonical_json.hpp"
#include "soundkit/error.hpp"
#include "soundkit/paths.hpp"

namespace soundkit {

std::string_view to_string(Unpack unpack) {
  switch (unpack) {
    case Unpack::none: return "none";
    case Unpack::zip: return "zip";
    case Unpack::tar_gz: return "tar_gz";
  }
  return "none";
}

std::optional<ArchiveKind> archive_kind(Unpack unpack) {
  switch (unpack) {
    case Unpack::zip: return ArchiveKind::zip;
    case Unpack::tar_gz: return ArchiveKind::tar_gz;
    case Unpack::none: break;
  }
  return std::nullopt;
}

std::string_view to_string(BindingKind kind) {
  switch (kind) {
    case BindingKind::audio_wav: return "audio_wav";
    case BindingKind::tags: return "tags";
    case BindingKind::events: return "events";
    case BindingKind::metadata_table: return "metadata_table";
    case BindingKind::raw: return "raw";
  }
  return "raw";
}

const FieldBinding& DatasetManifest::binding(const std::string& field) const {
  static const FieldBinding kRaw{};
  const auto it = field_bindings.find(field);
  return it == field_bindings.end() ? kRaw : it->second;
}

bool is_valid_dataset_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

bool is_valid_destination(std::string_view destination) {
  return destination == "." || is_safe_relative_path(destination);
}

namespace {

std::optional<Unpack> parse_unpack(std::string_view s) {
  if (s == "none") return Unpack::none;
  if (s == "zip") return Unpack::zip;
  if (s == "tar_gz") return Unpack::tar_gz;
  return std::nullopt;
}

std::optional<BindingKind> parse_kind(std::string_view s) {
  if (s == "audio_wav") return BindingKind::audio_wav;
  if (s == "tags") return BindingKind::tags;
  if (s == "events") return BindingKind::events;
  if (s == "metadata_table") return BindingKind::metadata_table;
  if (s == "raw") return BindingKind::raw;
  return std::nullopt;
}

RemoteFile read_remote(const std::string& key, const Json& doc) {
  const auto where = "remotes." + key;
  require_keys(doc, {"checksum", "checksum_algorithm", "destination", "name", "unpack", "url"}, {},
               where);
  RemoteFile r;
  r.name = require_string(doc["name"], where + ".name");
  if (r.name != key) fail(ErrorKind::schema, where + ".name: must equal its key '" + key + "'");
  r.url = require_string(doc["url"], where + ".url");
  if (r.url.rfind("http://", 0) != 0 && r.url.rfind("https://", 0) != 0) {
    fail(ErrorKind::schema, where + ".url: only http and https URLs are supported");
  }
  const auto& algo = require_string(doc["checksum_algorithm"], where + ".checksum_algorithm");
  const auto parsed_algo = parse_checksum_algorithm(algo);
  if (!parsed_algo) fail(ErrorKind::schema, where + ".checksum_algorithm: unknown algorithm '" + algo + "'");
  r.checksum_algorithm = *parsed_algo;
  r.checksum = require_string(doc["checksum"], where + ".checksum");
  if (!is_valid_checksum(r.checksum, r.checksum_algorithm)) {
    fail(ErrorKind::schema, where + ".checksum: not a lowercase " + algo + " digest");
  }
  r.destination = require_string(doc["destination"], where + ".destination");
  if (!is_valid_destination(r.destination)) {
    fail(ErrorKind::schema, where + ".destination: not a safe relative path");
  }
  const auto& unpack = require_string(doc["unpack"], where + ".unpack");
  const auto parsed_unpack = parse_unpack(unpack);
  if (!parsed_unpack) fail(ErrorKind::schema, where + ".unpack: unknown value '" + unpack + "'");
  r.unpack = *parsed_unpack;
  return r;
}

FieldBinding read_binding(const std::string& field, const Json& doc) {
  const auto where = "field_bindings." + field;
  require_object(doc, where);
  if (!doc.contains("kind")) fail(ErrorKind::schema, where + ".kind: missing required key");
  const auto& kind_name = require_string(doc["kind"], where + ".kind");
  const auto kind = parse_kind(kind_name);
  if (!kind) fail(ErrorKind::schema, where + ".kind: unknown kind '" + kind_name + "'");

  FieldBinding b;
  b.kind = *kind;
  auto read_delimiter = [&](Delimiter fallback) {
    if (!doc.contains("delimiter")) return fallback;
    const auto& name = require_string(doc["delimiter"], where + ".delimiter");
    const auto d = parse_delimiter(name);
    if (!d) fail(ErrorKind::schema, where + ".delimiter: unknown delimiter '" + name + "'");
    return *d;
  };
  switch (b.kind) {
    case BindingKind::tags:
      require_keys(doc, {"kind"}, {"delimiter"}, where);
      b.format.delimiter = read_delimiter(Delimiter::comma);
      break;
    case BindingKind::events:
      require_keys(doc, {"kind"}, {"delimiter", "has_confidence", "header_rows"}, where);
      b.format.delimiter = read_delimiter(Delimiter::tab);
      if (doc.contains("has_confidence")) {
        if (!doc["has_confidence"].is_boolean()) {
          fail(ErrorKind::schema, where + ".has_confidence: expected a boolean");
        }
        b.format.has_confidence = doc["has_confidence"].get<bool>();
      }
      if (doc.contains("header_rows")) {
        if (!doc["header_rows"].is_number_unsigned()) {
          fail(ErrorKind::schema, where + ".header_rows: expected a non-negative integer");
        }
        b.format.header_rows = doc["header_rows"].get<std::size_t>();
      }
      break;
    default:
      require_keys(doc, {"kind"}, {}, where);
      break;
  }
  return b;
}

Json binding_json(const FieldBinding& b) {
  Json doc{{"kind", std::string(to_string(b.kind))}};
  if (b.kind == BindingKind::tags || b.kind == BindingKind::events) {
    doc["delimiter"] = std::string(to_string(b.format.delimiter));
  }
  if (b.kind == BindingKind::events) {
    doc["has_confidence"] = b.format.has_confidence;
    doc["header_rows"] = b.format.header_rows;
  }
  return doc;
}

}  // namespace

DatasetManifest load_manifest(std::string_view bytes) {
  const Json doc = parse_strict(bytes);
  require_keys(doc,
               {"citation", "field_bindings", "id", "index_ref", "license", "name", "remotes",
                "version"},
               {}, "");
  DatasetManifest m;
  m.id = require_string(doc["id"], "id");
  if (!is_valid_dataset_id(m.id)) {
    fail(ErrorKind::schema, "id: '" + m.id + "' must be non-empty and use only [a-z0-9_-]");
  }
  m.name = require_string(doc["name"], "name");
  m.version = require_string(doc["version"], "version");
  m.license = require_string(doc["license"], "license");
  m.citation = require_string(doc["citation"], "citation");
  m.index_ref = require_string(doc["index_ref"], "index_ref");
  if (!is_safe_relative_path(m.index_ref)) {
    fail(ErrorKind::schema, "index_ref: not a safe relative path");
  }
  require_object(doc["remotes"], "remotes");
  for (const auto& [key, value] : doc["remotes"].items()) {
    m.remotes.emplace(key, read_remote(key, value));
  }
  require_object(doc["field_bindings"], "field_bindings");
  for (const auto& [field, value] : doc["field_bindings"].items()) {
    if (field.empty()) fail(ErrorKind::schema, "field_bindings: empty field name");
    m.field_bindings.emplace(field, read_binding(field, value));
  }
  return m;
}

std::string serialize_manifest(const DatasetManifest& m) {
  Json remotes = Json::object();
  for (const auto& [key, r] : m.remotes) {
    remotes[key] = Json{{"checksum", r.checksum},
                        {"checksum_algorithm", std::string(to_string(r.checksum_algorithm))},
                        {"destination", r.destination},
                        {"name", r.name},
                        {"unpack", std::string(to_string(r.unpack))},
                        {"url", r.url}};
  }
  Json bindings = Json::object();
  for (const auto& [field, b] : m.field_bindings) bindings[field] = binding_json(b);
  Json doc = Json::object();
  doc["citation"] = m.citation;
  doc["field_bindings"] = std::move(bindings);
  doc["id"] = m.id;
  doc["index_ref"] = m.index_ref;
  doc["license"] = m.license;
  doc["name"] = m.name;
  doc["remotes"] = std::move(remotes);
  doc["version"] = m.version;
  return to_canonical(doc);
}

}  // namespace soundkit
