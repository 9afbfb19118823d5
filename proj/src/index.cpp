#include "soundkit/index.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "soundkit/canonical_json.hpp"
#include "soundkit/checksum_kernel.hpp"
#include "soundkit/error.hpp"
#include "soundkit/paths.hpp"

namespace soundkit {

namespace fs = std::filesystem;

std::size_t DatasetIndex::file_count() const {
  std::size_t n = metadata.size();
  for (const auto& [_, entry] : clips) {
    n += static_cast<std::size_t>(
        std::count_if(entry.fields.begin(), entry.fields.end(),
                      [](const auto& kv) { return kv.second.has_value(); }));
  }
  return n;
}

namespace {

void check_ref(const FileRef& ref, ChecksumAlgorithm algorithm, const std::string& where) {
  if (!is_safe_relative_path(ref.path)) {
    fail(ErrorKind::schema, where + ": path '" + ref.path + "' is not a safe relative path");
  }
  if (!is_valid_checksum(ref.checksum, algorithm)) {
    fail(ErrorKind::schema, where + ": checksum is not " + std::to_string(hex_length(algorithm)) +
                                " lowercase hex characters");
  }
}

Json ref_to_json(const FieldValue& value) {
  if (!value) return Json::array({nullptr, nullptr});
  return Json::array({value->path, value->checksum});
}

FieldValue ref_from_json(const Json& value, ChecksumAlgorithm algorithm, const std::string& where) {
  if (!value.is_array() || value.size() != 2) {
    fail(ErrorKind::schema, where + ": expected a [path, checksum] pair");
  }
  if (value[0].is_null() && value[1].is_null()) return std::nullopt;
  FileRef ref{require_string(value[0], where + "[0]"), require_string(value[1], where + "[1]")};
  check_ref(ref, algorithm, where);
  return ref;
}

}  // namespace

void check_index(const DatasetIndex& index) {
  if (index.schema_version != kIndexSchemaVersion) {
    fail(ErrorKind::schema, "schema_version: unsupported version '" + index.schema_version + "'");
  }
  for (const auto& [id, entry] : index.clips) {
    const auto where = "clips." + id.str();
    if (entry.fields.empty()) fail(ErrorKind::schema, where + ": clip has no fields");
    for (const auto& [name, value] : entry.fields) {
      if (name.empty()) fail(ErrorKind::schema, where + ": empty field name");
      if (value) check_ref(*value, index.checksum_algorithm, where + "." + name);
    }
  }
  for (const auto& [name, ref] : index.metadata) {
    if (name.empty()) fail(ErrorKind::schema, "metadata: empty name");
    check_ref(ref, index.checksum_algorithm, "metadata." + name);
  }
}

DatasetIndex parse_index(std::string_view bytes) {
  const Json doc = parse_strict(bytes);
  require_keys(doc, {"checksum_algorithm", "clips", "metadata", "schema_version"}, {}, "");

  DatasetIndex index;
  index.schema_version = require_string(doc["schema_version"], "schema_version");
  if (index.schema_version != kIndexSchemaVersion) {
    fail(ErrorKind::schema, "schema_version: unsupported version '" + index.schema_version + "'");
  }
  const auto& algo_name = require_string(doc["checksum_algorithm"], "checksum_algorithm");
  const auto algo = parse_checksum_algorithm(algo_name);
  if (!algo) fail(ErrorKind::schema, "checksum_algorithm: unknown algorithm '" + algo_name + "'");
  index.checksum_algorithm = *algo;

  require_object(doc["clips"], "clips");
  for (const auto& [key, fields] : doc["clips"].items()) {
    const auto where = "clips." + key;
    if (!is_valid_clip_id(key)) fail(ErrorKind::schema, where + ": invalid clip id");
    require_object(fields, where);
    if (fields.empty()) fail(ErrorKind::schema, where + ": clip has no fields");
    IndexEntry entry;
    for (const auto& [name, value] : fields.items()) {
      if (name.empty()) fail(ErrorKind::schema, where + ": empty field name");
      entry.fields.emplace(name, ref_from_json(value, index.checksum_algorithm, where + "." + name));
    }
    index.clips.emplace(ClipId(key), std::move(entry));
  }

  require_object(doc["metadata"], "metadata");
  for (const auto& [name, value] : doc["metadata"].items()) {
    const auto where = "metadata." + name;
    if (name.empty()) fail(ErrorKind::schema, "metadata: empty name");
    auto ref = ref_from_json(value, index.checksum_algorithm, where);
    if (!ref) fail(ErrorKind::schema, where + ": metadata entries cannot be null");
    index.metadata.emplace(name, std::move(*ref));
  }
  return index;
}

std::string serialize_index(const DatasetIndex& index) {
  Json clips = Json::object();
  for (const auto& [id, entry] : index.clips) {
    Json fields = Json::object();
    for (const auto& [name, value] : entry.fields) fields[name] = ref_to_json(value);
    clips[id.str()] = std::move(fields);
  }
  Json metadata = Json::object();
  for (const auto& [name, ref] : index.metadata) metadata[name] = ref_to_json(ref);
  Json doc = Json::object();
  doc["checksum_algorithm"] = std::string(to_string(index.checksum_algorithm));
  doc["clips"] = std::move(clips);
  doc["metadata"] = std::move(metadata);
  doc["schema_version"] = index.schema_version;
  return to_canonical(doc);
}

namespace {

struct Placement {
  std::string relative;
  std::optional<std::string> clip;  // nullopt: dataset-level metadata
  std::string field;
};

std::string strip_extension(const std::string& path) {
  const auto slash = path.rfind('/');
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash) ||
      dot == (slash == std::string::npos ? 0 : slash + 1)) {
    return path;  // no extension, or a dotfile
  }
  return path.substr(0, dot);
}

Placement place(const std::string& relative, const FieldRule& rule) {
  const auto slash = relative.find('/');
  if (slash == std::string::npos) {
    fail(ErrorKind::rule, "file '" + relative + "' is not inside a field directory");
  }
  const auto dir = relative.substr(0, slash);
  const auto rest = relative.substr(slash + 1);
  if (rule.metadata_directory && dir == *rule.metadata_directory) {
    return {relative, std::nullopt, strip_extension(rest)};
  }
  const auto mapped = rule.field_for_directory.find(dir);
  const auto field = mapped == rule.field_for_directory.end() ? dir : mapped->second;
  const auto clip = strip_extension(rest);
  if (!is_valid_clip_id(clip)) {
    fail(ErrorKind::rule, "file '" + relative + "' yields invalid clip id '" + clip + "'");
  }
  return {relative, clip, field};
}

}  // namespace

DatasetIndex build_index(const fs::path& root, ChecksumAlgorithm algorithm, const FieldRule& rule,
                         int workers) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorKind::io, "not a directory: " + root.string());

  std::vector<std::string> relatives;
  fs::recursive_directory_iterator it(root, fs::directory_options::none, ec), end;
  if (ec) fail(ErrorKind::io, "cannot walk " + root.string() + ": " + ec.message());
  for (; it != end; it.increment(ec)) {
    if (ec) fail(ErrorKind::io, "cannot walk " + root.string() + ": " + ec.message());
    const auto status = it->symlink_status();
    if (fs::is_symlink(status) || it->path().filename().string().front() == '.') {
      it.disable_recursion_pending();
      continue;
    }
    if (fs::is_regular_file(status)) relatives.push_back(relative_generic(root, it->path()));
  }
  if (ec) fail(ErrorKind::io, "cannot walk " + root.string() + ": " + ec.message());
  std::sort(relatives.begin(), relatives.end());

  std::vector<Placement> placements;
  placements.reserve(relatives.size());
  for (const auto& rel : relatives) {
    if (!is_safe_relative_path(rel)) fail(ErrorKind::rule, "unrepresentable path '" + rel + "'");
    placements.push_back(place(rel, rule));
  }

  std::vector<fs::path> files;
  files.reserve(relatives.size());
  for (const auto& rel : relatives) files.push_back(root / rel);
  const auto digests = checksum_files(files, algorithm, workers);

  DatasetIndex index;
  index.checksum_algorithm = algorithm;
  std::set<std::string> all_fields;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const auto& p = placements[i];
    if (!digests[i].digest) fail(ErrorKind::io, digests[i].error);
    FileRef ref{p.relative, *digests[i].digest};
    if (!p.clip) {
      if (!index.metadata.emplace(p.field, std::move(ref)).second) {
        fail(ErrorKind::rule, "two files map to metadata entry '" + p.field + "'");
      }
      continue;
    }
    auto& entry = index.clips[ClipId(*p.clip)];
    if (!entry.fields.emplace(p.field, std::move(ref)).second) {
      fail(ErrorKind::rule,
           "two files map to clip '" + *p.clip + "' field '" + p.field + "'");
    }
    all_fields.insert(p.field);
  }
  if (rule.fill_absent_with_null) {
    for (auto& [_, entry] : index.clips) {
      for (const auto& f : all_fields) entry.fields.try_emplace(f, std::nullopt);
    }
  }
  return index;
}

}  // namespace soundkit
