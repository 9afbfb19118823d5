#include "soundkit/validate.hpp"

#include <algorithm>

#include "soundkit/canonical_json.hpp"
#include "soundkit/checksum_kernel.hpp"
#include "soundkit/error.hpp"
#include "soundkit/paths.hpp"

namespace soundkit {

namespace fs = std::filesystem;

std::string_view to_string(ValidationMode mode) {
  return mode == ValidationMode::full ? "full" : "fast";
}

namespace {

struct Target {
  std::optional<std::string> clip;  // nullopt: metadata
  std::string field;
  const FileRef* ref;
};

void add(std::map<std::string, std::vector<std::string>>& into, const std::string& clip,
         const std::string& field) {
  into[clip].push_back(field);
}

void sort_all(ValidationReport& r) {
  for (auto* m : {&r.missing_clips, &r.invalid_clips, &r.unreadable_clips}) {
    for (auto& [_, v] : *m) std::sort(v.begin(), v.end());
  }
  for (auto* v : {&r.missing_metadata, &r.invalid_metadata, &r.unreadable_metadata}) {
    std::sort(v->begin(), v->end());
  }
}

}  // namespace

ValidationReport validate(const DatasetIndex& index, const fs::path& data_home,
                          const ValidateOptions& options) {
  std::vector<Target> targets;
  for (const auto& [id, entry] : index.clips) {
    for (const auto& [field, value] : entry.fields) {
      if (value) targets.push_back({id.str(), field, &*value});
    }
  }
  for (const auto& [name, ref] : index.metadata) targets.push_back({std::nullopt, name, &ref});

  ValidationReport report;
  report.mode = options.mode;
  report.files_checked = targets.size();

  auto mark = [&](const Target& t, bool invalid, bool unreadable) {
    if (t.clip) {
      add(invalid ? report.invalid_clips : report.missing_clips, *t.clip, t.field);
      if (unreadable) add(report.unreadable_clips, *t.clip, t.field);
    } else {
      (invalid ? report.invalid_metadata : report.missing_metadata).push_back(t.field);
      if (unreadable) report.unreadable_metadata.push_back(t.field);
    }
  };

  std::vector<fs::path> to_hash;
  std::vector<const Target*> hashed_targets;
  for (const auto& t : targets) {
    fs::path resolved;
    try {
      resolved = resolve_under(data_home, t.ref->path);
    } catch (const Error&) {
      mark(t, true, true);
      continue;
    }
    std::error_code ec;
    const auto status = fs::status(resolved, ec);
    if (!fs::is_regular_file(status)) {
      mark(t, false, false);
      continue;
    }
    if (options.mode == ValidationMode::full) {
      to_hash.push_back(std::move(resolved));
      hashed_targets.push_back(&t);
    }
  }

  const auto digests = checksum_files(to_hash, index.checksum_algorithm, options.workers);
  for (std::size_t i = 0; i < digests.size(); ++i) {
    const auto& t = *hashed_targets[i];
    if (!digests[i].digest) {
      mark(t, true, true);
    } else if (*digests[i].digest != t.ref->checksum) {
      mark(t, true, false);
    }
  }
  sort_all(report);
  return report;
}

namespace {

Json section(const std::map<std::string, std::vector<std::string>>& clips,
             const std::vector<std::string>& metadata) {
  Json c = Json::object();
  for (const auto& [id, fields] : clips) c[id] = fields;
  return Json{{"clips", std::move(c)}, {"metadata", metadata}};
}

void read_section(const Json& doc, const std::string& where,
                  std::map<std::string, std::vector<std::string>>& clips,
                  std::vector<std::string>& metadata) {
  require_keys(doc, {"clips", "metadata"}, {}, where);
  require_object(doc["clips"], where + ".clips");
  auto string_list = [](const Json& v, const std::string& at) {
    if (!v.is_array()) fail(ErrorKind::schema, at + ": expected an array");
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(require_string(s, at));
    if (!std::is_sorted(out.begin(), out.end())) fail(ErrorKind::schema, at + ": not sorted");
    return out;
  };
  for (const auto& [id, fields] : doc["clips"].items()) {
    auto list = string_list(fields, where + ".clips." + id);
    if (list.empty()) fail(ErrorKind::schema, where + ".clips." + id + ": empty field list");
    clips.emplace(id, std::move(list));
  }
  metadata = string_list(doc["metadata"], where + ".metadata");
}

}  // namespace

std::string report_to_document(const ValidationReport& report) {
  Json doc = Json::object();
  doc["clean"] = report.clean();
  doc["files_checked"] = report.files_checked;
  doc["invalid"] = section(report.invalid_clips, report.invalid_metadata);
  doc["missing"] = section(report.missing_clips, report.missing_metadata);
  doc["mode"] = std::string(to_string(report.mode));
  if (!report.unreadable_clips.empty() || !report.unreadable_metadata.empty()) {
    doc["unreadable"] = section(report.unreadable_clips, report.unreadable_metadata);
  }
  return to_canonical(doc);
}

ValidationReport parse_report(std::string_view bytes) {
  const Json doc = parse_strict(bytes);
  require_keys(doc, {"clean", "files_checked", "invalid", "missing", "mode"}, {"unreadable"}, "");
  ValidationReport r;
  const auto& mode = require_string(doc["mode"], "mode");
  if (mode == "full") {
    r.mode = ValidationMode::full;
  } else if (mode == "fast") {
    r.mode = ValidationMode::fast;
  } else {
    fail(ErrorKind::schema, "mode: unknown mode '" + mode + "'");
  }
  if (!doc["files_checked"].is_number_unsigned()) {
    fail(ErrorKind::schema, "files_checked: expected a non-negative integer");
  }
  r.files_checked = doc["files_checked"].get<std::size_t>();
  read_section(doc["invalid"], "invalid", r.invalid_clips, r.invalid_metadata);
  read_section(doc["missing"], "missing", r.missing_clips, r.missing_metadata);
  if (doc.contains("unreadable")) {
    read_section(doc["unreadable"], "unreadable", r.unreadable_clips, r.unreadable_metadata);
  }
  if (!doc["clean"].is_boolean() || doc["clean"].get<bool>() != r.clean()) {
    fail(ErrorKind::schema, "clean: inconsistent with the listed problems");
  }
  return r;
}

}  // namespace soundkit
