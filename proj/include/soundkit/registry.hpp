#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "soundkit/error.hpp"
#include "soundkit/index.hpp"
#include "soundkit/manifest.hpp"
#include "soundkit/model.hpp"
#include "soundkit/parsers.hpp"
#include "soundkit/validate.hpp"

namespace soundkit {

// Manifests discovered as <dir>/<id>.json across an ordered list of
// directories. When two directories hold the same id the later one wins.
class Registry {
 public:
  explicit Registry(std::vector<std::filesystem::path> directories);

  // Built-in manifests plus <data_root>/manifests when a data root is given.
  static Registry standard(const std::filesystem::path& builtin_dir,
                           const std::optional<std::filesystem::path>& data_root);

  // Sorted ids. Throws Error{schema} if a manifest file is malformed or its
  // id disagrees with its file name.
  std::vector<std::string> ids() const;

  // Throws Error{unknown_dataset}, Error{io} or Error{schema}.
  DatasetManifest find(std::string_view id) const;

  const std::vector<std::filesystem::path>& directories() const noexcept { return directories_; }

 private:
  std::vector<std::filesystem::path> directories_;
};

// Data home lookup order: explicit flag, then $SOUNDKIT_DATA_HOME/<id>, then
// <home>/sound_datasets/<id>.
std::filesystem::path resolve_data_home(const std::optional<std::string>& flag,
                                        const std::optional<std::string>& env_data_root,
                                        const std::optional<std::string>& home,
                                        std::string_view dataset_id);

// Every disk read the dataset handle performs goes through a FileSource, so
// tests can observe exactly which files were touched.
class FileSource {
 public:
  virtual ~FileSource() = default;
  // Throws Error{io}.
  virtual std::string read(const std::filesystem::path& path) const = 0;
};

std::shared_ptr<const FileSource> local_files();

struct RawBytes {
  std::string bytes;
  friend bool operator==(const RawBytes&, const RawBytes&) = default;
};

using Annotation = std::variant<TagList, EventList, MetadataTable, AudioBuffer, RawBytes>;

// A manifest bound to its index and a data home. Copies share one annotation
// cache; the handle is safe to use from several threads.
class Dataset {
 public:
  // Reads and parses the index only; no clip file is touched.
  static Dataset open(DatasetManifest manifest, std::filesystem::path data_home,
                      std::shared_ptr<const FileSource> files = local_files());

  const DatasetManifest& manifest() const noexcept;
  const DatasetIndex& index() const noexcept;
  const std::filesystem::path& data_home() const noexcept;

  std::vector<ClipId> clip_ids() const;

  // Throws Error{unknown_clip}. Resolves paths only.
  Clip get_clip(std::string_view id) const;

  // Parses the field with the parser its binding selects (unbound fields are
  // raw) and caches the result for the handle's lifetime. Throws
  // Error{absent_field} for null-pair fields, Error{schema} for fields the
  // clip does not have, and propagates io/parse/media errors prefixed with
  // the clip and field.
  std::shared_ptr<const Annotation> clip_annotation(const Clip& clip, const std::string& field) const;

  template <class T>
  const T& clip_annotation_as(const Clip& clip, const std::string& field,
                              std::shared_ptr<const Annotation>& keep) const {
    keep = clip_annotation(clip, field);
    if (const auto* value = std::get_if<T>(keep.get())) return *value;
    throw Error(ErrorKind::schema, "field '" + field + "' is bound to a different kind");
  }

  // Dataset-level metadata file, parsed per its binding and cached.
  std::shared_ptr<const Annotation> metadata_annotation(const std::string& name) const;

  // Copy of `clip` with extras filled from every metadata_table-bound
  // metadata entry that has a row for this clip (columns prefixed with the
  // entry name, e.g. "clip_info.city"). Reads those tables.
  Clip with_extras(Clip clip) const;

  const std::string& cite() const noexcept;
  const std::string& license() const noexcept;

  ValidationReport validate(const ValidateOptions& options = {}) const;

 private:
  struct State;
  explicit Dataset(std::shared_ptr<State> state);
  std::shared_ptr<State> state_;
};

inline Dataset open_dataset(DatasetManifest manifest, std::filesystem::path data_home,
                            std::shared_ptr<const FileSource> files = local_files()) {
  return Dataset::open(std::move(manifest), std::move(data_home), std::move(files));
}

}  // namespace soundkit
