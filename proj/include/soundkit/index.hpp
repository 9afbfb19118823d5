#pragma once

// The canonical index: for every clip, each field maps to a (relative path,
// checksum) pair or to the null pair for assets a clip legitimately lacks.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "soundkit/digest.hpp"
#include "soundkit/model.hpp"

namespace soundkit {

struct FileRef {
  std::string path;
  std::string checksum;

  friend bool operator==(const FileRef&, const FileRef&) = default;
};

// std::nullopt is the null pair.
using FieldValue = std::optional<FileRef>;

struct IndexEntry {
  std::map<std::string, FieldValue> fields;

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

inline constexpr std::string_view kIndexSchemaVersion = "1.0";

struct DatasetIndex {
  std::string schema_version{kIndexSchemaVersion};
  ChecksumAlgorithm checksum_algorithm = ChecksumAlgorithm::sha256;
  std::map<ClipId, IndexEntry> clips;
  std::map<std::string, FileRef> metadata;

  // Count of non-null file references, clips and metadata together.
  std::size_t file_count() const;

  friend bool operator==(const DatasetIndex&, const DatasetIndex&) = default;
};

// Throws Error{schema} describing the first violated invariant.
void check_index(const DatasetIndex& index);

DatasetIndex parse_index(std::string_view bytes);
std::string serialize_index(const DatasetIndex& index);

// How build_index groups files into clips. A file at "<dir>/<rest>" belongs
// to field `<dir>` (or its mapped name) of clip `<rest>` minus its final
// extension. Files under `metadata_directory` become dataset-level metadata
// named by their stem instead.
struct FieldRule {
  std::map<std::string, std::string> field_for_directory;
  std::optional<std::string> metadata_directory = "metadata";
  // Give every clip every field seen anywhere, with the null pair where the
  // clip has no file.
  bool fill_absent_with_null = true;
};

// Walks regular files under `root` in bytewise path order without following
// symlinks or entering hidden (dot-prefixed) entries, then checksums them
// with `workers` threads (<= 0: default).
// Throws Error{io} or Error{rule} (two files claim the same clip field).
DatasetIndex build_index(const std::filesystem::path& root, ChecksumAlgorithm algorithm,
                         const FieldRule& rule = {}, int workers = 0);

}  // namespace soundkit
