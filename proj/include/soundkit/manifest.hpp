#pragma once

// Declarative dataset definitions. A new dataset is a manifest document plus
// a canonical index; no code is involved.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "soundkit/archive.hpp"
#include "soundkit/digest.hpp"
#include "soundkit/parsers.hpp"

namespace soundkit {

enum class Unpack { none, zip, tar_gz };

std::string_view to_string(Unpack unpack);
std::optional<ArchiveKind> archive_kind(Unpack unpack);

struct RemoteFile {
  std::string name;
  std::string url;
  std::string checksum;
  ChecksumAlgorithm checksum_algorithm = ChecksumAlgorithm::sha256;
  // Directory under the data home that receives the download (and its
  // extracted members). "." is the data home itself.
  std::string destination = ".";
  Unpack unpack = Unpack::none;

  friend bool operator==(const RemoteFile&, const RemoteFile&) = default;
};

enum class BindingKind { audio_wav, tags, events, metadata_table, raw };

std::string_view to_string(BindingKind kind);

struct FieldBinding {
  BindingKind kind = BindingKind::raw;
  // Used by tags (delimiter only) and events.
  EventFormatSpec format;

  friend bool operator==(const FieldBinding&, const FieldBinding&) = default;
};

struct DatasetManifest {
  std::string id;
  std::string name;
  std::string version;
  std::string license;
  std::string citation;
  std::string index_ref;
  std::map<std::string, RemoteFile> remotes;
  std::map<std::string, FieldBinding> field_bindings;

  // Directory the manifest was loaded from; index_ref resolves against it.
  // Empty for manifests parsed from memory, which resolve against the data
  // home instead. Not part of the document.
  std::filesystem::path origin_dir;

  const FieldBinding& binding(const std::string& field) const;

  friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
    return a.id == b.id && a.name == b.name && a.version == b.version && a.license == b.license &&
           a.citation == b.citation && a.index_ref == b.index_ref && a.remotes == b.remotes &&
           a.field_bindings == b.field_bindings;
  }
};

bool is_valid_dataset_id(std::string_view id);
// A destination is "." or a safe relative path.
bool is_valid_destination(std::string_view destination);

// Throws Error{schema} naming the offending key path.
DatasetManifest load_manifest(std::string_view bytes);
std::string serialize_manifest(const DatasetManifest& manifest);

}  // namespace soundkit
