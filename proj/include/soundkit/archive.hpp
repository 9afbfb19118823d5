#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace soundkit {

enum class ArchiveKind { zip, tar_gz };

std::string_view to_string(ArchiveKind kind);

// Normalizes an archive member name: drops "." and empty segments and a
// trailing "/". Returns std::nullopt for names that are absolute, contain
// "..", a backslash or a drive prefix. An empty result means the archive root.
std::optional<std::string> normalize_member_name(std::string_view name);

// Extracts every regular file member strictly under `dest` and returns their
// relative paths sorted bytewise. Members are written to a staging directory
// first and moved into place only after the whole archive decoded cleanly, so
// on any error nothing from the archive is installed.
//
// Throws Error{archive} for corrupt or unsupported archives and
// Error{path_traversal} for members that would land outside `dest`, including
// symbolic and hard links.
std::vector<std::string> extract_archive(const std::filesystem::path& archive, ArchiveKind kind,
                                         const std::filesystem::path& dest);

}  // namespace soundkit
