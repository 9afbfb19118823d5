#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace soundkit {

// A dataset-relative path: "/"-separated, non-empty, no leading "/", no
// empty, "." or ".." segments, no backslashes or NUL bytes.
bool is_safe_relative_path(std::string_view path);

// Joins `relative` under `root`. Throws Error{path_traversal} when the
// relative path is not safe.
std::filesystem::path resolve_under(const std::filesystem::path& root,
                                    std::string_view relative);

// True when `candidate` lies lexically inside `root` (or equals it).
bool is_within(const std::filesystem::path& root, const std::filesystem::path& candidate);

// Generic "/"-separated form of a path relative to `root`.
std::string relative_generic(const std::filesystem::path& root,
                             const std::filesystem::path& file);

}  // namespace soundkit
