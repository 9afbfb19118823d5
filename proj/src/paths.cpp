#include "soundkit/paths.hpp"

#include <algorithm>

#include "soundkit/error.hpp"

namespace soundkit {

namespace fs = std::filesystem;

bool is_safe_relative_path(std::string_view path) {
  if (path.empty() || path.front() == '/') return false;
  if (path.find('\\') != std::string_view::npos) return false;
  if (path.find('\0') != std::string_view::npos) return false;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    const auto segment = path.substr(start, slash - start);
    if (segment.empty() || segment == "." || segment == "..") return false;
    start = slash + 1;
  }
  return true;
}

fs::path resolve_under(const fs::path& root, std::string_view relative) {
  if (!is_safe_relative_path(relative)) {
    fail(ErrorKind::path_traversal, "path '" + std::string(relative) + "' escapes its root");
  }
  return root / fs::path(std::string(relative));
}

bool is_within(const fs::path& root, const fs::path& candidate) {
  const auto r = root.lexically_normal();
  const auto c = candidate.lexically_normal();
  auto rit = r.begin();
  auto cit = c.begin();
  for (; rit != r.end(); ++rit, ++cit) {
    if (rit->empty() && std::next(rit) == r.end()) return true;  // trailing "/"
    if (cit == c.end() || *rit != *cit) return false;
  }
  return std::none_of(cit, c.end(), [](const fs::path& seg) { return seg == ".."; });
}

std::string relative_generic(const fs::path& root, const fs::path& file) {
  return file.lexically_relative(root).generic_string();
}

}  // namespace soundkit
