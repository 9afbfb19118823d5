#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "soundkit/index.hpp"

namespace soundkit {

enum class ValidationMode { full, fast };

std::string_view to_string(ValidationMode mode);

struct ValidationReport {
  ValidationMode mode = ValidationMode::full;
  std::map<std::string, std::vector<std::string>> missing_clips;
  std::map<std::string, std::vector<std::string>> invalid_clips;
  std::vector<std::string> missing_metadata;
  std::vector<std::string> invalid_metadata;
  // Invalid entries whose file exists but could not be read. Rendered under
  // "unreadable" only when non-empty.
  std::map<std::string, std::vector<std::string>> unreadable_clips;
  std::vector<std::string> unreadable_metadata;
  std::size_t files_checked = 0;

  bool clean() const noexcept {
    return missing_clips.empty() && invalid_clips.empty() && missing_metadata.empty() &&
           invalid_metadata.empty();
  }

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

struct ValidateOptions {
  ValidationMode mode = ValidationMode::full;
  int workers = 0;  // checksum threads, <= 0: OpenMP default
};

// Read-only diff of `data_home` against the index. Null-pair fields are
// skipped and extra local files are ignored.
ValidationReport validate(const DatasetIndex& index, const std::filesystem::path& data_home,
                          const ValidateOptions& options = {});

std::string report_to_document(const ValidationReport& report);
// Throws Error{schema}.
ValidationReport parse_report(std::string_view bytes);

}  // namespace soundkit
