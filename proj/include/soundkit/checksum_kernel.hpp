#pragma once

// Corpus checksumming. The OpenMP kernel fans files out across workers and
// writes each result into the slot matching its input position, so output
// order never depends on scheduling. The serial kernel is the reference the
// tests and the benchmark compare against.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soundkit/digest.hpp"

namespace soundkit {

struct FileDigest {
  std::optional<std::string> digest;  // empty when the file could not be read
  std::string error;
};

// workers <= 0 selects the OpenMP default.
std::vector<FileDigest> checksum_files(std::span<const std::filesystem::path> files,
                                       ChecksumAlgorithm algorithm, int workers = 0);

std::vector<FileDigest> checksum_files_serial(std::span<const std::filesystem::path> files,
                                              ChecksumAlgorithm algorithm);

}  // namespace soundkit
