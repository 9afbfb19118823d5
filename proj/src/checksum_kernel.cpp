#include "soundkit/checksum_kernel.hpp"

#include <omp.h>

#include "soundkit/error.hpp"

namespace soundkit {

namespace {

FileDigest digest_one(const std::filesystem::path& file, ChecksumAlgorithm algorithm) {
  FileDigest out;
  try {
    out.digest = compute_checksum(file, algorithm);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<FileDigest> checksum_files(std::span<const std::filesystem::path> files,
                                       ChecksumAlgorithm algorithm, int workers) {
  std::vector<FileDigest> results(files.size());
  const auto n = static_cast<long>(files.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  // Exceptions must not cross the parallel region; digest_one never throws.
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    results[static_cast<std::size_t>(i)] = digest_one(files[static_cast<std::size_t>(i)], algorithm);
  }
  return results;
}

std::vector<FileDigest> checksum_files_serial(std::span<const std::filesystem::path> files,
                                              ChecksumAlgorithm algorithm) {
  std::vector<FileDigest> results;
  results.reserve(files.size());
  for (const auto& f : files) results.push_back(digest_one(f, algorithm));
  return results;
}

}  // namespace soundkit
