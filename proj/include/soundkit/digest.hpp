#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace soundkit {

enum class ChecksumAlgorithm { md5, sha256 };

std::string_view to_string(ChecksumAlgorithm algorithm);
std::optional<ChecksumAlgorithm> parse_checksum_algorithm(std::string_view name);

// Number of lowercase hex characters in a digest.
std::size_t hex_length(ChecksumAlgorithm algorithm);
bool is_lower_hex(std::string_view text);
bool is_valid_checksum(std::string_view text, ChecksumAlgorithm algorithm);

// Incremental digest over a byte stream.
class Hasher {
 public:
  explicit Hasher(ChecksumAlgorithm algorithm);
  ~Hasher();
  Hasher(Hasher&&) noexcept;
  Hasher& operator=(Hasher&&) noexcept;
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  void update(const void* data, std::size_t size);
  void update(std::string_view bytes) { update(bytes.data(), bytes.size()); }
  // Lowercase hex digest. The hasher cannot be updated afterwards.
  std::string finish();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

std::string digest_bytes(std::string_view bytes, ChecksumAlgorithm algorithm);

// Streams the file in fixed-size blocks. Throws Error{io} when the file is
// missing or unreadable.
std::string compute_checksum(const std::filesystem::path& file, ChecksumAlgorithm algorithm);

}  // namespace soundkit
