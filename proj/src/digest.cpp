#include "soundkit/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>

#include "soundkit/error.hpp"

namespace soundkit {

std::string_view to_string(ChecksumAlgorithm algorithm) {
  return algorithm == ChecksumAlgorithm::md5 ? "md5" : "sha256";
}

std::optional<ChecksumAlgorithm> parse_checksum_algorithm(std::string_view name) {
  if (name == "md5") return ChecksumAlgorithm::md5;
  if (name == "sha256") return ChecksumAlgorithm::sha256;
  return std::nullopt;
}

std::size_t hex_length(ChecksumAlgorithm algorithm) {
  return algorithm == ChecksumAlgorithm::md5 ? 32 : 64;
}

bool is_lower_hex(std::string_view text) {
  for (char c : text) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

bool is_valid_checksum(std::string_view text, ChecksumAlgorithm algorithm) {
  return text.size() == hex_length(algorithm) && is_lower_hex(text);
}

struct Hasher::State {
  EVP_MD_CTX* ctx = nullptr;
  ~State() { EVP_MD_CTX_free(ctx); }
};

Hasher::Hasher(ChecksumAlgorithm algorithm) : state_(std::make_unique<State>()) {
  state_->ctx = EVP_MD_CTX_new();
  const EVP_MD* md = algorithm == ChecksumAlgorithm::md5 ? EVP_md5() : EVP_sha256();
  if (state_->ctx == nullptr || EVP_DigestInit_ex(state_->ctx, md, nullptr) != 1) {
    throw std::runtime_error("digest initialisation failed");
  }
}

Hasher::~Hasher() = default;
Hasher::Hasher(Hasher&&) noexcept = default;
Hasher& Hasher::operator=(Hasher&&) noexcept = default;

void Hasher::update(const void* data, std::size_t size) {
  if (size != 0) EVP_DigestUpdate(state_->ctx, data, size);
}

std::string Hasher::finish() {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(state_->ctx, digest.data(), &length);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string digest_bytes(std::string_view bytes, ChecksumAlgorithm algorithm) {
  Hasher h(algorithm);
  h.update(bytes);
  return h.finish();
}

std::string compute_checksum(const std::filesystem::path& file, ChecksumAlgorithm algorithm) {
  std::error_code ec;
  if (std::filesystem::is_directory(file, ec)) {
    fail(ErrorKind::io, "cannot checksum directory " + file.string());
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    fail(ErrorKind::io, "cannot open " + file.string() + ": " + std::strerror(errno));
  }
  Hasher h(algorithm);
  std::array<char, 1 << 16> block{};
  while (in) {
    in.read(block.data(), block.size());
    h.update(block.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) fail(ErrorKind::io, "read error on " + file.string());
  return h.finish();
}

}  // namespace soundkit
