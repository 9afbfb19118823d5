#pragma once

// Archive builders for fixtures, including deliberately hostile members.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace soundkit::testing {

class ZipWriter {
 public:
  enum class Method { stored, deflated };

  void add_file(std::string name, std::string_view data, Method method = Method::stored);
  void add_directory(std::string name);  // name should end in "/"
  void add_symlink(std::string name, std::string_view target);

  // Archive bytes; timestamps are fixed so output is reproducible.
  std::string finish() const;

 private:
  struct Entry {
    std::string name;
    std::string stored_bytes;  // as written after the local header
    std::uint32_t crc = 0;
    std::uint32_t size = 0;
    std::uint16_t method = 0;
    std::uint32_t external_attributes = 0;
    std::uint16_t made_by = 0;
  };
  std::vector<Entry> entries_;
};

class TarWriter {
 public:
  void add_file(const std::string& name, std::string_view data);
  void add_directory(const std::string& name);
  void add_symlink(const std::string& name, const std::string& target);
  void add_hardlink(const std::string& name, const std::string& target);

  std::string tar_bytes() const;  // with the two terminating zero blocks

 private:
  void add_header(const std::string& name, char type, std::size_t size, const std::string& link);
  std::string bytes_;
};

// gzip member around `data`. level < 0 writes stored deflate blocks by hand,
// which are byte-stable regardless of the zlib version; otherwise zlib is
// used at that level.
std::string gzip(std::string_view data, int level = -1);

}  // namespace soundkit::testing
