#include "soundkit/archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <set>

#include "soundkit/error.hpp"
#include "soundkit/paths.hpp"

namespace soundkit {

namespace fs = std::filesystem;

std::string_view to_string(ArchiveKind kind) { return kind == ArchiveKind::zip ? "zip" : "tar_gz"; }

std::optional<std::string> normalize_member_name(std::string_view name) {
  if (name.empty() || name.front() == '/') return std::nullopt;
  if (name.find('\\') != std::string_view::npos || name.find('\0') != std::string_view::npos) {
    return std::nullopt;
  }
  if (name.size() >= 2 && name[1] == ':') return std::nullopt;
  std::string out;
  std::size_t start = 0;
  while (start <= name.size()) {
    auto slash = name.find('/', start);
    if (slash == std::string_view::npos) slash = name.size();
    const auto segment = name.substr(start, slash - start);
    start = slash + 1;
    if (segment.empty() || segment == ".") continue;
    if (segment == "..") return std::nullopt;
    if (!out.empty()) out += '/';
    out += segment;
  }
  return out;
}

namespace {

[[noreturn]] void archive_error(const std::string& what) { fail(ErrorKind::archive, what); }

[[noreturn]] void traversal(std::string_view member, std::string_view why) {
  fail(ErrorKind::path_traversal,
       "archive member '" + std::string(member) + "' rejected: " + std::string(why));
}

std::string member_path(std::string_view raw) {
  auto normalized = normalize_member_name(raw);
  if (!normalized) traversal(raw, "escapes the destination");
  return *normalized;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
}

// Staging directory under dest, removed on destruction unless committed.
class Staging {
 public:
  explicit Staging(const fs::path& dest) : dest_(dest) {
    std::random_device rd;
    for (int attempt = 0; attempt < 16; ++attempt) {
      auto candidate = dest / (".soundkit-extract-" + std::to_string(rd()));
      std::error_code ec;
      if (fs::create_directory(candidate, ec)) {
        root_ = std::move(candidate);
        return;
      }
    }
    fail(ErrorKind::io, "cannot create staging directory in " + dest.string());
  }
  ~Staging() {
    std::error_code ec;
    fs::remove_all(root_, ec);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;

  const fs::path& root() const { return root_; }

  std::ofstream open(const std::string& relative) {
    const auto path = root_ / relative;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::io, "cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    files_.insert(relative);
    return out;
  }

  void add_directory(const std::string& relative) {
    if (!relative.empty()) directories_.insert(relative);
  }

  std::vector<std::string> commit() {
    for (const auto& dir : directories_) {
      std::error_code ec;
      fs::create_directories(dest_ / dir, ec);
      if (ec) fail(ErrorKind::io, "cannot create " + (dest_ / dir).string() + ": " + ec.message());
    }
    for (const auto& rel : files_) {
      const auto target = dest_ / rel;
      std::error_code ec;
      fs::create_directories(target.parent_path(), ec);
      if (ec) fail(ErrorKind::io, "cannot create " + target.parent_path().string() + ": " + ec.message());
      fs::rename(root_ / rel, target, ec);
      if (ec) fail(ErrorKind::io, "cannot install " + target.string() + ": " + ec.message());
    }
    return {files_.begin(), files_.end()};
  }

 private:
  fs::path dest_;
  fs::path root_;
  std::set<std::string> files_;
  std::set<std::string> directories_;
};

// ---------------------------------------------------------------- zip

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndOfCentralSig = 0x06054b50;

std::uint16_t le16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

struct ZipMember {
  std::string raw_name;
  std::string name;  // normalized
  bool directory = false;
  std::uint16_t flags = 0;
  std::uint16_t method = 0;
  std::uint32_t crc = 0;
  std::uint32_t compressed = 0;
  std::uint32_t uncompressed = 0;
  std::uint32_t local_offset = 0;
};

class ZipFile {
 public:
  explicit ZipFile(const fs::path& path) : in_(path, std::ios::binary) {
    if (!in_) fail(ErrorKind::io, "cannot open " + path.string());
    in_.seekg(0, std::ios::end);
    size_ = static_cast<std::uint64_t>(in_.tellg());
  }

  std::vector<unsigned char> read_at(std::uint64_t offset, std::size_t length) {
    if (offset > size_ || length > size_ - offset) archive_error("zip structure points past end of file");
    std::vector<unsigned char> buf(length);
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(length));
    if (!in_) archive_error("zip read failed");
    return buf;
  }

  std::uint64_t size() const { return size_; }
  std::ifstream& stream() { return in_; }

 private:
  std::ifstream in_;
  std::uint64_t size_ = 0;
};

std::vector<ZipMember> read_central_directory(ZipFile& zip) {
  if (zip.size() < 22) archive_error("file too small to be a zip archive");
  const std::uint64_t tail_len = std::min<std::uint64_t>(zip.size(), 22 + 0xFFFF);
  const auto tail = zip.read_at(zip.size() - tail_len, tail_len);
  std::optional<std::size_t> eocd;
  for (std::size_t i = tail.size() - 22 + 1; i-- > 0;) {
    if (le32(&tail[i]) == kEndOfCentralSig) {
      eocd = i;
      break;
    }
  }
  if (!eocd) archive_error("zip end-of-central-directory record not found");
  const auto* e = &tail[*eocd];
  const std::uint16_t disk = le16(e + 4);
  const std::uint16_t entries = le16(e + 10);
  const std::uint32_t cd_size = le32(e + 12);
  const std::uint32_t cd_offset = le32(e + 16);
  if (disk != 0) archive_error("multi-disk zip archives are not supported");
  if (entries == 0xFFFF || cd_offset == 0xFFFFFFFF) archive_error("zip64 archives are not supported");

  const auto cd = zip.read_at(cd_offset, cd_size);
  std::vector<ZipMember> members;
  std::size_t pos = 0;
  for (std::uint16_t n = 0; n < entries; ++n) {
    if (pos + 46 > cd.size() || le32(&cd[pos]) != kCentralHeaderSig) {
      archive_error("corrupt zip central directory");
    }
    const auto* h = &cd[pos];
    ZipMember m;
    const std::uint16_t made_by = le16(h + 4);
    m.flags = le16(h + 8);
    m.method = le16(h + 10);
    m.crc = le32(h + 16);
    m.compressed = le32(h + 20);
    m.uncompressed = le32(h + 24);
    const std::uint16_t name_len = le16(h + 28);
    const std::uint16_t extra_len = le16(h + 30);
    const std::uint16_t comment_len = le16(h + 32);
    const std::uint32_t external = le32(h + 38);
    m.local_offset = le32(h + 42);
    if (pos + 46 + name_len > cd.size()) archive_error("corrupt zip central directory");
    m.raw_name.assign(reinterpret_cast<const char*>(h + 46), name_len);
    pos += 46u + name_len + extra_len + comment_len;

    constexpr unsigned kUnixHost = 3;
    const unsigned mode = external >> 16;
    if ((made_by >> 8) == kUnixHost && (mode & 0170000) == 0120000) {
      traversal(m.raw_name, "symbolic link");
    }
    m.directory = !m.raw_name.empty() && m.raw_name.back() == '/';
    m.name = member_path(m.raw_name);
    if (m.compressed == 0xFFFFFFFF || m.uncompressed == 0xFFFFFFFF) {
      archive_error("zip64 members are not supported");
    }
    if (m.flags & 0x1) archive_error("encrypted zip member '" + m.raw_name + "'");
    if (!m.directory && m.method != 0 && m.method != 8) {
      archive_error("unsupported compression method " + std::to_string(m.method) + " for '" +
                    m.raw_name + "'");
    }
    members.push_back(std::move(m));
  }
  return members;
}

void extract_zip_member(ZipFile& zip, const ZipMember& m, std::ostream& out) {
  const auto local = zip.read_at(m.local_offset, 30);
  if (le32(local.data()) != kLocalHeaderSig) archive_error("corrupt local header for '" + m.raw_name + "'");
  const std::uint64_t data_offset =
      std::uint64_t{m.local_offset} + 30 + le16(&local[26]) + le16(&local[28]);
  if (data_offset > zip.size() || m.compressed > zip.size() - data_offset) {
    archive_error("member '" + m.raw_name + "' extends past end of archive");
  }
  auto& in = zip.stream();
  in.seekg(static_cast<std::streamoff>(data_offset));

  std::array<unsigned char, 1 << 15> input{};
  std::array<unsigned char, 1 << 15> output{};
  std::uint32_t remaining = m.compressed;
  std::uint64_t written = 0;
  uLong crc = crc32(0L, Z_NULL, 0);
  auto emit = [&](const unsigned char* p, std::size_t n) {
    written += n;
    if (written > m.uncompressed) archive_error("member '" + m.raw_name + "' is larger than declared");
    crc = crc32(crc, p, static_cast<uInt>(n));
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
  };

  if (m.method == 0) {
    while (remaining > 0) {
      const auto n = std::min<std::size_t>(remaining, input.size());
      in.read(reinterpret_cast<char*>(input.data()), static_cast<std::streamsize>(n));
      if (!in) archive_error("zip read failed");
      emit(input.data(), n);
      remaining -= static_cast<std::uint32_t>(n);
    }
  } else {
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) archive_error("inflate initialisation failed");
    struct Guard {
      z_stream* s;
      ~Guard() { inflateEnd(s); }
    } guard{&zs};
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
      if (zs.avail_in == 0) {
        if (remaining == 0) archive_error("truncated deflate stream in '" + m.raw_name + "'");
        const auto n = std::min<std::size_t>(remaining, input.size());
        in.read(reinterpret_cast<char*>(input.data()), static_cast<std::streamsize>(n));
        if (!in) archive_error("zip read failed");
        remaining -= static_cast<std::uint32_t>(n);
        zs.next_in = input.data();
        zs.avail_in = static_cast<uInt>(n);
      }
      zs.next_out = output.data();
      zs.avail_out = static_cast<uInt>(output.size());
      rc = inflate(&zs, Z_NO_FLUSH);
      if (rc != Z_OK && rc != Z_STREAM_END) archive_error("corrupt deflate data in '" + m.raw_name + "'");
      emit(output.data(), output.size() - zs.avail_out);
    }
  }
  if (written != m.uncompressed) archive_error("member '" + m.raw_name + "' is shorter than declared");
  if (crc != m.crc) archive_error("CRC mismatch in '" + m.raw_name + "'");
  if (!out) fail(ErrorKind::io, "write failed for '" + m.raw_name + "'");
}

std::vector<std::string> extract_zip(const fs::path& archive, const fs::path& dest) {
  ZipFile zip(archive);
  const auto members = read_central_directory(zip);  // every name checked before any write
  ensure_directory(dest);
  Staging staging(dest);
  for (const auto& m : members) {
    if (m.directory) {
      staging.add_directory(m.name);
      continue;
    }
    if (m.name.empty()) traversal(m.raw_name, "file member without a name");
    auto out = staging.open(m.name);
    extract_zip_member(zip, m, out);
  }
  return staging.commit();
}

// ---------------------------------------------------------------- tar.gz

class GzipReader {
 public:
  explicit GzipReader(const fs::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail(ErrorKind::io, "cannot open " + path.string());
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    if (probe.gcount() != 2 || magic[0] != 0x1f || magic[1] != 0x8b) {
      archive_error("not a gzip stream: " + path.string());
    }
    file_ = gzopen(path.c_str(), "rb");
    if (file_ == nullptr) fail(ErrorKind::io, "cannot open " + path.string());
  }
  ~GzipReader() { gzclose(file_); }
  GzipReader(const GzipReader&) = delete;
  GzipReader& operator=(const GzipReader&) = delete;

  // Reads exactly n bytes; returns false on clean end of stream at offset 0.
  bool read(unsigned char* buf, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
      const int r = gzread(file_, buf + got, static_cast<unsigned>(n - got));
      if (r < 0) {
        int errnum = 0;
        archive_error(std::string("corrupt gzip stream: ") + gzerror(file_, &errnum));
      }
      if (r == 0) {
        if (got == 0) return false;
        archive_error("truncated tar stream");
      }
      got += static_cast<std::size_t>(r);
    }
    return true;
  }

 private:
  gzFile file_ = nullptr;
};

constexpr std::size_t kBlock = 512;

std::string cstr_field(const unsigned char* p, std::size_t n) {
  std::size_t len = 0;
  while (len < n && p[len] != 0) ++len;
  return std::string(reinterpret_cast<const char*>(p), len);
}

std::uint64_t octal_field(const unsigned char* p, std::size_t n) {
  if (p[0] & 0x80) {  // base-256 encoding
    if (p[0] & 0x40) archive_error("negative tar size");
    std::uint64_t v = p[0] & 0x3F;
    for (std::size_t i = 1; i < n; ++i) {
      if (v >> 55) archive_error("tar size overflow");
      v = (v << 8) | p[i];
    }
    return v;
  }
  std::uint64_t v = 0;
  std::size_t i = 0;
  while (i < n && (p[i] == ' ' || p[i] == 0)) ++i;
  for (; i < n && p[i] >= '0' && p[i] <= '7'; ++i) {
    if (v >> 60) archive_error("tar numeric overflow");
    v = v * 8 + (p[i] - '0');
  }
  for (; i < n; ++i) {
    if (p[i] != ' ' && p[i] != 0) archive_error("malformed tar numeric field");
  }
  return v;
}

bool checksum_ok(const unsigned char* h) {
  const auto stored = octal_field(h + 148, 8);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < kBlock; ++i) sum += (i >= 148 && i < 156) ? ' ' : h[i];
  return sum == stored;
}

std::string read_payload(GzipReader& gz, std::uint64_t size) {
  if (size > (1u << 20)) archive_error("tar extended header too large");
  std::string payload(static_cast<std::size_t>((size + kBlock - 1) / kBlock * kBlock), '\0');
  if (!payload.empty() && !gz.read(reinterpret_cast<unsigned char*>(payload.data()), payload.size())) {
    archive_error("truncated tar stream");
  }
  payload.resize(static_cast<std::size_t>(size));
  return payload;
}

std::optional<std::string> pax_path(const std::string& records) {
  std::optional<std::string> path;
  std::size_t pos = 0;
  while (pos < records.size()) {
    const auto space = records.find(' ', pos);
    if (space == std::string::npos) archive_error("malformed pax header");
    std::size_t len = 0;
    for (std::size_t i = pos; i < space; ++i) {
      if (records[i] < '0' || records[i] > '9') archive_error("malformed pax header");
      len = len * 10 + static_cast<std::size_t>(records[i] - '0');
      if (len > records.size()) archive_error("malformed pax header");
    }
    if (len == 0 || pos + len > records.size() || records[pos + len - 1] != '\n') {
      archive_error("malformed pax header");
    }
    const auto record = records.substr(space + 1, pos + len - space - 2);
    if (record.rfind("path=", 0) == 0) path = record.substr(5);
    pos += len;
  }
  return path;
}

std::vector<std::string> extract_tar_gz(const fs::path& archive, const fs::path& dest) {
  GzipReader gz(archive);
  ensure_directory(dest);
  Staging staging(dest);
  std::array<unsigned char, kBlock> header{};
  std::optional<std::string> long_name;
  bool any_header = false;
  while (gz.read(header.data(), kBlock)) {
    if (std::all_of(header.begin(), header.end(), [](unsigned char c) { return c == 0; })) break;
    if (!checksum_ok(header.data())) archive_error("tar header checksum mismatch");
    any_header = true;
    const char type = static_cast<char>(header[156]);
    const auto size = octal_field(&header[124], 12);

    std::string raw = cstr_field(&header[0], 100);
    if (std::memcmp(&header[257], "ustar", 5) == 0) {
      const auto prefix = cstr_field(&header[345], 155);
      if (!prefix.empty()) raw = prefix + "/" + raw;
    }
    if (type == 'x') {
      long_name = pax_path(read_payload(gz, size));
      continue;
    }
    if (type == 'L') {
      auto name = read_payload(gz, size);
      name.resize(std::strlen(name.c_str()));
      long_name = std::move(name);
      continue;
    }
    if (type == 'g') {
      read_payload(gz, size);
      continue;
    }
    if (long_name) {
      raw = *long_name;
      long_name.reset();
    }

    if (type == '1' || type == '2') traversal(raw, "link members are not allowed");
    const auto name = member_path(raw);
    if (type == '5') {
      staging.add_directory(name);
      continue;
    }
    if (type != '0' && type != '\0' && type != '7') {
      archive_error("unsupported tar member type '" + std::string(1, type) + "' for '" + raw + "'");
    }
    if (name.empty()) traversal(raw, "file member without a name");

    auto out = staging.open(name);
    std::array<unsigned char, kBlock * 64> buf{};
    std::uint64_t remaining = size;
    while (remaining > 0) {
      const auto padded = std::min<std::uint64_t>((remaining + kBlock - 1) / kBlock * kBlock, buf.size());
      if (!gz.read(buf.data(), static_cast<std::size_t>(padded))) archive_error("truncated tar stream");
      const auto n = std::min<std::uint64_t>(remaining, padded);
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n));
      remaining -= n;
    }
    if (!out) fail(ErrorKind::io, "write failed for '" + raw + "'");
  }
  if (!any_header) archive_error("empty or non-tar archive");
  return staging.commit();
}

}  // namespace

std::vector<std::string> extract_archive(const fs::path& archive, ArchiveKind kind,
                                         const fs::path& dest) {
  // Directories this call may create, deepest first; a failed extraction
  // removes the ones that are still empty.
  std::vector<fs::path> created;
  std::error_code ec;
  for (auto p = dest; !p.empty() && !fs::exists(p, ec); p = p.parent_path()) {
    created.push_back(p);
    if (p == p.parent_path()) break;
  }
  try {
    return kind == ArchiveKind::zip ? extract_zip(archive, dest) : extract_tar_gz(archive, dest);
  } catch (...) {
    for (const auto& dir : created) fs::remove(dir, ec);
    throw;
  }
}

}  // namespace soundkit
