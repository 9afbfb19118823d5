#include "soundkit/fetch.hpp"

#include <httplib.h>

#include <fstream>
#include <random>

#include "soundkit/canonical_json.hpp"
#include "soundkit/digest.hpp"
#include "soundkit/paths.hpp"

namespace soundkit {

namespace fs = std::filesystem;

std::string_view to_string(FetchOutcome outcome) {
  switch (outcome) {
    case FetchOutcome::downloaded: return "downloaded";
    case FetchOutcome::already_present: return "already_present";
    case FetchOutcome::skipped: return "skipped";
  }
  return "skipped";
}

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path[?query], at least "/"
  std::string path;    // path only
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::network, "malformed URL '" + url + "'");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    fail(ErrorKind::network, "unsupported URL scheme '" + scheme + "'");
  }
  const auto path_start = url.find_first_of("/?#", scheme_end + 3);
  Url u;
  u.origin = url.substr(0, path_start);
  if (u.origin.size() == scheme_end + 3) fail(ErrorKind::network, "URL has no host: '" + url + "'");
  std::string rest = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (const auto hash = rest.find('#'); hash != std::string::npos) rest.resize(hash);
  if (rest.empty() || rest.front() != '/') rest.insert(rest.begin(), '/');
  u.target = rest;
  u.path = rest.substr(0, rest.find('?'));
  return u;
}

std::string url_file_name(const RemoteFile& remote) {
  const auto path = split_url(remote.url).path;
  const auto name = path.substr(path.rfind('/') + 1);
  if (name.empty() || !is_safe_relative_path(name)) return remote.name;
  return name;
}

fs::path temporary_sibling(const fs::path& target) {
  std::random_device rd;
  return target.parent_path() / ("." + target.filename().string() + ".part-" + std::to_string(rd()));
}

bool has_digest(const fs::path& file, const RemoteFile& remote) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) return false;
  try {
    return compute_checksum(file, remote.checksum_algorithm) == remote.checksum;
  } catch (const Error&) {
    return false;
  }
}

struct Transfer {
  std::uint64_t bytes = 0;
  std::string digest;
};

enum class Attempt { ok, retry };

Attempt try_download(const RemoteFile& remote, const Url& url, const fs::path& temp,
                     const ProgressFn& progress, Transfer& transfer) {
  std::ofstream out(temp, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + temp.string());
  Hasher hasher(remote.checksum_algorithm);
  transfer = {};

  httplib::Client client(url.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);

  int status = 0;
  std::uint64_t total = 0;
  auto result = client.Get(
      url.target,
      [&](const httplib::Response& res) {
        status = res.status;
        if (res.has_header("Content-Length")) {
          total = std::strtoull(res.get_header_value("Content-Length").c_str(), nullptr, 10);
        }
        return res.status < 400;
      },
      [&](const char* data, std::size_t n) {
        out.write(data, static_cast<std::streamsize>(n));
        hasher.update(data, n);
        transfer.bytes += n;
        if (progress) progress(remote.name, transfer.bytes, total);
        return static_cast<bool>(out);
      });
  out.close();

  if (status >= 400) {
    fail(ErrorKind::network, "GET " + remote.url + " returned HTTP " + std::to_string(status));
  }
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::ExceedRedirectCount) {
      fail(ErrorKind::network, "GET " + remote.url + ": too many redirects");
    }
    if (err == httplib::Error::Canceled && !out) {
      fail(ErrorKind::io, "write failed for " + temp.string());
    }
    if (err == httplib::Error::Connection || err == httplib::Error::Read ||
        err == httplib::Error::ConnectionTimeout) {
      return Attempt::retry;
    }
    fail(ErrorKind::network, "GET " + remote.url + ": " + httplib::to_string(err));
  }
  if (status >= 300) {
    fail(ErrorKind::network, "GET " + remote.url + " ended in unfollowed redirect " + std::to_string(status));
  }
  if (!out) fail(ErrorKind::io, "write failed for " + temp.string());
  transfer.digest = hasher.finish();
  return Attempt::ok;
}

}  // namespace

fs::path remote_local_path(const RemoteFile& remote, const fs::path& data_home) {
  const fs::path dir = remote.destination == "." ? data_home : resolve_under(data_home, remote.destination);
  return dir / url_file_name(remote);
}

FetchResult fetch_remote(const RemoteFile& remote, const fs::path& data_home, bool force,
                         const ProgressFn& progress) {
  FetchResult result;
  result.local_path = remote_local_path(remote, data_home);
  if (!force && has_digest(result.local_path, remote)) {
    result.outcome = FetchOutcome::already_present;
    return result;
  }

  std::error_code ec;
  fs::create_directories(result.local_path.parent_path(), ec);
  if (ec) fail(ErrorKind::io, "cannot create " + result.local_path.parent_path().string() + ": " + ec.message());

  const auto url = split_url(remote.url);
  const auto temp = temporary_sibling(result.local_path);
  struct TempGuard {
    fs::path path;
    ~TempGuard() {
      std::error_code ignored;
      fs::remove(path, ignored);
    }
  } guard{temp};

  Transfer transfer;
  std::uint64_t total_bytes = 0;
  Attempt attempt = try_download(remote, url, temp, progress, transfer);
  total_bytes += transfer.bytes;
  if (attempt == Attempt::retry) {
    attempt = try_download(remote, url, temp, progress, transfer);
    total_bytes += transfer.bytes;
    if (attempt == Attempt::retry) {
      fail(ErrorKind::network, "GET " + remote.url + ": connection failed after retry");
    }
  }
  if (transfer.digest != remote.checksum) {
    fail(ErrorKind::checksum_mismatch, "downloaded " + remote.url + " has " +
                                           std::string(to_string(remote.checksum_algorithm)) + " " +
                                           transfer.digest + ", expected " + remote.checksum);
  }
  fs::rename(temp, result.local_path, ec);
  if (ec) fail(ErrorKind::io, "cannot install " + result.local_path.string() + ": " + ec.message());
  result.outcome = FetchOutcome::downloaded;
  result.bytes_transferred = total_bytes;
  return result;
}

namespace {

fs::path stamp_path(const fs::path& data_home, const RemoteFile& remote) {
  return data_home / ".soundkit" / "remotes" / (remote.name + ".json");
}

bool stamp_is_current(const fs::path& data_home, const RemoteFile& remote) {
  std::ifstream in(stamp_path(data_home, remote), std::ios::binary);
  if (!in) return false;
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    const auto doc = parse_strict(text);
    if (!doc.is_object() || doc.value("checksum", "") != remote.checksum) return false;
    const fs::path dir = remote.destination == "." ? data_home : data_home / remote.destination;
    for (const auto& f : doc.at("files")) {
      std::error_code ec;
      if (!fs::is_regular_file(dir / f.get<std::string>(), ec)) return false;
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

void write_stamp(const fs::path& data_home, const RemoteFile& remote,
                 const std::vector<std::string>& files) {
  const auto path = stamp_path(data_home, remote);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) fail(ErrorKind::io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  const auto text = to_canonical(Json{{"checksum", remote.checksum}, {"files", files}});
  const auto temp = temporary_sibling(path);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) fail(ErrorKind::io, "cannot write " + temp.string());
  }
  fs::rename(temp, path, ec);
  if (ec) fail(ErrorKind::io, "cannot write " + path.string() + ": " + ec.message());
}

}  // namespace

FetchSummary download_dataset(const DatasetManifest& manifest, const fs::path& data_home,
                              const DownloadOptions& options) {
  if (options.partial) {
    for (const auto& name : *options.partial) {
      if (!manifest.remotes.contains(name)) {
        fail(ErrorKind::unknown_remote, "dataset '" + manifest.id + "' has no remote '" + name + "'");
      }
    }
  }

  FetchSummary summary;
  for (const auto& [name, remote] : manifest.remotes) {
    if (options.partial && !options.partial->contains(name)) {
      summary.outcomes[name] = FetchOutcome::skipped;
      continue;
    }
    try {
      const auto kind = archive_kind(remote.unpack);
      if (kind && !options.force && stamp_is_current(data_home, remote)) {
        summary.outcomes[name] = FetchOutcome::already_present;
        continue;
      }
      const auto fetched = fetch_remote(remote, data_home, options.force, options.progress);
      summary.bytes_transferred += fetched.bytes_transferred;
      if (kind) {
        const fs::path dest = remote.destination == "." ? data_home : data_home / remote.destination;
        const auto files = extract_archive(fetched.local_path, *kind, dest);
        summary.extracted_files += files.size();
        write_stamp(data_home, remote, files);
        if (options.cleanup) {
          std::error_code ec;
          fs::remove(fetched.local_path, ec);
        }
      }
      summary.outcomes[name] = fetched.outcome;
    } catch (const Error& e) {
      throw DownloadFailed(e, name, summary);
    }
  }
  return summary;
}

}  // namespace soundkit
