#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "soundkit/error.hpp"
#include "soundkit/manifest.hpp"

namespace soundkit {

enum class FetchOutcome { downloaded, already_present, skipped };

std::string_view to_string(FetchOutcome outcome);

struct FetchResult {
  std::filesystem::path local_path;
  FetchOutcome outcome = FetchOutcome::skipped;
  std::uint64_t bytes_transferred = 0;
};

// Called with (remote name, bytes so far, total or 0 when unknown).
using ProgressFn = std::function<void(const std::string&, std::uint64_t, std::uint64_t)>;

// Where a remote's downloaded file lives: <data_home>/<destination>/<name>,
// where <name> is the last segment of the URL path (the remote's name when
// the URL has none).
std::filesystem::path remote_local_path(const RemoteFile& remote,
                                        const std::filesystem::path& data_home);

// Downloads one remote unless a file with the declared digest is already in
// place. Bytes go to a temporary sibling that is renamed over the target only
// after its digest matched, so a partial or tampered download is never
// visible at the final path.
//
// Throws Error{network} (connection failure after one retry, HTTP status
// >= 400, too many redirects), Error{checksum_mismatch} or Error{io}.
FetchResult fetch_remote(const RemoteFile& remote, const std::filesystem::path& data_home,
                         bool force, const ProgressFn& progress = {});

struct FetchSummary {
  std::map<std::string, FetchOutcome> outcomes;
  std::uint64_t bytes_transferred = 0;
  std::size_t extracted_files = 0;
};

// Thrown by download_dataset when one remote fails. kind() is the kind of
// the underlying failure; earlier remotes stay installed.
class DownloadFailed : public Error {
 public:
  DownloadFailed(const Error& cause, std::string remote, FetchSummary summary)
      : Error(cause.kind(), "remote '" + remote + "': " + cause.what()),
        remote_(std::move(remote)),
        summary_(std::move(summary)) {}

  const std::string& remote() const noexcept { return remote_; }
  const FetchSummary& summary() const noexcept { return summary_; }

 private:
  std::string remote_;
  FetchSummary summary_;
};

struct DownloadOptions {
  std::optional<std::set<std::string>> partial;  // remote names; all when absent
  bool force = false;
  bool cleanup = true;  // delete archives once extracted
  ProgressFn progress;
};

// Fetches the selected remotes in name order and extracts archives into
// <data_home>/<destination>. A completed extraction is recorded under
// <data_home>/.soundkit/ so later runs report already_present and transfer
// nothing even after the archive was cleaned up.
//
// Throws Error{unknown_remote} before any transfer when `partial` names a
// remote the manifest lacks; DownloadFailed for per-remote failures.
FetchSummary download_dataset(const DatasetManifest& manifest,
                              const std::filesystem::path& data_home,
                              const DownloadOptions& options = {});

}  // namespace soundkit
