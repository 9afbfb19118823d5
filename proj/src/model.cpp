#include "soundkit/model.hpp"

#include <algorithm>
#include <cmath>

#include "soundkit/error.hpp"

namespace soundkit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_annotation: return "InvalidAnnotation";
    case ErrorKind::io: return "IoError";
    case ErrorKind::schema: return "SchemaError";
    case ErrorKind::rule: return "RuleError";
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::media: return "MediaError";
    case ErrorKind::network: return "NetworkError";
    case ErrorKind::checksum_mismatch: return "ChecksumMismatch";
    case ErrorKind::archive: return "ArchiveError";
    case ErrorKind::path_traversal: return "PathTraversal";
    case ErrorKind::unknown_remote: return "UnknownRemote";
    case ErrorKind::unknown_clip: return "UnknownClip";
    case ErrorKind::unknown_dataset: return "UnknownDataset";
    case ErrorKind::absent_field: return "AbsentField";
  }
  return "Error";
}

bool is_valid_clip_id(std::string_view value) {
  if (value.empty()) return false;
  std::size_t start = 0;
  while (true) {
    const auto slash = value.find('/', start);
    const auto segment = value.substr(start, slash == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : slash - start);
    if (segment == "..") return false;
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return value.find('\0') == std::string_view::npos;
}

ClipId::ClipId(std::string value) : value_(std::move(value)) {
  if (!is_valid_clip_id(value_)) {
    fail(ErrorKind::schema, "invalid clip id '" + value_ + "'");
  }
}

namespace {

bool valid_confidence(const std::optional<double>& c) {
  return !c || (std::isfinite(*c) && *c >= 0.0 && *c <= 1.0);
}

}  // namespace

Tag make_tag(std::string label, std::optional<double> confidence) {
  if (label.empty()) fail(ErrorKind::invalid_annotation, "tag label is empty");
  if (!valid_confidence(confidence)) {
    fail(ErrorKind::invalid_annotation, "tag confidence outside [0, 1]");
  }
  return Tag{std::move(label), confidence};
}

Event make_event(double onset, double offset, std::string label,
                 std::optional<double> confidence) {
  if (!std::isfinite(onset) || !std::isfinite(offset)) {
    fail(ErrorKind::invalid_annotation, "event times must be finite");
  }
  if (onset < 0.0) fail(ErrorKind::invalid_annotation, "event onset is negative");
  if (offset < onset) fail(ErrorKind::invalid_annotation, "event offset precedes onset");
  if (label.empty()) fail(ErrorKind::invalid_annotation, "event label is empty");
  if (!valid_confidence(confidence)) {
    fail(ErrorKind::invalid_annotation, "event confidence outside [0, 1]");
  }
  return Event{onset, offset, std::move(label), confidence};
}

double clip_duration_bound(const EventList& events) noexcept {
  double bound = 0.0;
  for (const auto& e : events) bound = std::max(bound, e.offset);
  return bound;
}

AudioBuffer::AudioBuffer(unsigned sample_rate, std::vector<std::vector<float>> channels)
    : sample_rate_(sample_rate), channels_(std::move(channels)) {
  if (sample_rate_ == 0) fail(ErrorKind::media, "sample rate must be positive");
  if (channels_.empty()) fail(ErrorKind::media, "audio has no channels");
  const auto frames = channels_.front().size();
  for (const auto& ch : channels_) {
    if (ch.size() != frames) fail(ErrorKind::media, "channel lengths differ");
    for (float s : ch) {
      if (!(s >= -1.0f && s <= 1.0f)) fail(ErrorKind::media, "sample outside [-1, 1]");
    }
  }
}

}  // namespace soundkit
