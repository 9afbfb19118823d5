#pragma once

// Standardized domain types shared by every module: clip identifiers,
// annotations (tags and timed events) and decoded audio. All values are
// immutable once constructed and validated by their factory functions.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace soundkit {

class ClipId {
 public:
  // Throws Error{schema} for empty ids or ids with a ".." segment.
  explicit ClipId(std::string value);

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const ClipId&, const ClipId&) = default;

 private:
  std::string value_;
};

bool is_valid_clip_id(std::string_view value);

struct Tag {
  std::string label;
  std::optional<double> confidence;

  friend bool operator==(const Tag&, const Tag&) = default;
};

// Throws Error{invalid_annotation} when the label is empty or the confidence
// is outside [0, 1].
Tag make_tag(std::string label, std::optional<double> confidence = std::nullopt);

// Source-file order, never sorted.
using TagList = std::vector<Tag>;

struct Event {
  double onset = 0.0;   // seconds
  double offset = 0.0;  // seconds
  std::string label;
  std::optional<double> confidence;

  double duration() const noexcept { return offset - onset; }

  friend bool operator==(const Event&, const Event&) = default;
};

// Throws Error{invalid_annotation} unless 0 <= onset <= offset (both finite),
// the label is non-empty and the confidence, if given, lies in [0, 1].
Event make_event(double onset, double offset, std::string label,
                 std::optional<double> confidence = std::nullopt);

using EventList = std::vector<Event>;

// Largest offset over the list, 0 for an empty list.
double clip_duration_bound(const EventList& events) noexcept;

class AudioBuffer {
 public:
  // Throws Error{media} if sample_rate is zero, there are no channels, the
  // channel lengths differ or any sample lies outside [-1, 1].
  AudioBuffer(unsigned sample_rate, std::vector<std::vector<float>> channels);

  unsigned sample_rate() const noexcept { return sample_rate_; }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t frame_count() const noexcept { return channels_.front().size(); }
  const std::vector<float>& channel(std::size_t i) const { return channels_.at(i); }
  const std::vector<std::vector<float>>& channels() const noexcept { return channels_; }
  double duration_seconds() const noexcept {
    return static_cast<double>(frame_count()) / sample_rate_;
  }

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  unsigned sample_rate_;
  std::vector<std::vector<float>> channels_;
};

// One recording and its associated assets. Construction performs no disk
// access; a field whose index entry is the null pair maps to std::nullopt.
struct Clip {
  ClipId id;
  std::map<std::string, std::optional<std::filesystem::path>> fields;
  std::map<std::string, std::string> extras;

  bool has_field(const std::string& name) const { return fields.contains(name); }
};

}  // namespace soundkit
