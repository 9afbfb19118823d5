#pragma once

// Parsers for the on-disk annotation and media formats. Every parser is total
// over arbitrary input: it returns a value or throws soundkit::Error with kind
// parse (text formats, carrying a 1-based line number) or media (WAV).
//
// Text inputs must be UTF-8; a leading byte-order mark is stripped. Lines end
// in "\n" (a trailing "\r" is dropped) and blank or whitespace-only lines are
// skipped. Cells are trimmed of surrounding spaces and tabs.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "soundkit/model.hpp"

namespace soundkit {

enum class Delimiter { tab, comma };

std::string_view to_string(Delimiter d);
std::optional<Delimiter> parse_delimiter(std::string_view name);

struct EventFormatSpec {
  Delimiter delimiter = Delimiter::tab;
  bool has_confidence = false;
  std::size_t header_rows = 0;

  friend bool operator==(const EventFormatSpec&, const EventFormatSpec&) = default;
};

// label[<delim>confidence] per line.
TagList parse_tags(std::string_view bytes, Delimiter delimiter);
std::string render_tags(const TagList& tags, Delimiter delimiter);

// onset<delim>offset<delim>label[<delim>confidence] per line, after skipping
// spec.header_rows physical lines.
EventList parse_events(std::string_view bytes, const EventFormatSpec& spec);
// Times and confidences with six decimals. Header rows are never emitted.
std::string render_events(const EventList& events, const EventFormatSpec& spec);

struct MetadataTable {
  std::vector<std::string> header;
  // Keyed by the first column; every row holds one cell per header column.
  std::map<std::string, std::map<std::string, std::string>> rows;

  friend bool operator==(const MetadataTable&, const MetadataTable&) = default;
};

// Comma-separated, first row is the header, double-quote quoting for cells
// containing commas or quotes. Cells are carried verbatim.
MetadataTable parse_metadata_table(std::string_view bytes);

// RIFF/WAVE with PCM integer (8/16/24-bit) or 32-bit float samples. Integer
// samples are divided by 2^(bits-1); 8-bit data is unsigned and re-centred
// first. Float samples beyond [-1, 1] are clamped.
AudioBuffer load_audio(std::string_view bytes);

}  // namespace soundkit
