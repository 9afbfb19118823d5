#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "soundkit/error.hpp"
#include "soundkit/parsers.hpp"

namespace soundkit {

std::string_view to_string(Delimiter d) { return d == Delimiter::tab ? "tab" : "comma"; }

std::optional<Delimiter> parse_delimiter(std::string_view name) {
  if (name == "tab") return Delimiter::tab;
  if (name == "comma") return Delimiter::comma;
  return std::nullopt;
}

namespace {

char delimiter_char(Delimiter d) { return d == Delimiter::tab ? '\t' : ','; }

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what, line);
}

// Returns the line number of the first invalid UTF-8 sequence, or 0.
std::size_t first_invalid_utf8_line(std::string_view s) {
  std::size_t line = 1;
  std::size_t i = 0;
  const auto n = s.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == '\n') ++line;
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return line;
    }
    if (i + len > n) return line;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return line;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return line;
    i += len;
  }
  return 0;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

// Splits UTF-8 text into physical lines, numbering from 1.
std::vector<Line> split_lines(std::string_view bytes) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  if (const auto bad = first_invalid_utf8_line(bytes); bad != 0) {
    parse_error(bad, "input is not valid UTF-8");
  }
  std::vector<Line> lines;
  std::size_t start = 0;
  std::size_t number = 1;
  while (start < bytes.size()) {
    auto nl = bytes.find('\n', start);
    if (nl == std::string_view::npos) nl = bytes.size();
    auto text = bytes.substr(start, nl - start);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    lines.push_back({number++, text});
    start = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

std::vector<std::string_view> split_cells(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

TagList parse_tags(std::string_view bytes, Delimiter delimiter) {
  TagList tags;
  for (const auto& line : split_lines(bytes)) {
    if (is_blank(line.text)) continue;
    const auto cells = split_cells(line.text, delimiter_char(delimiter));
    if (cells.size() > 2) parse_error(line.number, "expected label and optional confidence");
    std::optional<double> confidence;
    if (cells.size() == 2) {
      confidence = parse_number(cells[1]);
      if (!confidence) parse_error(line.number, "confidence is not a number");
    }
    try {
      tags.push_back(make_tag(std::string(cells[0]), confidence));
    } catch (const Error& e) {
      parse_error(line.number, e.what());
    }
  }
  return tags;
}

std::string render_tags(const TagList& tags, Delimiter delimiter) {
  std::string out;
  for (const auto& t : tags) {
    out += t.label;
    if (t.confidence) {
      out += delimiter_char(delimiter);
      out += fixed6(*t.confidence);
    }
    out += '\n';
  }
  return out;
}

EventList parse_events(std::string_view bytes, const EventFormatSpec& spec) {
  EventList events;
  const std::size_t expected = spec.has_confidence ? 4 : 3;
  for (const auto& line : split_lines(bytes)) {
    if (line.number <= spec.header_rows || is_blank(line.text)) continue;
    const auto cells = split_cells(line.text, delimiter_char(spec.delimiter));
    if (cells.size() != expected) {
      parse_error(line.number, "expected " + std::to_string(expected) + " cells, found " +
                                   std::to_string(cells.size()));
    }
    const auto onset = parse_number(cells[0]);
    if (!onset) parse_error(line.number, "onset is not a number");
    const auto offset = parse_number(cells[1]);
    if (!offset) parse_error(line.number, "offset is not a number");
    std::optional<double> confidence;
    if (spec.has_confidence && !cells[3].empty()) {
      confidence = parse_number(cells[3]);
      if (!confidence) parse_error(line.number, "confidence is not a number");
    }
    try {
      events.push_back(make_event(*onset, *offset, std::string(cells[2]), confidence));
    } catch (const Error& e) {
      parse_error(line.number, e.what());
    }
  }
  return events;
}

std::string render_events(const EventList& events, const EventFormatSpec& spec) {
  const char d = delimiter_char(spec.delimiter);
  std::string out;
  for (const auto& e : events) {
    out += fixed6(e.onset);
    out += d;
    out += fixed6(e.offset);
    out += d;
    out += e.label;
    if (spec.has_confidence) {
      out += d;
      if (e.confidence) out += fixed6(*e.confidence);  // empty cell: unstated
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_record(const Line& line) {
  std::vector<std::string> cells;
  std::string cell;
  const auto s = line.text;
  std::size_t i = 0;
  bool at_cell_start = true;
  while (i <= s.size()) {
    if (at_cell_start && i < s.size() && s[i] == '"') {
      ++i;
      while (true) {
        if (i >= s.size()) parse_error(line.number, "unterminated quoted cell");
        if (s[i] == '"') {
          if (i + 1 < s.size() && s[i + 1] == '"') {
            cell += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        cell += s[i++];
      }
      if (i < s.size() && s[i] != ',') parse_error(line.number, "text after closing quote");
    }
    if (i == s.size() || s[i] == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
      at_cell_start = true;
      ++i;
      continue;
    }
    if (s[i] == '"') parse_error(line.number, "stray quote inside unquoted cell");
    cell += s[i++];
    at_cell_start = false;
  }
  return cells;
}

}  // namespace

MetadataTable parse_metadata_table(std::string_view bytes) {
  MetadataTable table;
  bool have_header = false;
  for (const auto& line : split_lines(bytes)) {
    if (is_blank(line.text)) continue;
    auto cells = split_csv_record(line);
    if (!have_header) {
      std::set<std::string> seen;
      for (const auto& name : cells) {
        if (name.empty()) parse_error(line.number, "empty column name in header");
        if (!seen.insert(name).second) parse_error(line.number, "duplicate column '" + name + "'");
      }
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      parse_error(line.number, "expected " + std::to_string(table.header.size()) +
                                   " cells, found " + std::to_string(cells.size()));
    }
    if (!is_valid_clip_id(cells[0])) parse_error(line.number, "invalid clip id '" + cells[0] + "'");
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < cells.size(); ++c) row.emplace(table.header[c], cells[c]);
    if (!table.rows.emplace(cells[0], std::move(row)).second) {
      parse_error(line.number, "duplicate clip id '" + cells[0] + "'");
    }
  }
  if (!have_header) parse_error(1, "missing header row");
  return table;
}

}  // namespace soundkit
