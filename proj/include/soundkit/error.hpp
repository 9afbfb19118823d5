#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace soundkit {

enum class ErrorKind {
  invalid_annotation,
  io,
  schema,
  rule,
  parse,
  media,
  network,
  checksum_mismatch,
  archive,
  path_traversal,
  unknown_remote,
  unknown_clip,
  unknown_dataset,
  absent_field,
};

std::string_view to_string(ErrorKind kind);

// Every failure surfaced by the library. `kind` is the machine-readable
// category; parsers also attach a 1-based line number.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(message), kind_(kind), line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace soundkit
