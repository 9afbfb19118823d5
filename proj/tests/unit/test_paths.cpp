#include <doctest.h>

#include "soundkit/error.hpp"
#include "soundkit/paths.hpp"

using namespace soundkit;
namespace fs = std::filesystem;

TEST_CASE("safe relative paths") {
  for (const char* ok : {"a", "audio/clip-0001.wav", "a/b/c.txt", "a..b/c", ".hidden"}) {
    CHECK_MESSAGE(is_safe_relative_path(ok), ok);
  }
  for (const char* bad : {"", "/etc/passwd", "../x.wav", "a/../b", "a/./b", ".", "a//b", "a/",
                          "a\\b", "..", "x/.."}) {
    CHECK_MESSAGE(!is_safe_relative_path(bad), bad);
  }
  CHECK_FALSE(is_safe_relative_path(std::string("a\0b", 3)));
}

TEST_CASE("resolve_under") {
  CHECK(resolve_under("/data", "audio/a.wav") == fs::path("/data/audio/a.wav"));
  try {
    resolve_under("/data", "../secret");
    FAIL("expected PathTraversal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::path_traversal);
  }
}

TEST_CASE("is_within and relative_generic") {
  CHECK(is_within("/data", "/data/a/b"));
  CHECK(is_within("/data", "/data"));
  CHECK_FALSE(is_within("/data", "/database/a"));
  CHECK_FALSE(is_within("/data", "/data/../etc"));
  CHECK(relative_generic("/data", "/data/a/b.wav") == "a/b.wav");
}
