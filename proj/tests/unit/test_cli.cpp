#include <doctest.h>

#include <sstream>

#include "exemplar.hpp"
#include "fixture_server.hpp"
#include "soundkit/canonical_json.hpp"
#include "soundkit/cli.hpp"
#include "soundkit/index.hpp"
#include "soundkit/registry.hpp"
#include "soundkit/validate.hpp"
#include "temp_dir.hpp"

using namespace soundkit;
using namespace soundkit::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

// A registry directory holding the mini exemplar and an empty data root.
struct Sandbox {
  explicit Sandbox(const std::string& base_url = kExemplarBaseUrl) {
    mini.write_registry_entry(tmp / "builtin", base_url);
    fs::create_directories(tmp / "data");
    env["SOUNDKIT_DATA_HOME"] = (tmp / "data").string();
    env["HOME"] = (tmp / "home").string();
  }
  Result run(std::vector<std::string> args) const {
    std::ostringstream out, err;
    cli::Config config{tmp / "builtin"};
    const int code = cli::run(args, env, out, err, config);
    return {code, out.str(), err.str()};
  }
  fs::path home() const { return tmp / "data/exemplar-mini"; }

  Exemplar mini = exemplar_mini();
  TempDir tmp;
  std::map<std::string, std::string> env;
};

}  // namespace

TEST_CASE("validate --json on a clean tree") {
  Sandbox s;
  s.mini.write_tree(s.home());
  const auto r = s.run({"validate", "exemplar-mini", "--json"});
  CHECK(r.code == 0);
  const auto expected = report_to_document(validate(s.mini.index(), s.home()));
  CHECK(r.out == expected);
  CHECK(parse_report(r.out).clean());
  CHECK(r.err.empty());

  const auto fast = s.run({"validate", "exemplar-mini", "--fast", "--json"});
  CHECK(fast.code == 0);
  CHECK(parse_report(fast.out).mode == ValidationMode::fast);
}

TEST_CASE("validate after corruption exits 1 and names the field") {
  Sandbox s;
  s.mini.write_tree(s.home());
  auto bytes = read_file(s.home() / "tags/clip-0002.txt");
  bytes[0] ^= 1;
  write_file(s.home() / "tags/clip-0002.txt", bytes);
  const auto r = s.run({"validate", "exemplar-mini"});
  CHECK(r.code == 1);
  CHECK(r.out.find("invalid: clip clip-0002 field tags") != std::string::npos);

  const auto j = s.run({"validate", "exemplar-mini", "--json"});
  CHECK(j.code == 1);
  CHECK(parse_report(j.out).invalid_clips.at("clip-0002") == std::vector<std::string>{"tags"});
}

TEST_CASE("--data-home overrides the environment") {
  Sandbox s;
  s.mini.write_tree(s.tmp / "elsewhere");
  CHECK(s.run({"validate", "exemplar-mini"}).code == 1);
  CHECK(s.run({"validate", "exemplar-mini", "--data-home", (s.tmp / "elsewhere").string()}).code == 0);
}

TEST_CASE("unknown dataset exits 2 naming the id") {
  Sandbox s;
  const auto r = s.run({"download", "nonexistent-id"});
  CHECK(r.code == 2);
  CHECK(r.err.find("nonexistent-id") != std::string::npos);
  CHECK(r.out.empty());
  CHECK(list_tree(s.tmp / "data").empty());
}

TEST_CASE("usage errors exit 2 before side effects") {
  Sandbox s;
  for (const auto& args : std::vector<std::vector<std::string>>{
           {}, {"download"}, {"validate"}, {"frobnicate"}, {"cite"}, {"index", "build", "x"},
           {"index", "build", "x", "--output", "y", "--algo", "crc32"}, {"validate", "exemplar-mini", "--bogus"}}) {
    const auto r = s.run(args);
    CHECK_MESSAGE(r.code == 2, "args: " << args.size());
    CHECK(r.out.empty());
  }
  CHECK(list_tree(s.tmp / "data").empty());
  CHECK(s.run({"--help"}).code == 0);
}

TEST_CASE("download, then validate, then download again") {
  FixtureServer server;
  Sandbox s(server.base_url());
  for (const auto& r : s.mini.remotes) server.put("/exemplar-mini/" + r.file_name, r.bytes);

  const auto first = s.run({"download", "exemplar-mini"});
  CHECK(first.code == 0);
  CHECK(first.err.find("CC-BY-4.0") != std::string::npos);
  CHECK(s.run({"validate", "exemplar-mini"}).code == 0);

  server.reset_counters();
  const auto second = s.run({"download", "exemplar-mini"});
  CHECK(second.code == 0);
  CHECK(second.out.find("bytes transferred: 0") != std::string::npos);
  CHECK(server.total_requests() == 0);
}

TEST_CASE("download options") {
  FixtureServer server;
  Sandbox s(server.base_url());
  for (const auto& r : s.mini.remotes) server.put("/exemplar-mini/" + r.file_name, r.bytes);

  const auto partial = s.run({"download", "exemplar-mini", "--partial", "audio", "--no-cleanup"});
  CHECK(partial.code == 0);
  CHECK(partial.out.find("annotations: skipped") != std::string::npos);
  CHECK(fs::exists(s.home() / "audio.zip"));
  CHECK_FALSE(fs::exists(s.home() / "events"));

  CHECK(s.run({"download", "exemplar-mini", "--partial", "video"}).code == 2);

  server.put("/exemplar-mini/annotations.zip", "tampered");
  const auto bad = s.run({"download", "exemplar-mini"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("ChecksumMismatch") != std::string::npos);
  CHECK_FALSE(fs::exists(s.home() / "events"));
}

TEST_CASE("info, cite and license never need the data") {
  Sandbox s;
  const auto cite = s.run({"cite", "exemplar-mini"});
  CHECK(cite.code == 0);
  CHECK(cite.out == s.mini.citation + "\n");
  CHECK(s.run({"license", "exemplar-mini"}).out == "CC-BY-4.0\n");
  const auto info = s.run({"info", "exemplar-mini"});
  CHECK(info.code == 0);
  CHECK(info.out.find("clips: 4") != std::string::npos);
  CHECK(list_tree(s.tmp / "data").empty());
}

TEST_CASE("index build") {
  Sandbox s;
  s.mini.write_tree(s.tmp / "tree");
  const auto out = s.tmp / "out/index.json";
  const auto r = s.run({"index", "build", (s.tmp / "tree").string(), "--output", out.string(), "--algo", "md5"});
  CHECK(r.code == 0);
  CHECK(read_file(out) == serialize_index(s.mini.index()));

  CHECK(s.run({"index", "build", (s.tmp / "tree").string(), "--output", out.string()}).code == 0);
  CHECK(parse_index(read_file(out)).checksum_algorithm == ChecksumAlgorithm::sha256);

  const auto missing = s.run({"index", "build", (s.tmp / "nope").string(), "--output", out.string()});
  CHECK(missing.code == 2);
}

TEST_CASE("registry list") {
  Sandbox s;
  const auto j = s.run({"registry", "list", "--json"});
  CHECK(j.code == 0);
  const auto doc = parse_strict(j.out);
  CHECK(doc.at("datasets").at("exemplar-mini").at("version") == "1.0");
  CHECK(to_canonical(doc) == j.out);
  CHECK(s.run({"registry", "list"}).out.find("exemplar-mini") != std::string::npos);
}

TEST_CASE("clip ids agree between the CLI registry and the library") {
  Sandbox s;
  s.mini.write_tree(s.home());
  const auto manifest = Registry::standard(s.tmp / "builtin", s.tmp / "data").find("exemplar-mini");
  const auto ds = open_dataset(manifest, s.home());
  CHECK(ds.clip_ids().size() == 4);
  CHECK(s.run({"info", "exemplar-mini"}).out.find("clips: " + std::to_string(ds.clip_ids().size())) !=
        std::string::npos);
}
