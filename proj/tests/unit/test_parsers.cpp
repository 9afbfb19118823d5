#include <doctest.h>

#include <cmath>
#include <random>

#include "soundkit/error.hpp"
#include "soundkit/parsers.hpp"
#include "temp_dir.hpp"
#include "wav_writer.hpp"

using namespace soundkit;
using soundkit::testing::read_file;
using soundkit::testing::wav_float;
using soundkit::testing::wav_pcm;

namespace {

const EventFormatSpec kTab{};

template <class Fn>
Error error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error thrown");
  return Error(ErrorKind::io, "");
}

void put32(std::string& s, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s[at + i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

}  // namespace

TEST_CASE("parse_tags") {
  CHECK(parse_tags("dog\ncat\n", Delimiter::comma) == TagList{{"dog", {}}, {"cat", {}}});
  CHECK(parse_tags("siren,0.75\n", Delimiter::comma) == TagList{{"siren", 0.75}});
  CHECK(parse_tags("siren\t0.75", Delimiter::tab) == TagList{{"siren", 0.75}});
  CHECK(parse_tags("", Delimiter::comma).empty());
  CHECK(parse_tags("\n  \n\t\n", Delimiter::comma).empty());
  CHECK(parse_tags("b\na\n", Delimiter::comma) == TagList{{"b", {}}, {"a", {}}});

  const auto e = error_of([] { parse_tags("siren,1.5\n", Delimiter::comma); });
  CHECK(e.kind() == ErrorKind::parse);
  CHECK(e.line() == 1u);
  CHECK(error_of([] { parse_tags("a\nb,x\n", Delimiter::comma); }).line() == 2u);
  CHECK(error_of([] { parse_tags("a,0.1,0.2\n", Delimiter::comma); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_tags(",0.5\n", Delimiter::comma); }).kind() == ErrorKind::parse);
}

TEST_CASE("render_tags round trip") {
  const TagList tags{{"a", {}}, {"b", 0.125}, {"c d", 1.0}};
  for (auto d : {Delimiter::comma, Delimiter::tab}) CHECK(parse_tags(render_tags(tags, d), d) == tags);
  CHECK(render_tags(tags, Delimiter::comma) == "a\nb,0.125000\nc d,1.000000\n");
}

TEST_CASE("parse_events") {
  CHECK(parse_events("0.500\t1.250\tdog_bark\n", kTab) == EventList{{0.5, 1.25, "dog_bark", {}}});
  CHECK(parse_events("", kTab).empty());
  CHECK(parse_events("\xEF\xBB\xBF" "1e-1\t2.5E0\tx\r\n", kTab) == EventList{{0.1, 2.5, "x", {}}});
  CHECK(parse_events("2\t3\tb\n0\t1\ta\n", kTab) == EventList{{2, 3, "b", {}}, {0, 1, "a", {}}});

  const EventFormatSpec csv{Delimiter::comma, true, 1};
  CHECK(parse_events("onset,offset,label,confidence\n0,1,a,0.5\n1,2,b,\n", csv) ==
        EventList{{0, 1, "a", 0.5}, {1, 2, "b", {}}});
  CHECK(error_of([&] { parse_events("h\n1,2,c\n", csv); }).line() == 2u);

  CHECK(error_of([] { parse_events("2\t1\tx\n", kTab); }).line() == 1u);
  CHECK(error_of([] { parse_events("\n\n0\t1\n", kTab); }).line() == 3u);
  CHECK(error_of([] { parse_events("0\t1\tx\t0.5\n", kTab); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_events("nan\t1\tx\n", kTab); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_events("0\tinf\tx\n", kTab); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_events("0x1\t2\tx\n", kTab); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_events("0\t1\tx\xff\n", kTab); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_events("0,1,x,2\n", {Delimiter::comma, true, 0}); }).kind() == ErrorKind::parse);
}

TEST_CASE("render_events") {
  CHECK(render_events({{0.5, 1.25, "a", {}}}, kTab) == "0.500000\t1.250000\ta\n");
  CHECK(render_events({}, kTab).empty());
  const EventFormatSpec conf{Delimiter::comma, true, 2};
  CHECK(render_events({{0, 1, "a", 0.5}, {1, 2, "b", {}}}, conf) == "0.000000,1.000000,a,0.500000\n1.000000,2.000000,b,\n");
}

TEST_CASE("render(parse(x)) == x for canonical event files") {
  std::mt19937 rng(13);
  for (int file = 0; file < 200; ++file) {
    const EventFormatSpec spec{rng() % 2 ? Delimiter::tab : Delimiter::comma, rng() % 2 == 0, 0};
    const char d = spec.delimiter == Delimiter::tab ? '\t' : ',';
    std::string text;
    const int n = rng() % 8;
    for (int i = 0; i < n; ++i) {
      const long on = rng() % 100000000, len = rng() % 5000000;
      char buf[128];
      std::snprintf(buf, sizeof buf, "%ld.%06ld%c%ld.%06ld%clabel_%u", on / 1000000, on % 1000000, d,
                    (on + len) / 1000000, (on + len) % 1000000, d, static_cast<unsigned>(rng() % 9));
      text += buf;
      if (spec.has_confidence) {
        const long c = rng() % 1000001;
        std::snprintf(buf, sizeof buf, "%c%ld.%06ld", d, c / 1000000, c % 1000000);
        text += buf;
      }
      text += '\n';
    }
    CHECK(render_events(parse_events(text, spec), spec) == text);
  }
}

TEST_CASE("parse_metadata_table") {
  const auto t = parse_metadata_table("clip_id,city\nc1,NYC\n");
  CHECK(t.header == std::vector<std::string>{"clip_id", "city"});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows.at("c1").at("city") == "NYC");

  CHECK(error_of([] { parse_metadata_table("clip_id\nc1\nc1\n"); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_metadata_table("clip_id\nc1\nc1\n"); }).line() == 3u);
  CHECK(parse_metadata_table("clip_id,city\n").rows.empty());

  const auto q = parse_metadata_table("id,site\nr1,\"Marsh, north\"\nr2,\"say \"\"hi\"\"\"\n");
  CHECK(q.rows.at("r1").at("site") == "Marsh, north");
  CHECK(q.rows.at("r2").at("site") == "say \"hi\"");

  CHECK(error_of([] { parse_metadata_table(""); }).line() == 1u);
  CHECK(error_of([] { parse_metadata_table("a,b\n1\n"); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_metadata_table("a,a\n"); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_metadata_table("a,b\n1,\"open\n"); }).kind() == ErrorKind::parse);
  CHECK(error_of([] { parse_metadata_table("a\n../x\n"); }).kind() == ErrorKind::parse);
}

TEST_CASE("load_audio normalization") {
  const auto one = load_audio(wav_pcm(8000, 1, 16, {32767}));
  CHECK(one.sample_rate() == 8000);
  CHECK(one.channel_count() == 1);
  REQUIRE(one.frame_count() == 1);
  CHECK(one.channel(0)[0] == static_cast<float>(32767.0 / 32768.0));

  const auto ends = load_audio(wav_pcm(8000, 1, 16, {0, -32768}));
  CHECK(ends.channel(0) == std::vector<float>{0.0f, -1.0f});

  const auto u8 = load_audio(wav_pcm(8000, 1, 8, {0, 128, 255}));
  CHECK(u8.channel(0) == std::vector<float>{-1.0f, 0.0f, 127.0f / 128.0f});

  const auto s24 = load_audio(wav_pcm(16000, 2, 24, {-8388608, 8388607, 0, 4194304}));
  CHECK(s24.channel_count() == 2);
  CHECK(s24.channel(0) == std::vector<float>{-1.0f, 0.0f});
  CHECK(s24.channel(1) == std::vector<float>{static_cast<float>(8388607.0 / 8388608.0), 0.5f});

  const auto f = load_audio(wav_float(44100, 1, {0.25f, -2.0f, 3.0f}));
  CHECK(f.channel(0) == std::vector<float>{0.25f, -1.0f, 1.0f});
}

TEST_CASE("load_audio on the 440 Hz reference fixture") {
  // Written by Python's wave module: 0.5 * sin(2*pi*440*n/22050), 16-bit.
  const auto buffer = load_audio(read_file(SOUNDKIT_TEST_DATA_DIR "/sine440_mono16.wav"));
  CHECK(buffer.sample_rate() == 22050);
  CHECK(buffer.channel_count() == 1);
  CHECK(buffer.frame_count() == 22050);
  const double expected[10] = {0.000000000, 0.062525262, 0.124068924, 0.183664797, 0.240377271,
                               0.293316001, 0.341649890, 0.384620133, 0.421552127, 0.451866070};
  for (int i = 0; i < 10; ++i) CHECK(std::fabs(buffer.channel(0)[i] - expected[i]) < 1e-4);
}

TEST_CASE("load_audio rejections are MediaError") {
  const auto good = wav_pcm(8000, 1, 16, {1, 2, 3, 4});
  auto media = [](std::string bytes) { return error_of([&] { load_audio(bytes); }).kind() == ErrorKind::media; };
  CHECK(media(""));
  CHECK(media("RIFF"));
  CHECK(media(good.substr(0, good.size() - 1)));
  auto mp3 = good;
  mp3[20] = 0x55;  // format tag
  CHECK(media(mp3));
  auto zero_channels = good;
  zero_channels[22] = 0;
  CHECK(media(zero_channels));
  auto zero_rate = good;
  put32(zero_rate, 24, 0);
  CHECK(media(zero_rate));
  auto bad_align = good;
  bad_align[32] = 3;
  CHECK(media(bad_align));
  CHECK(media(wav_float(8000, 1, {std::nanf("")})));
  auto not_wave = good;
  not_wave[8] = 'X';
  CHECK(media(not_wave));
}

TEST_CASE("parsers are total over random bytes") {
  std::mt19937 rng(17);
  const auto seed_wav = wav_pcm(8000, 2, 16, {1, -1, 300, -300, 32767, -32768});
  for (int i = 0; i < 2000; ++i) {
    std::string bytes(rng() % 64, '\0');
    for (auto& c : bytes) c = "0123456789.,\t\n\r -eE\"abc\xff\xc3"[rng() % 25];
    std::string wav = seed_wav;
    for (int k = 0; k < 3; ++k) wav[rng() % wav.size()] = static_cast<char>(rng());
    auto total = [](auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        CHECK((e.kind() == ErrorKind::parse || e.kind() == ErrorKind::media));
      }
    };
    total([&] { parse_events(bytes, {Delimiter::comma, true, 1}); });
    total([&] { parse_events(bytes, kTab); });
    total([&] { parse_tags(bytes, Delimiter::comma); });
    total([&] { parse_metadata_table(bytes); });
    total([&] {
      const auto b = load_audio(wav);
      for (const auto& ch : b.channels()) {
        for (float s : ch) CHECK((s >= -1.0f && s <= 1.0f));
      }
    });
  }
}
