#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "testutil.hpp"
#include "wordrec/audio.hpp"
#include "wordrec/error.hpp"

using namespace wordrec;
using testutil::TempDir;

namespace {

Signal make_signal(std::vector<double> samples, int rate = 10000) {
  return Signal{std::move(samples), rate};
}

Signal random_signal(size_t len, unsigned seed, int rate = 10000) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  Signal s;
  s.rate = rate;
  s.samples.resize(len);
  for (double& x : s.samples) x = amp(gen);
  return s;
}

}  // namespace

TEST_CASE("read_wav scales 16-bit samples by 32768") {
  TempDir dir("wav");
  testutil::write_file(dir.str("a.wav"),
                       testutil::wav_bytes(44100, 16, 1, {0, 16384, -16384}));
  const Signal s = read_wav(dir.str("a.wav"));
  CHECK(s.rate == 44100);
  REQUIRE(s.samples.size() == 3);
  CHECK(s.samples[0] == 0.0);
  CHECK(s.samples[1] == 0.5);
  CHECK(s.samples[2] == -0.5);
}

TEST_CASE("read_wav handles 8-bit unsigned and 24-bit signed PCM") {
  TempDir dir("wav");
  testutil::write_file(dir.str("b8.wav"), testutil::wav_bytes(8000, 8, 1, {128, 255, 0}));
  const Signal s8 = read_wav(dir.str("b8.wav"));
  CHECK(s8.samples[0] == 0.0);
  CHECK(s8.samples[1] == doctest::Approx(127.0 / 128.0));
  CHECK(s8.samples[2] == -1.0);

  testutil::write_file(dir.str("b24.wav"),
                       testutil::wav_bytes(48000, 24, 1, {0x400000, -0x400000}));
  const Signal s24 = read_wav(dir.str("b24.wav"));
  CHECK(s24.samples[0] == 0.5);
  CHECK(s24.samples[1] == -0.5);
}

TEST_CASE("read_wav skips unknown chunks before data") {
  TempDir dir("wav");
  testutil::write_file(dir.str("c.wav"),
                       testutil::wav_bytes(16000, 16, 1, {100, -100}, 1, true));
  const Signal s = read_wav(dir.str("c.wav"));
  CHECK(s.rate == 16000);
  CHECK(s.samples.size() == 2);
}

TEST_CASE("read_wav rejects bad inputs with specific errors") {
  TempDir dir("wav");

  try {
    read_wav(dir.str("nope.wav"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_file);
    CHECK(std::string(e.what()).find("nope.wav") != std::string::npos);
  }

  testutil::write_file(dir.str("stereo.wav"), testutil::wav_bytes(44100, 16, 2, {0, 0}));
  try {
    read_wav(dir.str("stereo.wav"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_channels);
  }

  testutil::write_file(dir.str("float.wav"), testutil::wav_bytes(44100, 16, 1, {0}, 3));
  try {
    read_wav(dir.str("float.wav"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_encoding);
  }

  testutil::write_file(dir.str("garbage.wav"), "RIFFxxxxJUNK");
  try {
    read_wav(dir.str("garbage.wav"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::malformed_header);
  }
}

TEST_CASE("write_wav16 round trips through read_wav") {
  TempDir dir("wav");
  Signal s = make_signal({0.0, 0.5, -0.5, 0.25}, 44100);
  write_wav16(s, dir.str("rt.wav"));
  const Signal back = read_wav(dir.str("rt.wav"));
  CHECK(back.rate == 44100);
  REQUIRE(back.samples.size() == s.samples.size());
  for (size_t i = 0; i < s.samples.size(); ++i) {
    CHECK(back.samples[i] == doctest::Approx(s.samples[i]).epsilon(1e-4));
  }
}

TEST_CASE("resample length follows floor(len * target / source)") {
  // exact rational case from the production rates
  const Signal in = random_signal(441, 7, 44100);
  const Signal out = resample(in, 10000);
  CHECK(out.rate == 10000);
  CHECK(out.samples.size() == 100);

  const Signal long_in = random_signal(29520, 8, 44100);
  CHECK(resample(long_in, 10000).samples.size() == 6693);
}

TEST_CASE("resample length law holds exhaustively on small instances") {
  for (int src : {3, 4, 5, 7, 9, 12}) {
    for (int tgt = 1; tgt <= src; ++tgt) {
      for (size_t len : {1u, 2u, 3u, 5u, 8u, 13u, 29u, 40u}) {
        const Signal in = random_signal(len, static_cast<unsigned>(src * 100 + tgt), src);
        const Signal out = resample(in, tgt);
        const size_t expect = static_cast<size_t>(
            static_cast<uint64_t>(len) * static_cast<uint64_t>(tgt) /
            static_cast<uint64_t>(src));
        CHECK(out.samples.size() == expect);
      }
    }
  }
}

TEST_CASE("resample at the same rate is the identity") {
  const Signal in = random_signal(500, 9, 10000);
  const Signal out = resample(in, 10000);
  REQUIRE(out.samples.size() == in.samples.size());
  for (size_t i = 0; i < in.samples.size(); ++i) {
    CHECK(out.samples[i] == doctest::Approx(in.samples[i]).epsilon(1e-12));
  }
}

TEST_CASE("resample preserves tone frequency and passband amplitude") {
  constexpr double pi = 3.14159265358979323846;

  // interior slice with an integer cycle count avoids leakage
  auto slice_amplitude = [](const std::vector<double>& x, size_t begin, size_t len,
                            size_t* peak_bin) {
    const std::vector<double> slice(x.begin() + static_cast<long>(begin),
                                    x.begin() + static_cast<long>(begin + len));
    double best = -1.0;
    size_t best_k = 0;
    for (size_t k = 1; k <= len / 2; ++k) {
      const double mag = std::abs(testutil::dft_bin(slice, k));
      if (mag > best) {
        best = mag;
        best_k = k;
      }
    }
    *peak_bin = best_k;
    return 2.0 * best / static_cast<double>(len);
  };

  // tones below the 5 kHz output Nyquist must keep their spectral peak;
  // well inside the passband the amplitude must survive within 1%
  for (double freq : {1000.0, 3000.0, 4400.0}) {
    Signal in;
    in.rate = 44100;
    in.samples.resize(44100);
    for (size_t n = 0; n < in.samples.size(); ++n) {
      in.samples[n] = std::sin(2.0 * pi * freq * static_cast<double>(n) / 44100.0);
    }

    size_t in_bin = 0;
    const double in_amp = slice_amplitude(in.samples, 4410, 4410, &in_bin);
    CHECK(in_bin == static_cast<size_t>(freq * 4410 / 44100));

    const Signal out = resample(in, 10000);
    REQUIRE(out.samples.size() == 10000);
    size_t out_bin = 0;
    const double out_amp = slice_amplitude(out.samples, 1000, 4000, &out_bin);
    CHECK(out_bin == static_cast<size_t>(freq * 4000 / 10000));
    if (freq <= 3000.0) {
      CHECK(out_amp == doctest::Approx(in_amp).epsilon(0.01));
    }
  }
}

TEST_CASE("resample rejects upsampling and empty input") {
  const Signal in = random_signal(100, 3, 10000);
  CHECK_THROWS_AS(resample(in, 20000), Error);
  Signal empty;
  empty.rate = 44100;
  CHECK_THROWS_AS(resample(empty, 10000), Error);
}

TEST_CASE("normalize scales the peak to one") {
  const Signal out = normalize(make_signal({0.5, -0.25}));
  CHECK(out.samples[0] == 1.0);
  CHECK(out.samples[1] == -0.5);

  const Signal id = normalize(make_signal({1.0, -1.0}));
  CHECK(id.samples[0] == 1.0);
  CHECK(id.samples[1] == -1.0);
}

TEST_CASE("normalize handles negative peaks") {
  const Signal out = normalize(make_signal({0.25, -0.5}));
  CHECK(out.samples[0] == 0.5);
  CHECK(out.samples[1] == -1.0);
}

TEST_CASE("normalize rejects silent input") {
  try {
    normalize(make_signal({0.0, 0.0, 0.0}));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::silent_signal);
  }
}

TEST_CASE("normalize is idempotent, bit for bit") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Signal s = random_signal(257, seed);
    const Signal once = normalize(s);
    const Signal twice = normalize(once);
    CHECK(once.samples == twice.samples);
  }
}

TEST_CASE("voiced_segments on an all-zero signal is empty") {
  const Signal s = make_signal(std::vector<double>(4000, 0.0));
  CHECK(voiced_segments(s, 108.0, 0.1).empty());
}

TEST_CASE("voiced_segments covers a uniform signal entirely") {
  // 5 exact windows of 1080 samples at 10 kHz
  const Signal s = make_signal(std::vector<double>(5400, 1.0));
  const auto segs = voiced_segments(s, 108.0, 0.1);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0] == Segment{0, 5400});
}

TEST_CASE("voiced_segments finds the energetic middle windows") {
  // 2160 zeros + 2160 at 0.9 + 2160 zeros: windows 2 and 3 carry all energy
  std::vector<double> samples(6480, 0.0);
  for (size_t i = 2160; i < 4320; ++i) samples[i] = 0.9;
  const auto segs = voiced_segments(make_signal(std::move(samples)), 108.0, 0.1);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0] == Segment{2160, 4320});
}

TEST_CASE("voiced_segments scores the partial tail by its own energy") {
  const Signal s = make_signal(std::vector<double>(1080 + 540, 1.0));
  // tail energy 540 passes a low threshold...
  auto segs = voiced_segments(s, 108.0, 0.2);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0] == Segment{0, 1620});
  // ...but not a high one (540 < 0.6 * 1080)
  segs = voiced_segments(s, 108.0, 0.6);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0] == Segment{0, 1080});
}

TEST_CASE("raising the VAD threshold never enlarges the voiced region") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    Signal s = random_signal(9000, seed);
    // shape an envelope so energies differ across windows
    for (size_t i = 0; i < s.samples.size(); ++i) {
      s.samples[i] *= std::sin(static_cast<double>(i) / 700.0) + 1.1;
    }
    size_t previous = s.samples.size() + 1;
    for (double ratio : {0.01, 0.05, 0.2, 0.5, 0.9}) {
      const auto segs = voiced_segments(s, 108.0, ratio);
      size_t voiced = 0;
      for (const Segment& seg : segs) voiced += seg.length();
      CHECK(voiced <= previous);
      previous = voiced;
    }
  }
}

TEST_CASE("remove_silence concatenates segments in order") {
  const Signal s = random_signal(300, 2);

  const Signal whole = remove_silence(s, {{0, 300}});
  CHECK(whole.samples == s.samples);

  const Signal parts = remove_silence(s, {{0, 100}, {200, 300}});
  REQUIRE(parts.samples.size() == 200);
  for (size_t i = 0; i < 100; ++i) {
    CHECK(parts.samples[i] == s.samples[i]);
    CHECK(parts.samples[100 + i] == s.samples[200 + i]);
  }
}

TEST_CASE("remove_silence errors") {
  const Signal s = random_signal(300, 2);
  try {
    remove_silence(s, {});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_voiced);
  }
  CHECK_THROWS_AS(remove_silence(s, {{100, 50}}), Error);       // start >= end
  CHECK_THROWS_AS(remove_silence(s, {{0, 400}}), Error);        // out of range
  CHECK_THROWS_AS(remove_silence(s, {{0, 150}, {100, 200}}), Error);  // overlap
}

TEST_CASE("remove_silence conserves total segment length") {
  std::mt19937 gen(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Signal s = random_signal(1000, static_cast<unsigned>(trial + 100));
    std::vector<Segment> segs;
    size_t pos = 0;
    size_t total = 0;
    while (pos + 10 < 1000 && segs.size() < 5) {
      const size_t start = pos + gen() % 50;
      const size_t end = std::min<size_t>(start + 1 + gen() % 100, 1000);
      if (start >= end) break;
      segs.push_back({start, end});
      total += end - start;
      pos = end + 1;
    }
    if (segs.empty()) continue;
    CHECK(remove_silence(s, segs).samples.size() == total);
  }
}

TEST_CASE("pre_emphasize matches the difference equation") {
  const Signal a = pre_emphasize(make_signal({1.0, 1.0, 1.0}), 0.9375);
  CHECK(a.samples[0] == 1.0);
  CHECK(a.samples[1] == 0.0625);
  CHECK(a.samples[2] == 0.0625);

  const Signal b = pre_emphasize(make_signal({0.0, 1.0, 0.0}), 0.9375);
  CHECK(b.samples[0] == 0.0);
  CHECK(b.samples[1] == 1.0);
  CHECK(b.samples[2] == -0.9375);
}

TEST_CASE("pre_emphasize with a = 0 is the identity") {
  const Signal s = random_signal(64, 5);
  CHECK(pre_emphasize(s, 0.0).samples == s.samples);
}

TEST_CASE("pre_emphasize rejects constants exactly") {
  // dyadic constants keep the arithmetic exact
  for (double c : {0.5, 0.25, 0.75, 1.0, -0.5, -0.125}) {
    const Signal out = pre_emphasize(make_signal(std::vector<double>(32, c)), 0.9375);
    CHECK(out.samples[0] == c);
    for (size_t n = 1; n < out.samples.size(); ++n) {
      CHECK(out.samples[n] == c * 0.0625);
    }
  }
}

TEST_CASE("pre_emphasize validates inputs") {
  CHECK_THROWS_AS(pre_emphasize(Signal{{}, 10000}, 0.9375), Error);
  CHECK_THROWS_AS(pre_emphasize(make_signal({1.0}), 1.0), Error);
  CHECK_THROWS_AS(pre_emphasize(make_signal({1.0}), -0.1), Error);
}

TEST_CASE("frame_and_window frame counts") {
  const Signal s = random_signal(4510, 11);
  const FrameMatrix fm = frame_and_window(s, 300, 100);
  CHECK(fm.frames.rows == 43);
  CHECK(fm.frames.cols == 300);

  CHECK(frame_and_window(random_signal(300, 12), 300, 100).frames.rows == 1);
  CHECK(frame_and_window(random_signal(399, 13), 300, 100).frames.rows == 1);
  CHECK(frame_and_window(random_signal(400, 14), 300, 100).frames.rows == 2);

  try {
    frame_and_window(random_signal(299, 15), 300, 100);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::utterance_too_short);
  }
}

TEST_CASE("hamming window endpoints and symmetry") {
  const std::vector<double> w = hamming_window(300);
  CHECK(w[0] == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(w[299] == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(w[149] == doctest::Approx(w[150]).epsilon(1e-12));
  for (int n = 0; n < 300; ++n) {
    CHECK(w[static_cast<size_t>(n)] ==
          doctest::Approx(w[static_cast<size_t>(299 - n)]).epsilon(1e-12));
  }
}

TEST_CASE("frames recover the raw samples when divided by the window") {
  const Signal s = random_signal(1200, 21);
  const FrameMatrix fm = frame_and_window(s, 300, 100);
  const std::vector<double> w = hamming_window(300);
  for (size_t t = 0; t < fm.frames.rows; ++t) {
    for (size_t n = 0; n < 300; ++n) {
      const double recovered = fm.frames(t, n) / w[n];
      CHECK(recovered == doctest::Approx(s.samples[t * 100 + n]).epsilon(1e-12));
    }
  }
}

TEST_CASE("audio operations are deterministic") {
  const Signal s = random_signal(4410, 33, 44100);
  const Signal a = pre_emphasize(normalize(resample(s, 10000)), 0.9375);
  const Signal b = pre_emphasize(normalize(resample(s, 10000)), 0.9375);
  CHECK(a.samples == b.samples);
}
