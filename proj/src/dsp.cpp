#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "wordrec/audio.hpp"
#include "wordrec/error.hpp"

namespace wordrec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Zero crossings per side of the windowed-sinc resampling kernel.
constexpr int kSincZeroCrossings = 24;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

void require_non_empty(const Signal& s, const char* op) {
  if (s.samples.empty()) fail(Errc::empty_signal, std::string(op) + ": empty signal");
}

}  // namespace

Signal resample(const Signal& s, int target_rate) {
  require_non_empty(s, "resample");
  if (target_rate <= 0) fail(Errc::invalid_config, "resample: target rate must be positive");
  if (target_rate > s.rate) {
    fail(Errc::upsampling_requested,
         "resample: " + std::to_string(s.rate) + " -> " + std::to_string(target_rate) +
             " Hz would upsample");
  }

  const int g = std::gcd(target_rate, s.rate);
  const int up = target_rate / g;
  const int down = s.rate / g;

  const size_t in_len = s.samples.size();
  const size_t out_len = static_cast<size_t>(
      static_cast<uint64_t>(in_len) * static_cast<uint64_t>(up) /
      static_cast<uint64_t>(down));

  Signal out;
  out.rate = target_rate;
  out.samples.resize(out_len);
  if (out_len == 0) return out;

  // Anti-aliasing cutoff at target_rate/2, i.e. up/down * Nyquist of the input.
  const double cutoff = 0.5 * static_cast<double>(up) / static_cast<double>(down);
  const double half_width = kSincZeroCrossings / (2.0 * cutoff);
  const int jmin = -static_cast<int>(half_width) - 1;
  const int jmax = static_cast<int>(half_width) + 1;
  const int taps = jmax - jmin + 1;

  // One tap row per output phase; each row normalized to unit DC gain.
  std::vector<double> table(static_cast<size_t>(up) * taps);
  for (int phase = 0; phase < up; ++phase) {
    double* row = table.data() + static_cast<size_t>(phase) * taps;
    const double frac = static_cast<double>(phase) / up;
    double sum = 0.0;
    for (int j = jmin; j <= jmax; ++j) {
      const double t = frac - j;
      double w = 0.0;
      if (std::abs(t) <= half_width) {
        w = 2.0 * cutoff * sinc(2.0 * cutoff * t) *
            0.5 * (1.0 + std::cos(kPi * t / half_width));
      }
      row[j - jmin] = w;
      sum += w;
    }
    for (int j = 0; j < taps; ++j) row[j] /= sum;
  }

  for (size_t n = 0; n < out_len; ++n) {
    const uint64_t num = static_cast<uint64_t>(n) * down;
    const size_t base = static_cast<size_t>(num / up);
    const int phase = static_cast<int>(num % up);
    const double* row = table.data() + static_cast<size_t>(phase) * taps;
    double acc = 0.0;
    for (int j = jmin; j <= jmax; ++j) {
      const long long k = static_cast<long long>(base) + j;
      if (k < 0 || k >= static_cast<long long>(in_len)) continue;
      acc += row[j - jmin] * s.samples[static_cast<size_t>(k)];
    }
    out.samples[n] = acc;
  }
  return out;
}

Signal normalize(const Signal& s) {
  require_non_empty(s, "normalize");
  double peak = 0.0;
  for (double x : s.samples) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) fail(Errc::silent_signal, "normalize: all-zero signal");

  Signal out;
  out.rate = s.rate;
  out.samples.resize(s.samples.size());
  for (size_t i = 0; i < s.samples.size(); ++i) out.samples[i] = s.samples[i] / peak;
  return out;
}

std::vector<Segment> voiced_segments(const Signal& s, double window_ms,
                                     double threshold_ratio) {
  require_non_empty(s, "voiced_segments");
  if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0)) {
    fail(Errc::invalid_config, "voiced_segments: threshold_ratio must be in (0, 1)");
  }
  const auto window_len =
      static_cast<size_t>(std::llround(s.rate * window_ms / 1000.0));
  if (window_len < 1) {
    fail(Errc::invalid_config, "voiced_segments: window shorter than one sample");
  }

  const size_t len = s.samples.size();
  const size_t num_windows = (len + window_len - 1) / window_len;

  // The trailing partial window is scored by its own energy over its actual
  // length.
  std::vector<double> energy(num_windows, 0.0);
  for (size_t w = 0; w < num_windows; ++w) {
    const size_t begin = w * window_len;
    const size_t end = std::min(begin + window_len, len);
    double e = 0.0;
    for (size_t i = begin; i < end; ++i) e += s.samples[i] * s.samples[i];
    energy[w] = e;
  }

  const double max_energy = *std::max_element(energy.begin(), energy.end());
  if (max_energy == 0.0) return {};

  const double threshold = threshold_ratio * max_energy;
  std::vector<Segment> segments;
  for (size_t w = 0; w < num_windows; ++w) {
    if (energy[w] < threshold) continue;
    const size_t begin = w * window_len;
    const size_t end = std::min(begin + window_len, len);
    if (!segments.empty() && segments.back().end == begin) {
      segments.back().end = end;
    } else {
      segments.push_back({begin, end});
    }
  }
  return segments;
}

Signal remove_silence(const Signal& s, const std::vector<Segment>& segments) {
  require_non_empty(s, "remove_silence");
  if (segments.empty()) fail(Errc::empty_voiced, "remove_silence: no voiced segments");

  size_t previous_end = 0;
  size_t total = 0;
  for (const Segment& seg : segments) {
    if (seg.start >= seg.end || seg.end > s.samples.size() ||
        (total > 0 && seg.start < previous_end)) {
      fail(Errc::dimension_mismatch, "remove_silence: invalid segment list");
    }
    previous_end = seg.end;
    total += seg.length();
  }

  Signal out;
  out.rate = s.rate;
  out.samples.reserve(total);
  for (const Segment& seg : segments) {
    out.samples.insert(out.samples.end(), s.samples.begin() + seg.start,
                       s.samples.begin() + seg.end);
  }
  return out;
}

Signal pre_emphasize(const Signal& s, double a) {
  require_non_empty(s, "pre_emphasize");
  if (!(a >= 0.0 && a < 1.0)) {
    fail(Errc::invalid_config, "pre_emphasize: coefficient must be in [0, 1)");
  }
  Signal out;
  out.rate = s.rate;
  out.samples.resize(s.samples.size());
  out.samples[0] = s.samples[0];
  for (size_t n = 1; n < s.samples.size(); ++n) {
    out.samples[n] = s.samples[n] - a * s.samples[n - 1];
  }
  return out;
}

std::vector<double> hamming_window(int length) {
  if (length < 2) fail(Errc::invalid_config, "hamming_window: length must be >= 2");
  std::vector<double> w(static_cast<size_t>(length));
  for (int n = 0; n < length; ++n) {
    w[static_cast<size_t>(n)] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (length - 1));
  }
  return w;
}

FrameMatrix frame_and_window(const Signal& s, int frame_len, int shift) {
  require_non_empty(s, "frame_and_window");
  if (frame_len < 2 || shift < 1) {
    fail(Errc::invalid_config, "frame_and_window: bad frame length or shift");
  }
  const size_t len = s.samples.size();
  if (len < static_cast<size_t>(frame_len)) {
    fail(Errc::utterance_too_short,
         "frame_and_window: " + std::to_string(len) + " samples < frame length " +
             std::to_string(frame_len));
  }

  const size_t frames = (len - frame_len) / shift + 1;
  const std::vector<double> window = hamming_window(frame_len);

  FrameMatrix fm;
  fm.frame_len = frame_len;
  fm.shift = shift;
  fm.rate = s.rate;
  fm.frames = Matrix(frames, static_cast<size_t>(frame_len));
  for (size_t t = 0; t < frames; ++t) {
    const double* src = s.samples.data() + t * shift;
    double* dst = fm.frames.row(t);
    for (int n = 0; n < frame_len; ++n) dst[n] = src[n] * window[static_cast<size_t>(n)];
  }
  return fm;
}

}  // namespace wordrec
