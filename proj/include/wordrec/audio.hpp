#pragma once

#include <string>
#include <vector>

#include "wordrec/matrix.hpp"

namespace wordrec {

// Mono audio: amplitudes nominally in [-1, 1] plus the sampling rate in Hz.
struct Signal {
  std::vector<double> samples;
  int rate = 0;

  std::size_t size() const { return samples.size(); }
};

// Half-open sample range [start, end).
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

// Windowed analysis frames, one row per frame.
struct FrameMatrix {
  Matrix frames;  // T x frame_len
  int frame_len = 0;
  int shift = 0;
  int rate = 0;
};

// Reads a RIFF/WAVE file. Mono PCM only (8/16/24 bit); integer samples are
// scaled to [-1, 1) by 2^(bits-1).
Signal read_wav(const std::string& path);

// Writes 16-bit mono PCM.
void write_wav16(const Signal& s, const std::string& path);

// Windowed-sinc polyphase resampler. Downsampling only (target <= source);
// output length is floor(len * target / source).
Signal resample(const Signal& s, int target_rate);

// Divides by the peak absolute amplitude so the result peaks at 1.
Signal normalize(const Signal& s);

// Energy-based voice activity detection over consecutive non-overlapping
// windows. A window is voiced when its energy reaches threshold_ratio times
// the maximum window energy; adjacent voiced windows merge into one segment.
std::vector<Segment> voiced_segments(const Signal& s, double window_ms = 108.0,
                                     double threshold_ratio = 0.01);

// Concatenates the segment contents, dropping everything between them.
Signal remove_silence(const Signal& s, const std::vector<Segment>& segments);

// y(0) = x(0); y(n) = x(n) - a * x(n-1).
Signal pre_emphasize(const Signal& s, double a = 0.9375);

// w(n) = 0.54 - 0.46 cos(2 pi n / (length - 1))
std::vector<double> hamming_window(int length);

// Slices the signal into floor((len - frame_len) / shift) + 1 frames and
// applies the Hamming window to each. The incomplete tail is dropped.
FrameMatrix frame_and_window(const Signal& s, int frame_len = 300, int shift = 100);

}  // namespace wordrec
