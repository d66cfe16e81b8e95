#pragma once

#include <cstdint>
#include <vector>

#include "wordrec/audio.hpp"
#include "wordrec/matrix.hpp"

namespace wordrec {

// Triangular mel filters over DFT bins: num_filters x (fft_size/2 + 1).
struct MelFilterbank {
  Matrix weights;
  int num_filters = 0;
  int fft_size = 0;
  int rate = 0;
};

// Per-frame cepstral coefficients: N frames x coeff_count.
struct MfccMatrix {
  Matrix coeffs;
};

// Fixed-length utterance representation: k centroids of coeff_count values
// each, flattened row-major.
struct FeatureVector {
  std::vector<double> values;
  int k = 0;
  int coeff_count = 0;
};

struct KMeansResult {
  Matrix centroids;              // k x C
  std::vector<int> assignments;  // point index -> cluster index
  double inertia = 0.0;
  std::vector<double> inertia_history;  // per Lloyd iteration, winning restart
};

struct MfccConfig {
  int frame_len = 300;
  int frame_shift = 100;
  int num_filters = 40;
  int fft_size = 512;
  int coeff_count = 14;
};

// mel = 2595 * log10(1 + hz / 700)
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Zero-pads the frame to fft_size and returns |DFT_k|^2 for k = 0..fft_size/2.
std::vector<double> power_spectrum(const std::vector<double>& frame, int fft_size = 512);

// num_filters + 2 mel-equispaced centers over [0, rate/2], snapped to DFT
// bins; filter i is the unit-peak triangle between the bins of centers
// i-1 and i+1.
MelFilterbank build_filterbank(int num_filters = 40, int fft_size = 512, int rate = 10000);

// Log filterbank energies (floored at 1e-12) followed by an orthonormal
// DCT-II; returns the first coeff_count coefficients including c0.
std::vector<double> cepstra_from_spectrum(const std::vector<double>& spectrum,
                                          const MelFilterbank& fb, int coeff_count = 14);

// frame_and_window -> power_spectrum -> cepstra_from_spectrum per frame.
// The signal is expected to be preprocessed (resampled, voiced, pre-emphasized).
MfccMatrix mfcc(const Signal& s, const MfccConfig& config = {});

// Lloyd's algorithm from k-means++ seeding. Deterministic for a given
// (points, k, seed); the best of `restarts` seeded runs is returned.
KMeansResult kmeans(const Matrix& points, int k, uint64_t seed, int restarts = 10);

// kmeans over the frame vectors; centroids ordered by ascending mean
// assigned-frame index, then flattened row-major.
FeatureVector compress_features(const MfccMatrix& m, int k, uint64_t seed);

}  // namespace wordrec
