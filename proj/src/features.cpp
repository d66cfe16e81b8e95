#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "wordrec/error.hpp"
#include "wordrec/features.hpp"

namespace wordrec {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogFloor = 1e-12;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT.
void fft(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> step(std::cos(angle), std::sin(angle));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= step;
      }
    }
  }
}

}  // namespace

double hz_to_mel(double hz) {
  if (hz < 0.0) fail(Errc::negative_frequency, "hz_to_mel: negative frequency");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
  if (mel < 0.0) fail(Errc::negative_frequency, "mel_to_hz: negative mel value");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> power_spectrum(const std::vector<double>& frame, int fft_size) {
  if (!is_power_of_two(fft_size)) {
    fail(Errc::invalid_config, "power_spectrum: fft_size must be a power of two");
  }
  if (frame.size() > static_cast<size_t>(fft_size)) {
    fail(Errc::frame_too_long, "power_spectrum: frame of " + std::to_string(frame.size()) +
                                   " samples exceeds fft_size " + std::to_string(fft_size));
  }

  std::vector<std::complex<double>> buf(static_cast<size_t>(fft_size));
  for (size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
  fft(buf);

  std::vector<double> power(static_cast<size_t>(fft_size / 2 + 1));
  for (size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]);
  return power;
}

MelFilterbank build_filterbank(int num_filters, int fft_size, int rate) {
  if (num_filters < 1) fail(Errc::invalid_config, "build_filterbank: need >= 1 filter");
  if (!is_power_of_two(fft_size)) {
    fail(Errc::invalid_config, "build_filterbank: fft_size must be a power of two");
  }
  if (rate <= 0) fail(Errc::invalid_config, "build_filterbank: rate must be positive");

  const int bins = fft_size / 2 + 1;
  const double mel_high = hz_to_mel(rate / 2.0);

  // num_filters + 2 equispaced mel points, mapped back to Hz and snapped to
  // the nearest DFT bin; point i-1 / i / i+1 are filter i's feet and peak.
  std::vector<int> center_bin(static_cast<size_t>(num_filters) + 2);
  for (int i = 0; i < num_filters + 2; ++i) {
    const double mel = mel_high * i / (num_filters + 1);
    const double hz = mel_to_hz(mel);
    center_bin[static_cast<size_t>(i)] =
        static_cast<int>(std::lround(hz * fft_size / rate));
  }
  for (int i = 1; i < num_filters + 2; ++i) {
    if (center_bin[static_cast<size_t>(i)] <= center_bin[static_cast<size_t>(i - 1)]) {
      fail(Errc::too_many_filters,
           "build_filterbank: " + std::to_string(num_filters) +
               " filters collapse adjacent centers onto one DFT bin");
    }
  }

  MelFilterbank fb;
  fb.num_filters = num_filters;
  fb.fft_size = fft_size;
  fb.rate = rate;
  fb.weights = Matrix(static_cast<size_t>(num_filters), static_cast<size_t>(bins));
  for (int i = 1; i <= num_filters; ++i) {
    const int lo = center_bin[static_cast<size_t>(i - 1)];
    const int mid = center_bin[static_cast<size_t>(i)];
    const int hi = center_bin[static_cast<size_t>(i + 1)];
    double* row = fb.weights.row(static_cast<size_t>(i - 1));
    for (int b = lo; b <= mid; ++b) {
      row[b] = static_cast<double>(b - lo) / static_cast<double>(mid - lo);
    }
    for (int b = mid; b <= hi && b < bins; ++b) {
      row[b] = static_cast<double>(hi - b) / static_cast<double>(hi - mid);
    }
    row[mid] = 1.0;
  }
  return fb;
}

std::vector<double> cepstra_from_spectrum(const std::vector<double>& spectrum,
                                          const MelFilterbank& fb, int coeff_count) {
  if (spectrum.size() != fb.weights.cols) {
    fail(Errc::dimension_mismatch,
         "cepstra_from_spectrum: spectrum has " + std::to_string(spectrum.size()) +
             " bins, filterbank expects " + std::to_string(fb.weights.cols));
  }
  const int n = fb.num_filters;
  if (coeff_count < 1 || coeff_count > n) {
    fail(Errc::invalid_config, "cepstra_from_spectrum: coeff_count must be in [1, filters]");
  }

  std::vector<double> log_energy(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double* row = fb.weights.row(static_cast<size_t>(i));
    double e = 0.0;
    for (size_t b = 0; b < spectrum.size(); ++b) e += row[b] * spectrum[b];
    log_energy[static_cast<size_t>(i)] = std::log(std::max(e, kLogFloor));
  }

  // Orthonormal DCT-II.
  std::vector<double> cepstra(static_cast<size_t>(coeff_count));
  for (int j = 0; j < coeff_count; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += log_energy[static_cast<size_t>(i)] * std::cos(kPi * (i + 0.5) * j / n);
    }
    const double scale = (j == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    cepstra[static_cast<size_t>(j)] = scale * acc;
  }
  return cepstra;
}

MfccMatrix mfcc(const Signal& s, const MfccConfig& config) {
  const FrameMatrix fm = frame_and_window(s, config.frame_len, config.frame_shift);
  const MelFilterbank fb = build_filterbank(config.num_filters, config.fft_size, s.rate);

  MfccMatrix out;
  out.coeffs = Matrix(fm.frames.rows, static_cast<size_t>(config.coeff_count));
  std::vector<double> frame(static_cast<size_t>(config.frame_len));
  for (size_t t = 0; t < fm.frames.rows; ++t) {
    const double* src = fm.frames.row(t);
    frame.assign(src, src + config.frame_len);
    const std::vector<double> spectrum = power_spectrum(frame, config.fft_size);
    const std::vector<double> cepstra =
        cepstra_from_spectrum(spectrum, fb, config.coeff_count);
    std::copy(cepstra.begin(), cepstra.end(), out.coeffs.row(t));
  }
  return out;
}

}  // namespace wordrec
