#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "wordrec/error.hpp"
#include "wordrec/rng.hpp"
#include "wordrec/synth.hpp"

namespace fs = std::filesystem;

namespace wordrec {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr uint64_t kClassStream = 0xc1a55ULL;
constexpr uint64_t kSampleStream = 0x5a3fULL;
constexpr uint64_t kBandStream = 0xba4dULL;

// Tone frequency bands; every class owns one slot per band so no two
// classes share a nearby tone in any band.
struct Band {
  double lo, hi;
};
constexpr Band kBands[3] = {{220.0, 880.0}, {1000.0, 2050.0}, {2150.0, 3400.0}};

struct ClassTemplate {
  int tones = 0;
  double freq[3] = {0, 0, 0};
  double amp[3] = {0, 0, 0};
  double phase[3] = {0, 0, 0};
  double attack = 0.3;      // envelope peak position, fraction of duration
  double rise_pow = 1.0;
  double fall_pow = 1.0;
  double duration = 0.45;   // voiced seconds before per-sample jitter
  double pad_lead = 0.1;    // silence seconds
  double pad_trail = 0.1;
};

std::vector<int> band_slots(const SynthConfig& cfg, int band) {
  std::vector<int> slots(static_cast<size_t>(cfg.num_classes));
  for (int i = 0; i < cfg.num_classes; ++i) slots[static_cast<size_t>(i)] = i;
  Rng rng(mix_seed(mix_seed(cfg.seed, kBandStream), static_cast<uint64_t>(band)));
  rng.shuffle(slots);
  return slots;
}

ClassTemplate class_template(const SynthConfig& cfg, int class_index) {
  Rng rng(mix_seed(mix_seed(cfg.seed, kClassStream), static_cast<uint64_t>(class_index)));

  ClassTemplate t;
  t.tones = rng.uniform01() < 0.5 ? 2 : 3;
  for (int b = 0; b < 3; ++b) {
    const Band& band = kBands[b];
    const int slot = band_slots(cfg, b)[static_cast<size_t>(class_index)];
    const double slot_width = (band.hi - band.lo) / cfg.num_classes;
    t.freq[b] = band.lo + (slot + 0.25 + 0.5 * rng.uniform01()) * slot_width;
    t.amp[b] = rng.uniform(0.45, 1.0);
    t.phase[b] = rng.uniform(0.0, 2.0 * kPi);
  }
  t.attack = rng.uniform(0.15, 0.55);
  t.rise_pow = rng.uniform(0.7, 2.2);
  t.fall_pow = rng.uniform(0.7, 2.2);
  t.duration = rng.uniform(0.40, 0.52);
  t.pad_lead = rng.uniform(0.08, 0.18);
  t.pad_trail = rng.uniform(0.08, 0.18);
  return t;
}

// freq_scale/duration_scale of 1 and no noise reproduce the template.
Signal render(const SynthConfig& cfg, const ClassTemplate& t, const double freq_scale[3],
              double duration_scale, Rng* noise_rng) {
  const double rate = cfg.rate;
  const auto voiced = static_cast<size_t>(std::lround(t.duration * duration_scale * rate));
  const auto lead = static_cast<size_t>(std::lround(t.pad_lead * rate));
  const auto trail = static_cast<size_t>(std::lround(t.pad_trail * rate));

  Signal s;
  s.rate = cfg.rate;
  s.samples.assign(lead + voiced + trail, 0.0);

  double peak = 0.0;
  for (size_t n = 0; n < voiced; ++n) {
    const double u = voiced > 1 ? static_cast<double>(n) / static_cast<double>(voiced - 1) : 0.0;
    const double env = u < t.attack ? std::pow(u / t.attack, t.rise_pow)
                                    : std::pow((1.0 - u) / (1.0 - t.attack), t.fall_pow);
    const double time = static_cast<double>(n) / rate;
    double x = 0.0;
    for (int b = 0; b < t.tones; ++b) {
      x += t.amp[b] * std::sin(2.0 * kPi * t.freq[b] * freq_scale[b] * time + t.phase[b]);
    }
    x *= env;
    s.samples[lead + n] = x;
    peak = std::max(peak, std::abs(x));
  }

  const double gain = peak > 0.0 ? 0.6 / peak : 0.0;
  double power = 0.0;
  for (size_t n = 0; n < voiced; ++n) {
    s.samples[lead + n] *= gain;
    power += s.samples[lead + n] * s.samples[lead + n];
  }

  if (noise_rng != nullptr && cfg.snr_db > 0.0 && voiced > 0) {
    const double rms = std::sqrt(power / static_cast<double>(voiced));
    const double sigma = rms * std::pow(10.0, -cfg.snr_db / 20.0);
    for (double& v : s.samples) v += noise_rng->gaussian(0.0, sigma);
  }
  return s;
}

std::string zero_padded(const char* prefix, int value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, value);
  return buf;
}

}  // namespace

Signal synth_class_template(const SynthConfig& cfg, int class_index) {
  if (class_index < 0 || class_index >= cfg.num_classes) {
    fail(Errc::invalid_config, "synth: class index out of range");
  }
  const ClassTemplate t = class_template(cfg, class_index);
  const double unit[3] = {1.0, 1.0, 1.0};
  return render(cfg, t, unit, 1.0, nullptr);
}

void generate_synthetic_corpus(const SynthConfig& cfg, const std::string& out_dir) {
  if (cfg.num_classes < 2) fail(Errc::invalid_config, "synth: need at least 2 classes");
  if (cfg.samples_per_class < 2) {
    fail(Errc::invalid_config, "synth: need at least 2 samples per class");
  }
  if (cfg.rate < 8000) fail(Errc::invalid_config, "synth: rate too low");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Errc::io_failure, "cannot create " + out_dir + ": " + ec.message());

  for (int c = 0; c < cfg.num_classes; ++c) {
    const ClassTemplate t = class_template(cfg, c);
    const fs::path dir = fs::path(out_dir) / zero_padded("class", c);
    fs::create_directories(dir, ec);
    if (ec) fail(Errc::io_failure, "cannot create " + dir.string() + ": " + ec.message());

    for (int s = 0; s < cfg.samples_per_class; ++s) {
      Rng rng(mix_seed(mix_seed(mix_seed(cfg.seed, kSampleStream), static_cast<uint64_t>(c)),
                       static_cast<uint64_t>(s)));
      double freq_scale[3];
      for (double& f : freq_scale) f = 1.0 + cfg.freq_jitter * rng.uniform(-1.0, 1.0);
      const double duration_scale = 1.0 + cfg.duration_jitter * rng.uniform(-1.0, 1.0);

      const Signal wav = render(cfg, t, freq_scale, duration_scale, &rng);
      write_wav16(wav, (dir / (zero_padded("sample", s) + ".wav")).string());
    }
  }
}

}  // namespace wordrec
