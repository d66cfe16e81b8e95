#pragma once

#include <cstdint>
#include <string>

#include "wordrec/audio.hpp"

namespace wordrec {

// Synthetic tone-complex corpus: each class is a fixed template of 2-3
// harmonically unrelated tones with a class-specific amplitude envelope;
// samples jitter the template in frequency and duration and add noise.
struct SynthConfig {
  int num_classes = 10;
  int samples_per_class = 30;
  uint64_t seed = 1;
  int rate = 44100;
  double freq_jitter = 0.03;      // +/- fraction applied per tone
  double duration_jitter = 0.20;  // +/- fraction applied to the voiced length
  double snr_db = 30.0;           // additive white noise level; <= 0 disables
};

// Writes out_dir/class000/sample000.wav ... as 16-bit mono PCM with leading
// and trailing silence padding. Byte-identical for identical configs.
void generate_synthetic_corpus(const SynthConfig& cfg, const std::string& out_dir);

// The unperturbed waveform the class's samples are jittered from
// (padding included, no noise).
Signal synth_class_template(const SynthConfig& cfg, int class_index);

}  // namespace wordrec
