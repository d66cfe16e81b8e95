#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wordrec {

// Pipeline, feature, and training parameters with their production defaults.
// Config files are flat `key = value` lines using these field names.
struct RunConfig {
  int sample_rate = 10000;
  double pre_emphasis_a = 0.9375;
  int frame_len = 300;
  int frame_shift = 100;
  double vad_window_ms = 108.0;
  double vad_threshold_ratio = 0.01;
  int num_filters = 40;
  int fft_size = 512;
  int coeff_count = 14;
  int kmeans_k = 8;
  std::vector<int> architecture = {112, 100, 95, 90, 95, 100, 60};
  double lr0 = 0.05;
  double decay = 0.95;
  int epochs = 200;
  uint64_t seed = 42;
  double train_fraction = 2.0 / 3.0;
  uint64_t max_updates = 0;
  int threads = 1;
};

RunConfig load_config(const std::string& path);

// Applies one key/value pair; unknown keys or unparsable values are
// invalid_config errors.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Current value of one key, formatted as it would appear in a config file.
std::string get_config_value(const RunConfig& cfg, const std::string& key);

// Resolved configuration as config-file text, one key per line.
std::string print_config(const RunConfig& cfg);

void validate_config(const RunConfig& cfg);

std::vector<int> parse_architecture(const std::string& text);

}  // namespace wordrec
