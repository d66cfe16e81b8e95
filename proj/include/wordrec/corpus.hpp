#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wordrec/config.hpp"
#include "wordrec/matrix.hpp"
#include "wordrec/network.hpp"

namespace wordrec {

struct ManifestEntry {
  std::string path;
  std::string label;
  int class_index = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> label_table;  // sorted; position == class index
};

struct ScanResult {
  Manifest manifest;
  std::vector<std::string> skipped;  // non-WAV files found under label dirs
};

// Walks root/<label>/<name>.wav. Class indices follow the lexicographic
// (byte) order of the label directory names.
ScanResult scan_corpus(const std::string& root);

// CSV with header path,label,class_index.
void save_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);

struct SplitResult {
  Manifest train;
  Manifest test;
};

// Per class: seeded shuffle, round(n * train_fraction) entries to train,
// the rest to test. Entry order within each side follows the input manifest.
SplitResult stratified_split(const Manifest& m, double train_fraction, uint64_t seed);

struct FeatureSet {
  Matrix features;          // rows x feature_dim
  std::vector<int> labels;  // class index per row
  int feature_dim = 0;
  int num_classes = 0;
  std::vector<std::string> label_table;  // class index -> label string
  RunConfig config;  // echo of the featurization parameters
};

struct FeaturizeFailure {
  std::size_t entry_index = 0;
  std::string path;
  std::string message;
};

struct FeaturizeResult {
  FeatureSet features;
  std::vector<FeaturizeFailure> failures;
};

// Full pipeline per entry; row order matches the manifest. Each utterance
// uses the k-means seed mix_seed(cfg.seed, entry index), so results do not
// depend on thread count. Failed files are skipped and reported; with
// strict = true any failure raises partial_failure instead.
FeaturizeResult featurize_corpus(const Manifest& m, const RunConfig& cfg,
                                 bool strict = false, int threads = 1);

// One JSON header line, then one CSV row per sample: class index followed by
// the feature values in full round-trip precision.
void save_feature_set(const FeatureSet& fs, const std::string& path);
FeatureSet load_feature_set(const std::string& path);

struct EvalReport {
  double accuracy = 0.0;
  std::vector<std::vector<int64_t>> confusion;  // row = truth, col = prediction
  std::vector<std::optional<double>> per_class_accuracy;  // nullopt when no truth rows
  int64_t sample_count = 0;
};

EvalReport evaluate_predictions(const std::vector<int>& truths,
                                const std::vector<int>& predictions, int num_classes);
EvalReport evaluate(const Network& net, const FeatureSet& fs);

std::string report_text(const EvalReport& r, const std::vector<std::string>& labels = {});
void save_report_json(const EvalReport& r, const std::string& path);

std::vector<TrainSample> to_train_samples(const FeatureSet& fs);

}  // namespace wordrec
