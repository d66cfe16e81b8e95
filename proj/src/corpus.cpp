#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wordrec/audio.hpp"
#include "wordrec/corpus.hpp"
#include "wordrec/error.hpp"
#include "wordrec/pipeline.hpp"
#include "wordrec/rng.hpp"

namespace fs = std::filesystem;

namespace wordrec {

namespace {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool has_wav_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".wav";
}

json config_echo(const RunConfig& cfg) {
  json j;
  j["sample_rate"] = cfg.sample_rate;
  j["pre_emphasis_a"] = cfg.pre_emphasis_a;
  j["frame_len"] = cfg.frame_len;
  j["frame_shift"] = cfg.frame_shift;
  j["vad_window_ms"] = cfg.vad_window_ms;
  j["vad_threshold_ratio"] = cfg.vad_threshold_ratio;
  j["num_filters"] = cfg.num_filters;
  j["fft_size"] = cfg.fft_size;
  j["coeff_count"] = cfg.coeff_count;
  j["kmeans_k"] = cfg.kmeans_k;
  j["seed"] = cfg.seed;
  return j;
}

void config_from_echo(const json& j, RunConfig& cfg) {
  cfg.sample_rate = j.at("sample_rate").get<int>();
  cfg.pre_emphasis_a = j.at("pre_emphasis_a").get<double>();
  cfg.frame_len = j.at("frame_len").get<int>();
  cfg.frame_shift = j.at("frame_shift").get<int>();
  cfg.vad_window_ms = j.at("vad_window_ms").get<double>();
  cfg.vad_threshold_ratio = j.at("vad_threshold_ratio").get<double>();
  cfg.num_filters = j.at("num_filters").get<int>();
  cfg.fft_size = j.at("fft_size").get<int>();
  cfg.coeff_count = j.at("coeff_count").get<int>();
  cfg.kmeans_k = j.at("kmeans_k").get<int>();
  cfg.seed = j.at("seed").get<uint64_t>();
}

}  // namespace

ScanResult scan_corpus(const std::string& root) {
  if (!fs::is_directory(root)) fail(Errc::missing_root, "corpus root not found: " + root);

  // directory iteration order is unspecified, so collect and sort
  std::vector<std::string> labels;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) labels.push_back(entry.path().filename().string());
  }
  std::sort(labels.begin(), labels.end());

  ScanResult result;
  for (size_t c = 0; c < labels.size(); ++c) {
    const fs::path dir = fs::path(root) / labels[c];
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      if (has_wav_extension(entry.path())) {
        files.push_back(entry.path().string());
      } else {
        result.skipped.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    for (std::string& f : files) {
      result.manifest.entries.push_back({std::move(f), labels[c], static_cast<int>(c)});
    }
  }

  // drop labels that contributed no files, then reindex
  std::vector<std::string> used;
  std::map<std::string, int> index;
  for (const ManifestEntry& e : result.manifest.entries) {
    if (index.emplace(e.label, 0).second) used.push_back(e.label);
  }
  std::sort(used.begin(), used.end());
  for (size_t i = 0; i < used.size(); ++i) index[used[i]] = static_cast<int>(i);
  for (ManifestEntry& e : result.manifest.entries) e.class_index = index[e.label];
  result.manifest.label_table = std::move(used);

  if (result.manifest.entries.empty()) {
    fail(Errc::empty_corpus, "no WAV files under " + root);
  }
  return result;
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot create " + path);
  out << "path,label,class_index\n";
  for (const ManifestEntry& e : m.entries) {
    out << e.path << ',' << e.label << ',' << e.class_index << '\n';
  }
  if (!out) fail(Errc::io_failure, "write failed: " + path);
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::missing_file, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line != "path,label,class_index") {
    fail(Errc::schema_mismatch, path + ": bad manifest header");
  }

  Manifest m;
  std::map<int, std::string> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c2 = line.rfind(',');
    const auto c1 = c2 == std::string::npos ? c2 : line.rfind(',', c2 - 1);
    if (c1 == std::string::npos) fail(Errc::schema_mismatch, path + ": bad manifest row");
    ManifestEntry e;
    e.path = line.substr(0, c1);
    e.label = line.substr(c1 + 1, c2 - c1 - 1);
    e.class_index = std::stoi(line.substr(c2 + 1));
    labels[e.class_index] = e.label;
    m.entries.push_back(std::move(e));
  }
  for (const auto& [idx, label] : labels) {
    if (idx != static_cast<int>(m.label_table.size())) {
      fail(Errc::schema_mismatch, path + ": non-contiguous class indices");
    }
    m.label_table.push_back(label);
  }
  return m;
}

SplitResult stratified_split(const Manifest& m, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail(Errc::invalid_fraction, "train_fraction must be in (0, 1)");
  }

  std::vector<std::vector<size_t>> by_class(m.label_table.size());
  for (size_t i = 0; i < m.entries.size(); ++i) {
    by_class[static_cast<size_t>(m.entries[i].class_index)].push_back(i);
  }
  for (size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < 2) {
      fail(Errc::class_too_small,
           "class '" + m.label_table[c] + "' has fewer than 2 samples");
    }
  }

  std::vector<bool> in_train(m.entries.size(), false);
  for (size_t c = 0; c < by_class.size(); ++c) {
    std::vector<size_t> order = by_class[c];
    Rng rng(mix_seed(seed, c));
    rng.shuffle(order);
    const auto take = static_cast<size_t>(
        std::llround(static_cast<double>(order.size()) * train_fraction));
    for (size_t i = 0; i < take && i < order.size(); ++i) in_train[order[i]] = true;
  }

  SplitResult split;
  split.train.label_table = m.label_table;
  split.test.label_table = m.label_table;
  for (size_t i = 0; i < m.entries.size(); ++i) {
    (in_train[i] ? split.train : split.test).entries.push_back(m.entries[i]);
  }
  return split;
}

FeaturizeResult featurize_corpus(const Manifest& m, const RunConfig& cfg, bool strict,
                                 int threads) {
  if (threads < 1) fail(Errc::invalid_config, "featurize_corpus: threads must be >= 1");

  const size_t n = m.entries.size();
  const size_t dim = static_cast<size_t>(cfg.kmeans_k) * cfg.coeff_count;

  struct RowResult {
    std::vector<double> values;
    std::string error;
  };
  std::vector<RowResult> rows(n);

  auto work = [&](size_t i) {
    try {
      const Signal s = read_wav(m.entries[i].path);
      FeatureVector fv = utterance_features(s, cfg, mix_seed(cfg.seed, i));
      rows[i].values = std::move(fv.values);
    } catch (const Error& e) {
      rows[i].error = std::string(errc_name(e.code())) + ": " + e.what();
    }
  };

  if (threads == 1) {
    for (size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  FeaturizeResult result;
  result.features.feature_dim = static_cast<int>(dim);
  result.features.num_classes = static_cast<int>(m.label_table.size());
  result.features.label_table = m.label_table;
  result.features.config = cfg;

  size_t ok = 0;
  for (size_t i = 0; i < n; ++i) {
    if (rows[i].error.empty()) ++ok;
  }
  result.features.features = Matrix(ok, dim);
  size_t r = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!rows[i].error.empty()) {
      result.failures.push_back({i, m.entries[i].path, rows[i].error});
      continue;
    }
    std::copy(rows[i].values.begin(), rows[i].values.end(), result.features.features.row(r));
    result.features.labels.push_back(m.entries[i].class_index);
    ++r;
  }

  if (strict && !result.failures.empty()) {
    fail(Errc::partial_failure,
         std::to_string(result.failures.size()) + " of " + std::to_string(n) +
             " files failed featurization (strict mode); first: " +
             result.failures.front().path + " (" + result.failures.front().message + ")");
  }
  return result;
}

void save_feature_set(const FeatureSet& fs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot create " + path);

  json header;
  header["feature_dim"] = fs.feature_dim;
  header["num_classes"] = fs.num_classes;
  header["config"] = config_echo(fs.config);
  header["labels"] = fs.label_table;
  out << header.dump() << '\n';

  for (size_t r = 0; r < fs.features.rows; ++r) {
    out << fs.labels[r];
    const double* row = fs.features.row(r);
    for (size_t c = 0; c < fs.features.cols; ++c) out << ',' << format_double(row[c]);
    out << '\n';
  }
  if (!out) fail(Errc::io_failure, "write failed: " + path);
}

FeatureSet load_feature_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::missing_file, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) fail(Errc::schema_mismatch, path + ": empty file");

  FeatureSet fs;
  try {
    const json header = json::parse(line);
    fs.feature_dim = header.at("feature_dim").get<int>();
    fs.num_classes = header.at("num_classes").get<int>();
    config_from_echo(header.at("config"), fs.config);
    if (header.contains("labels")) {
      fs.label_table = header["labels"].get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    fail(Errc::schema_mismatch, path + ": bad header: " + e.what());
  }
  if (fs.feature_dim < 1) fail(Errc::schema_mismatch, path + ": bad feature_dim");

  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t pos = 0;
    int field = 0;
    int label = -1;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      const auto end = comma == std::string::npos ? line.size() : comma;
      const std::string_view item(line.data() + pos, end - pos);
      if (field == 0) {
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), label);
        if (ec != std::errc() || p != item.data() + item.size()) {
          fail(Errc::schema_mismatch, path + ": bad class index");
        }
      } else {
        double v = 0.0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || p != item.data() + item.size()) {
          fail(Errc::schema_mismatch, path + ": bad feature value");
        }
        values.push_back(v);
      }
      ++field;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (field != fs.feature_dim + 1) {
      fail(Errc::shape_mismatch, path + ": row has " + std::to_string(field - 1) +
                                     " values, header declares " +
                                     std::to_string(fs.feature_dim));
    }
    fs.labels.push_back(label);
  }

  fs.features = Matrix(fs.labels.size(), static_cast<size_t>(fs.feature_dim));
  std::copy(values.begin(), values.end(), fs.features.data.begin());
  return fs;
}

EvalReport evaluate_predictions(const std::vector<int>& truths,
                                const std::vector<int>& predictions, int num_classes) {
  if (truths.size() != predictions.size()) {
    fail(Errc::dimension_mismatch, "evaluate: truth/prediction counts differ");
  }
  EvalReport report;
  report.sample_count = static_cast<int64_t>(truths.size());
  report.confusion.assign(static_cast<size_t>(num_classes),
                          std::vector<int64_t>(static_cast<size_t>(num_classes), 0));
  int64_t correct = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    report.confusion[static_cast<size_t>(truths[i])][static_cast<size_t>(predictions[i])]++;
    if (truths[i] == predictions[i]) ++correct;
  }
  report.accuracy = report.sample_count == 0
                        ? 0.0
                        : static_cast<double>(correct) / static_cast<double>(report.sample_count);
  report.per_class_accuracy.resize(static_cast<size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c) {
    int64_t row_sum = 0;
    for (int64_t v : report.confusion[static_cast<size_t>(c)]) row_sum += v;
    if (row_sum == 0) {
      report.per_class_accuracy[static_cast<size_t>(c)] = std::nullopt;
    } else {
      report.per_class_accuracy[static_cast<size_t>(c)] =
          static_cast<double>(report.confusion[static_cast<size_t>(c)][static_cast<size_t>(c)]) /
          static_cast<double>(row_sum);
    }
  }
  return report;
}

EvalReport evaluate(const Network& net, const FeatureSet& fs) {
  if (fs.feature_dim != net.input_size()) {
    fail(Errc::dimension_mismatch,
         "evaluate: features have dim " + std::to_string(fs.feature_dim) +
             ", network expects " + std::to_string(net.input_size()));
  }
  if (fs.num_classes != net.output_size()) {
    fail(Errc::dimension_mismatch,
         "evaluate: feature set has " + std::to_string(fs.num_classes) +
             " classes, network outputs " + std::to_string(net.output_size()));
  }

  std::vector<int> predictions(fs.features.rows);
  std::vector<double> x(static_cast<size_t>(fs.feature_dim));
  for (size_t r = 0; r < fs.features.rows; ++r) {
    const double* row = fs.features.row(r);
    x.assign(row, row + fs.feature_dim);
    predictions[r] = predict(net, x).class_index;
  }
  return evaluate_predictions(fs.labels, predictions, fs.num_classes);
}

std::string report_text(const EvalReport& r, const std::vector<std::string>& labels) {
  std::ostringstream out;
  out << "samples:  " << r.sample_count << '\n';
  char acc[32];
  std::snprintf(acc, sizeof(acc), "%.2f%%", r.accuracy * 100.0);
  out << "accuracy: " << acc << '\n';
  out << '\n' << "class  accuracy  label\n";
  for (size_t c = 0; c < r.per_class_accuracy.size(); ++c) {
    char line[64];
    if (r.per_class_accuracy[c].has_value()) {
      std::snprintf(line, sizeof(line), "%5zu  %7.2f%%  ", c,
                    *r.per_class_accuracy[c] * 100.0);
    } else {
      std::snprintf(line, sizeof(line), "%5zu      n/a   ", c);
    }
    out << line << (c < labels.size() ? labels[c] : "") << '\n';
  }
  return out.str();
}

void save_report_json(const EvalReport& r, const std::string& path) {
  json doc;
  doc["accuracy"] = r.accuracy;
  doc["sample_count"] = r.sample_count;
  doc["confusion"] = r.confusion;
  json per_class = json::array();
  for (const auto& v : r.per_class_accuracy) {
    if (v.has_value()) per_class.push_back(*v);
    else per_class.push_back(nullptr);
  }
  doc["per_class"] = std::move(per_class);

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot create " + path);
  out << doc.dump(1, '\t') << '\n';
  if (!out) fail(Errc::io_failure, "write failed: " + path);
}

std::vector<TrainSample> to_train_samples(const FeatureSet& fs) {
  std::vector<TrainSample> samples(fs.features.rows);
  for (size_t r = 0; r < fs.features.rows; ++r) {
    const double* row = fs.features.row(r);
    samples[r].x.assign(row, row + fs.features.cols);
    samples[r].label = fs.labels[r];
  }
  return samples;
}

}  // namespace wordrec
