#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wordrec/config.hpp"
#include "wordrec/error.hpp"

namespace wordrec {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    fail(Errc::invalid_config, "config: bad value '" + value + "' for " + key);
  }
  return out;
}

std::string join_architecture(const std::vector<int>& arch) {
  std::string out;
  for (size_t i = 0; i < arch.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(arch[i]);
  }
  return out;
}

}  // namespace

std::vector<int> parse_architecture(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(Errc::invalid_config, "architecture: empty layer size");
    sizes.push_back(parse_number<int>("architecture", item));
  }
  if (sizes.size() < 2) {
    fail(Errc::invalid_config, "architecture: need at least input,output");
  }
  return sizes;
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "sample_rate") cfg.sample_rate = parse_number<int>(key, value);
  else if (key == "pre_emphasis_a") cfg.pre_emphasis_a = parse_number<double>(key, value);
  else if (key == "frame_len") cfg.frame_len = parse_number<int>(key, value);
  else if (key == "frame_shift") cfg.frame_shift = parse_number<int>(key, value);
  else if (key == "vad_window_ms") cfg.vad_window_ms = parse_number<double>(key, value);
  else if (key == "vad_threshold_ratio") cfg.vad_threshold_ratio = parse_number<double>(key, value);
  else if (key == "num_filters") cfg.num_filters = parse_number<int>(key, value);
  else if (key == "fft_size") cfg.fft_size = parse_number<int>(key, value);
  else if (key == "coeff_count") cfg.coeff_count = parse_number<int>(key, value);
  else if (key == "kmeans_k") cfg.kmeans_k = parse_number<int>(key, value);
  else if (key == "architecture") cfg.architecture = parse_architecture(value);
  else if (key == "lr0") cfg.lr0 = parse_number<double>(key, value);
  else if (key == "decay") cfg.decay = parse_number<double>(key, value);
  else if (key == "epochs") cfg.epochs = parse_number<int>(key, value);
  else if (key == "seed") cfg.seed = parse_number<uint64_t>(key, value);
  else if (key == "train_fraction") cfg.train_fraction = parse_number<double>(key, value);
  else if (key == "max_updates") cfg.max_updates = parse_number<uint64_t>(key, value);
  else if (key == "threads") cfg.threads = parse_number<int>(key, value);
  else fail(Errc::invalid_config, "config: unknown key '" + key + "'");
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  const std::string text = print_config(cfg);
  const std::string needle = key + " = ";
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t end = text.find('\n', pos);
    if (text.compare(pos, needle.size(), needle) == 0) {
      return text.substr(pos + needle.size(), end - pos - needle.size());
    }
    pos = end + 1;
  }
  fail(Errc::invalid_config, "config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::missing_file, "cannot open config " + path);

  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Errc::invalid_config,
           path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate_config(cfg);
  return cfg;
}

std::string print_config(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "sample_rate = " << cfg.sample_rate << '\n'
      << "pre_emphasis_a = " << cfg.pre_emphasis_a << '\n'
      << "frame_len = " << cfg.frame_len << '\n'
      << "frame_shift = " << cfg.frame_shift << '\n'
      << "vad_window_ms = " << cfg.vad_window_ms << '\n'
      << "vad_threshold_ratio = " << cfg.vad_threshold_ratio << '\n'
      << "num_filters = " << cfg.num_filters << '\n'
      << "fft_size = " << cfg.fft_size << '\n'
      << "coeff_count = " << cfg.coeff_count << '\n'
      << "kmeans_k = " << cfg.kmeans_k << '\n'
      << "architecture = " << join_architecture(cfg.architecture) << '\n'
      << "lr0 = " << cfg.lr0 << '\n'
      << "decay = " << cfg.decay << '\n'
      << "epochs = " << cfg.epochs << '\n'
      << "seed = " << cfg.seed << '\n'
      << "train_fraction = " << cfg.train_fraction << '\n'
      << "max_updates = " << cfg.max_updates << '\n'
      << "threads = " << cfg.threads << '\n';
  return out.str();
}

void validate_config(const RunConfig& cfg) {
  if (cfg.sample_rate <= 0) fail(Errc::invalid_config, "sample_rate must be positive");
  if (!(cfg.pre_emphasis_a >= 0.0 && cfg.pre_emphasis_a < 1.0)) {
    fail(Errc::invalid_config, "pre_emphasis_a must be in [0, 1)");
  }
  if (cfg.frame_len < 2) fail(Errc::invalid_config, "frame_len must be >= 2");
  if (cfg.frame_shift < 1) fail(Errc::invalid_config, "frame_shift must be >= 1");
  if (cfg.vad_window_ms <= 0.0) fail(Errc::invalid_config, "vad_window_ms must be positive");
  if (!(cfg.vad_threshold_ratio > 0.0 && cfg.vad_threshold_ratio < 1.0)) {
    fail(Errc::invalid_config, "vad_threshold_ratio must be in (0, 1)");
  }
  if (cfg.num_filters < 1) fail(Errc::invalid_config, "num_filters must be >= 1");
  if (cfg.fft_size < 2 || (cfg.fft_size & (cfg.fft_size - 1)) != 0) {
    fail(Errc::invalid_config, "fft_size must be a power of two");
  }
  if (cfg.coeff_count < 1 || cfg.coeff_count > cfg.num_filters) {
    fail(Errc::invalid_config, "coeff_count must be in [1, num_filters]");
  }
  if (cfg.kmeans_k < 1) fail(Errc::invalid_config, "kmeans_k must be >= 1");
  if (cfg.architecture.size() < 2) {
    fail(Errc::invalid_config, "architecture needs at least input,output");
  }
  for (int n : cfg.architecture) {
    if (n < 1) fail(Errc::invalid_config, "architecture layer sizes must be >= 1");
  }
  if (cfg.lr0 <= 0.0) fail(Errc::invalid_config, "lr0 must be positive");
  if (!(cfg.decay > 0.0 && cfg.decay <= 1.0)) {
    fail(Errc::invalid_config, "decay must be in (0, 1]");
  }
  if (cfg.epochs < 1) fail(Errc::invalid_config, "epochs must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    fail(Errc::invalid_fraction, "train_fraction must be in (0, 1)");
  }
  if (cfg.threads < 1) fail(Errc::invalid_config, "threads must be >= 1");
}

}  // namespace wordrec
