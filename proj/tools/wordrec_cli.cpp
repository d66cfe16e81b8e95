// wordrec command-line tool. Talks to the library exclusively through the
// C API in wordrec.h.

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wordrec.h"

namespace {

// Exit-code contract: 0 success, 1 usage/config error, 2 partial data
// failure in strict mode, 3 unprocessable audio.
int exit_code_for(int status) {
  switch (status) {
    case WR_OK:
      return 0;
    case WR_E_PARTIAL_FAILURE:
      return 2;
    case WR_E_MALFORMED_HEADER:
    case WR_E_UNSUPPORTED_CHANNELS:
    case WR_E_UNSUPPORTED_ENCODING:
    case WR_E_EMPTY_SIGNAL:
    case WR_E_SILENT_SIGNAL:
    case WR_E_UPSAMPLING_REQUESTED:
    case WR_E_EMPTY_VOICED:
    case WR_E_UTTERANCE_TOO_SHORT:
    case WR_E_FRAME_TOO_LONG:
    case WR_E_TOO_FEW_POINTS:
      return 3;
    default:
      return 1;
  }
}

[[noreturn]] void die(int status) {
  std::cerr << "error: " << wr_status_name(status) << ": " << wr_last_error() << '\n';
  std::exit(exit_code_for(status));
}

void check(int status) {
  if (status != WR_OK) die(status);
}

struct ConfigHandle {
  wr_config* ptr = nullptr;
  ConfigHandle() : ptr(wr_config_new()) {}
  ~ConfigHandle() { wr_config_free(ptr); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

struct CommonOpts {
  std::string config_path;
  std::string seed;
  bool print_config = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "configuration file (key = value lines)");
  cmd->add_option("--seed", opts.seed, "seed override");
  cmd->add_flag("--print-config", opts.print_config, "print the resolved configuration");
}

void resolve_config(const CommonOpts& opts, wr_config* cfg) {
  if (!opts.config_path.empty()) check(wr_config_load(cfg, opts.config_path.c_str()));
  if (!opts.seed.empty()) check(wr_config_set(cfg, "seed", opts.seed.c_str()));
  if (opts.print_config) {
    char* text = nullptr;
    check(wr_config_print(cfg, &text));
    std::cout << text;
    wr_string_free(text);
  }
}

std::string config_value(const wr_config* cfg, const char* key) {
  char* value = nullptr;
  check(wr_config_get(cfg, key, &value));
  std::string out(value);
  wr_string_free(value);
  return out;
}

uint64_t config_seed(const wr_config* cfg) {
  return std::stoull(config_value(cfg, "seed"));
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_failure(const char* path, const char* message, void*) {
  std::cerr << "skip: " << path << ": " << message << '\n';
}

void print_skip(const char* path, void*) {
  std::cerr << "skip: " << path << ": not a WAV file\n";
}

struct HistoryWriter {
  std::ofstream out;

  static void on_epoch(int epoch, double lr, double mean_loss, double train_accuracy,
                       void* user) {
    auto* self = static_cast<HistoryWriter*>(user);
    self->out << epoch << ',' << format_full(lr) << ',' << format_full(mean_loss) << ','
              << format_full(train_accuracy) << '\n';
  }
};

int run_featurize(const CommonOpts& common, const std::string& corpus_dir,
                  const std::string& out_path, const std::string& manifest_out,
                  double split_fraction, const std::string& train_out,
                  const std::string& test_out, bool strict, int threads) {
  ConfigHandle cfg;
  resolve_config(common, cfg.ptr);

  wr_manifest* manifest = nullptr;
  check(wr_scan_corpus(corpus_dir.c_str(), print_skip, nullptr, &manifest));

  const std::string base = out_path.empty() ? train_out : out_path;
  const std::string manifest_path =
      manifest_out.empty() ? base + ".manifest.csv" : manifest_out;
  check(wr_manifest_save(manifest, manifest_path.c_str()));
  std::cerr << "scanned " << wr_manifest_size(manifest) << " files, "
            << wr_manifest_num_labels(manifest) << " labels -> " << manifest_path << '\n';

  auto featurize_to = [&](const wr_manifest* m, const std::string& path) {
    wr_feature_set* fs = nullptr;
    const int status =
        wr_featurize(m, cfg.ptr, strict ? 1 : 0, threads, print_failure, nullptr, &fs);
    if (status != WR_OK) {
      wr_manifest_free(manifest);
      die(status);
    }
    check(wr_feature_set_save(fs, path.c_str()));
    std::cerr << "wrote " << wr_feature_set_rows(fs) << " rows x " << wr_feature_set_dim(fs)
              << " -> " << path << '\n';
    wr_feature_set_free(fs);
  };

  if (split_fraction > 0.0) {
    wr_manifest* train = nullptr;
    wr_manifest* test = nullptr;
    check(wr_manifest_split(manifest, split_fraction, config_seed(cfg.ptr), &train, &test));
    featurize_to(train, train_out);
    featurize_to(test, test_out);
    wr_manifest_free(train);
    wr_manifest_free(test);
  } else {
    featurize_to(manifest, out_path);
  }
  wr_manifest_free(manifest);
  return 0;
}

int run_train(const CommonOpts& common, const std::string& features_path,
              const std::string& model_out, const std::string& history_out) {
  ConfigHandle cfg;
  resolve_config(common, cfg.ptr);

  wr_feature_set* fs = nullptr;
  check(wr_feature_set_load(features_path.c_str(), &fs));

  HistoryWriter history;
  const std::string history_path =
      history_out.empty() ? model_out + ".history.csv" : history_out;
  history.out.open(history_path, std::ios::binary);
  if (!history.out) {
    std::cerr << "error: cannot create " << history_path << '\n';
    return 1;
  }
  history.out << "epoch,lr,mean_loss,train_accuracy\n";

  wr_model* model = nullptr;
  const int status = wr_train(fs, cfg.ptr, HistoryWriter::on_epoch, &history, &model);
  if (status != WR_OK) {
    wr_feature_set_free(fs);
    die(status);
  }
  check(wr_model_save(model, model_out.c_str()));

  std::cout << "trained model with " << wr_model_param_count(model) << " parameters ("
            << wr_model_num_classes(model) << " classes) -> " << model_out << '\n';
  std::cout << "history -> " << history_path << '\n';

  wr_model_free(model);
  wr_feature_set_free(fs);
  return 0;
}

int run_evaluate(const CommonOpts& common, const std::string& model_path,
                 const std::string& features_path, const std::string& report_out) {
  ConfigHandle cfg;
  resolve_config(common, cfg.ptr);

  wr_model* model = nullptr;
  check(wr_model_load(model_path.c_str(), &model));
  wr_feature_set* fs = nullptr;
  check(wr_feature_set_load(features_path.c_str(), &fs));

  wr_report* report = nullptr;
  const int status = wr_evaluate(model, fs, &report);
  if (status != WR_OK) {
    wr_model_free(model);
    wr_feature_set_free(fs);
    die(status);
  }

  char* text = nullptr;
  check(wr_report_text(report, model, &text));
  std::cout << text;
  wr_string_free(text);

  check(wr_report_save_json(report, report_out.c_str()));
  std::cout << "report -> " << report_out << '\n';

  wr_report_free(report);
  wr_feature_set_free(fs);
  wr_model_free(model);
  return 0;
}

int run_predict(const CommonOpts& common, const std::string& model_path,
                const std::string& wav_path) {
  ConfigHandle cfg;
  resolve_config(common, cfg.ptr);

  wr_model* model = nullptr;
  check(wr_model_load(model_path.c_str(), &model));

  const int classes = wr_model_num_classes(model);
  std::vector<double> scores(static_cast<size_t>(classes));
  int top = -1;
  const int status =
      wr_predict_file(model, cfg.ptr, wav_path.c_str(), &top, scores.data());
  if (status != WR_OK) {
    wr_model_free(model);
    if (exit_code_for(status) == 3) {
      std::cerr << "error: " << wr_status_name(status) << ": " << wr_last_error() << '\n'
                << "hint: the utterance has no usable voiced audio; check that the file"
                   " contains speech and is at least one frame long\n";
      std::exit(3);
    }
    die(status);
  }

  std::vector<int> order(static_cast<size_t>(classes));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)]; });

  const char* top_label = wr_model_label(model, top);
  std::cout << "prediction: " << (top_label ? top_label : "?") << '\n';
  for (int c : order) {
    const char* label = wr_model_label(model, c);
    std::printf("%-24s %.6f\n", label ? label : "?", scores[static_cast<size_t>(c)]);
  }
  wr_model_free(model);
  return 0;
}

int run_gradcheck(const CommonOpts& common) {
  ConfigHandle cfg;
  resolve_config(common, cfg.ptr);

  // output width follows the configured architecture; hidden layer fixed
  const std::string arch = config_value(cfg.ptr, "architecture");
  const int out_classes = std::stoi(arch.substr(arch.rfind(',') + 1));

  const int sizes[3] = {112, 20, out_classes};
  double max_err = 0.0;
  char* worst = nullptr;
  check(wr_grad_check(sizes, 3, 5, 1e-5, config_seed(cfg.ptr), &max_err, &worst));

  const bool pass = max_err < 1e-6;
  std::cout << "gradcheck (112, 20, " << out_classes << "): max relative error "
            << format_full(max_err) << (pass ? " PASS" : " FAIL") << '\n';
  if (!pass) {
    std::cerr << "worst parameter: " << (worst ? worst : "?") << '\n';
    wr_string_free(worst);
    return 1;
  }
  wr_string_free(worst);
  return 0;
}

int run_synth(const std::string& out_dir, int classes, int samples, uint64_t seed) {
  check(wr_synth_corpus(out_dir.c_str(), classes, samples, seed));
  std::cerr << "wrote " << classes << " x " << samples << " WAVs under " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isolated word recognition toolkit"};
  app.require_subcommand(1);

  CommonOpts common;

  auto* featurize = app.add_subcommand("featurize", "extract features from a corpus");
  std::string corpus_dir, out_path, manifest_out, train_out, test_out;
  double split_fraction = 0.0;
  bool strict = false;
  int threads = 0;  // 0: take the config's thread count
  featurize->add_option("corpus", corpus_dir, "corpus root (root/<label>/*.wav)")->required();
  featurize->add_option("--out", out_path, "feature set output path");
  featurize->add_option("--manifest-out", manifest_out, "manifest CSV path");
  featurize->add_option("--split", split_fraction, "train fraction; write a train/test split");
  featurize->add_option("--train-out", train_out, "train feature set path (with --split)");
  featurize->add_option("--test-out", test_out, "test feature set path (with --split)");
  featurize->add_flag("--strict", strict, "fail (exit 2) if any file cannot be featurized");
  featurize->add_option("--threads", threads, "worker threads");
  add_common(featurize, common);

  auto* train = app.add_subcommand("train", "train a model from a feature set");
  std::string features_path, model_out, history_out;
  train->add_option("features", features_path, "feature set file")->required();
  train->add_option("--out", model_out, "model output path")->required();
  train->add_option("--history", history_out, "per-epoch history CSV path");
  add_common(train, common);

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a model on a feature set");
  std::string model_path, eval_features, report_out = "report.json";
  evaluate->add_option("model", model_path, "model file")->required();
  evaluate->add_option("features", eval_features, "feature set file")->required();
  evaluate->add_option("--out", report_out, "JSON report path");
  add_common(evaluate, common);

  auto* predict = app.add_subcommand("predict", "classify a single WAV file");
  std::string predict_model, wav_path;
  predict->add_option("model", predict_model, "model file")->required();
  predict->add_option("wav", wav_path, "WAV file")->required();
  add_common(predict, common);

  auto* gradcheck = app.add_subcommand("gradcheck", "verify backprop against finite differences");
  add_common(gradcheck, common);

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string synth_dir;
  int synth_classes = 10, synth_samples = 30;
  uint64_t synth_seed = 1;
  synth->add_option("out_dir", synth_dir, "output directory")->required();
  synth->add_option("--classes", synth_classes, "number of classes");
  synth->add_option("--samples-per-class", synth_samples, "samples per class");
  synth->add_option("--seed", synth_seed, "corpus seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (featurize->parsed()) {
      if (split_fraction > 0.0 && (train_out.empty() || test_out.empty())) {
        std::cerr << "error: --split requires --train-out and --test-out\n";
        return 1;
      }
      if (split_fraction <= 0.0 && out_path.empty()) {
        std::cerr << "error: --out is required without --split\n";
        return 1;
      }
      return run_featurize(common, corpus_dir, out_path, manifest_out, split_fraction,
                           train_out, test_out, strict, threads);
    }
    if (train->parsed()) return run_train(common, features_path, model_out, history_out);
    if (evaluate->parsed()) return run_evaluate(common, model_path, eval_features, report_out);
    if (predict->parsed()) return run_predict(common, predict_model, wav_path);
    if (gradcheck->parsed()) return run_gradcheck(common);
    if (synth->parsed()) return run_synth(synth_dir, synth_classes, synth_samples, synth_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
