#include "wordrec.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "wordrec/audio.hpp"
#include "wordrec/config.hpp"
#include "wordrec/corpus.hpp"
#include "wordrec/error.hpp"
#include "wordrec/network.hpp"
#include "wordrec/pipeline.hpp"
#include "wordrec/rng.hpp"
#include "wordrec/synth.hpp"

using wordrec::Errc;

struct wr_config {
  wordrec::RunConfig impl;
};
struct wr_manifest {
  wordrec::Manifest impl;
};
struct wr_feature_set {
  wordrec::FeatureSet impl;
};
struct wr_model {
  wordrec::Model impl;
};
struct wr_report {
  wordrec::EvalReport impl;
  std::string text_cache;
};
struct wr_signal {
  wordrec::Signal impl;
};

namespace {

thread_local std::string g_last_error;

int status_of(Errc code) {
  switch (code) {
    case Errc::missing_file: return WR_E_MISSING_FILE;
    case Errc::malformed_header: return WR_E_MALFORMED_HEADER;
    case Errc::unsupported_channels: return WR_E_UNSUPPORTED_CHANNELS;
    case Errc::unsupported_encoding: return WR_E_UNSUPPORTED_ENCODING;
    case Errc::io_failure: return WR_E_IO_FAILURE;
    case Errc::schema_mismatch: return WR_E_SCHEMA_MISMATCH;
    case Errc::shape_mismatch: return WR_E_SHAPE_MISMATCH;
    case Errc::empty_signal: return WR_E_EMPTY_SIGNAL;
    case Errc::silent_signal: return WR_E_SILENT_SIGNAL;
    case Errc::upsampling_requested: return WR_E_UPSAMPLING_REQUESTED;
    case Errc::empty_voiced: return WR_E_EMPTY_VOICED;
    case Errc::utterance_too_short: return WR_E_UTTERANCE_TOO_SHORT;
    case Errc::negative_frequency: return WR_E_NEGATIVE_FREQUENCY;
    case Errc::frame_too_long: return WR_E_FRAME_TOO_LONG;
    case Errc::too_many_filters: return WR_E_TOO_MANY_FILTERS;
    case Errc::dimension_mismatch: return WR_E_DIMENSION_MISMATCH;
    case Errc::too_few_points: return WR_E_TOO_FEW_POINTS;
    case Errc::missing_root: return WR_E_MISSING_ROOT;
    case Errc::empty_corpus: return WR_E_EMPTY_CORPUS;
    case Errc::class_too_small: return WR_E_CLASS_TOO_SMALL;
    case Errc::invalid_fraction: return WR_E_INVALID_FRACTION;
    case Errc::invalid_config: return WR_E_INVALID_CONFIG;
    case Errc::empty_training_set: return WR_E_EMPTY_TRAINING_SET;
    case Errc::partial_failure: return WR_E_PARTIAL_FAILURE;
    case Errc::numeric_failure: return WR_E_NUMERIC_FAILURE;
  }
  return WR_E_INTERNAL;
}

// Runs fn, converting exceptions into status codes + thread-local message.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return WR_OK;
  } catch (const wordrec::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return WR_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WR_E_INTERNAL;
  }
}

int require(bool ok, const char* what) {
  if (ok) return WR_OK;
  g_last_error = std::string("invalid argument: ") + what;
  return WR_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* wr_version(void) { return "1.0.0"; }

const char* wr_status_name(int status) {
  switch (status) {
    case WR_OK: return "OK";
    case WR_E_MISSING_FILE: return "MissingFile";
    case WR_E_MALFORMED_HEADER: return "MalformedHeader";
    case WR_E_UNSUPPORTED_CHANNELS: return "UnsupportedChannels";
    case WR_E_UNSUPPORTED_ENCODING: return "UnsupportedEncoding";
    case WR_E_IO_FAILURE: return "IoFailure";
    case WR_E_SCHEMA_MISMATCH: return "SchemaMismatch";
    case WR_E_SHAPE_MISMATCH: return "ShapeMismatch";
    case WR_E_EMPTY_SIGNAL: return "EmptySignal";
    case WR_E_SILENT_SIGNAL: return "SilentSignal";
    case WR_E_UPSAMPLING_REQUESTED: return "UpsamplingRequested";
    case WR_E_EMPTY_VOICED: return "EmptyVoiced";
    case WR_E_UTTERANCE_TOO_SHORT: return "UtteranceTooShort";
    case WR_E_NEGATIVE_FREQUENCY: return "NegativeFrequency";
    case WR_E_FRAME_TOO_LONG: return "FrameTooLong";
    case WR_E_TOO_MANY_FILTERS: return "TooManyFilters";
    case WR_E_DIMENSION_MISMATCH: return "DimensionMismatch";
    case WR_E_TOO_FEW_POINTS: return "TooFewPoints";
    case WR_E_MISSING_ROOT: return "MissingRoot";
    case WR_E_EMPTY_CORPUS: return "EmptyCorpus";
    case WR_E_CLASS_TOO_SMALL: return "ClassTooSmall";
    case WR_E_INVALID_FRACTION: return "InvalidFraction";
    case WR_E_INVALID_CONFIG: return "InvalidConfig";
    case WR_E_EMPTY_TRAINING_SET: return "EmptyTrainingSet";
    case WR_E_PARTIAL_FAILURE: return "PartialFailure";
    case WR_E_NUMERIC_FAILURE: return "NumericFailure";
    case WR_E_INVALID_ARGUMENT: return "InvalidArgument";
    case WR_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* wr_last_error(void) { return g_last_error.c_str(); }

void wr_string_free(char* s) { delete[] s; }

/* ---- configuration -------------------------------------------------- */

wr_config* wr_config_new(void) { return new (std::nothrow) wr_config{}; }

int wr_config_load(wr_config* cfg, const char* path) {
  if (int rc = require(cfg && path, "wr_config_load")) return rc;
  return guarded([&] { cfg->impl = wordrec::load_config(path); });
}

int wr_config_set(wr_config* cfg, const char* key, const char* value) {
  if (int rc = require(cfg && key && value, "wr_config_set")) return rc;
  return guarded([&] {
    wordrec::RunConfig updated = cfg->impl;
    wordrec::apply_config_value(updated, key, value);
    wordrec::validate_config(updated);
    cfg->impl = updated;
  });
}

int wr_config_get(const wr_config* cfg, const char* key, char** out_value) {
  if (int rc = require(cfg && key && out_value, "wr_config_get")) return rc;
  return guarded([&] { *out_value = dup_string(wordrec::get_config_value(cfg->impl, key)); });
}

int wr_config_print(const wr_config* cfg, char** out_text) {
  if (int rc = require(cfg && out_text, "wr_config_print")) return rc;
  return guarded([&] { *out_text = dup_string(wordrec::print_config(cfg->impl)); });
}

void wr_config_free(wr_config* cfg) { delete cfg; }

/* ---- corpus --------------------------------------------------------- */

int wr_synth_corpus(const char* out_dir, int num_classes, int samples_per_class,
                    uint64_t seed) {
  if (int rc = require(out_dir != nullptr, "wr_synth_corpus")) return rc;
  return guarded([&] {
    wordrec::SynthConfig sc;
    sc.num_classes = num_classes;
    sc.samples_per_class = samples_per_class;
    sc.seed = seed;
    wordrec::generate_synthetic_corpus(sc, out_dir);
  });
}

int wr_scan_corpus(const char* root, wr_skip_fn on_skip, void* user, wr_manifest** out) {
  if (int rc = require(root && out, "wr_scan_corpus")) return rc;
  return guarded([&] {
    wordrec::ScanResult res = wordrec::scan_corpus(root);
    if (on_skip) {
      for (const std::string& path : res.skipped) on_skip(path.c_str(), user);
    }
    *out = new wr_manifest{std::move(res.manifest)};
  });
}

int wr_manifest_save(const wr_manifest* m, const char* path) {
  if (int rc = require(m && path, "wr_manifest_save")) return rc;
  return guarded([&] { wordrec::save_manifest(m->impl, path); });
}

size_t wr_manifest_size(const wr_manifest* m) { return m ? m->impl.entries.size() : 0; }

int wr_manifest_num_labels(const wr_manifest* m) {
  return m ? static_cast<int>(m->impl.label_table.size()) : 0;
}

const char* wr_manifest_label(const wr_manifest* m, int class_index) {
  if (!m || class_index < 0 ||
      class_index >= static_cast<int>(m->impl.label_table.size())) {
    return nullptr;
  }
  return m->impl.label_table[static_cast<size_t>(class_index)].c_str();
}

int wr_manifest_split(const wr_manifest* m, double train_fraction, uint64_t seed,
                      wr_manifest** train_out, wr_manifest** test_out) {
  if (int rc = require(m && train_out && test_out, "wr_manifest_split")) return rc;
  return guarded([&] {
    wordrec::SplitResult split = wordrec::stratified_split(m->impl, train_fraction, seed);
    *train_out = new wr_manifest{std::move(split.train)};
    *test_out = new wr_manifest{std::move(split.test)};
  });
}

void wr_manifest_free(wr_manifest* m) { delete m; }

/* ---- features ------------------------------------------------------- */

int wr_featurize(const wr_manifest* m, const wr_config* cfg, int strict, int threads,
                 wr_failure_fn on_failure, void* user, wr_feature_set** out) {
  if (int rc = require(m && cfg && out, "wr_featurize")) return rc;
  return guarded([&] {
    const int workers = threads > 0 ? threads : cfg->impl.threads;
    wordrec::FeaturizeResult res;
    try {
      res = wordrec::featurize_corpus(m->impl, cfg->impl, strict != 0, workers);
    } catch (const wordrec::Error& e) {
      // strict-mode partial failure still reports the per-file reasons
      if (e.code() == Errc::partial_failure && on_failure) {
        wordrec::FeaturizeResult lenient =
            wordrec::featurize_corpus(m->impl, cfg->impl, false, workers);
        for (const auto& f : lenient.failures) {
          on_failure(f.path.c_str(), f.message.c_str(), user);
        }
      }
      throw;
    }
    if (on_failure) {
      for (const auto& f : res.failures) on_failure(f.path.c_str(), f.message.c_str(), user);
    }
    *out = new wr_feature_set{std::move(res.features)};
  });
}

int wr_feature_set_save(const wr_feature_set* fs, const char* path) {
  if (int rc = require(fs && path, "wr_feature_set_save")) return rc;
  return guarded([&] { wordrec::save_feature_set(fs->impl, path); });
}

int wr_feature_set_load(const char* path, wr_feature_set** out) {
  if (int rc = require(path && out, "wr_feature_set_load")) return rc;
  return guarded([&] { *out = new wr_feature_set{wordrec::load_feature_set(path)}; });
}

size_t wr_feature_set_rows(const wr_feature_set* fs) {
  return fs ? fs->impl.features.rows : 0;
}

int wr_feature_set_dim(const wr_feature_set* fs) { return fs ? fs->impl.feature_dim : 0; }

int wr_feature_set_num_classes(const wr_feature_set* fs) {
  return fs ? fs->impl.num_classes : 0;
}

void wr_feature_set_free(wr_feature_set* fs) { delete fs; }

/* ---- training and evaluation ---------------------------------------- */

int wr_train(const wr_feature_set* fs, const wr_config* cfg, wr_progress_fn on_epoch,
             void* user, wr_model** out) {
  if (int rc = require(fs && cfg && out, "wr_train")) return rc;
  return guarded([&] {
    const wordrec::RunConfig& rc = cfg->impl;
    const wordrec::FeatureSet& set = fs->impl;

    wordrec::Architecture arch{rc.architecture};
    if (arch.layer_sizes.front() != set.feature_dim ||
        arch.layer_sizes.back() != set.num_classes) {
      wordrec::fail(Errc::dimension_mismatch,
                    "architecture expects " + std::to_string(arch.layer_sizes.front()) +
                        " inputs / " + std::to_string(arch.layer_sizes.back()) +
                        " outputs but features are " + std::to_string(set.feature_dim) +
                        " wide with " + std::to_string(set.num_classes) + " classes");
    }

    wordrec::TrainConfig tc;
    tc.lr0 = rc.lr0;
    tc.decay = rc.decay;
    tc.epochs = rc.epochs;
    tc.seed = rc.seed;
    tc.max_updates = rc.max_updates;

    wordrec::Network net = wordrec::init_network(arch, rc.seed);
    wordrec::TrainResult trained = wordrec::sgd_train(
        std::move(net), wordrec::to_train_samples(set), tc,
        on_epoch ? wordrec::ProgressSink([&](const wordrec::EpochStats& e) {
          on_epoch(e.epoch, e.lr, e.mean_loss, e.train_accuracy, user);
        })
                 : wordrec::ProgressSink());

    wordrec::Model model;
    model.network = std::move(trained.network);
    model.meta.kmeans_k = set.config.kmeans_k;
    model.meta.coeff_count = set.config.coeff_count;
    if (set.label_table.size() == static_cast<size_t>(set.num_classes)) {
      model.meta.labels = set.label_table;
    } else {
      model.meta.labels.resize(static_cast<size_t>(set.num_classes));
      for (size_t i = 0; i < model.meta.labels.size(); ++i) {
        model.meta.labels[i] = "class_" + std::to_string(i);
      }
    }
    *out = new wr_model{std::move(model)};
  });
}

int wr_model_save(const wr_model* model, const char* path) {
  if (int rc = require(model && path, "wr_model_save")) return rc;
  return guarded([&] {
    wordrec::save_model(model->impl.network, model->impl.meta, path);
  });
}

int wr_model_load(const char* path, wr_model** out) {
  if (int rc = require(path && out, "wr_model_load")) return rc;
  return guarded([&] { *out = new wr_model{wordrec::load_model(path)}; });
}

int64_t wr_model_param_count(const wr_model* model) {
  return model ? wordrec::param_count(model->impl.network.arch) : 0;
}

int wr_model_num_classes(const wr_model* model) {
  return model ? model->impl.network.output_size() : 0;
}

const char* wr_model_label(const wr_model* model, int class_index) {
  if (!model || class_index < 0 ||
      class_index >= static_cast<int>(model->impl.meta.labels.size())) {
    return nullptr;
  }
  return model->impl.meta.labels[static_cast<size_t>(class_index)].c_str();
}

void wr_model_free(wr_model* model) { delete model; }

int wr_evaluate(const wr_model* model, const wr_feature_set* fs, wr_report** out) {
  if (int rc = require(model && fs && out, "wr_evaluate")) return rc;
  return guarded([&] {
    *out = new wr_report{wordrec::evaluate(model->impl.network, fs->impl), {}};
  });
}

double wr_report_accuracy(const wr_report* r) { return r ? r->impl.accuracy : 0.0; }

int64_t wr_report_sample_count(const wr_report* r) { return r ? r->impl.sample_count : 0; }

int wr_report_save_json(const wr_report* r, const char* path) {
  if (int rc = require(r && path, "wr_report_save_json")) return rc;
  return guarded([&] { wordrec::save_report_json(r->impl, path); });
}

int wr_report_text(const wr_report* r, const wr_model* model_or_null, char** out_text) {
  if (int rc = require(r && out_text, "wr_report_text")) return rc;
  return guarded([&] {
    const std::vector<std::string> labels =
        model_or_null ? model_or_null->impl.meta.labels : std::vector<std::string>();
    *out_text = dup_string(wordrec::report_text(r->impl, labels));
  });
}

void wr_report_free(wr_report* r) { delete r; }

int wr_predict_file(const wr_model* model, const wr_config* cfg, const char* wav_path,
                    int* class_out, double* scores) {
  if (int rc = require(model && cfg && wav_path && class_out, "wr_predict_file")) return rc;
  return guarded([&] {
    wordrec::RunConfig rc = cfg->impl;
    rc.kmeans_k = model->impl.meta.kmeans_k;
    rc.coeff_count = model->impl.meta.coeff_count;

    const wordrec::Signal s = wordrec::read_wav(wav_path);
    const wordrec::FeatureVector fv =
        wordrec::utterance_features(s, rc, wordrec::mix_seed(rc.seed, 0));
    if (static_cast<int>(fv.values.size()) != model->impl.network.input_size()) {
      wordrec::fail(Errc::dimension_mismatch,
                    "features are " + std::to_string(fv.values.size()) +
                        " wide, model expects " +
                        std::to_string(model->impl.network.input_size()));
    }
    const wordrec::Prediction p = wordrec::predict(model->impl.network, fv.values);
    *class_out = p.class_index;
    if (scores) {
      std::copy(p.scores.begin(), p.scores.end(), scores);
    }
  });
}

int wr_grad_check(const int* layer_sizes, int n_layers, int n_samples, double epsilon,
                  uint64_t seed, double* max_rel_err, char** worst_out) {
  if (int rc = require(layer_sizes && n_layers >= 2 && n_samples >= 1 && max_rel_err,
                       "wr_grad_check")) {
    return rc;
  }
  return guarded([&] {
    wordrec::Architecture arch{std::vector<int>(layer_sizes, layer_sizes + n_layers)};
    const wordrec::Network net = wordrec::init_network(arch, seed);

    wordrec::Rng rng(wordrec::mix_seed(seed, 0x67636bULL));
    std::vector<wordrec::TrainSample> samples(static_cast<size_t>(n_samples));
    for (auto& sample : samples) {
      sample.x.resize(static_cast<size_t>(net.input_size()));
      for (double& v : sample.x) v = rng.uniform(0.0, 1.0);
      sample.label = static_cast<int>(rng.uniform_index(
          static_cast<size_t>(net.output_size())));
    }

    const wordrec::GradCheckReport report = wordrec::grad_check(net, samples, epsilon);
    *max_rel_err = report.max_rel_error;
    if (worst_out) *worst_out = dup_string(report.coordinate());
  });
}

/* ---- signal-level access -------------------------------------------- */

int wr_read_wav(const char* path, wr_signal** out) {
  if (int rc = require(path && out, "wr_read_wav")) return rc;
  return guarded([&] { *out = new wr_signal{wordrec::read_wav(path)}; });
}

int wr_signal_rate(const wr_signal* s) { return s ? s->impl.rate : 0; }

size_t wr_signal_len(const wr_signal* s) { return s ? s->impl.samples.size() : 0; }

const double* wr_signal_samples(const wr_signal* s) {
  return s ? s->impl.samples.data() : nullptr;
}

int wr_preprocess(const wr_signal* s, const wr_config* cfg, wr_signal** out) {
  if (int rc = require(s && cfg && out, "wr_preprocess")) return rc;
  return guarded([&] { *out = new wr_signal{wordrec::preprocess(s->impl, cfg->impl)}; });
}

int wr_extract_features(const wr_signal* preprocessed, const wr_config* cfg,
                        uint64_t kmeans_seed, double* out, size_t out_len) {
  if (int rc = require(preprocessed && cfg && out, "wr_extract_features")) return rc;
  return guarded([&] {
    const wordrec::RunConfig& rc = cfg->impl;
    const size_t need = static_cast<size_t>(rc.kmeans_k) * rc.coeff_count;
    if (out_len < need) {
      wordrec::fail(Errc::dimension_mismatch,
                    "output buffer holds " + std::to_string(out_len) + " values, need " +
                        std::to_string(need));
    }
    const wordrec::MfccMatrix coeffs =
        wordrec::mfcc(preprocessed->impl, wordrec::mfcc_config(rc));
    const wordrec::FeatureVector fv =
        wordrec::compress_features(coeffs, rc.kmeans_k, kmeans_seed);
    std::copy(fv.values.begin(), fv.values.end(), out);
  });
}

void wr_signal_free(wr_signal* s) { delete s; }

}  // extern "C"
