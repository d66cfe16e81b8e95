/*
 * wordrec — isolated word recognition toolkit.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and released through these functions; every fallible call returns a
 * wr_status code. A human-readable message for the most recent failure on
 * the calling thread is available from wr_last_error().
 */

#ifndef WORDREC_H
#define WORDREC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct wr_config wr_config;
typedef struct wr_manifest wr_manifest;
typedef struct wr_feature_set wr_feature_set;
typedef struct wr_model wr_model;
typedef struct wr_report wr_report;
typedef struct wr_signal wr_signal;

enum wr_status {
  WR_OK = 0,
  WR_E_MISSING_FILE,
  WR_E_MALFORMED_HEADER,
  WR_E_UNSUPPORTED_CHANNELS,
  WR_E_UNSUPPORTED_ENCODING,
  WR_E_IO_FAILURE,
  WR_E_SCHEMA_MISMATCH,
  WR_E_SHAPE_MISMATCH,
  WR_E_EMPTY_SIGNAL,
  WR_E_SILENT_SIGNAL,
  WR_E_UPSAMPLING_REQUESTED,
  WR_E_EMPTY_VOICED,
  WR_E_UTTERANCE_TOO_SHORT,
  WR_E_NEGATIVE_FREQUENCY,
  WR_E_FRAME_TOO_LONG,
  WR_E_TOO_MANY_FILTERS,
  WR_E_DIMENSION_MISMATCH,
  WR_E_TOO_FEW_POINTS,
  WR_E_MISSING_ROOT,
  WR_E_EMPTY_CORPUS,
  WR_E_CLASS_TOO_SMALL,
  WR_E_INVALID_FRACTION,
  WR_E_INVALID_CONFIG,
  WR_E_EMPTY_TRAINING_SET,
  WR_E_PARTIAL_FAILURE,
  WR_E_NUMERIC_FAILURE,
  WR_E_INVALID_ARGUMENT,
  WR_E_INTERNAL
};

const char* wr_version(void);
const char* wr_status_name(int status);
/* Message for the most recent failing call on this thread; empty if none. */
const char* wr_last_error(void);
/* Releases strings returned through char** out parameters. */
void wr_string_free(char* s);

/* ---- configuration -------------------------------------------------- */

/* Defaults: 10 kHz, pre-emphasis 0.9375, frames 300/100, VAD 108 ms at
 * ratio 0.01, 40 filters, FFT 512, 14 cepstra, k = 8, architecture
 * 112,100,95,90,95,100,60, lr 0.05, decay 0.95. */
wr_config* wr_config_new(void);
int wr_config_load(wr_config* cfg, const char* path);
int wr_config_set(wr_config* cfg, const char* key, const char* value);
int wr_config_get(const wr_config* cfg, const char* key, char** out_value);
int wr_config_print(const wr_config* cfg, char** out_text);
void wr_config_free(wr_config* cfg);

/* ---- corpus --------------------------------------------------------- */

int wr_synth_corpus(const char* out_dir, int num_classes, int samples_per_class,
                    uint64_t seed);

typedef void (*wr_skip_fn)(const char* path, void* user);

/* Walks the WAV files under root's per-label directories. Non-WAV files
 * found there are skipped and reported through on_skip (may be NULL). */
int wr_scan_corpus(const char* root, wr_skip_fn on_skip, void* user, wr_manifest** out);
int wr_manifest_save(const wr_manifest* m, const char* path);
size_t wr_manifest_size(const wr_manifest* m);
int wr_manifest_num_labels(const wr_manifest* m);
const char* wr_manifest_label(const wr_manifest* m, int class_index);
int wr_manifest_split(const wr_manifest* m, double train_fraction, uint64_t seed,
                      wr_manifest** train_out, wr_manifest** test_out);
void wr_manifest_free(wr_manifest* m);

/* ---- features ------------------------------------------------------- */

typedef void (*wr_failure_fn)(const char* path, const char* message, void* user);

/* Featurizes every manifest entry. Unreadable or too-short utterances are
 * reported through on_failure and skipped; with strict != 0 any failure
 * makes the call return WR_E_PARTIAL_FAILURE instead. threads <= 0 uses
 * the config's thread count. */
int wr_featurize(const wr_manifest* m, const wr_config* cfg, int strict, int threads,
                 wr_failure_fn on_failure, void* user, wr_feature_set** out);

int wr_feature_set_save(const wr_feature_set* fs, const char* path);
int wr_feature_set_load(const char* path, wr_feature_set** out);
size_t wr_feature_set_rows(const wr_feature_set* fs);
int wr_feature_set_dim(const wr_feature_set* fs);
int wr_feature_set_num_classes(const wr_feature_set* fs);
void wr_feature_set_free(wr_feature_set* fs);

/* ---- training and evaluation ---------------------------------------- */

typedef void (*wr_progress_fn)(int epoch, double lr, double mean_loss,
                               double train_accuracy, void* user);

int wr_train(const wr_feature_set* fs, const wr_config* cfg,
             wr_progress_fn on_epoch, void* user, wr_model** out);

int wr_model_save(const wr_model* model, const char* path);
int wr_model_load(const char* path, wr_model** out);
int64_t wr_model_param_count(const wr_model* model);
int wr_model_num_classes(const wr_model* model);
const char* wr_model_label(const wr_model* model, int class_index);
void wr_model_free(wr_model* model);

int wr_evaluate(const wr_model* model, const wr_feature_set* fs, wr_report** out);
double wr_report_accuracy(const wr_report* r);
int64_t wr_report_sample_count(const wr_report* r);
int wr_report_save_json(const wr_report* r, const char* path);
int wr_report_text(const wr_report* r, const wr_model* model_or_null, char** out_text);
void wr_report_free(wr_report* r);

/* Runs the full pipeline on one WAV file. scores must hold at least
 * wr_model_num_classes(model) doubles; may be NULL if only the class index
 * is wanted. */
int wr_predict_file(const wr_model* model, const wr_config* cfg, const char* wav_path,
                    int* class_out, double* scores);

/* Backprop vs central finite differences on a freshly seeded network with
 * n_samples random inputs. On success *max_rel_err holds the worst relative
 * error and, when worst_out is non-NULL, *worst_out names the worst
 * parameter coordinate. */
int wr_grad_check(const int* layer_sizes, int n_layers, int n_samples, double epsilon,
                  uint64_t seed, double* max_rel_err, char** worst_out);

/* ---- signal-level access -------------------------------------------- */

int wr_read_wav(const char* path, wr_signal** out);
int wr_signal_rate(const wr_signal* s);
size_t wr_signal_len(const wr_signal* s);
const double* wr_signal_samples(const wr_signal* s);
/* resample -> normalize -> silence removal -> pre-emphasis per the config. */
int wr_preprocess(const wr_signal* s, const wr_config* cfg, wr_signal** out);
/* Features of a preprocessed utterance; out must hold k * coeff_count
 * doubles (112 with the defaults). */
int wr_extract_features(const wr_signal* preprocessed, const wr_config* cfg,
                        uint64_t kmeans_seed, double* out, size_t out_len);
void wr_signal_free(wr_signal* s);

#ifdef __cplusplus
}
#endif

#endif /* WORDREC_H */
