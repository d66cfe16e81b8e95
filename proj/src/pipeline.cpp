#include "wordrec/pipeline.hpp"

namespace wordrec {

MfccConfig mfcc_config(const RunConfig& cfg) {
  MfccConfig mc;
  mc.frame_len = cfg.frame_len;
  mc.frame_shift = cfg.frame_shift;
  mc.num_filters = cfg.num_filters;
  mc.fft_size = cfg.fft_size;
  mc.coeff_count = cfg.coeff_count;
  return mc;
}

Signal preprocess(const Signal& s, const RunConfig& cfg) {
  Signal work = resample(s, cfg.sample_rate);
  work = normalize(work);
  const std::vector<Segment> voiced =
      voiced_segments(work, cfg.vad_window_ms, cfg.vad_threshold_ratio);
  work = remove_silence(work, voiced);
  return pre_emphasize(work, cfg.pre_emphasis_a);
}

FeatureVector utterance_features(const Signal& s, const RunConfig& cfg,
                                 uint64_t kmeans_seed) {
  const Signal prepared = preprocess(s, cfg);
  const MfccMatrix coeffs = mfcc(prepared, mfcc_config(cfg));
  return compress_features(coeffs, cfg.kmeans_k, kmeans_seed);
}

}  // namespace wordrec
