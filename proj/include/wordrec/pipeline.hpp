#pragma once

#include <cstdint>

#include "wordrec/audio.hpp"
#include "wordrec/config.hpp"
#include "wordrec/features.hpp"

namespace wordrec {

// resample -> normalize -> voiced segments -> silence removal -> pre-emphasis.
Signal preprocess(const Signal& s, const RunConfig& cfg);

// preprocess + mfcc + k-means compression for a single utterance.
FeatureVector utterance_features(const Signal& s, const RunConfig& cfg, uint64_t kmeans_seed);

MfccConfig mfcc_config(const RunConfig& cfg);

}  // namespace wordrec
