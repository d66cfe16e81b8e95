#include "wordrec/error.hpp"

namespace wordrec {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::missing_file: return "MissingFile";
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::unsupported_channels: return "UnsupportedChannels";
    case Errc::unsupported_encoding: return "UnsupportedEncoding";
    case Errc::io_failure: return "IoFailure";
    case Errc::schema_mismatch: return "SchemaMismatch";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::empty_signal: return "EmptySignal";
    case Errc::silent_signal: return "SilentSignal";
    case Errc::upsampling_requested: return "UpsamplingRequested";
    case Errc::empty_voiced: return "EmptyVoiced";
    case Errc::utterance_too_short: return "UtteranceTooShort";
    case Errc::negative_frequency: return "NegativeFrequency";
    case Errc::frame_too_long: return "FrameTooLong";
    case Errc::too_many_filters: return "TooManyFilters";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::missing_root: return "MissingRoot";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::class_too_small: return "ClassTooSmall";
    case Errc::invalid_fraction: return "InvalidFraction";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::empty_training_set: return "EmptyTrainingSet";
    case Errc::partial_failure: return "PartialFailure";
    case Errc::numeric_failure: return "NumericFailure";
  }
  return "Unknown";
}

}  // namespace wordrec
