#pragma once

#include <stdexcept>
#include <string>

namespace aupipe {

// Base for all pipeline errors. The CLI maps any of these to exit code 2;
// usage errors are handled separately by the argument parser.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file structure (bad header, wrong column count).
struct FormatError : Error {
    using Error::Error;
};

// A cell or argument holds a value outside its allowed domain.
struct ValueError : Error {
    using Error::Error;
};

// Two samples share the same (video_id, frame) key.
struct DuplicateKeyError : Error {
    using Error::Error;
};

// Invalid configuration (out-of-range hyperparameter, unknown JSON key).
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem failure (unwritable path, missing file).
struct IoError : Error {
    using Error::Error;
};

// Matrix/vector dimension mismatch.
struct ShapeError : Error {
    using Error::Error;
};

// Predictions and ground truth do not cover the same frames.
struct AlignmentError : Error {
    using Error::Error;
};

// Dataset cannot be split (e.g. a single video).
struct SplitError : Error {
    using Error::Error;
};

// Ensemble spec references a model that is not among the supplied runs.
struct SpecError : Error {
    using Error::Error;
};

// Non-finite numbers where finite ones are required (diverged training).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace aupipe
