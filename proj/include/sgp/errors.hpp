#pragma once

#include <stdexcept>
#include <string>

namespace sgp {

// Base for all toolkit errors; catch this at CLI level.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments or violated preconditions.
struct InvalidInputError : Error {
    using Error::Error;
};

// Malformed files (CSV, JSON, checkpoints); message carries the location.
struct FormatError : Error {
    using Error::Error;
};

// Library curation failures (duplicate velocities, non-monotone map, ...).
struct CurationError : Error {
    using Error::Error;
};

// A spectrum with no usable peak.
struct NoDominantFrequencyError : Error {
    using Error::Error;
};

// Phase query at a frequency with negligible energy.
struct UndefinedPhaseError : Error {
    using Error::Error;
};

// Non-finite loss or parameters during training.
struct DivergedTrainingError : Error {
    using Error::Error;
};

}  // namespace sgp
