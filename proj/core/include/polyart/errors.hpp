#pragma once

#include <stdexcept>
#include <string>

namespace polyart {

/// Base class for all polyart errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
struct IoError : Error {
    using Error::Error;
};

/// Input file is syntactically malformed. The message names the record
/// locus (line number or frame id) and the reason.
struct ParseError : Error {
    using Error::Error;
};

/// A value violates a documented domain invariant (e.g. x_min >= x_max,
/// score outside [0,1], duplicate frame id).
struct InvariantError : Error {
    using Error::Error;
};

/// A configuration value is out of range or inconsistent.
struct ConfigError : Error {
    using Error::Error;
};

/// Frame ids of two datasets do not line up as required.
struct FrameAlignmentError : Error {
    using Error::Error;
};

/// Match outcomes from different counting modes were mixed in one
/// aggregation.
struct ModeMixError : Error {
    using Error::Error;
};

/// A class appearing in a per-class loss map has no weight entry.
struct MissingWeightError : Error {
    using Error::Error;
};

/// Not enough frames to compute a statistic.
struct TooFewFramesError : Error {
    using Error::Error;
};

/// Model architecture does not match the input it was applied to.
struct ShapeError : Error {
    using Error::Error;
};

/// Training loss became non-finite.
struct DivergenceError : Error {
    using Error::Error;
};

}  // namespace polyart
