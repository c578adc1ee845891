#pragma once

#include <stdexcept>
#include <string>

namespace specdet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or unsupported file content (bad magic, bad header, truncation).
struct FormatError : Error {
    using Error::Error;
};

// Image or tile dimensions incompatible with the requested operation.
struct DimensionError : Error {
    using Error::Error;
};

// Mismatched vector/model dimensions or feature sources.
struct ShapeError : Error {
    using Error::Error;
};

// Scalar argument outside its admissible range.
struct DomainError : Error {
    using Error::Error;
};

// Invalid training input (single-class data, size mismatch).
struct TrainError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace specdet
