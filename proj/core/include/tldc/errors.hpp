#pragma once

#include <stdexcept>
#include <string>

namespace tldc {

// Error taxonomy. The CLI maps DataError and its children to exit code 2
// (user/data problems) and everything else to exit code 1.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape disagreement between tensors/layers.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Invalid configuration value (rate out of range, zero fan, bad class id).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Bad user-supplied data: malformed labels, empty classes, bad requests.
class DataError : public Error {
public:
    using Error::Error;
};

// Text that failed to parse (YOLO label lines, config files).
class ParseError : public DataError {
public:
    using DataError::DataError;
};

// File could not be read, decoded or written; message carries the path.
class IoError : public DataError {
public:
    using DataError::DataError;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Loss went non-finite during training; message names epoch and batch.
class DivergenceError : public NumericError {
public:
    DivergenceError(std::size_t epoch, std::size_t batch)
        : NumericError("training diverged: non-finite loss at epoch " +
                       std::to_string(epoch) + ", batch " + std::to_string(batch)),
          epoch(epoch), batch(batch) {}
    std::size_t epoch;
    std::size_t batch;
};

// An operation was called in the wrong order (backward before forward).
class StateError : public Error {
public:
    using Error::Error;
};

// Checkpoint loading failures, one type per failure mode.
class CheckpointError : public DataError {
public:
    using DataError::DataError;
};

class BadMagicError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class ManifestError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class BlobLengthError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

}  // namespace tldc
