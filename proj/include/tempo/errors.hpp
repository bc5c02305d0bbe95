#pragma once

#include <stdexcept>
#include <string>

namespace tempo {

// Base class for all library errors. Subclasses group into the exit-code
// categories used by the CLI: config (2), data (3), solver (4).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct SolverError : Error {
    using Error::Error;
};

// -- data errors --------------------------------------------------------

struct ParseError : DataError {
    ParseError(const std::string& what, long line_arg)
        : DataError(what + " (line " + std::to_string(line_arg) + ")"), line(line_arg) {}
    long line;
};

struct EmptyDataset : DataError {
    using DataError::DataError;
};

struct NoTestableUsers : DataError {
    using DataError::DataError;
};

struct DegenerateTimeRange : DataError {
    using DataError::DataError;
};

struct IndexOutOfRange : DataError {
    using DataError::DataError;
};

struct CutoffMismatch : DataError {
    using DataError::DataError;
};

struct IoError : DataError {
    using DataError::DataError;
};

// -- solver errors ------------------------------------------------------

struct NotPositiveDefinite : SolverError {
    using SolverError::SolverError;
};

struct Diverged : SolverError {
    using SolverError::SolverError;
};

struct InvalidKernelWidth : SolverError {
    using SolverError::SolverError;
};

struct ItemCountTooLarge : SolverError {
    using SolverError::SolverError;
};

struct MemoryBudgetExceeded : SolverError {
    using SolverError::SolverError;
};

struct StrategyUnsupported : SolverError {
    using SolverError::SolverError;
};

}  // namespace tempo
