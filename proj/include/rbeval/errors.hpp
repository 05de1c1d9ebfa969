#pragma once

#include <stdexcept>

namespace rbeval {

// Error taxonomy maps onto CLI exit codes:
//   ValidationError / ConfigError -> 2, TransportError -> 3, AnalysisError -> 4.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rbeval
