#pragma once

#include <stdexcept>
#include <string>

namespace binnet {

// Shape/contract violations on tensor operations.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Class index outside the catalog.
struct label_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation called in the wrong order (e.g. backward without a graph).
struct state_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Bad scalar parameter (e.g. non-positive scale).
struct param_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed inputs to pure evaluation functions (metrics, routing).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid configuration. CLI exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing or unusable data. CLI exit code 3.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failures. CLI exit code 3.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A file that is not in the expected format (bad magic, malformed header).
// CLI exit code 3.
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A file in the right format but cut short or internally inconsistent.
// CLI exit code 3.
struct corruption_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Artifacts that do not belong together (checkpoint catalog vs dataset
// catalog). CLI exit code 4.
struct mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Network topology cannot support the requested operation.
struct unsupported_architecture_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace binnet
