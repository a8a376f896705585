#pragma once

#include <stdexcept>
#include <string>

namespace semsearch {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or truncated input file.
struct format_error : error {
    using error::error;
};

/// A document has no tokens left after stop-word / vocabulary filtering.
struct empty_document_error : error {
    using error::error;
};

/// A query has no usable tokens for the chosen backend.
struct empty_query_error : error {
    using error::error;
};

struct solver_error : error {
    using error::error;
};

struct config_error : error {
    using error::error;
};

}  // namespace semsearch
