#pragma once

#include <stdexcept>
#include <string>

namespace qasc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration, invalid input data, or a broken cross-reference.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Filesystem problems: missing files, unreadable paths, failed writes.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

/// Degenerate numeric input (zero-norm vector, empty percentile sample).
class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& what) : Error(what) {}
};

/// Embedding provider failure. Retriable errors (network, malformed payload)
/// carry the size of the failing batch so a caller can retry it; contract
/// violations (dimension or count mismatch) are fatal configuration errors.
class ProviderError : public Error {
public:
    ProviderError(const std::string& what, bool retriable, std::size_t batch_size = 0)
        : Error(what), retriable_(retriable), batch_size_(batch_size) {}

    bool retriable() const { return retriable_; }
    std::size_t batch_size() const { return batch_size_; }

private:
    bool retriable_;
    std::size_t batch_size_;
};

}  // namespace qasc
