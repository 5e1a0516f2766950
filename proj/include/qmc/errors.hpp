#pragma once

#include <stdexcept>

namespace qmc {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Requested register or enumeration exceeds the configured cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qmc
