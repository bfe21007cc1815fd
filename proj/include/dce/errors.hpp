#pragma once

#include <stdexcept>
#include <string>

namespace dce {

/// Caller violated a documented precondition (bad parameters, mismatched cache).
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical invariant that should hold for every valid input was broken.
class internal_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dce
