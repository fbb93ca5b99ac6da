#pragma once

#include <stdexcept>
#include <string>

namespace gazeflow {

// Bad input: malformed files, schema violations, failed validation.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A contract between pipeline stages was violated.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace gazeflow
