#pragma once

#include <stdexcept>
#include <string>

namespace twc {

/// Rejected input: a precondition on user-supplied data failed.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was asked to run beyond its designed scale guard.
class ScaleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal consistency broken: indicates a bug, not bad input.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace twc
