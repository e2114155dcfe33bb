#ifndef QTLAB_ERROR_HPP
#define QTLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qtlab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical precondition failed: unresolvable widths, boundary leaks,
/// stability heuristics, caustics, fully masked fields.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A configuration value or argument is malformed or out of range.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace qtlab

#endif
