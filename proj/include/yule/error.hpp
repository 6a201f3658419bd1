#pragma once

#include <stdexcept>
#include <string>

namespace yule {

// Base class for every error raised by the library. Callers that only care
// about "the input was bad" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter lies outside its mathematical domain (theta <= 0, |r| > 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class IncompatibleGridsError : public Error {
public:
    using Error::Error;
};

// A path functional that must be strictly positive vanished (constant path).
class DegenerateDenominatorError : public Error {
public:
    using Error::Error;
};

// Malformed input file (CSV or JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace yule
