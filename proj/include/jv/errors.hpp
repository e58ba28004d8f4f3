#pragma once

#include <stdexcept>
#include <string>

namespace jv {

// Every error the library raises derives from Error so callers (the CLI in
// particular) can separate input problems from internal faults.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InputRational : public Error {
public:
    using Error::Error;
};

class BoundExceeded : public Error {
public:
    using Error::Error;
};

class NoMatchWithinBound : public Error {
public:
    using Error::Error;
};

class PrecisionInsufficient : public Error {
public:
    using Error::Error;
};

class InsufficientPrecision : public Error {
public:
    using Error::Error;
};

class DegenerateBasis : public Error {
public:
    using Error::Error;
};

class StepBoundExceeded : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class NotSquareFree : public Error {
public:
    using Error::Error;
};

} // namespace jv
