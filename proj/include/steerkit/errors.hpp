#pragma once

#include <stdexcept>
#include <string>

namespace steerkit {

/// Base class for all steerkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class NonHermitianInput : public Error {
public:
    explicit NonHermitianInput(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class ParamOutOfRange : public Error {
public:
    explicit ParamOutOfRange(const std::string& msg) : Error(msg) {}
};

class InvalidState : public Error {
public:
    explicit InvalidState(const std::string& msg) : Error(msg) {}
};

class MeshTooSmall : public Error {
public:
    explicit MeshTooSmall(const std::string& msg) : Error(msg) {}
};

class MeshTooLarge : public Error {
public:
    explicit MeshTooLarge(const std::string& msg) : Error(msg) {}
};

class DegenerateHull : public Error {
public:
    explicit DegenerateHull(const std::string& msg) : Error(msg) {}
};

class IterationLimit : public Error {
public:
    explicit IterationLimit(const std::string& msg) : Error(msg) {}
};

class EmptyCounts : public Error {
public:
    explicit EmptyCounts(const std::string& msg) : Error(msg) {}
};

class EmptyAnimation : public Error {
public:
    explicit EmptyAnimation(const std::string& msg) : Error(msg) {}
};

class InvalidRate : public Error {
public:
    explicit InvalidRate(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

} // namespace steerkit
