#pragma once

#include <stdexcept>
#include <string>

namespace blowlab {

struct NotSpdError : std::runtime_error {
    explicit NotSpdError(const std::string& what) : std::runtime_error(what) {}
};

struct MaxIterationsError : std::runtime_error {
    explicit MaxIterationsError(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergenceError : std::runtime_error {
    explicit NoConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfRegimeError : std::logic_error {
    explicit OutOfRegimeError(const std::string& what) : std::logic_error(what) {}
};

struct InsufficientWindowError : std::runtime_error {
    explicit InsufficientWindowError(const std::string& what) : std::runtime_error(what) {}
};

struct RegimeUnreachableError : std::runtime_error {
    explicit RegimeUnreachableError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace blowlab
