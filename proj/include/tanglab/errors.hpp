#pragma once

#include <stdexcept>
#include <string>

namespace tanglab {

/// Bad parameters, violated preconditions, malformed configs. CLI exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Eigenvalue within the rejection band around the unit circle.
class hyperbolicity_error : public validation_error {
public:
    explicit hyperbolicity_error(const std::string& msg) : validation_error(msg) {}
};

/// Wrong operand shape (dimension mismatch, missing unique expanding eigenvalue).
class shape_error : public validation_error {
public:
    explicit shape_error(const std::string& msg) : validation_error(msg) {}
};

/// Numerical-regime failures at runtime. CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested n outside the safe dynamic range of double arithmetic.
class precision_error : public numerical_error {
public:
    explicit precision_error(const std::string& msg) : numerical_error(msg) {}
};

/// Parameter regime does not support the requested computation.
class regime_error : public numerical_error {
public:
    explicit regime_error(const std::string& msg) : numerical_error(msg) {}
};

/// Every tracked orbit left the model's domain before the goal was reached.
class escape_exhaustion : public numerical_error {
public:
    explicit escape_exhaustion(const std::string& msg) : numerical_error(msg) {}
};

} // namespace tanglab
