#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vem {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidParameterError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error("parse error at line " + std::to_string(line) + ": " + msg), line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

class DegenerateElementError : public Error {
public:
    using Error::Error;
};

class UnsupportedElementError : public Error {
public:
    using Error::Error;
};

class InvalidStateError : public Error {
public:
    using Error::Error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

class InvertedElementError : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& msg, std::vector<double> residual_log)
        : Error(msg), residual_log_(std::move(residual_log))
    {
    }
    const std::vector<double>& residual_log() const { return residual_log_; }

private:
    std::vector<double> residual_log_;
};

class StepFailureError : public Error {
public:
    StepFailureError(int step, const std::string& msg)
        : Error("load step " + std::to_string(step) + " failed: " + msg), step_(step)
    {
    }
    int step() const { return step_; }

private:
    int step_;
};

class UndefinedRateError : public Error {
public:
    using Error::Error;
};

class InvalidConfigError : public Error {
public:
    using Error::Error;
};

} // namespace vem
