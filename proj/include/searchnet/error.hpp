#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace searchnet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or infeasible configuration values.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A NodeRef that does not name an existing node on the expected side.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Degree-proportional draw requested from a side with no degree mass.
class SamplingError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Not enough tail data to fit an exponent.
class FitError : public Error {
public:
    FitError(const std::string& what, std::size_t tail_size)
        : Error(what), tail_size_(tail_size) {}
    std::size_t tail_size() const noexcept { return tail_size_; }

private:
    std::size_t tail_size_;
};

/// Component too large for the exact diameter pass.
class SizeError : public Error {
public:
    SizeError(const std::string& what, std::size_t component_size)
        : Error(what), component_size_(component_size) {}
    std::size_t component_size() const noexcept { return component_size_; }

private:
    std::size_t component_size_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyGraphError : public Error {
public:
    using Error::Error;
};

class BipartizeError : public Error {
public:
    using Error::Error;
};

/// An observer callback failed during run_evolution.
class EvolutionError : public Error {
public:
    EvolutionError(const std::string& what, std::size_t step)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace searchnet
