#pragma once

#include <stdexcept>
#include <string>

namespace shipprop {

/// Broad failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
    Input,       // malformed or inconsistent inputs
    Degenerate,  // well-formed input the algorithm cannot work with
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(ErrorKind::Degenerate, what) {}
};

}  // namespace shipprop
