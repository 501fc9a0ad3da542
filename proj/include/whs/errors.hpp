#pragma once

#include <stdexcept>
#include <string>

namespace whs {

/// Failure categories mapped to CLI exit codes.
enum class ErrorKind : int {
    constraint = 1,  // a scheme constraint is violated
    bad_input = 2,   // malformed input, unknown model, shape mismatch
    resource = 3,    // resource cap exceeded
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

}  // namespace whs
