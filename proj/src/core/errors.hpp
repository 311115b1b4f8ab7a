#pragma once

#include <stdexcept>
#include <string>

namespace polyinv {

// Error categories; mirrored one-to-one by the status codes of the C API.
enum class ErrorCode {
    invalid_argument = 1,
    dimension_mismatch = 2,
    capacity = 3,
    parse = 4,
    io = 5,
    singular = 6,
    diverged = 7,
    internal = 8,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

const char* error_code_name(ErrorCode code) noexcept;

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace polyinv
