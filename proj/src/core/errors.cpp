#include "core/errors.hpp"

namespace polyinv {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::capacity: return "capacity";
        case ErrorCode::parse: return "parse";
        case ErrorCode::io: return "io";
        case ErrorCode::singular: return "singular";
        case ErrorCode::diverged: return "diverged";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

}  // namespace polyinv
