#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hh {

enum class ErrorCode {
    InvalidParameter,
    NonIntegrable,
    DegenerateProfile,
    GridTooShort,
    OutOfCase,
    IntegratorStall,
    NoEvent,
    BracketInvalid,
    NonConvergence,
    ConsistencyFailure,
    NoTailRadius,
    WrongRegime,
    StabilityViolation,
    IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace hh
