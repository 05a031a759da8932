#include "hh/error.hpp"

namespace hh {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NonIntegrable: return "NonIntegrable";
        case ErrorCode::DegenerateProfile: return "DegenerateProfile";
        case ErrorCode::GridTooShort: return "GridTooShort";
        case ErrorCode::OutOfCase: return "OutOfCase";
        case ErrorCode::IntegratorStall: return "IntegratorStall";
        case ErrorCode::NoEvent: return "NoEvent";
        case ErrorCode::BracketInvalid: return "BracketInvalid";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::ConsistencyFailure: return "ConsistencyFailure";
        case ErrorCode::NoTailRadius: return "NoTailRadius";
        case ErrorCode::WrongRegime: return "WrongRegime";
        case ErrorCode::StabilityViolation: return "StabilityViolation";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace hh
