#include "fprw/error.hpp"

namespace fprw {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::ZeroConstantTerm: return "ZeroConstantTerm";
        case ErrorCode::NonzeroInnerConstant: return "NonzeroInnerConstant";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NeedsDerivative: return "NeedsDerivative";
        case ErrorCode::RootNotBracketed: return "RootNotBracketed";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NotAtCriticality: return "NotAtCriticality";
        case ErrorCode::InvalidSingularity: return "InvalidSingularity";
        case ErrorCode::MissingSingularity: return "MissingSingularity";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::StateExplosion: return "StateExplosion";
        case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::UnsupportedFactorCount: return "UnsupportedFactorCount";
    }
    return "Unknown";
}

}  // namespace fprw
