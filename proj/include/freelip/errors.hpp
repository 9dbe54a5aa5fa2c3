#pragma once

#include <stdexcept>
#include <string>

namespace freelip {

enum class Errc {
    BadInput,
    TriangleViolation,
    NonPositiveOffDiagonal,
    BadBaseIndex,
    DuplicatePoint,
    OutOfRange,
    TooFewPoints,
    ThetaOutOfRange,
    WrongNorm,
    UnsupportedTarget,
    LTooSmall,
    ZeroMap,
    NotDistinct,
    NotAttaining,
    NotExtreme,
    BadFunctional,
    NoWitness,
    DegenerateLocal,
    MemberNotExposed,
    DeltaTooLarge,
    EtaOutOfRange,
    BreakpointOverflow,
    NonUnitNorm,
    SolverFailure,
    ConsistencyViolation,
    IndexOutOfRange,
    CertificateViolation,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::BadInput: return "BadInput";
        case Errc::TriangleViolation: return "TriangleViolation";
        case Errc::NonPositiveOffDiagonal: return "NonPositiveOffDiagonal";
        case Errc::BadBaseIndex: return "BadBaseIndex";
        case Errc::DuplicatePoint: return "DuplicatePoint";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::TooFewPoints: return "TooFewPoints";
        case Errc::ThetaOutOfRange: return "ThetaOutOfRange";
        case Errc::WrongNorm: return "WrongNorm";
        case Errc::UnsupportedTarget: return "UnsupportedTarget";
        case Errc::LTooSmall: return "LTooSmall";
        case Errc::ZeroMap: return "ZeroMap";
        case Errc::NotDistinct: return "NotDistinct";
        case Errc::NotAttaining: return "NotAttaining";
        case Errc::NotExtreme: return "NotExtreme";
        case Errc::BadFunctional: return "BadFunctional";
        case Errc::NoWitness: return "NoWitness";
        case Errc::DegenerateLocal: return "DegenerateLocal";
        case Errc::MemberNotExposed: return "MemberNotExposed";
        case Errc::DeltaTooLarge: return "DeltaTooLarge";
        case Errc::EtaOutOfRange: return "EtaOutOfRange";
        case Errc::BreakpointOverflow: return "BreakpointOverflow";
        case Errc::NonUnitNorm: return "NonUnitNorm";
        case Errc::SolverFailure: return "SolverFailure";
        case Errc::ConsistencyViolation: return "ConsistencyViolation";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::CertificateViolation: return "CertificateViolation";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace freelip
