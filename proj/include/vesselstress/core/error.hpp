#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vesselstress {

enum class ErrorCode {
    MalformedFile,
    UnsupportedElementType,
    NonPositiveVolume,
    AlreadyQuadratic,
    NonManifoldBoundary,
    NoLateralSurface,
    AmbiguousClassification,
    TooManyLateralRegions,
    DegenerateParams,
    IncompressibleLimit,
    NonPhysical,
    SingularJacobian,
    DegenerateFace,
    MissingInteriorPatch,
    NoCaps,
    DegenerateGeometry,
    SolverDiverged,
    ZeroDiagonal,
    EmptyPatch,
    EmptySample,
    BadRank,
    EmptyCohort,
    ConfigInvalid,
    IoError,
    UnknownBenchmark,
    NeedTwoSizes,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::UnsupportedElementType: return "UnsupportedElementType";
    case ErrorCode::NonPositiveVolume: return "NonPositiveVolume";
    case ErrorCode::AlreadyQuadratic: return "AlreadyQuadratic";
    case ErrorCode::NonManifoldBoundary: return "NonManifoldBoundary";
    case ErrorCode::NoLateralSurface: return "NoLateralSurface";
    case ErrorCode::AmbiguousClassification: return "AmbiguousClassification";
    case ErrorCode::TooManyLateralRegions: return "TooManyLateralRegions";
    case ErrorCode::DegenerateParams: return "DegenerateParams";
    case ErrorCode::IncompressibleLimit: return "IncompressibleLimit";
    case ErrorCode::NonPhysical: return "NonPhysical";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::MissingInteriorPatch: return "MissingInteriorPatch";
    case ErrorCode::NoCaps: return "NoCaps";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorCode::EmptyPatch: return "EmptyPatch";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::BadRank: return "BadRank";
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownBenchmark: return "UnknownBenchmark";
    case ErrorCode::NeedTwoSizes: return "NeedTwoSizes";
    }
    return "Unknown";
}

/// Numerical failures map to CLI exit code 2, everything else to 1.
constexpr bool is_numerical(ErrorCode code) noexcept {
    return code == ErrorCode::SolverDiverged || code == ErrorCode::SingularJacobian ||
           code == ErrorCode::ZeroDiagonal;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail, std::string stage = {})
        : std::runtime_error(compose(code, detail, stage)), code_(code), detail_(detail),
          stage_(std::move(stage)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& stage() const noexcept { return stage_; }

    /// Same error, labelled with the pipeline stage it escaped from.
    Error with_stage(std::string stage) const { return Error(code_, detail_, std::move(stage)); }

private:
    static std::string compose(ErrorCode code, const std::string& detail, const std::string& stage) {
        std::string msg;
        if (!stage.empty()) msg += "[" + stage + "] ";
        msg += std::string(to_string(code));
        if (!detail.empty()) msg += ": " + detail;
        return msg;
    }

    ErrorCode code_;
    std::string detail_;
    std::string stage_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail = {}) {
    throw Error(code, detail);
}

}  // namespace vesselstress
