#pragma once

#include <stdexcept>
#include <string>

namespace lasso {

enum class ErrorKind {
    non_commensurate,
    unsupported_bc,
    bad_bc,
    non_finite,
    singular_diagonal,
    horizon_exceeded,
    cfl_violation,
    degenerate_amplitude,
    target_not_h10,
    scan_too_coarse,
    config,
    synthesis
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::non_commensurate: return "NonCommensurate";
    case ErrorKind::unsupported_bc: return "UnsupportedBC";
    case ErrorKind::bad_bc: return "BadBC";
    case ErrorKind::non_finite: return "NonFinite";
    case ErrorKind::singular_diagonal: return "SingularDiagonal";
    case ErrorKind::horizon_exceeded: return "HorizonExceeded";
    case ErrorKind::cfl_violation: return "CFLViolation";
    case ErrorKind::degenerate_amplitude: return "DegenerateAmplitude";
    case ErrorKind::target_not_h10: return "TargetNotH10";
    case ErrorKind::scan_too_coarse: return "ScanTooCoarse";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::synthesis: return "SynthesisError";
    }
    return "Error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// carries the cascade stage that failed
class SynthesisError : public Error {
public:
    SynthesisError(std::string stage, const std::string& what)
        : Error(ErrorKind::synthesis, "stage '" + stage + "': " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace lasso
