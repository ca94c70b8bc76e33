#pragma once

#include <stdexcept>
#include <string>

namespace aqst {

/// Broad failure category; the CLI maps each one to a process exit code.
enum class ErrorKind {
  validation,   // exit 2
  calibration,  // exit 3
  numerical,    // exit 4
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define AQST_DEFINE_ERROR(Name, Kind)                                      \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

// Readout contrast |alpha1| too small to invert outcome frequencies.
AQST_DEFINE_ERROR(DegenerateCalibration, numerical);
// alpha0 == 1: every Bloch direction has the same estimation variance.
AQST_DEFINE_ERROR(DegenerateGeometry, numerical);
AQST_DEFINE_ERROR(ZeroEstimate, numerical);
AQST_DEFINE_ERROR(NoSignChange, numerical);
AQST_DEFINE_ERROR(InvalidBudget, validation);
AQST_DEFINE_ERROR(InsufficientTrials, validation);
AQST_DEFINE_ERROR(InvalidArgument, validation);
AQST_DEFINE_ERROR(ConfigError, validation);
AQST_DEFINE_ERROR(CalibrationFailed, calibration);
AQST_DEFINE_ERROR(UnderConstrained, calibration);

#undef AQST_DEFINE_ERROR

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return 2;
    case ErrorKind::calibration: return 3;
    case ErrorKind::numerical: return 4;
  }
  return 1;
}

}  // namespace aqst
