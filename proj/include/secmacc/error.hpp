#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace secmacc {

enum class Errc {
  ParamError,
  BadParams,
  ShapeError,
  SingularMatrix,
  LengthMismatch,
  SideInfoMismatch,
  IndexError,
  CaseMismatch,
  DivisibilityError,
  NotCoprime,
  KeyExhausted,
  DecodeFailure,
  TooLarge,
  BoundViolated,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ParamError: return "ParamError";
    case Errc::BadParams: return "BadParams";
    case Errc::ShapeError: return "ShapeError";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SideInfoMismatch: return "SideInfoMismatch";
    case Errc::IndexError: return "IndexError";
    case Errc::CaseMismatch: return "CaseMismatch";
    case Errc::DivisibilityError: return "DivisibilityError";
    case Errc::NotCoprime: return "NotCoprime";
    case Errc::KeyExhausted: return "KeyExhausted";
    case Errc::DecodeFailure: return "DecodeFailure";
    case Errc::TooLarge: return "TooLarge";
    case Errc::BoundViolated: return "BoundViolated";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code
/// and a human-readable reason.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace secmacc
