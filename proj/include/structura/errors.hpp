#pragma once

#include <stdexcept>
#include <string>

namespace structura {

// Every rejection an operation can produce carries one of these codes.
// MathError covers well-formed inputs rejected on mathematical grounds,
// InputError covers malformed or contradictory inputs; the CLI maps the
// two classes to exit codes 1 and 2.
enum class ErrorCode {
  // finite spaces and covers
  MissingEmptyOrFull,
  NotClosedUnderUnion,
  NotClosedUnderIntersection,
  UnknownPoint,
  NotAnOpen,
  NotARefinement,
  NotACover,

  // exact linear algebra
  ShapeMismatch,
  CompositionNotZero,
  NotDirected,
  NotFunctorial,

  // structured families
  AlignmentMismatch,
  ComponentShapeMismatch,
  IndexSetMismatch,
  TagMismatch,
  NotPartitionable,

  // presheaves and sheaves
  PresheafLawsViolated,
  WrongValueKind,
  NotASheaf,

  // complexes and grids
  RowNotAComplex,
  VerticalShapeMismatch,
  AnticommutationFails,
  TruncationExceeded,

  // rings, spectra, schemes
  NotARing,
  TooLarge,
  NotPrime,
  DecompositionFails,
  StalkNotLocal,

  // algebras and Hochschild data
  NotAssociative,
  DegreeTooLarge,
  MixedCharacteristic,
  SectionRingNotAlgebra,

  // bundles and monoids
  RankNotLocallyConstant,
  BaseMismatch,
  IndexMismatch,
  MonoidAxiomsFail,

  // command line and file handling
  ParseError,
  UnknownCommand,
  OptionConflict,

  // a type invariant was broken by internal code; always a bug
  InvariantViolation,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MissingEmptyOrFull: return "MissingEmptyOrFull";
    case ErrorCode::NotClosedUnderUnion: return "NotClosedUnderUnion";
    case ErrorCode::NotClosedUnderIntersection: return "NotClosedUnderIntersection";
    case ErrorCode::UnknownPoint: return "UnknownPoint";
    case ErrorCode::NotAnOpen: return "NotAnOpen";
    case ErrorCode::NotARefinement: return "NotARefinement";
    case ErrorCode::NotACover: return "NotACover";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::CompositionNotZero: return "CompositionNotZero";
    case ErrorCode::NotDirected: return "NotDirected";
    case ErrorCode::NotFunctorial: return "NotFunctorial";
    case ErrorCode::AlignmentMismatch: return "AlignmentMismatch";
    case ErrorCode::ComponentShapeMismatch: return "ComponentShapeMismatch";
    case ErrorCode::IndexSetMismatch: return "IndexSetMismatch";
    case ErrorCode::TagMismatch: return "TagMismatch";
    case ErrorCode::NotPartitionable: return "NotPartitionable";
    case ErrorCode::PresheafLawsViolated: return "PresheafLawsViolated";
    case ErrorCode::WrongValueKind: return "WrongValueKind";
    case ErrorCode::NotASheaf: return "NotASheaf";
    case ErrorCode::RowNotAComplex: return "RowNotAComplex";
    case ErrorCode::VerticalShapeMismatch: return "VerticalShapeMismatch";
    case ErrorCode::AnticommutationFails: return "AnticommutationFails";
    case ErrorCode::TruncationExceeded: return "TruncationExceeded";
    case ErrorCode::NotARing: return "NotARing";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::DecompositionFails: return "DecompositionFails";
    case ErrorCode::StalkNotLocal: return "StalkNotLocal";
    case ErrorCode::NotAssociative: return "NotAssociative";
    case ErrorCode::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::MixedCharacteristic: return "MixedCharacteristic";
    case ErrorCode::SectionRingNotAlgebra: return "SectionRingNotAlgebra";
    case ErrorCode::RankNotLocallyConstant: return "RankNotLocallyConstant";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::MonoidAxiomsFail: return "MonoidAxiomsFail";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::OptionConflict: return "OptionConflict";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class MathError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] inline void math_error(ErrorCode code, const std::string& detail) {
  throw MathError(code, detail);
}

[[noreturn]] inline void input_error(ErrorCode code, const std::string& detail) {
  throw InputError(code, detail);
}

inline void require_invariant(bool ok, const std::string& detail) {
  if (!ok) throw MathError(ErrorCode::InvariantViolation, detail);
}

}  // namespace structura
