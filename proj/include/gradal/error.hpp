#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gradal {

enum class ErrorCode {
  // algebra
  SemiringMismatch,
  UnknownElement,
  LengthMismatch,
  NoMorphism,
  UnknownMode,
  Overflow,
  // checking
  UnboundVar,
  TypeMismatch,
  GradeMismatch,
  AnnotationMissing,
  ConversionInconclusive,
  SubusageFailed,
  LinearVarUnused,
  LinearVarReused,
  NonEmptyLinearZone,
  LinearVarInType,
  WrongFragment,
  DuplicateName,
  TypeNotWF,
  LinearTypeNotWF,
  NotAType,
  ModeViolation,
  WeakeningForbidden,
  GradeModeMismatch,
  // metatheory
  ShapeMismatch,
  GenerationExhausted,
  // frontend
  ParseError,
  UnboundName,
  ConfigError,
};

inline constexpr ErrorCode kAllErrorCodes[] = {
    ErrorCode::SemiringMismatch,  ErrorCode::UnknownElement,
    ErrorCode::LengthMismatch,    ErrorCode::NoMorphism,
    ErrorCode::UnknownMode,       ErrorCode::Overflow,
    ErrorCode::UnboundVar,        ErrorCode::TypeMismatch,
    ErrorCode::GradeMismatch,     ErrorCode::AnnotationMissing,
    ErrorCode::ConversionInconclusive, ErrorCode::SubusageFailed,
    ErrorCode::LinearVarUnused,   ErrorCode::LinearVarReused,
    ErrorCode::NonEmptyLinearZone, ErrorCode::LinearVarInType,
    ErrorCode::WrongFragment,     ErrorCode::DuplicateName,
    ErrorCode::TypeNotWF,         ErrorCode::LinearTypeNotWF,
    ErrorCode::NotAType,          ErrorCode::ModeViolation,
    ErrorCode::WeakeningForbidden, ErrorCode::GradeModeMismatch,
    ErrorCode::ShapeMismatch,     ErrorCode::GenerationExhausted,
    ErrorCode::ParseError,        ErrorCode::UnboundName,
    ErrorCode::ConfigError,
};

// Stable diagnostic id. The switch has no default so -Wswitch flags a
// missing case at compile time.
constexpr std::string_view code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::SemiringMismatch: return "SemiringMismatch";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoMorphism: return "NoMorphism";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::UnboundVar: return "UnboundVar";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::GradeMismatch: return "GradeMismatch";
    case ErrorCode::AnnotationMissing: return "AnnotationMissing";
    case ErrorCode::ConversionInconclusive: return "ConversionInconclusive";
    case ErrorCode::SubusageFailed: return "SubusageFailed";
    case ErrorCode::LinearVarUnused: return "LinearVarUnused";
    case ErrorCode::LinearVarReused: return "LinearVarReused";
    case ErrorCode::NonEmptyLinearZone: return "NonEmptyLinearZone";
    case ErrorCode::LinearVarInType: return "LinearVarInType";
    case ErrorCode::WrongFragment: return "WrongFragment";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::TypeNotWF: return "TypeNotWF";
    case ErrorCode::LinearTypeNotWF: return "LinearTypeNotWF";
    case ErrorCode::NotAType: return "NotAType";
    case ErrorCode::ModeViolation: return "ModeViolation";
    case ErrorCode::WeakeningForbidden: return "WeakeningForbidden";
    case ErrorCode::GradeModeMismatch: return "GradeModeMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::GenerationExhausted: return "GenerationExhausted";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnboundName: return "UnboundName";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "?";
}

bool code_from_name(std::string_view name, ErrorCode& out);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string rule = {})
      : std::runtime_error(std::string(code_name(code)) + ": " + message),
        code_(code),
        message_(std::move(message)),
        rule_(std::move(rule)) {}

  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }
  const std::string& rule() const { return rule_; }
  void set_rule(std::string r) {
    if (rule_.empty()) rule_ = std::move(r);
  }
  // The compared values (vectors, types), pretty-printed.
  const std::vector<std::pair<std::string, std::string>>& payload() const { return payload_; }
  Error& with(std::string key, std::string value) {
    payload_.emplace_back(std::move(key), std::move(value));
    return *this;
  }

 private:
  ErrorCode code_;
  std::string message_;
  std::string rule_;
  std::vector<std::pair<std::string, std::string>> payload_;
};

[[noreturn]] inline void fail(ErrorCode c, std::string msg,
                              std::string rule = {}) {
  throw Error(c, std::move(msg), std::move(rule));
}

using Payload = std::vector<std::pair<std::string, std::string>>;

[[noreturn]] inline void fail_with(ErrorCode c, std::string msg, Payload payload,
                                   std::string rule = {}) {
  Error e(c, std::move(msg), std::move(rule));
  for (auto& [k, v] : payload) e.with(std::move(k), std::move(v));
  throw e;
}

}  // namespace gradal
