#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geodd {

enum class ErrorCode {
  Syntax,
  UnknownPredicate,
  ArityMismatch,
  UndeclaredPoint,
  DuplicatePoint,
  BadLiteral,
  UnknownConstruction,
  WrongArgCount,
  DuplicateRuleName,
  UnboundConclusionVariable,
  DanglingDependency,
  DegenerateInput,
  NumericallyInfeasible,
  BuildFailed,
  SamplingStuck,
  InvalidProposal,
  ProposerUnavailable,
  ReplayFailed,
  ClosureMismatch,
  Io,
};

std::string_view error_code_name(ErrorCode c);

// Structured error carried by every failure in the library. `token` and
// `offset` locate the problem in the input text when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string token = {},
        std::size_t offset = npos)
      : std::runtime_error(format(code, message, token, offset)),
        code_(code),
        token_(std::move(token)),
        offset_(offset) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  ErrorCode code() const { return code_; }
  const std::string& token() const { return token_; }
  std::size_t offset() const { return offset_; }

 private:
  static std::string format(ErrorCode code, const std::string& message, const std::string& token,
                            std::size_t offset) {
    std::string out(error_code_name(code));
    if (!token.empty()) out += "(" + token + ")";
    if (offset != npos) out += " at byte " + std::to_string(offset);
    if (!message.empty()) out += ": " + message;
    return out;
  }

  ErrorCode code_;
  std::string token_;
  std::size_t offset_;
};

inline std::string_view error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Syntax: return "Syntax";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::UndeclaredPoint: return "UndeclaredPoint";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::BadLiteral: return "BadLiteral";
    case ErrorCode::UnknownConstruction: return "UnknownConstruction";
    case ErrorCode::WrongArgCount: return "WrongArgCount";
    case ErrorCode::DuplicateRuleName: return "DuplicateRuleName";
    case ErrorCode::UnboundConclusionVariable: return "UnboundConclusionVariable";
    case ErrorCode::DanglingDependency: return "DanglingDependency";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NumericallyInfeasible: return "NumericallyInfeasible";
    case ErrorCode::BuildFailed: return "BuildFailed";
    case ErrorCode::SamplingStuck: return "SamplingStuck";
    case ErrorCode::InvalidProposal: return "InvalidProposal";
    case ErrorCode::ProposerUnavailable: return "ProposerUnavailable";
    case ErrorCode::ReplayFailed: return "ReplayFailed";
    case ErrorCode::ClosureMismatch: return "ClosureMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace geodd
