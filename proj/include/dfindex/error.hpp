#pragma once

#include <stdexcept>
#include <string>

namespace dfindex {

enum class ErrorKind {
  EvaluationDomain,
  NonFinite,
  NotHermitian,
  OrderTooLow,
  NoConvergence,
  AmbiguousFoot,
  StencilLeak,
  DegenerateGradient,
  NotPseudoconvex,
  NotDegenerate,
  ChartMismatch,
  HypothesisFail,
  ChartGap,
  ObstructedClass,
  PathDisagreement,
  CollarTooWide,
  PsiDomain,
  MeshOutside,
  NoCertificate,
  NotACurve,
  TangencyUnresolved,
  BetaTooSmall,
  ConfigInvalid,
  IoFailure,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dfindex
