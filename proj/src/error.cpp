#include "dfindex/error.hpp"

namespace dfindex {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::EvaluationDomain: return "EvaluationDomain";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::OrderTooLow: return "OrderTooLow";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::AmbiguousFoot: return "AmbiguousFoot";
    case ErrorKind::StencilLeak: return "StencilLeak";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::NotPseudoconvex: return "NotPseudoconvex";
    case ErrorKind::NotDegenerate: return "NotDegenerate";
    case ErrorKind::ChartMismatch: return "ChartMismatch";
    case ErrorKind::HypothesisFail: return "HypothesisFail";
    case ErrorKind::ChartGap: return "ChartGap";
    case ErrorKind::ObstructedClass: return "ObstructedClass";
    case ErrorKind::PathDisagreement: return "PathDisagreement";
    case ErrorKind::CollarTooWide: return "CollarTooWide";
    case ErrorKind::PsiDomain: return "PsiDomain";
    case ErrorKind::MeshOutside: return "MeshOutside";
    case ErrorKind::NoCertificate: return "NoCertificate";
    case ErrorKind::NotACurve: return "NotACurve";
    case ErrorKind::TangencyUnresolved: return "TangencyUnresolved";
    case ErrorKind::BetaTooSmall: return "BetaTooSmall";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace dfindex
