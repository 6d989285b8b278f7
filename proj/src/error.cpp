#include "singspec/error.hpp"

namespace singspec {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::UnsupportedConstraint: return "UnsupportedConstraint";
    case Errc::HigherOrderPole: return "HigherOrderPole";
    case Errc::NotAPole: return "NotAPole";
    case Errc::ChartError: return "ChartError";
    case Errc::PoleEvaluation: return "PoleEvaluation";
    case Errc::NonRealLame: return "NonRealLame";
    case Errc::DegenerateLame: return "DegenerateLame";
    case Errc::DegenerateSamples: return "DegenerateSamples";
    case Errc::DegenerateParameters: return "DegenerateParameters";
    case Errc::UnknownEntry: return "UnknownEntry";
    case Errc::SingularPoint: return "SingularPoint";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::SingularSoliton: return "SingularSoliton";
    case Errc::NoSoliton: return "NoSoliton";
    case Errc::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

}  // namespace singspec
