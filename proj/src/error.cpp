#include "swir/error.hpp"

namespace swir {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::TooShort: return "TooShort";
    case Errc::InvalidDistribution: return "InvalidDistribution";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::StepOutOfRange: return "StepOutOfRange";
    case Errc::AlreadyTerminated: return "AlreadyTerminated";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::BackendFailure: return "BackendFailure";
    case Errc::BudgetConfigInvalid: return "BudgetConfigInvalid";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptLine: return "CorruptLine";
    case Errc::ZeroTokens: return "ZeroTokens";
    case Errc::NoOverlap: return "NoOverlap";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::NoAnchor: return "NoAnchor";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Protocol: return "Protocol";
  }
  return "Unknown";
}

}  // namespace swir
