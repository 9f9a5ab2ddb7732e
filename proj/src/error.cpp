#include "vegplan/error.hpp"

namespace vegplan {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::MalformedField: return "MalformedField";
    case Errc::MalformedDate: return "MalformedDate";
    case Errc::DuplicateItemCode: return "DuplicateItemCode";
    case Errc::CategoryCountMismatch: return "CategoryCountMismatch";
    case Errc::UnknownItemCode: return "UnknownItemCode";
    case Errc::NegativePrice: return "NegativePrice";
    case Errc::NegativeQuantity: return "NegativeQuantity";
    case Errc::DuplicateQuote: return "DuplicateQuote";
    case Errc::NonpositivePrice: return "NonpositivePrice";
    case Errc::OutOfRangeLoss: return "OutOfRangeLoss";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::TooFewObservations: return "TooFewObservations";
    case Errc::InsufficientPeriods: return "InsufficientPeriods";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::FitDiverged: return "FitDiverged";
    case Errc::AllFitsFailed: return "AllFitsFailed";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::NotDecreasing: return "NotDecreasing";
    case Errc::NoData: return "NoData";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::NonStationaryFit: return "NonStationaryFit";
    case Errc::NoConvergentFit: return "NoConvergentFit";
    case Errc::LossOutOfRange: return "LossOutOfRange";
    case Errc::NoProfitablePrice: return "NoProfitablePrice";
    case Errc::EmptyInterval: return "EmptyInterval";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::EmptyFeasibleInterval: return "EmptyFeasibleInterval";
    case Errc::PoolTooSmall: return "PoolTooSmall";
    case Errc::CategoryUncoverable: return "CategoryUncoverable";
    case Errc::PoolTooLarge: return "PoolTooLarge";
    case Errc::NoFeasibleAssortment: return "NoFeasibleAssortment";
    case Errc::MalformedPlanFile: return "MalformedPlanFile";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace vegplan
