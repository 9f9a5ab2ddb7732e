#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vegplan {

/// Error kinds raised across the library. Each kind names one failed
/// precondition or invariant; callers switch on `Error::code()`.
enum class Errc {
  // ingest
  FileNotFound,
  EmptyFile,
  MissingColumn,
  MalformedField,
  MalformedDate,
  DuplicateItemCode,
  CategoryCountMismatch,
  UnknownItemCode,
  NegativePrice,
  NegativeQuantity,
  DuplicateQuote,
  NonpositivePrice,
  OutOfRangeLoss,
  // analytics
  EmptyDataset,
  LengthMismatch,
  ZeroVariance,
  TooFewObservations,
  InsufficientPeriods,
  // demand
  TooFewPoints,
  FitDiverged,
  AllFitsFailed,
  DomainViolation,
  NotDecreasing,
  // forecast
  NoData,
  SeriesTooShort,
  NonStationaryFit,
  NoConvergentFit,
  // planners
  LossOutOfRange,
  NoProfitablePrice,
  EmptyInterval,
  EmptyWindow,
  EmptyFeasibleInterval,
  PoolTooSmall,
  CategoryUncoverable,
  PoolTooLarge,
  NoFeasibleAssortment,
  // files and configuration
  MalformedPlanFile,
  InvalidConfig,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace vegplan
