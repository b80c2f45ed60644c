#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace panelfactor {

enum class ErrorKind {
  DimensionMismatch,
  NonFiniteEntry,
  RankOutOfRange,
  DegenerateDenominator,
  CollinearControls,
  UnitDegenerate,
  RankDeficientAugmentation,
  EmptyCluster,
  InvalidAlpha,
  InvalidSpec,
  MissingLatents,
  NegativeWeights,
  AllCellsDegenerate,
  SingularMeanMatrix,
  UnknownEstimatorTag,
  InvalidArgument,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the MC
// harness, the CLI exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  Error(ErrorKind kind, const std::string& message, std::size_t unit)
      : Error(kind, message) {
    unit_ = unit;
  }

  ErrorKind kind() const noexcept { return kind_; }
  // Offending unit index for UnitDegenerate.
  std::optional<std::size_t> unit() const noexcept { return unit_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> unit_;
};

}  // namespace panelfactor
