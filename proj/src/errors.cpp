#include "panelfactor/errors.hpp"

namespace panelfactor {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::RankOutOfRange: return "RankOutOfRange";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::CollinearControls: return "CollinearControls";
    case ErrorKind::UnitDegenerate: return "UnitDegenerate";
    case ErrorKind::RankDeficientAugmentation: return "RankDeficientAugmentation";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::InvalidAlpha: return "InvalidAlpha";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::MissingLatents: return "MissingLatents";
    case ErrorKind::NegativeWeights: return "NegativeWeights";
    case ErrorKind::AllCellsDegenerate: return "AllCellsDegenerate";
    case ErrorKind::SingularMeanMatrix: return "SingularMeanMatrix";
    case ErrorKind::UnknownEstimatorTag: return "UnknownEstimatorTag";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace panelfactor
