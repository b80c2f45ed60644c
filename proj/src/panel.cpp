#include "panelfactor/panel.hpp"

#include <cmath>
#include <string>

#include "panelfactor/errors.hpp"

namespace panelfactor {

PanelMatrix::PanelMatrix(RowMatrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "panel must have n >= 1 and T >= 1");
  }
  if (!values_.allFinite()) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      for (Eigen::Index t = 0; t < values_.cols(); ++t) {
        if (!std::isfinite(values_(i, t))) {
          throw Error(ErrorKind::NonFiniteEntry,
                      "entry (" + std::to_string(i) + "," + std::to_string(t) + ") is not finite");
        }
      }
    }
  }
}

PanelMatrix PanelMatrix::zeros(std::size_t n, std::size_t T) {
  return PanelMatrix(RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(T)));
}

PanelMatrix panel_from_rows(std::size_t n, std::size_t T,
                            const std::vector<std::vector<double>>& rows) {
  if (rows.size() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(n) + " rows, got " + std::to_string(rows.size()));
  }
  RowMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(T));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != T) {
      throw Error(ErrorKind::DimensionMismatch,
                  "row " + std::to_string(i) + " has length " + std::to_string(rows[i].size()) +
                      ", expected " + std::to_string(T));
    }
    for (std::size_t t = 0; t < T; ++t) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[i][t];
    }
  }
  return PanelMatrix(std::move(values));
}

void require_estimable(const PanelMatrix& A) {
  if (A.n() < 2 || A.T() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "estimators need n >= 2 and T >= 2");
  }
}

PanelDataset::PanelDataset(PanelMatrix y, std::vector<PanelMatrix> x,
                           std::optional<LatentDraws> lat)
    : Y(std::move(y)), X(std::move(x)), latents(std::move(lat)) {
  if (X.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "dataset needs at least one regressor");
  }
  for (std::size_t k = 0; k < X.size(); ++k) {
    if (!X[k].same_shape(Y)) {
      throw Error(ErrorKind::DimensionMismatch,
                  "regressor " + std::to_string(k) + " shape differs from outcome");
    }
  }
}

}  // namespace panelfactor
