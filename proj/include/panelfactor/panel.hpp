#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace panelfactor {

// Unit-major (row-major) storage: row i is the time series of unit i.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense n x T panel. Immutable after construction; every entry finite.
class PanelMatrix {
 public:
  PanelMatrix() = default;

  /// Takes ownership of `values`; throws NonFiniteEntry on NaN/inf.
  explicit PanelMatrix(RowMatrix values);

  static PanelMatrix zeros(std::size_t n, std::size_t T);

  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t T() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  double operator()(std::size_t i, std::size_t t) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
  }

  const RowMatrix& values() const noexcept { return values_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * T(), T()};
  }

  bool same_shape(const PanelMatrix& other) const noexcept {
    return n() == other.n() && T() == other.T();
  }

 private:
  RowMatrix values_;
};

PanelMatrix panel_from_rows(std::size_t n, std::size_t T,
                            const std::vector<std::vector<double>>& rows);

// Throws DimensionMismatch unless the panel is at least 2 x 2.
void require_estimable(const PanelMatrix& A);

// Latent draws of the location-scale factor simulator. Plain containers; the
// semantics live in dgp.hpp.
struct LatentDraws {
  Eigen::VectorXd lambda_plus;  // n
  Eigen::VectorXd lambda_x;     // n
  Eigen::VectorXd f_plus;       // T
  Eigen::VectorXd f_x;          // T
  RowMatrix eps_x;              // n x T
  RowMatrix u;                  // n x T
  // Design constants needed to evaluate conditional moments from the draws.
  double pi = 0.0;
  double kappa = 0.0;
  double rho = 0.0;
  double beta0 = 0.0;
};

struct PanelDataset {
  PanelMatrix Y;
  std::vector<PanelMatrix> X;
  std::optional<LatentDraws> latents;

  PanelDataset() = default;
  // Validates K >= 1 and matching shapes.
  PanelDataset(PanelMatrix y, std::vector<PanelMatrix> x,
               std::optional<LatentDraws> latents = std::nullopt);

  std::size_t n() const noexcept { return Y.n(); }
  std::size_t T() const noexcept { return Y.T(); }
  std::size_t K() const noexcept { return X.size(); }
};

}  // namespace panelfactor
