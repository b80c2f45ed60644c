#pragma once

#include <Eigen/Dense>

#include <vector>

#include "panelfactor/estimators.hpp"
#include "panelfactor/panel.hpp"
#include "panelfactor/random.hpp"

namespace panelfactor {

/// Low-rank estimates of the conditional moments of (Y, X) and the implied
/// conditional covariance fields
///   sigma_yx = m_yx - m_y * m_x,  sigma_xx = m_xx - m_x * m_x  (entrywise).
struct SigmaFieldEstimate {
  RowMatrix sigma_yx;
  RowMatrix sigma_xx;
  RowMatrix m_y;
  RowMatrix m_x;
  RowMatrix m_yx;
  RowMatrix m_xx;
  long rank_used = 0;
};

SigmaFieldEstimate estimate_sigma_field(const PanelMatrix& Y, const PanelMatrix& X, long R);

/// 0.05 times the median of sigma_xx over all (i,t).
double default_floor(const SigmaFieldEstimate& field);

/// (1/nT) sum_it w_it sigma_yx / max(sigma_xx, floor_tau).
/// Weights must be non-negative with mean 1.
double beta_w_estimate(const PanelMatrix& Y, const PanelMatrix& X, long R,
                       const RowMatrix& weights, double floor_tau);

/// Same, with an already estimated field.
double beta_w_from_field(const SigmaFieldEstimate& field, const RowMatrix& weights,
                         double floor_tau);

struct CellSlopes {
  double beta_w = 0.0;
  int cells_used = 0;
  int cells_dropped = 0;
};

/// Weighted average of per-cell OLS slopes over the TWGFE partition. A cell's
/// weight is the sum of w_it over its members; cells with fewer than two
/// observations or no X variation are dropped and the rest renormalized.
CellSlopes twgfe_cell_slopes(const PanelMatrix& Y, const PanelMatrix& X, const TwgfeOptions& opts,
                             const RowMatrix& weights, Stream& stream);

double twgfe_beta_w(const PanelMatrix& Y, const PanelMatrix& X, const TwgfeOptions& opts,
                    const RowMatrix& weights, Stream& stream);

/// Mbar^{-1} (1/nT) sum_it V_it beta_it, where Mbar is the mean of the V_it.
Eigen::VectorXd beta_star_multi_oracle(const std::vector<Eigen::MatrixXd>& V,
                                       const std::vector<Eigen::VectorXd>& beta_it);

/// lambda_it = Mbar^{-1} V_it. Own weights average to 1, cross weights to 0.
struct ContaminationWeights {
  std::vector<Eigen::MatrixXd> lambda;  // one K x K matrix per observation
  Eigen::MatrixXd mean_matrix;          // Mbar
};

ContaminationWeights contamination_weights(const std::vector<Eigen::MatrixXd>& V);

}  // namespace panelfactor
