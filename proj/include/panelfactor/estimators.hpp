#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "panelfactor/panel.hpp"
#include "panelfactor/random.hpp"

namespace panelfactor {

struct EstimatorResult {
  Eigen::VectorXd beta;     // length K
  long rank_used = 0;
  long iterations = 0;      // 0 for closed-form estimators
  double final_objective = 0.0;
  double denominator = 0.0;  // sum of squared residualized X, or Gram determinant
  bool converged = true;
  // IFE only: objective after every iteration of the selected run.
  std::vector<double> objective_trace;
  // IFE only: the low-rank term G the final beta was fitted against.
  RowMatrix factor_part;

  double scalar() const { return beta(0); }
};

struct IfeOptions {
  double tolerance = 1e-8;
  long max_iterations = 1000;
  // Empty means the default pair: pooled OLS start and PC(X) start.
  std::vector<Eigen::VectorXd> initializations;
};

enum class FeatureRule { MeansOnly, MeansAndSecondMoments };

struct TwgfeOptions {
  long G = 1;
  long C = 1;
  int kmeans_restarts = 10;
  int kmeans_max_iter = 100;
  FeatureRule feature_rule = FeatureRule::MeansAndSecondMoments;
};

/// Pooled OLS of Y on already-residualized regressors, over all (i,t).
EstimatorResult pooled_ols(const PanelMatrix& Y, const std::vector<PanelMatrix>& Xperp);

/// Coefficient on x from OLS of y on (1, x, controls), via Frisch-Waugh-Lovell.
double partialled_ols(const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                      const std::vector<Eigen::VectorXd>& controls);

EstimatorResult within_estimator(const PanelMatrix& Y, const PanelMatrix& X);

EstimatorResult mean_group(const PanelMatrix& Y, const PanelMatrix& X,
                           double min_denominator = 1e-8);

EstimatorResult twfe(const PanelMatrix& Y, const PanelMatrix& X);

/// Pooled CCE with augmentation [1, cross-sectional mean of Y, of X].
EstimatorResult cce_pooled(const PanelMatrix& Y, const PanelMatrix& X);

EstimatorResult pc_x(const PanelMatrix& Y, const std::vector<PanelMatrix>& X, long R);

enum class PcYxMode {
  // Loadings and factors estimated once from the stacked panels [Y X] and
  // [Y; X]; both Y and X are projected off them on both sides.
  Joint,
  // Y and X each replaced by the residual of their own rank-R approximation.
  Independent,
};

/// PC estimator with the outcome residualized as well as the regressor.
EstimatorResult pc_yx(const PanelMatrix& Y, const PanelMatrix& X, long R,
                      PcYxMode mode = PcYxMode::Independent);

EstimatorResult ife_als(const PanelMatrix& Y, const std::vector<PanelMatrix>& X, long R,
                        const IfeOptions& opts = {});

EstimatorResult twgfe(const PanelMatrix& Y, const PanelMatrix& X, const TwgfeOptions& opts,
                      Stream& stream);

/// floor(3 n^{3/8}), clamped to min(n,T) - 1.
long rank_rule(long n, long T);

/// Two-way grouped demeaning: Z - Zbar(g_i, t) - Zbar(i, c_t) + Zbar(g_i, c_t).
/// All-zero labels reduce to ordinary two-way demeaning.
RowMatrix grouped_demean(const RowMatrix& Z, const std::vector<int>& unit_groups, int G,
                         const std::vector<int>& period_groups, int C);

struct TwoWayClusters {
  std::vector<int> unit_groups;    // size n, values in [0, G)
  std::vector<int> period_groups;  // size T, values in [0, C)
};

/// Steps 1-2 of the grouped estimator: k-means on unit and period features.
TwoWayClusters cluster_two_way(const PanelMatrix& Y, const PanelMatrix& X,
                               const TwgfeOptions& opts, Stream& stream);

}  // namespace panelfactor
