#include "panelfactor/targeted.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "panelfactor/errors.hpp"
#include "panelfactor/lowrank.hpp"

namespace panelfactor {

namespace {

void validate_weights(const RowMatrix& w, Eigen::Index n, Eigen::Index T) {
  if (w.rows() != n || w.cols() != T) {
    throw Error(ErrorKind::DimensionMismatch, "weights must be n x T");
  }
  if (!w.allFinite()) throw Error(ErrorKind::NonFiniteEntry, "weights contain non-finite values");
  if (w.minCoeff() < 0.0) throw Error(ErrorKind::NegativeWeights, "weights must be non-negative");
  const double mean = w.mean();
  if (std::abs(mean - 1.0) > 1e-8) {
    throw Error(ErrorKind::InvalidArgument,
                "weights must have mean 1 (got " + std::to_string(mean) + ")");
  }
}

Eigen::MatrixXd mean_matrix_checked(const std::vector<Eigen::MatrixXd>& V) {
  if (V.empty()) throw Error(ErrorKind::InvalidArgument, "empty V field");
  const Eigen::Index K = V.front().rows();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(K, K);
  for (const auto& v : V) {
    if (v.rows() != K || v.cols() != K) throw Error(ErrorKind::DimensionMismatch, "V_it must all be K x K");
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw Error(ErrorKind::InvalidArgument, "V_it must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
      throw Error(ErrorKind::InvalidArgument, "V_it must be positive semidefinite");
    }
    mean += v;
  }
  mean /= static_cast<double>(V.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mean, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo >= 1e12) {
    throw Error(ErrorKind::SingularMeanMatrix, "mean of V_it is not positive definite");
  }
  return mean;
}

}  // namespace

SigmaFieldEstimate estimate_sigma_field(const PanelMatrix& Y, const PanelMatrix& X, long R) {
  if (!Y.same_shape(X)) throw Error(ErrorKind::DimensionMismatch, "Y and X shapes differ");
  const RowMatrix& y = Y.values();
  const RowMatrix& x = X.values();
  linalg::check_rank(y.rows(), y.cols(), R);
  SigmaFieldEstimate f;
  f.rank_used = R;
  f.m_y = linalg::low_rank_part(y, R);
  f.m_x = linalg::low_rank_part(x, R);
  f.m_yx = linalg::low_rank_part(y.cwiseProduct(x), R);
  f.m_xx = linalg::low_rank_part(x.cwiseProduct(x), R);
  f.sigma_yx = f.m_yx - f.m_y.cwiseProduct(f.m_x);
  f.sigma_xx = f.m_xx - f.m_x.cwiseProduct(f.m_x);
  return f;
}

double default_floor(const SigmaFieldEstimate& field) {
  std::vector<double> v(field.sigma_xx.data(), field.sigma_xx.data() + field.sigma_xx.size());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double median = *mid;
  if (v.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(v.begin(), mid));
  }
  return 0.05 * median;
}

double beta_w_from_field(const SigmaFieldEstimate& field, const RowMatrix& weights,
                         double floor_tau) {
  validate_weights(weights, field.sigma_xx.rows(), field.sigma_xx.cols());
  if (!(floor_tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "floor_tau must be > 0");
  const auto ratio = field.sigma_yx.array() / field.sigma_xx.array().max(floor_tau);
  return (weights.array() * ratio).mean();
}

double beta_w_estimate(const PanelMatrix& Y, const PanelMatrix& X, long R,
                       const RowMatrix& weights, double floor_tau) {
  validate_weights(weights, static_cast<Eigen::Index>(Y.n()), static_cast<Eigen::Index>(Y.T()));
  return beta_w_from_field(estimate_sigma_field(Y, X, R), weights, floor_tau);
}

CellSlopes twgfe_cell_slopes(const PanelMatrix& Y, const PanelMatrix& X, const TwgfeOptions& opts,
                             const RowMatrix& weights, Stream& stream) {
  validate_weights(weights, static_cast<Eigen::Index>(Y.n()), static_cast<Eigen::Index>(Y.T()));
  const TwoWayClusters cl = cluster_two_way(Y, X, opts, stream);
  const int G = static_cast<int>(opts.G);
  const int C = static_cast<int>(opts.C);
  const std::size_t cells = static_cast<std::size_t>(G) * static_cast<std::size_t>(C);
  // Per cell: count, sum w, sum x, sum y, sum xx, sum xy.
  std::vector<std::array<double, 6>> acc(cells, {0, 0, 0, 0, 0, 0});
  for (std::size_t i = 0; i < Y.n(); ++i) {
    for (std::size_t t = 0; t < Y.T(); ++t) {
      auto& a = acc[static_cast<std::size_t>(cl.unit_groups[i]) * static_cast<std::size_t>(C) +
                    static_cast<std::size_t>(cl.period_groups[t])];
      const double x = X(i, t);
      const double y = Y(i, t);
      a[0] += 1.0;
      a[1] += weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
      a[2] += x;
      a[3] += y;
      a[4] += x * x;
      a[5] += x * y;
    }
  }
  CellSlopes out;
  double mass = 0.0;
  double weighted = 0.0;
  for (const auto& a : acc) {
    if (a[0] < 2.0) {
      ++out.cells_dropped;
      continue;
    }
    const double sxx = a[4] - a[2] * a[2] / a[0];
    const double sxy = a[5] - a[2] * a[3] / a[0];
    if (!(sxx > 1e-12 * std::max(a[4], 1e-300))) {
      ++out.cells_dropped;
      continue;
    }
    ++out.cells_used;
    mass += a[1];
    weighted += a[1] * sxy / sxx;
  }
  if (out.cells_used == 0 || !(mass > 0.0)) {
    throw Error(ErrorKind::AllCellsDegenerate, "no cell has usable within-cell X variation");
  }
  out.beta_w = weighted / mass;
  return out;
}

double twgfe_beta_w(const PanelMatrix& Y, const PanelMatrix& X, const TwgfeOptions& opts,
                    const RowMatrix& weights, Stream& stream) {
  return twgfe_cell_slopes(Y, X, opts, weights, stream).beta_w;
}

Eigen::VectorXd beta_star_multi_oracle(const std::vector<Eigen::MatrixXd>& V,
                                       const std::vector<Eigen::VectorXd>& beta_it) {
  if (V.size() != beta_it.size()) {
    throw Error(ErrorKind::DimensionMismatch, "V and beta fields differ in length");
  }
  const Eigen::MatrixXd mean = mean_matrix_checked(V);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(mean.rows());
  for (std::size_t j = 0; j < V.size(); ++j) {
    if (beta_it[j].size() != mean.rows()) throw Error(ErrorKind::DimensionMismatch, "beta_it must be length K");
    moment += V[j] * beta_it[j];
  }
  moment /= static_cast<double>(V.size());
  return mean.ldlt().solve(moment);
}

ContaminationWeights contamination_weights(const std::vector<Eigen::MatrixXd>& V) {
  ContaminationWeights out;
  out.mean_matrix = mean_matrix_checked(V);
  const Eigen::MatrixXd inv = out.mean_matrix.inverse();
  out.lambda.reserve(V.size());
  for (const auto& v : V) out.lambda.push_back(inv * v);
  return out;
}

}  // namespace panelfactor
