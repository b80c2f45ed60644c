#include "panelfactor/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "panelfactor/errors.hpp"
#include "panelfactor/kmeans.hpp"
#include "panelfactor/lowrank.hpp"

namespace panelfactor {

namespace {

constexpr double kMaxCondition = 1e12;
// Residual energy below this fraction of the raw regressor energy is treated as
// exactly zero (roundoff from removing an exact fit lands near 1e-30).
constexpr double kVanishingEnergy = 1e-20;

void require_same_shape(const PanelMatrix& Y, const PanelMatrix& X, const char* what) {
  if (!Y.same_shape(X)) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + " is " + std::to_string(X.n()) + "x" + std::to_string(X.T()) +
                    ", outcome is " + std::to_string(Y.n()) + "x" + std::to_string(Y.T()));
  }
}

double frob_dot(const RowMatrix& a, const RowMatrix& b) {
  return a.cwiseProduct(b).sum();
}

// Gram matrix of a set of regressors with the degeneracy guards shared by all
// pooled estimators.
class NormalEquations {
 public:
  NormalEquations(const std::vector<const RowMatrix*>& regressors,
                  const std::vector<double>& reference_energy)
      : regressors_(regressors) {
    const auto K = static_cast<Eigen::Index>(regressors.size());
    gram_.resize(K, K);
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index l = 0; l <= k; ++l) {
        gram_(k, l) = gram_(l, k) = frob_dot(*regressors[static_cast<std::size_t>(k)],
                                             *regressors[static_cast<std::size_t>(l)]);
      }
    }
    for (Eigen::Index k = 0; k < K; ++k) {
      const double ref = reference_energy[static_cast<std::size_t>(k)];
      if (!(gram_(k, k) > 0.0) || gram_(k, k) <= kVanishingEnergy * ref) {
        throw Error(ErrorKind::DegenerateDenominator,
                    "regressor " + std::to_string(k) + " has no residual variation");
      }
    }
    if (K == 1) {
      denominator_ = gram_(0, 0);
      return;
    }
    const Eigen::VectorXd inv_sd = gram_.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd corr = inv_sd.asDiagonal() * gram_ * inv_sd.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo >= kMaxCondition) {
      throw Error(ErrorKind::DegenerateDenominator,
                  "residualized Gram matrix is singular or ill-conditioned");
    }
    denominator_ = gram_.determinant();
    ldlt_.compute(gram_);
  }

  Eigen::VectorXd solve(const RowMatrix& outcome) const {
    const auto K = gram_.rows();
    Eigen::VectorXd rhs(K);
    for (Eigen::Index k = 0; k < K; ++k) rhs(k) = frob_dot(*regressors_[static_cast<std::size_t>(k)], outcome);
    if (K == 1) {
      Eigen::VectorXd b(1);
      b(0) = rhs(0) / gram_(0, 0);
      return b;
    }
    return ldlt_.solve(rhs);
  }

  RowMatrix fitted(const Eigen::VectorXd& beta) const {
    RowMatrix fit = RowMatrix::Zero(regressors_[0]->rows(), regressors_[0]->cols());
    for (std::size_t k = 0; k < regressors_.size(); ++k) fit += beta(static_cast<Eigen::Index>(k)) * *regressors_[k];
    return fit;
  }

  double denominator() const { return denominator_; }

 private:
  std::vector<const RowMatrix*> regressors_;
  Eigen::MatrixXd gram_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  double denominator_ = 0.0;
};

EstimatorResult pooled_fit(const RowMatrix& Y, const std::vector<const RowMatrix*>& Xres,
                           const std::vector<double>& reference_energy) {
  NormalEquations ne(Xres, reference_energy);
  EstimatorResult res;
  res.beta = ne.solve(Y);
  res.denominator = ne.denominator();
  res.final_objective = (Y - ne.fitted(res.beta)).squaredNorm();
  return res;
}

EstimatorResult pooled_fit_single(const RowMatrix& Y, const RowMatrix& Xres, double reference) {
  return pooled_fit(Y, {&Xres}, {reference});
}

RowMatrix unit_demean(const RowMatrix& Z) {
  return Z.colwise() - Z.rowwise().mean();
}

Eigen::MatrixXd standardize_columns(Eigen::MatrixXd F) {
  for (Eigen::Index j = 0; j < F.cols(); ++j) {
    const double mean = F.col(j).mean();
    F.col(j).array() -= mean;
    const double sd = std::sqrt(F.col(j).squaredNorm() / static_cast<double>(F.rows()));
    if (sd > 0.0) F.col(j) /= sd;
  }
  return F;
}

// Rows of `Z` summarized by their first (and optionally second) moments along
// the other axis; features for Y and X are stacked side by side.
Eigen::MatrixXd moment_features(const RowMatrix& Y, const RowMatrix& X, FeatureRule rule) {
  const Eigen::Index m = Y.rows();
  const Eigen::Index cols = rule == FeatureRule::MeansOnly ? 2 : 5;
  Eigen::MatrixXd F(m, cols);
  F.col(0) = Y.rowwise().mean();
  F.col(1) = X.rowwise().mean();
  if (rule == FeatureRule::MeansAndSecondMoments) {
    F.col(2) = Y.array().square().rowwise().mean();
    F.col(3) = X.array().square().rowwise().mean();
    F.col(4) = (Y.array() * X.array()).rowwise().mean();
  }
  return standardize_columns(std::move(F));
}

}  // namespace

EstimatorResult pooled_ols(const PanelMatrix& Y, const std::vector<PanelMatrix>& Xperp) {
  if (Xperp.empty()) throw Error(ErrorKind::DimensionMismatch, "no regressors");
  std::vector<const RowMatrix*> regs;
  std::vector<double> ref;
  for (const auto& X : Xperp) {
    require_same_shape(Y, X, "regressor");
    regs.push_back(&X.values());
    ref.push_back(X.values().squaredNorm());
  }
  return pooled_fit(Y.values(), regs, ref);
}

double partialled_ols(const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                      const std::vector<Eigen::VectorXd>& controls) {
  const Eigen::Index n = y.size();
  if (x.size() != n) throw Error(ErrorKind::DimensionMismatch, "x and y lengths differ");
  Eigen::MatrixXd D(n, static_cast<Eigen::Index>(controls.size()) + 1);
  D.col(0).setOnes();
  for (std::size_t j = 0; j < controls.size(); ++j) {
    if (controls[j].size() != n) throw Error(ErrorKind::DimensionMismatch, "control length differs");
    D.col(static_cast<Eigen::Index>(j) + 1) = controls[j];
  }
  // Full design [1, C, x] with unit-norm columns for a scale-free condition check.
  Eigen::MatrixXd full(n, D.cols() + 1);
  full << D, x;
  for (Eigen::Index j = 0; j < full.cols(); ++j) {
    const double norm = full.col(j).norm();
    if (norm == 0.0) throw Error(ErrorKind::CollinearControls, "design has a zero column");
    full.col(j) /= norm;
  }
  if (n < full.cols()) throw Error(ErrorKind::CollinearControls, "more columns than observations");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(full);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || (s(0) / smin) * (s(0) / smin) >= kMaxCondition) {
    throw Error(ErrorKind::CollinearControls, "design [1, x, controls] is rank-deficient");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(D);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, D.cols());
  const Eigen::VectorXd x_res = x - Q * (Q.transpose() * x);
  const Eigen::VectorXd y_res = y - Q * (Q.transpose() * y);
  return x_res.dot(y_res) / x_res.squaredNorm();
}

EstimatorResult within_estimator(const PanelMatrix& Y, const PanelMatrix& X) {
  require_estimable(Y);
  require_same_shape(Y, X, "regressor");
  const RowMatrix Xw = unit_demean(X.values());
  return pooled_fit_single(Y.values(), Xw, X.values().squaredNorm());
}

EstimatorResult mean_group(const PanelMatrix& Y, const PanelMatrix& X, double min_denominator) {
  require_estimable(Y);
  require_same_shape(Y, X, "regressor");
  const RowMatrix Xw = unit_demean(X.values());
  const RowMatrix Yw = unit_demean(Y.values());
  const Eigen::Index n = Xw.rows();
  double sum = 0.0;
  double total_denominator = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double den = Xw.row(i).squaredNorm();
    if (!(den >= min_denominator)) {
      throw Error(ErrorKind::UnitDegenerate,
                  "unit " + std::to_string(i) + " has within variation " + std::to_string(den) +
                      " below the floor",
                  static_cast<std::size_t>(i));
    }
    sum += Xw.row(i).dot(Yw.row(i)) / den;
    total_denominator += den;
  }
  EstimatorResult res;
  res.beta = Eigen::VectorXd::Constant(1, sum / static_cast<double>(n));
  res.denominator = total_denominator;
  return res;
}

RowMatrix grouped_demean(const RowMatrix& Z, const std::vector<int>& unit_groups, int G,
                         const std::vector<int>& period_groups, int C) {
  const Eigen::Index n = Z.rows();
  const Eigen::Index T = Z.cols();
  if (unit_groups.size() != static_cast<std::size_t>(n) ||
      period_groups.size() != static_cast<std::size_t>(T)) {
    throw Error(ErrorKind::DimensionMismatch, "cluster labels do not match panel shape");
  }
  Eigen::MatrixXd group_time = Eigen::MatrixXd::Zero(G, T);
  Eigen::MatrixXd unit_cluster = Eigen::MatrixXd::Zero(n, C);
  Eigen::MatrixXd cell = Eigen::MatrixXd::Zero(G, C);
  Eigen::VectorXd group_size = Eigen::VectorXd::Zero(G);
  Eigen::VectorXd cluster_size = Eigen::VectorXd::Zero(C);
  for (Eigen::Index i = 0; i < n; ++i) group_size(unit_groups[static_cast<std::size_t>(i)]) += 1.0;
  for (Eigen::Index t = 0; t < T; ++t) cluster_size(period_groups[static_cast<std::size_t>(t)]) += 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int g = unit_groups[static_cast<std::size_t>(i)];
    for (Eigen::Index t = 0; t < T; ++t) {
      const int c = period_groups[static_cast<std::size_t>(t)];
      group_time(g, t) += Z(i, t);
      unit_cluster(i, c) += Z(i, t);
      cell(g, c) += Z(i, t);
    }
  }
  for (int g = 0; g < G; ++g) {
    if (group_size(g) > 0) group_time.row(g) /= group_size(g);
    for (int c = 0; c < C; ++c) {
      if (group_size(g) > 0 && cluster_size(c) > 0) cell(g, c) /= group_size(g) * cluster_size(c);
    }
  }
  for (int c = 0; c < C; ++c) {
    if (cluster_size(c) > 0) unit_cluster.col(c) /= cluster_size(c);
  }
  RowMatrix out(n, T);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int g = unit_groups[static_cast<std::size_t>(i)];
    for (Eigen::Index t = 0; t < T; ++t) {
      const int c = period_groups[static_cast<std::size_t>(t)];
      out(i, t) = Z(i, t) - group_time(g, t) - unit_cluster(i, c) + cell(g, c);
    }
  }
  return out;
}

EstimatorResult twfe(const PanelMatrix& Y, const PanelMatrix& X) {
  require_estimable(Y);
  require_same_shape(Y, X, "regressor");
  const std::vector<int> units(Y.n(), 0);
  const std::vector<int> periods(Y.T(), 0);
  const RowMatrix Xd = grouped_demean(X.values(), units, 1, periods, 1);
  return pooled_fit_single(Y.values(), Xd, X.values().squaredNorm());
}

EstimatorResult cce_pooled(const PanelMatrix& Y, const PanelMatrix& X) {
  require_estimable(Y);
  require_same_shape(Y, X, "regressor");
  const Eigen::Index T = static_cast<Eigen::Index>(Y.T());
  Eigen::MatrixXd H(T, 3);
  H.col(0).setOnes();
  H.col(1) = Y.values().colwise().mean().transpose();
  H.col(2) = X.values().colwise().mean().transpose();
  Eigen::MatrixXd Hn = H;
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double norm = Hn.col(j).norm();
    if (norm == 0.0) throw Error(ErrorKind::RankDeficientAugmentation, "augmentation has a zero column");
    Hn.col(j) /= norm;
  }
  if (T < 3) throw Error(ErrorKind::RankDeficientAugmentation, "T < 3");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Hn);
  const auto& s = svd.singularValues();
  if (!(s(2) > 0.0) || (s(0) / s(2)) * (s(0) / s(2)) >= kMaxCondition) {
    throw Error(ErrorKind::RankDeficientAugmentation,
                "[1, mean Y, mean X] does not have full column rank");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(H);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(T, 3);
  const RowMatrix& Xv = X.values();
  const RowMatrix Xp = Xv - (Xv * Q) * Q.transpose();
  return pooled_fit_single(Y.values(), Xp, Xv.squaredNorm());
}

EstimatorResult pc_x(const PanelMatrix& Y, const std::vector<PanelMatrix>& X, long R) {
  require_estimable(Y);
  if (X.empty()) throw Error(ErrorKind::DimensionMismatch, "no regressors");
  linalg::check_rank(static_cast<Eigen::Index>(Y.n()), static_cast<Eigen::Index>(Y.T()), R);
  std::vector<RowMatrix> residuals;
  residuals.reserve(X.size());
  std::vector<double> ref;
  for (const auto& Xk : X) {
    require_same_shape(Y, Xk, "regressor");
    residuals.push_back(linalg::low_rank_residual(Xk.values(), R));
    ref.push_back(Xk.values().squaredNorm());
  }
  std::vector<const RowMatrix*> regs;
  for (const auto& r : residuals) regs.push_back(&r);
  EstimatorResult res = pooled_fit(Y.values(), regs, ref);
  res.rank_used = R;
  return res;
}

EstimatorResult pc_yx(const PanelMatrix& Y, const PanelMatrix& X, long R, PcYxMode mode) {
  require_estimable(Y);
  require_same_shape(Y, X, "regressor");
  const RowMatrix& Yv = Y.values();
  const RowMatrix& Xv = X.values();
  linalg::check_rank(Yv.rows(), Yv.cols(), R);
  RowMatrix Yr;
  RowMatrix Xr;
  if (mode == PcYxMode::Independent) {
    Xr = linalg::low_rank_residual(Xv, R);
    Yr = linalg::low_rank_residual(Yv, R);
  } else {
    const Eigen::Index m = std::min(Yv.rows(), Yv.cols());
    if (R == 0) {
      Yr = Yv;
      Xr = Xv;
    } else if (R == m) {
      Yr = Xr = RowMatrix::Zero(Yv.rows(), Yv.cols());
    } else {
      Eigen::MatrixXd left_gram = Eigen::MatrixXd::Zero(Yv.rows(), Yv.rows());
      left_gram.selfadjointView<Eigen::Lower>().rankUpdate(Yv).rankUpdate(Xv);
      Eigen::MatrixXd right_gram = Eigen::MatrixXd::Zero(Yv.cols(), Yv.cols());
      right_gram.selfadjointView<Eigen::Lower>().rankUpdate(Yv.transpose()).rankUpdate(Xv.transpose());
      const Eigen::MatrixXd U = linalg::top_eigenvectors(left_gram, R);
      const Eigen::MatrixXd V = linalg::top_eigenvectors(right_gram, R);
      auto two_sided = [&](const RowMatrix& Z) {
        RowMatrix A = Z - U * (U.transpose() * Z);
        RowMatrix B = A - (A * V) * V.transpose();
        return B;
      };
      Yr = two_sided(Yv);
      Xr = two_sided(Xv);
    }
  }
  EstimatorResult res = pooled_fit_single(Yr, Xr, Xv.squaredNorm());
  res.rank_used = R;
  return res;
}

namespace {

// Alternating least squares for min ||Y - sum_k X_k beta_k - G||_F^2 over
// rank(G) <= R. The Gram matrix of Y - X beta is assembled from cross Gram
// matrices computed once, so an iteration costs one small eigendecomposition.
class IfeSolver {
 public:
  IfeSolver(const PanelMatrix& Y, const std::vector<PanelMatrix>& X, long R)
      : Y_(Y.values()), R_(R), rows_small_(Y.n() <= Y.T()) {
    for (const auto& Xk : X) {
      X_.push_back(&Xk.values());
      ref_.push_back(Xk.values().squaredNorm());
    }
    normal_.emplace(X_, ref_);
    std::vector<const RowMatrix*> all{&Y_};
    all.insert(all.end(), X_.begin(), X_.end());
    const std::size_t P = all.size();
    cross_.resize(P * P);
    for (std::size_t a = 0; a < P; ++a) {
      for (std::size_t b = a; b < P; ++b) {
        Eigen::MatrixXd C = rows_small_ ? Eigen::MatrixXd(*all[a] * all[b]->transpose())
                                        : Eigen::MatrixXd(all[a]->transpose() * *all[b]);
        if (a != b) C += C.transpose().eval();
        cross_[a * P + b] = std::move(C);
      }
    }
    y_norm_sq_ = Y_.squaredNorm();
  }

  struct Run {
    Eigen::VectorXd beta;
    double objective = 0.0;
    long iterations = 0;
    bool converged = false;
    std::vector<double> trace;
    RowMatrix G;
  };

  Run run(Eigen::VectorXd beta, const IfeOptions& opts) const {
    Run out;
    RowMatrix G = factor_part(beta);
    double previous = residual(beta, G).squaredNorm();
    for (long it = 1; it <= opts.max_iterations; ++it) {
      beta = normal_->solve(Y_ - G);
      const double objective = residual(beta, G).squaredNorm();
      out.trace.push_back(objective);
      out.iterations = it;
      if (previous - objective <= opts.tolerance * previous ||
          objective <= 1e-28 * y_norm_sq_) {
        out.converged = true;
        break;
      }
      previous = objective;
      if (it < opts.max_iterations) G = factor_part(beta);
    }
    out.beta = std::move(beta);
    out.objective = out.trace.empty() ? previous : out.trace.back();
    out.G = std::move(G);
    return out;
  }

  double denominator() const { return normal_->denominator(); }

 private:
  RowMatrix residual(const Eigen::VectorXd& beta, const RowMatrix& G) const {
    RowMatrix E = Y_ - G;
    for (std::size_t k = 0; k < X_.size(); ++k) E -= beta(static_cast<Eigen::Index>(k)) * *X_[k];
    return E;
  }

  RowMatrix factor_part(const Eigen::VectorXd& beta) const {
    RowMatrix E = Y_;
    for (std::size_t k = 0; k < X_.size(); ++k) E -= beta(static_cast<Eigen::Index>(k)) * *X_[k];
    const Eigen::Index m = std::min(E.rows(), E.cols());
    if (R_ == 0) return RowMatrix::Zero(E.rows(), E.cols());
    if (R_ == m) return E;
    const std::size_t P = X_.size() + 1;
    Eigen::VectorXd coef(static_cast<Eigen::Index>(P));
    coef(0) = 1.0;
    coef.tail(static_cast<Eigen::Index>(P - 1)) = -beta;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t a = 0; a < P; ++a) {
      for (std::size_t b = a; b < P; ++b) {
        gram += coef(static_cast<Eigen::Index>(a)) * coef(static_cast<Eigen::Index>(b)) * cross_[a * P + b];
      }
    }
    return linalg::project_onto(E, linalg::top_eigenvectors(gram, R_));
  }

  const RowMatrix& Y_;
  std::vector<const RowMatrix*> X_;
  std::vector<double> ref_;
  long R_;
  bool rows_small_;
  std::optional<NormalEquations> normal_;
  std::vector<Eigen::MatrixXd> cross_;
  double y_norm_sq_ = 0.0;
};

}  // namespace

EstimatorResult ife_als(const PanelMatrix& Y, const std::vector<PanelMatrix>& X, long R,
                        const IfeOptions& opts) {
  require_estimable(Y);
  if (X.empty()) throw Error(ErrorKind::DimensionMismatch, "no regressors");
  for (const auto& Xk : X) require_same_shape(Y, Xk, "regressor");
  linalg::check_rank(static_cast<Eigen::Index>(Y.n()), static_cast<Eigen::Index>(Y.T()), R);
  if (!(opts.tolerance > 0.0) || opts.max_iterations < 1) {
    throw Error(ErrorKind::InvalidArgument, "IFE needs tolerance > 0 and max_iterations >= 1");
  }
  const auto K = static_cast<Eigen::Index>(X.size());
  IfeSolver solver(Y, X, R);

  std::vector<Eigen::VectorXd> starts = opts.initializations;
  if (starts.empty()) {
    starts.push_back(pooled_ols(Y, X).beta);
    if (R > 0) {
      try {
        starts.push_back(pc_x(Y, X, R).beta);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateDenominator) throw;
      }
    }
  }
  std::optional<IfeSolver::Run> best;
  for (const auto& start : starts) {
    if (start.size() != K) {
      throw Error(ErrorKind::InvalidArgument, "initialization length differs from regressor count");
    }
    auto run = solver.run(start, opts);
    if (!best || run.objective < best->objective) best = std::move(run);
  }
  EstimatorResult res;
  res.beta = std::move(best->beta);
  res.rank_used = R;
  res.iterations = best->iterations;
  res.final_objective = best->objective;
  res.converged = best->converged;
  res.objective_trace = std::move(best->trace);
  res.factor_part = std::move(best->G);
  res.denominator = solver.denominator();
  return res;
}

TwoWayClusters cluster_two_way(const PanelMatrix& Y, const PanelMatrix& X,
                               const TwgfeOptions& opts, Stream& stream) {
  require_same_shape(Y, X, "regressor");
  if (opts.G < 1 || opts.G > static_cast<long>(Y.n()) || opts.C < 1 ||
      opts.C > static_cast<long>(Y.T())) {
    throw Error(ErrorKind::InvalidArgument, "TWGFE needs 1 <= G <= n and 1 <= C <= T");
  }
  const RowMatrix& Yv = Y.values();
  const RowMatrix& Xv = X.values();
  const Eigen::MatrixXd unit_features = moment_features(Yv, Xv, opts.feature_rule);
  const RowMatrix Yt = Yv.transpose();
  const RowMatrix Xt = Xv.transpose();
  const Eigen::MatrixXd period_features = moment_features(Yt, Xt, opts.feature_rule);
  TwoWayClusters out;
  out.unit_groups = kmeans(unit_features, static_cast<int>(opts.G), opts.kmeans_restarts,
                           opts.kmeans_max_iter, stream).labels;
  out.period_groups = kmeans(period_features, static_cast<int>(opts.C), opts.kmeans_restarts,
                             opts.kmeans_max_iter, stream).labels;
  return out;
}

EstimatorResult twgfe(const PanelMatrix& Y, const PanelMatrix& X, const TwgfeOptions& opts,
                      Stream& stream) {
  require_estimable(Y);
  const TwoWayClusters cl = cluster_two_way(Y, X, opts, stream);
  const int G = static_cast<int>(opts.G);
  const int C = static_cast<int>(opts.C);
  // Y need not be transformed: the demeaning is an orthogonal projection.
  const RowMatrix Xd = grouped_demean(X.values(), cl.unit_groups, G, cl.period_groups, C);
  return pooled_fit_single(Y.values(), Xd, X.values().squaredNorm());
}

long rank_rule(long n, long T) {
  if (n < 1 || T < 1) throw Error(ErrorKind::InvalidArgument, "rank_rule needs n, T >= 1");
  const long raw = static_cast<long>(std::floor(3.0 * std::pow(static_cast<double>(n), 3.0 / 8.0)));
  return std::max(0L, std::min(raw, std::min(n, T) - 1));
}

}  // namespace panelfactor
