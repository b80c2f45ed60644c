#include "panelfactor/lowrank.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "panelfactor/errors.hpp"

namespace panelfactor {

namespace {

constexpr Eigen::Index kDenseEigenLimit = 128;
constexpr Eigen::Index kFullSpectrumLimit = 512;

void fix_signs(Eigen::MatrixXd& left, Eigen::MatrixXd& right) {
  for (Eigen::Index r = 0; r < left.cols(); ++r) {
    for (Eigen::Index i = 0; i < left.rows(); ++i) {
      if (left(i, r) != 0.0) {
        if (left(i, r) < 0.0) {
          left.col(r) *= -1.0;
          right.col(r) *= -1.0;
        }
        break;
      }
    }
  }
}

}  // namespace

namespace linalg {

void check_rank(Eigen::Index rows, Eigen::Index cols, long R) {
  const long max_rank = static_cast<long>(std::min(rows, cols));
  if (R < 0 || R > max_rank) {
    throw Error(ErrorKind::RankOutOfRange,
                "rank " + std::to_string(R) + " outside [0, " + std::to_string(max_rank) + "]");
  }
}

Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& gram, Eigen::Index R) {
  const Eigen::Index m = gram.rows();
  if (R == 0) return Eigen::MatrixXd(m, 0);
  if (m <= kDenseEigenLimit || R == m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::ComputeEigenvectors);
    return solver.eigenvectors().rightCols(R).rowwise().reverse();
  }
  Eigen::MatrixXd work = gram;
  Eigen::VectorXd w(m);
  Eigen::MatrixXd Z(m, R);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(R));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(m), work.data(),
      static_cast<lapack_int>(m), 0.0, 0.0, static_cast<lapack_int>(m - R + 1),
      static_cast<lapack_int>(m), 0.0, &found, w.data(), Z.data(), static_cast<lapack_int>(m),
      support.data());
  if (info != 0 || found != R) {
    // Fall back to the dense solver; dsyevr failures are rare but possible.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::ComputeEigenvectors);
    return solver.eigenvectors().rightCols(R).rowwise().reverse();
  }
  return Z.rowwise().reverse();
}

Eigen::MatrixXd small_gram(const RowMatrix& A) {
  if (A.rows() <= A.cols()) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(A.rows(), A.rows());
    G.selfadjointView<Eigen::Lower>().rankUpdate(A);
    return G;
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(A.cols(), A.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
  return G;
}

RowMatrix project_onto(const RowMatrix& A, const Eigen::MatrixXd& basis) {
  if (A.rows() <= A.cols()) {
    Eigen::MatrixXd coef = basis.transpose() * A;
    return basis * coef;
  }
  Eigen::MatrixXd scores = A * basis;
  return scores * basis.transpose();
}

RowMatrix low_rank_part(const RowMatrix& A, Eigen::Index R) {
  check_rank(A.rows(), A.cols(), R);
  if (R == 0) return RowMatrix::Zero(A.rows(), A.cols());
  if (R == std::min(A.rows(), A.cols())) return A;
  return project_onto(A, top_eigenvectors(small_gram(A), R));
}

RowMatrix low_rank_residual(const RowMatrix& A, Eigen::Index R) {
  check_rank(A.rows(), A.cols(), R);
  if (R == 0) return A;
  if (R == std::min(A.rows(), A.cols())) return RowMatrix::Zero(A.rows(), A.cols());
  return A - low_rank_part(A, R);
}

double spectral_norm_power(const RowMatrix& A, double tol, int max_iter) {
  const Eigen::Index T = A.cols();
  Eigen::VectorXd v(T);
  for (Eigen::Index t = 0; t < T; ++t) v(t) = 1.0 + 1e-3 * static_cast<double>(t % 7);
  v.normalize();
  double sigma_sq = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = A.transpose() * (A * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - sigma_sq) <= tol * next) {
      sigma_sq = next;
      break;
    }
    sigma_sq = next;
  }
  return std::sqrt(sigma_sq);
}

}  // namespace linalg

RowMatrix LowRankFactors::reconstruct() const {
  RowMatrix out = left * singular_values.asDiagonal() * right.transpose();
  return out;
}

LowRankFactors truncated_svd(const PanelMatrix& A, long R) {
  const RowMatrix& M = A.values();
  linalg::check_rank(M.rows(), M.cols(), R);
  LowRankFactors f;
  f.rank = R;
  if (R == 0) {
    f.left = Eigen::MatrixXd(M.rows(), 0);
    f.right = Eigen::MatrixXd(M.cols(), 0);
    f.singular_values = Eigen::VectorXd(0);
    return f;
  }
  Eigen::MatrixXd dense = M;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  f.left = svd.matrixU().leftCols(R);
  f.right = svd.matrixV().leftCols(R);
  f.singular_values = svd.singularValues().head(R);
  fix_signs(f.left, f.right);
  return f;
}

PanelMatrix rank_r_approx(const PanelMatrix& A, long R) {
  linalg::check_rank(A.values().rows(), A.values().cols(), R);
  return PanelMatrix(linalg::low_rank_part(A.values(), R));
}

SpectralDiagnostics spectral_diagnostics(const PanelMatrix& A) {
  const RowMatrix& M = A.values();
  const Eigen::Index m = std::min(M.rows(), M.cols());
  Eigen::VectorXd sq(m);
  SpectralDiagnostics d;
  if (m <= kFullSpectrumLimit) {
    Eigen::MatrixXd dense = M;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
    sq = svd.singularValues().array().square();
    d.spectral_norm = m > 0 ? svd.singularValues()(0) : 0.0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(linalg::small_gram(M),
                                                          Eigen::EigenvaluesOnly);
    sq = solver.eigenvalues().reverse().cwiseMax(0.0);
    d.spectral_norm = linalg::spectral_norm_power(M);
  }
  d.frobenius_sq = M.squaredNorm();
  d.tail_energy.assign(static_cast<std::size_t>(m) + 1, 0.0);
  const double total = sq.sum();
  if (total > 0.0) {
    // Suffix sums so the sequence is exactly non-increasing and ends at 0.
    double suffix = 0.0;
    for (Eigen::Index r = m; r-- > 0;) {
      suffix += sq(r);
      d.tail_energy[static_cast<std::size_t>(r)] = suffix / total;
    }
    d.tail_energy[0] = 1.0;
  }
  return d;
}

}  // namespace panelfactor
