#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "panelfactor/panel.hpp"

namespace panelfactor {

/// Leading singular triplets of an n x T matrix.
///
/// Columns of `left` (n x R) and `right` (T x R) are orthonormal and
/// `singular_values` is non-increasing. Each left vector is signed so that its
/// first nonzero entry is non-negative. When sigma_R == sigma_{R+1} the factors
/// are not unique (the triplets kept are those first returned by the
/// decomposition) but the reconstruction residual norm is.
struct LowRankFactors {
  Eigen::Index rank = 0;
  Eigen::MatrixXd left;
  Eigen::MatrixXd right;
  Eigen::VectorXd singular_values;

  RowMatrix reconstruct() const;
};

LowRankFactors truncated_svd(const PanelMatrix& A, long R);

/// Best rank-R approximation in Frobenius norm. R = 0 gives the zero matrix.
PanelMatrix rank_r_approx(const PanelMatrix& A, long R);

struct SpectralDiagnostics {
  double spectral_norm = 0.0;
  double frobenius_sq = 0.0;
  // tail_energy[R] = sum_{r>R} sigma_r^2 / sum_r sigma_r^2 for R = 0..min(n,T).
  std::vector<double> tail_energy;

  double tail(std::size_t R) const { return tail_energy.at(R); }
};

SpectralDiagnostics spectral_diagnostics(const PanelMatrix& A);

/// Kernel routines on raw Eigen matrices, shared by the estimators' inner loops.
namespace linalg {

// Throws RankOutOfRange unless 0 <= R <= min(rows, cols).
void check_rank(Eigen::Index rows, Eigen::Index cols, long R);

// Eigenvectors of the R largest eigenvalues of a symmetric matrix (only the
// lower triangle is read), ordered by decreasing eigenvalue.
Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& gram, Eigen::Index R);

// Orthogonal projection of A onto its leading R-dimensional singular subspace,
// computed through the smaller Gram matrix.
RowMatrix low_rank_part(const RowMatrix& A, Eigen::Index R);

// A minus its rank-R part.
RowMatrix low_rank_residual(const RowMatrix& A, Eigen::Index R);

// Lower triangle of A A' when rows <= cols, otherwise of A'A.
Eigen::MatrixXd small_gram(const RowMatrix& A);

// Projection of A given the leading eigenvectors of its small Gram matrix.
RowMatrix project_onto(const RowMatrix& A, const Eigen::MatrixXd& basis);

double spectral_norm_power(const RowMatrix& A, double tol = 1e-10, int max_iter = 10000);

}  // namespace linalg

}  // namespace panelfactor
