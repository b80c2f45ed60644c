#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "panelfactor/panel.hpp"

namespace tu {

using panelfactor::PanelMatrix;
using panelfactor::RowMatrix;

inline RowMatrix gaussian(Eigen::Index n, Eigen::Index T, std::mt19937_64& g) {
  std::normal_distribution<double> N(0.0, 1.0);
  RowMatrix A(n, T);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < T; ++t) A(i, t) = N(g);
  return A;
}

inline Eigen::VectorXd gaussian_vec(Eigen::Index n, std::mt19937_64& g) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = N(g);
  return v;
}

inline PanelMatrix panel(const RowMatrix& A) { return PanelMatrix(A); }

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace tu
