#include "panelfactor/kmeans.hpp"

#include <limits>
#include <optional>
#include <string>

#include "panelfactor/errors.hpp"

namespace panelfactor {

namespace {

std::optional<Eigen::MatrixXd> seed_plus_plus(const Eigen::MatrixXd& points, int k,
                                              Stream& stream) {
  const Eigen::Index m = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  centers.row(0) = points.row(pick(stream));
  Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    if (!(total > 0.0)) return std::nullopt;  // fewer distinct points than clusters
    const double target = unif(stream) * total;
    double acc = 0.0;
    Eigen::Index chosen = m - 1;
    for (Eigen::Index i = 0; i < m; ++i) {
      acc += d2(i);
      if (acc > target && d2(i) > 0.0) {
        chosen = i;
        break;
      }
    }
    while (d2(chosen) == 0.0 && chosen > 0) --chosen;
    centers.row(c) = points.row(chosen);
    d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

std::optional<KMeansResult> lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers,
                                  int max_iter) {
  const Eigen::Index m = points.rows();
  const int k = static_cast<int>(centers.rows());
  std::vector<int> labels(static_cast<std::size_t>(m), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) return std::nullopt;
      centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
    }
    if (!changed) break;
  }
  KMeansResult res;
  res.labels = std::move(labels);
  res.centroids = std::move(centers);
  for (Eigen::Index i = 0; i < m; ++i) {
    res.sse += (points.row(i) - res.centroids.row(res.labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return res;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, int max_iter,
                    Stream& stream) {
  const Eigen::Index m = points.rows();
  if (k < 1 || k > m) {
    throw Error(ErrorKind::InvalidArgument,
                "cluster count " + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");
  }
  if (restarts < 1 || max_iter < 1) {
    throw Error(ErrorKind::InvalidArgument, "k-means needs restarts >= 1 and max_iter >= 1");
  }
  if (k == 1) {
    KMeansResult res;
    res.labels.assign(static_cast<std::size_t>(m), 0);
    res.centroids = points.colwise().mean();
    res.sse = (points.rowwise() - res.centroids.row(0)).squaredNorm();
    return res;
  }
  if (k == m) {
    KMeansResult res;
    res.labels.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) res.labels[static_cast<std::size_t>(i)] = static_cast<int>(i);
    res.centroids = points;
    return res;
  }
  std::optional<KMeansResult> best;
  for (int r = 0; r < restarts; ++r) {
    auto centers = seed_plus_plus(points, k, stream);
    if (!centers) continue;
    auto run = lloyd(points, std::move(*centers), max_iter);
    if (run && (!best || run->sse < best->sse)) best = std::move(run);
  }
  if (!best) {
    throw Error(ErrorKind::EmptyCluster,
                "every k-means restart produced an empty cluster (k=" + std::to_string(k) + ")");
  }
  return std::move(*best);
}

}  // namespace panelfactor
