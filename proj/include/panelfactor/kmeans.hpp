#pragma once

#include <Eigen/Dense>

#include <vector>

#include "panelfactor/random.hpp"

namespace panelfactor {

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;  // k x d
  double sse = 0.0;
};

// Lloyd's algorithm with k-means++ seeding drawn from `stream`; best of
// `restarts` by within-cluster SSE. Restarts that leave a cluster empty are
// discarded; EmptyCluster is thrown only if every restart does. Ties in the
// nearest-centroid assignment go to the lowest index.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, int max_iter,
                    Stream& stream);

}  // namespace panelfactor
