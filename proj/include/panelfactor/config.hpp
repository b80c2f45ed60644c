#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "panelfactor/mc.hpp"

namespace panelfactor {

/// Flat `key = value` configuration with `#` comments.
///
/// Required: dgp, n, T, estimators, reps, seed.
/// Optional: pi, kappa, rho, alpha, beta0, location_family, burn_in, rank
/// (integer or "rule"), estimand, ife_tol, ife_max_iter, twgfe_g, twgfe_c,
/// pc_yx_mode, normalization, kmeans_restarts, workers, output.
/// With dgp = 1..4 the preset fills kappa/rho/alpha/beta0/location_family and
/// explicit keys override it; dgp = custom starts from the DgpSpec defaults.
struct CliConfig {
  std::map<std::string, std::string> entries;
  std::map<std::string, int> lines;  // key -> source line, for messages

  static CliConfig parse(std::istream& in);
  static CliConfig load(const std::filesystem::path& path);

  McCellConfig to_cell() const;
  std::optional<std::string> output() const;
};

}  // namespace panelfactor
