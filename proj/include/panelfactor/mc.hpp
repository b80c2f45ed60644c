#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "panelfactor/dgp.hpp"
#include "panelfactor/estimators.hpp"
#include "panelfactor/random.hpp"

namespace panelfactor {

enum class EstimatorTag { IFE, PC_X, PC_YX, CCE, TWFE, TWGFE };

std::string to_string(EstimatorTag tag);
// Accepts the canonical names case-insensitively plus "pcx", "pc(x)", etc.
EstimatorTag parse_estimator_tag(std::string_view text);

enum class EstimandMode { PaperAnalytic, OracleNT };

std::string to_string(EstimandMode mode);
EstimandMode parse_estimand_mode(std::string_view text);

enum class DesignKind { LocationScale, Counterexample };

// Scaling of beta_hat - beta_star in the reported statistic: sqrt(min(n,T)), or
// min(n,T)^(1/4), the scale of the reference tables.
enum class Normalization { RootMin, QuarterMin };

std::string to_string(Normalization norm);
Normalization parse_normalization(std::string_view text);
double normalization_factor(Normalization norm, std::size_t n, std::size_t T);

/// One Monte Carlo design cell.
struct McCellConfig {
  DesignKind design = DesignKind::LocationScale;
  int dgp_id = 1;  // 1-4 for the presets, 0 for a custom location-scale spec
  DgpSpec dgp;     // n and T are taken from here for both design kinds
  std::vector<EstimatorTag> estimators;
  long reps = 1;
  SeedSpec seed;
  std::optional<long> rank;  // nullopt: rank_rule(n, T)
  EstimandMode estimand = EstimandMode::PaperAnalytic;
  IfeOptions ife;
  TwgfeOptions twgfe;
  PcYxMode pc_yx_mode = PcYxMode::Independent;
  Normalization normalization = Normalization::RootMin;
  unsigned workers = 1;  // 0: hardware concurrency. Does not affect results.

  std::string dgp_label() const;
  long rank_used() const;
  void validate() const;
};

McCellConfig preset_cell(int dgp_id, std::size_t n, std::size_t T, double pi, long reps,
                         std::uint64_t seed, std::vector<EstimatorTag> estimators);
McCellConfig counterexample_cell(std::size_t n, std::size_t T, long reps, std::uint64_t seed,
                                 std::vector<EstimatorTag> estimators);

struct EstimatorSummary {
  EstimatorTag tag = EstimatorTag::IFE;
  double bias = 0.0;        // mean of the normalized statistic
  double variance = 0.0;    // population variance of the same
  double mean_error = 0.0;  // mean of beta_hat - beta_star
  double mean_estimate = 0.0;
  long reps_effective = 0;
  long failure_count = 0;
  std::map<std::string, long> failure_reasons;
};

struct McSummary {
  std::string dgp;
  std::string location_family;
  std::size_t n = 0;
  std::size_t T = 0;
  double pi = 0.0;
  double kappa = 0.0;
  double rho = 0.0;
  long rank = 0;
  long reps = 0;
  std::uint64_t seed = 0;
  EstimandMode estimand = EstimandMode::PaperAnalytic;
  Normalization normalization = Normalization::RootMin;
  double beta_star = 0.0;  // mean over replications for OracleNT
  std::vector<EstimatorSummary> estimators;

  const EstimatorSummary& at(EstimatorTag tag) const;
};

/// Summary plus the per-replication draws behind it.
struct McRun {
  McSummary summary;
  // draws[e][m]: normalized statistic of estimator e at replication m, NaN on failure.
  std::vector<std::vector<double>> draws;
  std::vector<std::vector<double>> estimates;
  std::vector<double> beta_star;  // per replication
};

McRun run_cell_draws(const McCellConfig& cfg);
McSummary run_cell(const McCellConfig& cfg);
std::vector<McSummary> run_table(const std::vector<McCellConfig>& cells);

/// The M normalized draws of one estimator, NaN where it failed.
std::vector<double> export_histogram(const McCellConfig& cfg, EstimatorTag tag);

/// Cells of one of the four reference tables: n = T over `n_list`, pi over `pi_list`,
/// estimators IFE, PC(YX), PC(X), CCE, rank rule, analytic estimand.
std::vector<McCellConfig> table_cells(int table_id, const std::vector<std::size_t>& n_list,
                                      const std::vector<double>& pi_list, long reps,
                                      std::uint64_t seed);

void write_summary_csv(std::ostream& out, const std::vector<McSummary>& rows);
void write_summary_csv(const std::filesystem::path& path, const std::vector<McSummary>& rows);

/// One parsed line of a summary CSV.
struct SummaryRecord {
  std::string dgp;
  std::string location_family;
  std::size_t n = 0;
  std::size_t T = 0;
  double pi = 0.0;
  double kappa = 0.0;
  double rho = 0.0;
  std::string estimator;
  long rank = 0;
  long reps = 0;
  long reps_effective = 0;
  double bias = 0.0;
  double var = 0.0;
  std::string beta_star_mode;
  double beta_star_value = 0.0;
  std::uint64_t seed = 0;
};

std::vector<SummaryRecord> read_summary_csv(std::istream& in);

void write_histogram(std::ostream& out, const McCellConfig& cfg, EstimatorTag tag,
                     const std::vector<double>& draws);
void write_histogram(const std::filesystem::path& path, const McCellConfig& cfg, EstimatorTag tag,
                     const std::vector<double>& draws);

}  // namespace panelfactor
