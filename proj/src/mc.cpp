#include "panelfactor/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "panelfactor/csv_io.hpp"
#include "panelfactor/errors.hpp"

namespace panelfactor {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Salt for the TWGFE clustering streams, kept apart from the simulation streams.
constexpr std::uint64_t kClusterSalt = 0x6b6d65616e73ULL;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Replication {
  double beta_star = 0.0;
  std::vector<double> estimate;  // per estimator, NaN on failure
  std::vector<std::string> failure;
};

double estimate_one(EstimatorTag tag, const McCellConfig& cfg, const PanelDataset& data,
                    long R, std::uint64_t m) {
  switch (tag) {
    case EstimatorTag::IFE:
      return ife_als(data.Y, data.X, R, cfg.ife).scalar();
    case EstimatorTag::PC_X:
      return pc_x(data.Y, data.X, R).scalar();
    case EstimatorTag::PC_YX:
      return pc_yx(data.Y, data.X.front(), R, cfg.pc_yx_mode).scalar();
    case EstimatorTag::CCE:
      return cce_pooled(data.Y, data.X.front()).scalar();
    case EstimatorTag::TWFE:
      return twfe(data.Y, data.X.front()).scalar();
    case EstimatorTag::TWGFE: {
      Stream s = derive_stream(SeedSpec{cfg.seed.master_seed ^ kClusterSalt}, m);
      return twgfe(data.Y, data.X.front(), cfg.twgfe, s).scalar();
    }
  }
  throw Error(ErrorKind::UnknownEstimatorTag, "unhandled estimator");
}

Replication run_replication(const McCellConfig& cfg, long R, std::uint64_t m) {
  Stream stream = derive_stream(cfg.seed, m);
  Replication rep;
  std::optional<PanelDataset> data;
  if (cfg.design == DesignKind::Counterexample) {
    data = counterexample_simulate(cfg.dgp.n, cfg.dgp.T, stream).data;
    rep.beta_star = 0.0;
  } else {
    data = simulate(cfg.dgp, stream);
    rep.beta_star = cfg.estimand == EstimandMode::PaperAnalytic ? beta_star_analytic(cfg.dgp)
                                                                : beta_star_nT(*data);
  }
  rep.estimate.assign(cfg.estimators.size(), kNaN);
  rep.failure.assign(cfg.estimators.size(), std::string());
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    try {
      const double b = estimate_one(cfg.estimators[e], cfg, *data, R, m);
      if (std::isfinite(b)) {
        rep.estimate[e] = b;
      } else {
        rep.failure[e] = "NonFiniteEstimate";
      }
    } catch (const Error& err) {
      rep.failure[e] = std::string(to_string(err.kind()));
    } catch (const std::exception&) {
      rep.failure[e] = "Other";
    }
  }
  return rep;
}

unsigned resolve_workers(unsigned requested, long reps) {
  unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<long>(w, reps));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long parse_long(const std::string& s) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "not an integer: '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size() || s.front() == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "not an unsigned integer: '" + s + "'");
  }
}

const char* kSummaryHeader =
    "dgp,location_family,n,T,pi,kappa,rho,estimator,rank,reps,reps_effective,bias,var,"
    "beta_star_mode,beta_star_value,seed";

}  // namespace

std::string to_string(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::IFE: return "IFE";
    case EstimatorTag::PC_X: return "PC_X";
    case EstimatorTag::PC_YX: return "PC_YX";
    case EstimatorTag::CCE: return "CCE";
    case EstimatorTag::TWFE: return "TWFE";
    case EstimatorTag::TWGFE: return "TWGFE";
  }
  return "?";
}

EstimatorTag parse_estimator_tag(std::string_view text) {
  std::string s = lower(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '_' || c == '(' || c == ')' || c == '-'; }),
          s.end());
  if (s == "ife") return EstimatorTag::IFE;
  if (s == "pcx") return EstimatorTag::PC_X;
  if (s == "pcyx") return EstimatorTag::PC_YX;
  if (s == "cce") return EstimatorTag::CCE;
  if (s == "twfe") return EstimatorTag::TWFE;
  if (s == "twgfe") return EstimatorTag::TWGFE;
  throw Error(ErrorKind::UnknownEstimatorTag,
              "unknown estimator '" + std::string(text) + "' (valid: IFE, PC_X, PC_YX, CCE, TWFE, TWGFE)");
}

std::string to_string(EstimandMode mode) {
  return mode == EstimandMode::PaperAnalytic ? "PaperAnalytic" : "OracleNT";
}

EstimandMode parse_estimand_mode(std::string_view text) {
  const std::string s = lower(text);
  if (s == "paperanalytic" || s == "analytic" || s == "paper") return EstimandMode::PaperAnalytic;
  if (s == "oraclent" || s == "oracle") return EstimandMode::OracleNT;
  throw Error(ErrorKind::InvalidArgument,
              "unknown estimand mode '" + std::string(text) + "' (valid: PaperAnalytic, OracleNT)");
}

std::string to_string(Normalization norm) {
  return norm == Normalization::RootMin ? "root" : "quarter";
}

Normalization parse_normalization(std::string_view text) {
  const std::string s = lower(text);
  if (s == "root" || s == "rootmin") return Normalization::RootMin;
  if (s == "quarter" || s == "quartermin" || s == "table") return Normalization::QuarterMin;
  throw Error(ErrorKind::InvalidArgument,
              "unknown normalization '" + std::string(text) + "' (valid: root, quarter)");
}

double normalization_factor(Normalization norm, std::size_t n, std::size_t T) {
  const double m = static_cast<double>(std::min(n, T));
  return norm == Normalization::RootMin ? std::sqrt(m) : std::sqrt(std::sqrt(m));
}

std::string McCellConfig::dgp_label() const {
  if (design == DesignKind::Counterexample) return "counterexample";
  if (dgp_id >= 1 && dgp_id <= 4) return std::to_string(dgp_id);
  return "custom";
}

long McCellConfig::rank_used() const {
  return rank ? *rank : rank_rule(static_cast<long>(dgp.n), static_cast<long>(dgp.T));
}

void McCellConfig::validate() const {
  if (reps < 1) throw Error(ErrorKind::InvalidSpec, "replications must be >= 1");
  if (estimators.empty()) throw Error(ErrorKind::InvalidSpec, "no estimators requested");
  if (design == DesignKind::LocationScale) {
    dgp.validate();
  } else if (dgp.n < 2 || dgp.T < 2) {
    throw Error(ErrorKind::InvalidSpec, "counterexample needs n, T >= 2");
  }
  const bool needs_rank = std::any_of(estimators.begin(), estimators.end(), [](EstimatorTag t) {
    return t == EstimatorTag::IFE || t == EstimatorTag::PC_X || t == EstimatorTag::PC_YX;
  });
  if (needs_rank) {
    const long R = rank_used();
    const long hi = static_cast<long>(std::min(dgp.n, dgp.T));
    if (R < 0 || R >= hi) {
      throw Error(ErrorKind::RankOutOfRange,
                  "rank " + std::to_string(R) + " not in [0, " + std::to_string(hi - 1) + "]");
    }
  }
  if (std::find(estimators.begin(), estimators.end(), EstimatorTag::TWGFE) != estimators.end()) {
    if (twgfe.G < 1 || twgfe.G > static_cast<long>(dgp.n) || twgfe.C < 1 ||
        twgfe.C > static_cast<long>(dgp.T)) {
      throw Error(ErrorKind::InvalidSpec, "TWGFE needs 1 <= G <= n and 1 <= C <= T");
    }
  }
}

McCellConfig preset_cell(int dgp_id, std::size_t n, std::size_t T, double pi, long reps,
                         std::uint64_t seed, std::vector<EstimatorTag> estimators) {
  McCellConfig cfg;
  cfg.dgp_id = dgp_id;
  cfg.dgp = dgp_preset(dgp_id, n, T, pi);
  cfg.estimators = std::move(estimators);
  cfg.reps = reps;
  cfg.seed.master_seed = seed;
  return cfg;
}

McCellConfig counterexample_cell(std::size_t n, std::size_t T, long reps, std::uint64_t seed,
                                 std::vector<EstimatorTag> estimators) {
  McCellConfig cfg;
  cfg.design = DesignKind::Counterexample;
  cfg.dgp_id = 0;
  cfg.dgp.n = n;
  cfg.dgp.T = T;
  cfg.dgp.kappa = 0.0;
  cfg.dgp.rho = 0.0;
  cfg.dgp.pi = 0.0;
  cfg.estimators = std::move(estimators);
  cfg.reps = reps;
  cfg.seed.master_seed = seed;
  return cfg;
}

const EstimatorSummary& McSummary::at(EstimatorTag tag) const {
  for (const auto& e : estimators) {
    if (e.tag == tag) return e;
  }
  throw Error(ErrorKind::UnknownEstimatorTag, "estimator " + to_string(tag) + " not in summary");
}

McRun run_cell_draws(const McCellConfig& cfg) {
  cfg.validate();
  const long R = cfg.rank_used();
  const auto M = static_cast<std::size_t>(cfg.reps);
  std::vector<Replication> reps(M);

  const unsigned workers = resolve_workers(cfg.workers, cfg.reps);
  if (workers <= 1) {
    for (std::size_t m = 0; m < M; ++m) reps[m] = run_replication(cfg, R, m);
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t m = next.fetch_add(1); m < M; m = next.fetch_add(1)) {
        reps[m] = run_replication(cfg, R, m);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  McRun run;
  McSummary& s = run.summary;
  s.dgp = cfg.dgp_label();
  s.location_family =
      cfg.design == DesignKind::Counterexample ? "none" : to_string(cfg.dgp.location_family);
  s.n = cfg.dgp.n;
  s.T = cfg.dgp.T;
  s.pi = cfg.dgp.pi;
  s.kappa = cfg.dgp.kappa;
  s.rho = cfg.dgp.rho;
  s.rank = R;
  s.reps = cfg.reps;
  s.seed = cfg.seed.master_seed;
  s.estimand = cfg.estimand;
  s.normalization = cfg.normalization;

  const double scale = normalization_factor(cfg.normalization, cfg.dgp.n, cfg.dgp.T);
  run.beta_star.resize(M);
  double star_sum = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    run.beta_star[m] = reps[m].beta_star;
    star_sum += reps[m].beta_star;
  }
  s.beta_star = star_sum / static_cast<double>(M);

  const std::size_t E = cfg.estimators.size();
  run.draws.assign(E, std::vector<double>(M, kNaN));
  run.estimates.assign(E, std::vector<double>(M, kNaN));
  for (std::size_t e = 0; e < E; ++e) {
    EstimatorSummary es;
    es.tag = cfg.estimators[e];
    double sum = 0.0, sum_err = 0.0, sum_est = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const Replication& r = reps[m];
      if (!r.failure[e].empty()) {
        ++es.failure_count;
        ++es.failure_reasons[r.failure[e]];
        continue;
      }
      const double err = r.estimate[e] - r.beta_star;
      run.estimates[e][m] = r.estimate[e];
      run.draws[e][m] = scale * err;
      ++es.reps_effective;
      sum += scale * err;
      sum_err += err;
      sum_est += r.estimate[e];
    }
    if (es.reps_effective > 0) {
      const double k = static_cast<double>(es.reps_effective);
      es.bias = sum / k;
      es.mean_error = sum_err / k;
      es.mean_estimate = sum_est / k;
      double ss = 0.0;
      for (double d : run.draws[e]) {
        if (!std::isnan(d)) ss += (d - es.bias) * (d - es.bias);
      }
      es.variance = ss / k;
    } else {
      es.bias = es.variance = es.mean_error = es.mean_estimate = kNaN;
    }
    s.estimators.push_back(std::move(es));
  }
  return run;
}

McSummary run_cell(const McCellConfig& cfg) { return run_cell_draws(cfg).summary; }

std::vector<McSummary> run_table(const std::vector<McCellConfig>& cells) {
  std::vector<McSummary> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(run_cell(c));
  return out;
}

std::vector<double> export_histogram(const McCellConfig& cfg, EstimatorTag tag) {
  McCellConfig one = cfg;
  one.estimators = {tag};
  return run_cell_draws(one).draws.front();
}

std::vector<McCellConfig> table_cells(int table_id, const std::vector<std::size_t>& n_list,
                                      const std::vector<double>& pi_list, long reps,
                                      std::uint64_t seed) {
  if (table_id < 1 || table_id > 4) {
    throw Error(ErrorKind::InvalidArgument, "table must be 1, 2, 3 or 4");
  }
  const std::vector<EstimatorTag> est = {EstimatorTag::IFE, EstimatorTag::PC_YX, EstimatorTag::PC_X,
                                         EstimatorTag::CCE};
  std::vector<McCellConfig> cells;
  for (std::size_t n : n_list) {
    for (double pi : pi_list) cells.push_back(preset_cell(table_id, n, n, pi, reps, seed, est));
  }
  return cells;
}

void write_summary_csv(std::ostream& out, const std::vector<McSummary>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    for (const auto& e : s.estimators) {
      out << s.dgp << ',' << s.location_family << ',' << s.n << ',' << s.T << ','
          << format_double(s.pi) << ',' << format_double(s.kappa) << ',' << format_double(s.rho)
          << ',' << to_string(e.tag) << ',' << s.rank << ',' << s.reps << ',' << e.reps_effective
          << ',' << format_double(e.bias) << ',' << format_double(e.variance) << ','
          << to_string(s.estimand) << ',' << format_double(s.beta_star) << ',' << s.seed << '\n';
    }
  }
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<McSummary>& rows) {
  auto out = open_out(path);
  write_summary_csv(out, rows);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

std::vector<SummaryRecord> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty summary file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSummaryHeader) throw Error(ErrorKind::ParseError, "unexpected summary header");
  std::vector<SummaryRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 16) {
      throw Error(ErrorKind::ParseError, "summary row needs 16 fields, got " + std::to_string(f.size()));
    }
    SummaryRecord r;
    r.dgp = f[0];
    r.location_family = f[1];
    r.n = static_cast<std::size_t>(parse_u64(f[2]));
    r.T = static_cast<std::size_t>(parse_u64(f[3]));
    r.pi = parse_double(f[4]);
    r.kappa = parse_double(f[5]);
    r.rho = parse_double(f[6]);
    r.estimator = f[7];
    r.rank = parse_long(f[8]);
    r.reps = parse_long(f[9]);
    r.reps_effective = parse_long(f[10]);
    r.bias = parse_double(f[11]);
    r.var = parse_double(f[12]);
    r.beta_star_mode = f[13];
    r.beta_star_value = parse_double(f[14]);
    r.seed = parse_u64(f[15]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_histogram(std::ostream& out, const McCellConfig& cfg, EstimatorTag tag,
                     const std::vector<double>& draws) {
  out << "# estimator=" << to_string(tag) << " n=" << cfg.dgp.n << " T=" << cfg.dgp.T
      << " dgp=" << cfg.dgp_label() << " seed=" << cfg.seed.master_seed << '\n';
  for (double d : draws) out << format_double(d) << '\n';
}

void write_histogram(const std::filesystem::path& path, const McCellConfig& cfg, EstimatorTag tag,
                     const std::vector<double>& draws) {
  auto out = open_out(path);
  write_histogram(out, cfg, tag, draws);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace panelfactor
