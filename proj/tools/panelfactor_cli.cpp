// panelfactor command-line front end: simulate, estimate, table, hist, run.
//
// Exit codes: 0 ok, 2 usage / bad input, 3 I/O failure, 4 numerical degeneracy.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "panelfactor/config.hpp"
#include "panelfactor/csv_io.hpp"
#include "panelfactor/dgp.hpp"
#include "panelfactor/errors.hpp"
#include "panelfactor/estimators.hpp"
#include "panelfactor/mc.hpp"

namespace fs = std::filesystem;
using namespace panelfactor;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError:
      return 3;
    case ErrorKind::DegenerateDenominator:
    case ErrorKind::CollinearControls:
    case ErrorKind::UnitDegenerate:
    case ErrorKind::RankDeficientAugmentation:
    case ErrorKind::EmptyCluster:
    case ErrorKind::AllCellsDegenerate:
    case ErrorKind::SingularMeanMatrix:
      return 4;
    default:
      return 2;
  }
}

unsigned workers_default() {
  if (const char* env = std::getenv("PANELFACTOR_WORKERS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring PANELFACTOR_WORKERS='" << env << "'\n";
    }
  }
  return 0;  // all hardware threads
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::string tok;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',' || s[i] == ' ') {
      if (!tok.empty()) out.push_back(static_cast<std::size_t>(std::stoul(tok)));
      tok.clear();
    } else {
      tok += s[i];
    }
  }
  return out;
}

const std::vector<std::string> kDgpChoices = {"1", "2", "3", "4", "counterexample"};
const std::vector<std::string> kEstimateChoices = {"ife",  "pc_x",   "pc_yx",      "cce",
                                                   "twfe", "twgfe",  "within",     "mean_group",
                                                   "pooled_ols"};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

McCellConfig make_cell(const std::string& dgp, std::size_t n, std::size_t T, double pi, long reps,
                       std::uint64_t seed, std::vector<EstimatorTag> est) {
  if (dgp == "counterexample") return counterexample_cell(n, T, reps, seed, std::move(est));
  return preset_cell(std::stoi(dgp), n, T, pi, reps, seed, std::move(est));
}

// ---- simulate ----

struct SimulateArgs {
  std::string dgp;
  std::size_t n = 0, T = 0;
  double pi = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool emit_latents = false;
};

int cmd_simulate(const SimulateArgs& a) {
  Stream stream = derive_stream(SeedSpec{a.seed}, 0);
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

  if (a.dgp == "counterexample") {
    const CounterexamplePanel cp = counterexample_simulate(a.n, a.T, stream);
    write_panel_csv(dir / "Y.csv", cp.data.Y);
    write_panel_csv(dir / "X.csv", cp.data.X.front());
    if (a.emit_latents) std::cerr << "note: the counterexample design has no latent sidecar\n";
    std::cout << "beta_star_analytic=" << format_double(cp.beta_it) << '\n'
              << "beta_star_oracle=" << format_double(cp.beta_it) << '\n';
    return 0;
  }
  const DgpSpec spec = dgp_preset(std::stoi(a.dgp), a.n, a.T, a.pi);
  const PanelDataset data = simulate(spec, stream);
  write_panel_csv(dir / "Y.csv", data.Y);
  write_panel_csv(dir / "X.csv", data.X.front());
  if (a.emit_latents) write_latents_csv(dir / "latents.csv", *data.latents);
  std::cout << "beta_star_analytic=" << format_double(beta_star_analytic(spec)) << '\n'
            << "beta_star_oracle=" << format_double(beta_star_nT(data)) << '\n';
  return 0;
}

// ---- estimate ----

struct EstimateArgs {
  std::string y;
  std::vector<std::string> x;
  std::string estimator;
  std::optional<long> rank;
  bool rank_rule_flag = false;
  double ife_tol = 1e-8;
  long twgfe_g = 1, twgfe_c = 1;
  std::uint64_t seed = 0;
};

int cmd_estimate(const EstimateArgs& a) {
  const PanelMatrix Y = read_panel_csv(fs::path(a.y));
  std::vector<PanelMatrix> X;
  for (const auto& p : a.x) {
    X.push_back(read_panel_csv(fs::path(p)));
    if (!X.back().same_shape(Y)) {
      throw Error(ErrorKind::DimensionMismatch, "--x " + p + " is " + std::to_string(X.back().n()) +
                                                    "x" + std::to_string(X.back().T()) +
                                                    ", --y is " + std::to_string(Y.n()) + "x" +
                                                    std::to_string(Y.T()));
    }
  }
  const std::string est = lower(a.estimator);
  const long R = a.rank ? *a.rank
                        : rank_rule(static_cast<long>(Y.n()), static_cast<long>(Y.T()));
  auto single = [&]() -> const PanelMatrix& {
    if (X.size() != 1) {
      throw Error(ErrorKind::InvalidArgument, "estimator " + est + " takes exactly one --x");
    }
    return X.front();
  };

  EstimatorResult r;
  bool uses_rank = false;
  if (est == "ife") {
    IfeOptions o;
    o.tolerance = a.ife_tol;
    r = ife_als(Y, X, R, o);
    uses_rank = true;
  } else if (est == "pc_x") {
    r = pc_x(Y, X, R);
    uses_rank = true;
  } else if (est == "pc_yx") {
    r = pc_yx(Y, single(), R);
    uses_rank = true;
  } else if (est == "cce") {
    r = cce_pooled(Y, single());
  } else if (est == "twfe") {
    r = twfe(Y, single());
  } else if (est == "twgfe") {
    TwgfeOptions o;
    o.G = a.twgfe_g;
    o.C = a.twgfe_c;
    Stream s = derive_stream(SeedSpec{a.seed}, 0);
    r = twgfe(Y, single(), o, s);
  } else if (est == "within") {
    r = within_estimator(Y, single());
  } else if (est == "mean_group") {
    r = mean_group(Y, single());
  } else {
    r = pooled_ols(Y, X);
  }
  const long rank_out = uses_rank ? r.rank_used : 0;

  std::string betas;
  for (Eigen::Index k = 0; k < r.beta.size(); ++k) {
    if (k) betas += ';';
    betas += format_double(r.beta(k));
  }
  std::cout << est << ',' << betas << ',' << rank_out << ',' << r.iterations << ','
            << format_double(r.final_objective) << '\n';
  std::cout << "\nestimator   " << est << '\n';
  for (Eigen::Index k = 0; k < r.beta.size(); ++k) {
    std::cout << "beta[" << k << "]     " << format_double(r.beta(k)) << '\n';
  }
  std::cout << "rank        " << rank_out << '\n'
            << "iterations  " << r.iterations << '\n'
            << "objective   " << format_double(r.final_objective) << '\n'
            << "converged   " << (r.converged ? "yes" : "no") << '\n'
            << "panel       " << Y.n() << " x " << Y.T() << ", K=" << X.size() << '\n';
  return 0;
}

// ---- table / hist / run ----

struct TableArgs {
  int table = 1;
  long reps = 2000;
  std::uint64_t seed = 0;
  std::string n_list = "25,50,75,100,200";
  std::vector<double> pi_list = {0.0, 0.5};
  std::string estimand = "PaperAnalytic";
  std::string normalization = "root";
  std::string out;
  unsigned workers = 0;
};

int cmd_table(const TableArgs& a) {
  auto cells = table_cells(a.table, parse_size_list(a.n_list), a.pi_list, a.reps, a.seed);
  const EstimandMode mode = parse_estimand_mode(a.estimand);
  const Normalization norm = parse_normalization(a.normalization);
  for (auto& c : cells) {
    c.workers = a.workers;
    c.estimand = mode;
    c.normalization = norm;
  }
  const auto rows = run_table(cells);
  if (a.out.empty()) {
    write_summary_csv(std::cout, rows);
  } else {
    write_summary_csv(fs::path(a.out), rows);
  }
  return 0;
}

struct HistArgs {
  std::string dgp;
  double pi = 0.0;
  std::size_t n = 0, T = 0;
  std::string estimator;
  long reps = 0;
  std::uint64_t seed = 0;
  std::optional<long> rank;
  std::string estimand = "PaperAnalytic";
  std::string normalization = "root";
  std::string out;
  unsigned workers = 0;
};

int cmd_hist(const HistArgs& a) {
  const EstimatorTag tag = parse_estimator_tag(a.estimator);
  McCellConfig cfg = make_cell(a.dgp, a.n, a.T, a.pi, a.reps, a.seed, {tag});
  cfg.rank = a.rank;
  cfg.estimand = parse_estimand_mode(a.estimand);
  cfg.normalization = parse_normalization(a.normalization);
  cfg.workers = a.workers;
  const auto draws = export_histogram(cfg, tag);
  write_histogram(fs::path(a.out), cfg, tag, draws);
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<unsigned> workers,
            const std::string& out_override) {
  const CliConfig cfg = CliConfig::load(fs::path(config_path));
  McCellConfig cell = cfg.to_cell();
  if (workers) {
    cell.workers = *workers;
  } else if (!cfg.entries.count("workers")) {
    cell.workers = workers_default();
  }
  const std::vector<McSummary> rows = {run_cell(cell)};
  const std::string out = out_override.empty() ? cfg.output().value_or("") : out_override;
  if (out.empty()) {
    write_summary_csv(std::cout, rows);
  } else {
    write_summary_csv(fs::path(out), rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panelfactor: factor-model panel estimators and Monte Carlo designs"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate one panel and write Y.csv, X.csv");
  s->add_option("--dgp", sim.dgp, "Design")->required()->check(CLI::IsMember(kDgpChoices));
  s->add_option("--n", sim.n, "Units")->required()->check(CLI::PositiveNumber);
  s->add_option("--t", sim.T, "Periods")->required()->check(CLI::PositiveNumber);
  s->add_option("--pi", sim.pi, "Location-scale mixing weight")->check(CLI::Range(0.0, 1.0));
  s->add_option("--seed", sim.seed, "Master seed")->required();
  s->add_option("--out-dir", sim.out_dir, "Output directory")->default_val(".");
  s->add_flag("--emit-latents", sim.emit_latents, "Also write latents.csv");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Estimate the slope on panel CSV files");
  e->add_option("--y", est.y, "Outcome panel CSV")->required();
  e->add_option("--x", est.x, "Regressor panel CSV (repeatable)")->required();
  e->add_option("--estimator", est.estimator, "Estimator")
      ->required()
      ->transform([](std::string v) {
        v = lower(v);
        if (std::find(kEstimateChoices.begin(), kEstimateChoices.end(), v) == kEstimateChoices.end()) {
          std::string all;
          for (const auto& c : kEstimateChoices) all += (all.empty() ? "" : ", ") + c;
          throw CLI::ValidationError("--estimator", "'" + v + "' is not one of {" + all + "}");
        }
        return v;
      });
  auto* rank_opt = e->add_option("--rank", est.rank, "Factor rank");
  auto* rule_opt = e->add_flag("--rank-rule", est.rank_rule_flag, "Use the default rank rule");
  rank_opt->excludes(rule_opt);
  e->add_option("--ife-tol", est.ife_tol, "IFE relative tolerance")->check(CLI::PositiveNumber);
  e->add_option("--twgfe-g", est.twgfe_g, "TWGFE unit groups")->check(CLI::PositiveNumber);
  e->add_option("--twgfe-c", est.twgfe_c, "TWGFE period groups")->check(CLI::PositiveNumber);
  e->add_option("--seed", est.seed, "Clustering seed");

  TableArgs tab;
  auto* t = app.add_subcommand("table", "Monte Carlo table over n = T and pi");
  t->add_option("--table", tab.table, "Design 1-4")->required()->check(CLI::IsMember({1, 2, 3, 4}));
  t->add_option("--reps", tab.reps, "Replications")->required()->check(CLI::PositiveNumber);
  t->add_option("--seed", tab.seed, "Master seed")->required();
  t->add_option("--n-list", tab.n_list, "Comma-separated n = T values");
  t->add_option("--pi-list", tab.pi_list, "pi values")->delimiter(',');
  t->add_option("--estimand", tab.estimand, "PaperAnalytic or OracleNT");
  t->add_option("--normalization", tab.normalization, "root: sqrt(min(n,T)); quarter: min(n,T)^(1/4)");
  t->add_option("--out", tab.out, "Summary CSV (default: stdout)");
  t->add_option("--workers", tab.workers, "Worker threads (0: all)")->default_val(workers_default());

  HistArgs hist;
  auto* h = app.add_subcommand("hist", "Normalized draws of one estimator");
  h->add_option("--dgp", hist.dgp, "Design")->required()->check(CLI::IsMember(kDgpChoices));
  h->add_option("--pi", hist.pi, "pi")->check(CLI::Range(0.0, 1.0));
  h->add_option("--n", hist.n, "Units")->required()->check(CLI::PositiveNumber);
  h->add_option("--t", hist.T, "Periods")->required()->check(CLI::PositiveNumber);
  h->add_option("--estimator", hist.estimator, "Estimator tag")->required();
  h->add_option("--reps", hist.reps, "Replications")->required()->check(CLI::PositiveNumber);
  h->add_option("--seed", hist.seed, "Master seed")->required();
  h->add_option("--rank", hist.rank, "Factor rank (default: rule)");
  h->add_option("--estimand", hist.estimand, "PaperAnalytic or OracleNT");
  h->add_option("--normalization", hist.normalization, "root or quarter");
  h->add_option("--out", hist.out, "Output file")->required();
  h->add_option("--workers", hist.workers, "Worker threads (0: all)")->default_val(workers_default());

  std::string config_path, run_out;
  std::optional<unsigned> run_workers;
  auto* r = app.add_subcommand("run", "Run one Monte Carlo cell from a config file");
  r->add_option("--config", config_path, "key = value config file")->required();
  r->add_option("--workers", run_workers, "Worker threads (0: all)");
  r->add_option("--out", run_out, "Summary CSV (overrides the config's output key)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return 2;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*e) return cmd_estimate(est);
    if (*t) return cmd_table(tab);
    if (*h) return cmd_hist(hist);
    if (*r) return cmd_run(config_path, run_workers, run_out);
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return exit_code(ex.kind());
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 2;
}
