// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [k ...] [--known-fail k,k] [--workers W]
//
// With no criterion ids all nine run. Criteria named in --known-fail still run and
// print FAIL when they fail, but do not set the exit status.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "panelfactor/dgp.hpp"
#include "panelfactor/estimators.hpp"
#include "panelfactor/lowrank.hpp"
#include "panelfactor/mc.hpp"
#include "panelfactor/targeted.hpp"

using namespace panelfactor;

namespace {

constexpr std::uint64_t kSeed = 20240601;
unsigned g_workers = 0;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  // Records "label=value in [target +- tol]" and folds the check into pass.
  void near(const std::string& label, double value, double target, double tol) {
    const bool ok = std::abs(value - target) <= tol;
    pass = pass && ok;
    detail << ' ' << label << '=' << value << (ok ? "" : "(!)") << " [" << target << "+-" << tol << ']';
  }
  void expect(const std::string& label, bool ok) {
    pass = pass && ok;
    detail << ' ' << label << '=' << (ok ? "ok" : "FAILED");
  }
  void note(const std::string& text) { detail << ' ' << text; }
};

std::vector<EstimatorTag> table_estimators() {
  return {EstimatorTag::IFE, EstimatorTag::PC_YX, EstimatorTag::PC_X, EstimatorTag::CCE};
}

McCellConfig table_cell(int dgp, std::size_t n, double pi, long reps, std::vector<EstimatorTag> est,
                        EstimandMode mode, Normalization norm) {
  McCellConfig c = preset_cell(dgp, n, n, pi, reps, kSeed, std::move(est));
  c.estimand = mode;
  c.normalization = norm;
  c.workers = g_workers;
  return c;
}

// Same statistic rescaled from min(n,T)^(1/4) to sqrt(min(n,T)).
double to_root(double quarter_bias, std::size_t n) {
  return quarter_bias * std::pow(static_cast<double>(n), 0.25);
}

double fro2(const RowMatrix& A) { return A.squaredNorm(); }

RowMatrix gaussian(Eigen::Index n, Eigen::Index T, std::mt19937_64& g) {
  std::normal_distribution<double> N(0.0, 1.0);
  RowMatrix A(n, T);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index t = 0; t < T; ++t) A(i, t) = N(g);
  return A;
}

Eigen::VectorXd gaussian_vec(Eigen::Index n, std::mt19937_64& g) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = N(g);
  return v;
}

// ---- 1-3: reference table cells, on the reference-table scale ----

Verdict criterion1() {
  Verdict v;
  McCellConfig c = table_cell(1, 50, 0.0, 2000, table_estimators(), EstimandMode::PaperAnalytic,
                              Normalization::QuarterMin);
  c.rank = 13;
  const McSummary s = run_cell(c);
  v.note("beta*=" + std::to_string(s.beta_star));
  v.near("IFE.bias", s.at(EstimatorTag::IFE).bias, 0.010, 0.03);
  v.near("IFE.var", s.at(EstimatorTag::IFE).variance, 0.011, 0.005);
  v.near("PC_X.bias", s.at(EstimatorTag::PC_X).bias, 0.001, 0.03);
  v.near("PC_YX.bias", s.at(EstimatorTag::PC_YX).bias, -0.622, 0.05);
  v.near("CCE.bias", s.at(EstimatorTag::CCE).bias, 0.003, 0.03);
  v.note("| sqrt-scale bias IFE=" + std::to_string(to_root(s.at(EstimatorTag::IFE).bias, 50)) +
         " PC_YX=" + std::to_string(to_root(s.at(EstimatorTag::PC_YX).bias, 50)));
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto check = [](const McSummary& s, Verdict& out) {
    out.near("IFE", s.at(EstimatorTag::IFE).bias, 0.229, 0.06);
    out.near("PC_X", s.at(EstimatorTag::PC_X).bias, 0.596, 0.08);
    out.near("PC_YX", s.at(EstimatorTag::PC_YX).bias, -0.203, 0.06);
    out.near("CCE", s.at(EstimatorTag::CCE).bias, 0.253, 0.06);
  };
  Verdict analytic, oracle;
  const McSummary a = run_cell(table_cell(1, 50, 0.5, 2000, table_estimators(),
                                          EstimandMode::PaperAnalytic, Normalization::QuarterMin));
  check(a, analytic);
  const McSummary o = run_cell(table_cell(1, 50, 0.5, 2000, table_estimators(),
                                          EstimandMode::OracleNT, Normalization::QuarterMin));
  check(o, oracle);
  v.pass = analytic.pass != oracle.pass;
  v.note("analytic(beta*=" + std::to_string(a.beta_star) + "):" + analytic.detail.str() +
         (analytic.pass ? " reproduced" : " not reproduced"));
  v.note("| oracle(mean beta*=" + std::to_string(o.beta_star) + "):" + oracle.detail.str() +
         (oracle.pass ? " reproduced" : " not reproduced"));
  v.note("| sqrt-scale analytic IFE=" + std::to_string(to_root(a.at(EstimatorTag::IFE).bias, 50)));
  return v;
}

Verdict criterion3() {
  Verdict v;
  for (auto [dgp, target] : {std::pair{2, 0.049}, std::pair{4, 0.034}}) {
    const McSummary s = run_cell(table_cell(dgp, 50, 0.0, 2000, {EstimatorTag::IFE},
                                            EstimandMode::PaperAnalytic, Normalization::QuarterMin));
    v.near("DGP" + std::to_string(dgp) + ".IFE.bias", s.at(EstimatorTag::IFE).bias, target, 0.03);
  }
  return v;
}

// ---- 4: counterexample limits ----

Verdict criterion4() {
  Verdict v;
  McCellConfig c = counterexample_cell(400, 400, 200, kSeed,
                                       {EstimatorTag::TWFE, EstimatorTag::CCE, EstimatorTag::PC_X,
                                        EstimatorTag::IFE});
  c.workers = g_workers;
  const McSummary s = run_cell(c);
  v.note("R=" + std::to_string(s.rank));
  v.near("TWFE.mean", s.at(EstimatorTag::TWFE).mean_estimate, 0.5, 0.05);
  v.near("CCE.mean", s.at(EstimatorTag::CCE).mean_estimate, 0.5, 0.05);
  v.near("PC_X.mean", s.at(EstimatorTag::PC_X).mean_estimate, 0.0, 0.05);
  v.near("IFE.mean", s.at(EstimatorTag::IFE).mean_estimate, 0.0, 0.05);
  // Finite-n limit of CCE when sqrt(n) * mean(lambda) ~ N(0,1): 0.5 E[1 / (1 + c^2)].
  const double mixture = 0.5 * std::sqrt(std::acos(-1.0) / 2.0) * std::exp(0.5) *
                         std::erfc(1.0 / std::sqrt(2.0));
  v.note("| CCE mixture-limit reference=" + std::to_string(mixture));
  return v;
}

// ---- 5: consistency trend under the oracle estimand ----

Verdict criterion5() {
  Verdict v;
  const auto cell = [](std::size_t n) {
    return run_cell(table_cell(3, n, 0.0, 500, {EstimatorTag::IFE, EstimatorTag::PC_X},
                               EstimandMode::OracleNT, Normalization::RootMin));
  };
  const McSummary s25 = cell(25);
  const McSummary s100 = cell(100);
  const double e25 = std::abs(s25.at(EstimatorTag::IFE).mean_error);
  const double e100 = std::abs(s100.at(EstimatorTag::IFE).mean_error);
  v.note("IFE|err| n=25:" + std::to_string(e25) + " n=100:" + std::to_string(e100));
  v.expect("IFE.shrinks", e100 < e25);
  v.near("PC_X.err(n=100)", std::abs(s100.at(EstimatorTag::PC_X).mean_error), 0.0, 0.01);
  return v;
}

// ---- 6: estimator property suite ----

double profile_objective(const RowMatrix& Y, const RowMatrix& X, double beta, long R) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(Y - beta * X)};
  const auto& s = svd.singularValues();
  return s.tail(s.size() - R).squaredNorm();
}

Verdict criterion6() {
  Verdict v;
  std::mt19937_64 g(6);

  bool ey = true;
  for (int k = 0; k < 3; ++k) {
    const RowMatrix A = gaussian(9, 7, g);
    const long R = k + 1;
    const double best = fro2(A - rank_r_approx(PanelMatrix(A), R).values());
    for (int c = 0; c < 100; ++c) {
      RowMatrix C = gaussian(9, R, g) * gaussian(R, 7, g);
      C *= A.cwiseProduct(C).sum() / C.squaredNorm();
      ey = ey && fro2(A - C) >= best;
    }
  }
  v.expect("eckart_young", ey);

  {
    const RowMatrix A = gaussian(12, 9, g);
    const LowRankFactors f = truncated_svd(PanelMatrix(A), 4);
    const RowMatrix AR = f.reconstruct();
    const double eye_l = (f.left.transpose() * f.left - Eigen::MatrixXd::Identity(4, 4)).norm();
    const double eye_r = (f.right.transpose() * f.right - Eigen::MatrixXd::Identity(4, 4)).norm();
    v.expect("orthonormal", eye_l < 1e-12 && eye_r < 1e-12);
    v.expect("pythagoras", std::abs(fro2(A) - fro2(AR) - fro2(A - AR)) < 1e-10 * fro2(A));
    v.expect("idempotent", (rank_r_approx(PanelMatrix(AR), 4).values() - AR).norm() < 1e-10);
  }

  {
    const RowMatrix X = gaussian(15, 11, g);
    const RowMatrix Y = 1.3 * X + gaussian(15, 11, g);
    const double b = twfe(PanelMatrix(Y), PanelMatrix(X)).scalar();
    const std::vector<int> units(15, 0), periods(11, 0);
    const RowMatrix e = grouped_demean(Y, units, 1, periods, 1) - b * grouped_demean(X, units, 1, periods, 1);
    v.expect("twfe_residual_sums",
             e.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10 && e.colwise().sum().cwiseAbs().maxCoeff() < 1e-10);
  }

  bool fwl = true;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 40;
    std::vector<Eigen::VectorXd> C;
    for (int j = 0; j < k % 4; ++j) C.push_back(gaussian_vec(n, g));
    Eigen::VectorXd x = gaussian_vec(n, g);
    for (const auto& c : C) x += 0.5 * c;
    const Eigen::VectorXd y = gaussian_vec(n, g) + 0.7 * x;
    Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(C.size()) + 2);
    Z.col(0).setOnes();
    for (std::size_t j = 0; j < C.size(); ++j) Z.col(static_cast<Eigen::Index>(j) + 1) = C[j];
    Z.col(Z.cols() - 1) = x;
    const Eigen::VectorXd full = Z.colPivHouseholderQr().solve(y);
    fwl = fwl && std::abs(partialled_ols(y, x, C) - full(full.size() - 1)) < 1e-10;
  }
  v.expect("fwl_100", fwl);

  {
    Stream s = derive_stream(SeedSpec{6}, 0);
    const auto d = simulate(dgp_preset(1, 30, 30, 0.0), s);
    const auto r = ife_als(d.Y, d.X, 5);
    bool mono = !r.objective_trace.empty();
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
      mono = mono && r.objective_trace[k] <= r.objective_trace[k - 1] * (1.0 + 1e-12);
    }
    v.expect("ife_monotone", mono);
  }

  {
    const RowMatrix X = gaussian(8, 8, g);
    const RowMatrix Y = 0.8 * X + gaussian(8, 2, g) * gaussian(2, 8, g) + 0.5 * gaussian(8, 8, g);
    double best_b = 0.0, best = std::numeric_limits<double>::infinity();
    for (int j = -10000; j <= 10000; ++j) {
      const double obj = profile_objective(Y, X, j * 1e-3, 2);
      if (obj < best) {
        best = obj;
        best_b = j * 1e-3;
      }
    }
    IfeOptions o;
    o.tolerance = 1e-12;
    o.max_iterations = 100000;
    const double b = ife_als(PanelMatrix(Y), {PanelMatrix(X)}, 2, o).scalar();
    v.expect("ife_grid_oracle", std::abs(b - best_b) <= 1e-3);
  }

  {
    const RowMatrix X = gaussian(14, 10, g);
    const RowMatrix Y = -0.4 * X + gaussian(14, 10, g);
    Stream s = derive_stream(SeedSpec{6}, 1);
    const double a = twgfe(PanelMatrix(Y), PanelMatrix(X), TwgfeOptions{}, s).scalar();
    const double b = twfe(PanelMatrix(Y), PanelMatrix(X)).scalar();
    v.expect("twgfe11_is_twfe", std::abs(a - b) < 1e-12);
  }

  bool rule = true;
  for (auto [n, R] : {std::pair{25L, 10L}, {50L, 13L}, {75L, 15L}, {100L, 16L}, {200L, 21L}}) {
    rule = rule && rank_rule(n, n) == R;
  }
  v.expect("rank_rule", rule);
  return v;
}

// ---- 7: DGP moment suite ----

Verdict criterion7() {
  Verdict v;
  for (double alpha : {0.0, 0.5, 0.9}) {
    Stream s = derive_stream(SeedSpec{kSeed}, static_cast<std::uint64_t>(alpha * 10));
    const Eigen::VectorXd f = ar1_gamma(1000000, alpha, 500, s);
    const double mean = f.mean();
    const double var = (f.array() - mean).square().mean();
    const std::string tag = "ar1(" + std::to_string(alpha).substr(0, 3) + ")";
    v.near(tag + ".mean", mean, 1.0, 0.01);
    v.near(tag + ".var", var, 1.0, 0.03);
  }
  bool weights = true, identity = true;
  for (int id = 1; id <= 4; ++id) {
    for (double pi : {0.0, 0.5, 1.0}) {
      Stream s = derive_stream(SeedSpec{kSeed}, static_cast<std::uint64_t>(100 + id));
      const auto d = simulate(dgp_preset(id, 40, 30, pi), s);
      const OracleFields o = oracle_fields(*d.latents);
      weights = weights && o.weights_nT.minCoeff() >= 0.0 && std::abs(o.weights_nT.sum() - 1.0) < 1e-10;
      const RowMatrix direct =
          (d.latents->beta0 + (d.latents->kappa + d.latents->rho) *
                                   (o.scale_y.array() / o.scale_x.array()))
              .matrix();
      identity = identity && (o.beta_it - direct).cwiseAbs().maxCoeff() < 1e-12;
    }
  }
  v.expect("weights", weights);
  v.expect("beta_it_identity", identity);
  Stream s = derive_stream(SeedSpec{kSeed}, 2000);
  const auto d = simulate(dgp_preset(1, 2000, 2000, 0.0), s);
  v.near("beta*_nT(2000)", beta_star_nT(d), 0.5, 0.02);
  return v;
}

// ---- 8: targeted-effects suite ----

Eigen::MatrixXd random_spd(std::mt19937_64& g) {
  Eigen::MatrixXd A = Eigen::MatrixXd(gaussian(2, 2, g));
  return A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(2, 2);
}

Verdict criterion8() {
  Verdict v;
  std::mt19937_64 g(8);
  std::vector<Eigen::MatrixXd> V;
  std::vector<Eigen::VectorXd> B;
  for (int k = 0; k < 400; ++k) {
    V.push_back(random_spd(g));
    B.push_back(gaussian_vec(2, g));
  }
  const ContaminationWeights cw = contamination_weights(V);
  Eigen::MatrixXd mean_lambda = Eigen::MatrixXd::Zero(2, 2);
  for (const auto& l : cw.lambda) mean_lambda += l;
  mean_lambda /= static_cast<double>(cw.lambda.size());
  v.expect("mean_identities",
           (mean_lambda - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);

  const Eigen::VectorXd star = beta_star_multi_oracle(V, B);
  Eigen::VectorXd decomposed = Eigen::VectorXd::Zero(2);
  for (std::size_t k = 0; k < V.size(); ++k) decomposed += cw.lambda[k] * B[k];
  decomposed /= static_cast<double>(V.size());
  v.expect("decomposition", (star - decomposed).cwiseAbs().maxCoeff() < 1e-10);

  std::vector<Eigen::MatrixXd> D;
  for (int k = 0; k < 50; ++k) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 0.5 + std::abs(gaussian_vec(1, g)(0));
    d(1, 1) = 0.5 + std::abs(gaussian_vec(1, g)(0));
    D.push_back(d);
  }
  bool zero_cross = true;
  for (const auto& l : contamination_weights(D).lambda) {
    zero_cross = zero_cross && l(0, 1) == 0.0 && l(1, 0) == 0.0;
  }
  v.expect("diagonal_no_contamination", zero_cross);

  double worst = 0.0, sum = 0.0;
  const int M = 50;
  for (int m = 0; m < M; ++m) {
    Stream s = derive_stream(SeedSpec{kSeed}, static_cast<std::uint64_t>(800 + m));
    std::normal_distribution<double> N(0.0, 1.0);
    RowMatrix X(200, 200), Y(200, 200);
    for (int i = 0; i < 200; ++i)
      for (int t = 0; t < 200; ++t) {
        X(i, t) = 1.0 + N(s);
        Y(i, t) = 2.0 * X(i, t) + N(s);
      }
    const double b = beta_w_estimate(PanelMatrix(Y), PanelMatrix(X), 1, RowMatrix::Ones(200, 200), 0.05);
    worst = std::max(worst, std::abs(b - 2.0));
    sum += b;
  }
  v.note("beta_w mean=" + std::to_string(sum / M));
  v.near("beta_w.max_abs_dev", worst, 0.0, 0.1);
  return v;
}

// ---- 9: determinism across worker counts ----

Verdict criterion9() {
  Verdict v;
  McCellConfig c = preset_cell(2, 24, 20, 0.5, 24, kSeed,
                               {EstimatorTag::IFE, EstimatorTag::PC_X, EstimatorTag::PC_YX,
                                EstimatorTag::CCE, EstimatorTag::TWFE, EstimatorTag::TWGFE});
  c.twgfe.G = 3;
  c.twgfe.C = 3;
  const auto csv = [&](unsigned workers) {
    c.workers = workers;
    std::ostringstream out;
    write_summary_csv(out, {run_cell(c)});
    return out.str();
  };
  const std::string w1 = csv(1), w8 = csv(8), again = csv(1);
  v.expect("workers_1_vs_8", w1 == w8);
  v.expect("rerun", w1 == again);
  v.note("bytes=" + std::to_string(w1.size()));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3,
                                                          criterion4, criterion5, criterion6,
                                                          criterion7, criterion8, criterion9};
  std::vector<int> selected;
  std::set<int> known_fail;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--known-fail" && a + 1 < argc) {
      std::istringstream in(argv[++a]);
      for (std::string tok; std::getline(in, tok, ',');) known_fail.insert(std::stoi(tok));
    } else if (arg == "--workers" && a + 1 < argc) {
      g_workers = static_cast<unsigned>(std::stoul(argv[++a]));
    } else {
      selected.push_back(std::stoi(arg));
    }
  }
  if (selected.empty()) {
    for (int k = 1; k <= 9; ++k) selected.push_back(k);
  }

  int unexpected = 0;
  for (int k : selected) {
    if (k < 1 || k > 9) {
      std::cerr << "unknown criterion " << k << '\n';
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note(std::string("error: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "CRITERION " << k << ' ' << (v.pass ? "PASS" : "FAIL")
              << (!v.pass && known_fail.count(k) ? " (known)" : "") << " [" << secs << "s]"
              << v.detail.str() << std::endl;
    if (!v.pass && !known_fail.count(k)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
