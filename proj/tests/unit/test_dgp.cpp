#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "panelfactor/dgp.hpp"
#include "panelfactor/errors.hpp"
#include "util.hpp"

using namespace panelfactor;

namespace {

struct Moments {
  double mean = 0.0, var = 0.0;
};

Moments moments(const Eigen::VectorXd& v) {
  Moments m;
  m.mean = v.mean();
  m.var = (v.array() - m.mean).square().mean();
  return m;
}

}  // namespace

TEST_CASE("ar1_gamma with alpha = 0 is i.i.d. unit exponential") {
  Stream s = derive_stream(SeedSpec{1}, 0);
  const Eigen::VectorXd f = ar1_gamma(200000, 0.0, 0, s);
  const auto m = moments(f);
  CHECK(std::abs(m.mean - 1.0) < 0.01);
  CHECK(std::abs(m.var - 1.0) < 0.03);
  const double tail = (f.array() > 1.0).cast<double>().mean();
  CHECK(std::abs(tail - std::exp(-1.0)) < 0.005);
  // no serial correlation
  const Eigen::VectorXd c = f.array() - m.mean;
  const double lag1 = c.head(c.size() - 1).dot(c.tail(c.size() - 1)) / c.squaredNorm();
  CHECK(std::abs(lag1) < 0.01);
}

TEST_CASE("ar1_gamma stationary moments at alpha = 0.5") {
  Stream s = derive_stream(SeedSpec{2}, 0);
  const auto m = moments(ar1_gamma(100000, 0.5, 500, s));
  CHECK(std::abs(m.mean - 1.0) < 0.02);
  CHECK(std::abs(m.var - 1.0) < 0.05);
}

TEST_CASE("ar1_gamma determinism and argument checks") {
  Stream a = derive_stream(SeedSpec{3}, 4), b = derive_stream(SeedSpec{3}, 4);
  CHECK(ar1_gamma(50, 0.5, 500, a) == ar1_gamma(50, 0.5, 500, b));
  Stream s = derive_stream(SeedSpec{3}, 0);
  for (double alpha : {-0.3, 1.0, 1.5}) {
    try {
      ar1_gamma(10, alpha, 10, s);
      FAIL("expected InvalidAlpha");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidAlpha);
    }
  }
}

TEST_CASE("simulate determinism") {
  const DgpSpec spec = dgp_preset(2, 20, 15, 0.5);
  Stream a = derive_stream(SeedSpec{5}, 0), b = derive_stream(SeedSpec{5}, 0);
  const auto d1 = simulate(spec, a), d2 = simulate(spec, b);
  CHECK(d1.Y.values() == d2.Y.values());
  CHECK(d1.X[0].values() == d2.X[0].values());
}

TEST_CASE("LFM regressor mean is one") {
  for (double pi : {0.0, 0.5}) {
    Stream s = derive_stream(SeedSpec{6}, 0);
    const auto d = simulate(dgp_preset(1, 2000, 2000, pi), s);
    CHECK(std::abs(d.X[0].values().mean() - 1.0) < 0.05);
  }
}

TEST_CASE("homogeneous design: beta_it constant") {
  DgpSpec spec = dgp_preset(1, 30, 20, 0.5);
  spec.kappa = 0.0;
  spec.rho = 0.0;
  spec.beta0 = 1.25;
  Stream s = derive_stream(SeedSpec{7}, 0);
  const auto d = simulate(spec, s);
  const auto o = oracle_fields(*d.latents);
  CHECK((o.beta_it.array() - 1.25).abs().maxCoeff() < 1e-14);
}

TEST_CASE("beta_star closed forms") {
  CHECK(beta_star_analytic(dgp_preset(1, 10, 10, 0.0)) == doctest::Approx(0.5));
  CHECK(beta_star_analytic(dgp_preset(3, 10, 10, 0.5)) == doctest::Approx(1.0 / 3.0));
  DgpSpec zero = dgp_preset(1, 10, 10, 0.0);
  zero.rho = 0.0;
  for (double pi : {0.0, 0.3, 0.5, 1.0}) {
    zero.pi = pi;
    CHECK(beta_star_analytic(zero) == 0.0);
  }
  CHECK(beta_star_moment(dgp_preset(1, 10, 10, 0.5)) == doctest::Approx(5.0 / 12.0));
  CHECK(beta_star_moment(dgp_preset(1, 10, 10, 0.0)) == beta_star_analytic(dgp_preset(1, 10, 10, 0.0)));
}

TEST_CASE("beta_star_nT with degenerate latents") {
  LatentDraws lat;
  lat.lambda_plus = Eigen::VectorXd::Constant(4, 1.0);
  lat.lambda_x = Eigen::VectorXd::Constant(4, 0.5);
  lat.f_plus = Eigen::VectorXd::Constant(3, 1.0);
  lat.f_x = Eigen::VectorXd::Constant(3, 0.5);
  lat.eps_x = RowMatrix::Zero(4, 3);
  lat.u = RowMatrix::Zero(4, 3);
  lat.pi = 1.0;  // s_y = 2, s_x = 1
  lat.kappa = 0.5;
  lat.rho = 0.25;
  lat.beta0 = 0.1;
  PanelDataset d(PanelMatrix::zeros(4, 3), {PanelMatrix::zeros(4, 3)}, lat);
  // ratio of sums, so equal up to rounding
  CHECK(std::abs(beta_star_nT(d) - (0.1 + 2.0 * (0.5 + 0.25))) < 1e-14);

  PanelDataset bare(PanelMatrix::zeros(4, 3), {PanelMatrix::zeros(4, 3)});
  try {
    beta_star_nT(bare);
    FAIL("expected MissingLatents");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingLatents);
  }
}

TEST_CASE("weights and beta_it identity on simulated data") {
  for (int id = 1; id <= 4; ++id) {
    for (double pi : {0.0, 0.5, 1.0}) {
      Stream s = derive_stream(SeedSpec{8}, static_cast<std::uint64_t>(id));
      const DgpSpec spec = dgp_preset(id, 40, 30, pi);
      const auto d = simulate(spec, s);
      const auto o = oracle_fields(*d.latents);
      CHECK(o.weights_nT.minCoeff() >= 0.0);
      CHECK(std::abs(o.weights_nT.sum() - 1.0) < 1e-10);
      const RowMatrix expected =
          (spec.beta0 + (spec.kappa + spec.rho) * o.scale_y.array() / o.scale_x.array()).matrix();
      CHECK((o.beta_it - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("mixture moments") {
  Stream s = derive_stream(SeedSpec{9}, 0);
  const auto d0 = simulate(dgp_preset(1, 10000, 2, 0.0), s);
  const auto o0 = oracle_fields(*d0.latents);
  // at pi = 0 the outcome scale uses lambda_x itself
  const Eigen::VectorXd lam0 = o0.scale_y.col(0).array() - d0.latents->f_x(0);
  CHECK((lam0 - d0.latents->lambda_x).cwiseAbs().maxCoeff() < 1e-12);

  Stream s1 = derive_stream(SeedSpec{9}, 1);
  const auto d1 = simulate(dgp_preset(1, 10000, 2, 1.0), s1);
  const Eigen::VectorXd a = d1.latents->lambda_plus.array() - d1.latents->lambda_plus.mean();
  const Eigen::VectorXd b = d1.latents->lambda_x.array() - d1.latents->lambda_x.mean();
  CHECK(std::abs(a.dot(b) / (a.norm() * b.norm())) < 0.05);
}

TEST_CASE("beta_star_nT law of large numbers at pi = 0") {
  Stream s = derive_stream(SeedSpec{10}, 0);
  const auto d = simulate(dgp_preset(1, 2000, 2000, 0.0), s);
  CHECK(std::abs(beta_star_nT(d) - 0.5) < 0.02);
}

TEST_CASE("counterexample design") {
  Stream s = derive_stream(SeedSpec{11}, 0);
  const auto cp = counterexample_simulate(30, 20, s);
  CHECK(cp.beta_it == 0.0);
  CHECK(cp.plim_twfe == 0.5);
  CHECK(cp.data.K() == 1);
  CHECK(cp.data.n() == 30);
  CHECK_THROWS_AS(counterexample_simulate(1, 5, s), Error);
}

TEST_CASE("DgpSpec validation") {
  DgpSpec s;
  s.pi = 1.5;
  CHECK_THROWS_AS(s.validate(), Error);
  s.pi = 0.5;
  s.rho = 2.0;
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_THROWS_AS(dgp_preset(5, 10, 10, 0.0), Error);
  CHECK(to_string(dgp_preset(2, 10, 10, 0.0).location_family) == "NLFM");
}
