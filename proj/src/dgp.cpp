#include "panelfactor/dgp.hpp"

#include <cmath>
#include <random>

#include "panelfactor/errors.hpp"

namespace panelfactor {

namespace {

double ces10(double a, double b) {
  return std::pow(0.5 * std::pow(a, 10.0) + 0.5 * std::pow(b, 10.0), 0.1);
}

RowMatrix normal_matrix(std::size_t n, std::size_t T, Stream& stream) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(T));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index t = 0; t < m.cols(); ++t) m(i, t) = normal(stream);
  return m;
}

Eigen::VectorXd normal_vector(std::size_t n, Stream& stream) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(stream);
  return v;
}

}  // namespace

void DgpSpec::validate() const {
  if (n < 1 || T < 1) throw Error(ErrorKind::InvalidSpec, "n and T must be >= 1");
  if (!(std::abs(rho) <= 1.0)) throw Error(ErrorKind::InvalidSpec, "|rho| must be <= 1");
  if (!(pi >= 0.0 && pi <= 1.0)) throw Error(ErrorKind::InvalidSpec, "pi must lie in [0, 1]");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidAlpha, "alpha must lie in [0, 1)");
  }
  if (burn_in < 0) throw Error(ErrorKind::InvalidSpec, "burn_in must be >= 0");
  if (!std::isfinite(kappa) || !std::isfinite(beta0)) {
    throw Error(ErrorKind::InvalidSpec, "kappa and beta0 must be finite");
  }
}

DgpSpec dgp_preset(int id, std::size_t n, std::size_t T, double pi) {
  if (id < 1 || id > 4) {
    throw Error(ErrorKind::InvalidSpec, "design id must be 1, 2, 3 or 4");
  }
  DgpSpec s;
  s.n = n;
  s.T = T;
  s.pi = pi;
  s.kappa = id <= 2 ? 0.0 : 0.5;
  s.rho = id <= 2 ? 0.5 : 0.0;
  s.location_family = id % 2 == 1 ? LocationFamily::LFM : LocationFamily::NLFM;
  s.validate();
  return s;
}

std::string to_string(LocationFamily family) {
  return family == LocationFamily::LFM ? "LFM" : "NLFM";
}

Eigen::VectorXd ar1_gamma(std::size_t T, double alpha, long burn_in, Stream& stream) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidAlpha, "alpha must lie in [0, 1)");
  }
  if (T < 1 || burn_in < 0) throw Error(ErrorKind::InvalidArgument, "need T >= 1, burn_in >= 0");
  const double shape = (1.0 - alpha) * (1.0 - alpha) / (1.0 - alpha * alpha);
  const double scale = (1.0 - alpha * alpha) / (1.0 - alpha);
  std::gamma_distribution<double> innovation(shape, scale);
  double f = 1.0;
  for (long s = 0; s < burn_in; ++s) f = alpha * f + innovation(stream);
  Eigen::VectorXd out(static_cast<Eigen::Index>(T));
  for (Eigen::Index t = 0; t < out.size(); ++t) {
    f = alpha * f + innovation(stream);
    out(t) = f;
  }
  return out;
}

PanelDataset simulate(const DgpSpec& spec, Stream& stream) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto T = static_cast<Eigen::Index>(spec.T);
  LatentDraws lat;
  std::gamma_distribution<double> gamma11(1.0, 1.0);
  lat.lambda_plus.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) lat.lambda_plus(i) = gamma11(stream);
  lat.lambda_x.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) lat.lambda_x(i) = gamma11(stream);
  lat.f_plus = ar1_gamma(spec.T, spec.alpha, spec.burn_in, stream);
  lat.f_x = ar1_gamma(spec.T, spec.alpha, spec.burn_in, stream);
  lat.eps_x = normal_matrix(spec.n, spec.T, stream);
  lat.u = normal_matrix(spec.n, spec.T, stream);
  lat.pi = spec.pi;
  lat.kappa = spec.kappa;
  lat.rho = spec.rho;
  lat.beta0 = spec.beta0;

  const Eigen::VectorXd lambda = spec.pi * lat.lambda_plus + (1.0 - spec.pi) * lat.lambda_x;
  const Eigen::VectorXd f = spec.pi * lat.f_plus + (1.0 - spec.pi) * lat.f_x;
  const double noise_weight = std::sqrt(1.0 - spec.rho * spec.rho);
  RowMatrix Y(n, T);
  RowMatrix X(n, T);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < T; ++t) {
      const double s_y = lambda(i) + f(t);
      const double s_x = lat.lambda_x(i) + lat.f_x(t);
      double l_y = 0.0;
      double l_x = 0.0;
      if (spec.location_family == LocationFamily::LFM) {
        l_y = lambda(i) * f(t);
        l_x = lat.lambda_x(i) * lat.f_x(t);
      } else {
        l_y = ces10(lambda(i), f(t));
        l_x = ces10(lat.lambda_x(i), lat.f_x(t));
      }
      const double gamma = spec.beta0 + spec.kappa * s_y * s_x / (s_x * s_x);
      const double eps = spec.rho * lat.eps_x(i, t) + noise_weight * lat.u(i, t);
      X(i, t) = l_x + s_x * lat.eps_x(i, t);
      Y(i, t) = gamma * X(i, t) + l_y + s_y * eps;
    }
  }
  std::vector<PanelMatrix> xs;
  xs.emplace_back(std::move(X));
  return PanelDataset(PanelMatrix(std::move(Y)), std::move(xs), std::move(lat));
}

OracleFields oracle_fields(const LatentDraws& lat) {
  const Eigen::Index n = lat.lambda_x.size();
  const Eigen::Index T = lat.f_x.size();
  const Eigen::VectorXd lambda = lat.pi * lat.lambda_plus + (1.0 - lat.pi) * lat.lambda_x;
  const Eigen::VectorXd f = lat.pi * lat.f_plus + (1.0 - lat.pi) * lat.f_x;
  OracleFields o;
  o.scale_y.resize(n, T);
  o.scale_x.resize(n, T);
  o.gamma_it.resize(n, T);
  o.var_x_cond.resize(n, T);
  o.cov_yx_cond.resize(n, T);
  o.beta_it.resize(n, T);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < T; ++t) {
      const double s_y = lambda(i) + f(t);
      const double s_x = lat.lambda_x(i) + lat.f_x(t);
      const double gamma = lat.beta0 + lat.kappa * s_y * s_x / (s_x * s_x);
      o.scale_y(i, t) = s_y;
      o.scale_x(i, t) = s_x;
      o.gamma_it(i, t) = gamma;
      o.var_x_cond(i, t) = s_x * s_x;
      o.cov_yx_cond(i, t) = gamma * s_x * s_x + lat.rho * s_y * s_x;
      o.beta_it(i, t) = o.cov_yx_cond(i, t) / o.var_x_cond(i, t);
    }
  }
  o.weights_nT = o.var_x_cond / o.var_x_cond.sum();
  return o;
}

double beta_star_analytic(const DgpSpec& spec) {
  return spec.beta0 + (spec.kappa + spec.rho) * (6.0 - 4.0 * spec.pi) / 6.0;
}

double beta_star_moment(const DgpSpec& spec) {
  // E[s_x^2] = Var + mean^2 = 2 + 4; E[s_y s_x] = 2 E[lambda lambda_x] + 2 = 2(2 - pi) + 2.
  return spec.beta0 + (spec.kappa + spec.rho) * (6.0 - 2.0 * spec.pi) / 6.0;
}

double beta_star_nT(const PanelDataset& dataset) {
  if (!dataset.latents) {
    throw Error(ErrorKind::MissingLatents, "dataset carries no latent draws");
  }
  const OracleFields o = oracle_fields(*dataset.latents);
  return o.cov_yx_cond.sum() / o.var_x_cond.sum();
}

CounterexamplePanel counterexample_simulate(std::size_t n, std::size_t T, Stream& stream) {
  if (n < 2 || T < 2) throw Error(ErrorKind::InvalidSpec, "counterexample needs n, T >= 2");
  const Eigen::VectorXd lambda = normal_vector(n, stream);
  const Eigen::VectorXd z = normal_vector(T, stream);
  const Eigen::VectorXd eta = normal_vector(n, stream);
  const Eigen::VectorXd kappa = normal_vector(n, stream);
  const RowMatrix eps = normal_matrix(n, T, stream);
  const RowMatrix nu = normal_matrix(n, T, stream);
  const RowMatrix common = lambda * z.transpose();
  RowMatrix Y = common + eps;
  RowMatrix X = common + nu;
  Y.colwise() += eta;
  X.colwise() += kappa;
  CounterexamplePanel out;
  std::vector<PanelMatrix> xs;
  xs.emplace_back(std::move(X));
  out.data = PanelDataset(PanelMatrix(std::move(Y)), std::move(xs));
  return out;
}

}  // namespace panelfactor
