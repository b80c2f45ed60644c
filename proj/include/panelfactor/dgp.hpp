#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>

#include "panelfactor/panel.hpp"
#include "panelfactor/random.hpp"

namespace panelfactor {

enum class LocationFamily { LFM, NLFM };

/// Location-scale factor design:
///   Y = gamma X + l_y(lambda_i, f_t) + s_y eps,  X = l_x(lambda_ix, f_tx) + s_x eps_x,
///   eps = rho eps_x + sqrt(1 - rho^2) u,  gamma = beta0 + kappa s_y / s_x,
/// with s_y = lambda_i + f_t, s_x = lambda_ix + f_tx and
/// lambda_i = pi lambda_i^+ + (1 - pi) lambda_ix, f_t = pi f_t^+ + (1 - pi) f_tx.
struct DgpSpec {
  std::size_t n = 50;
  std::size_t T = 50;
  double kappa = 0.0;
  double rho = 0.5;
  double pi = 0.0;
  double alpha = 0.5;
  double beta0 = 0.0;
  LocationFamily location_family = LocationFamily::LFM;
  long burn_in = 500;

  // Throws InvalidSpec / InvalidAlpha.
  void validate() const;
};

/// Designs 1-4: (kappa, rho) = (0, 0.5) for 1-2 and (0.5, 0) for 3-4; odd ids
/// use the linear location family, even ids the CES one. alpha = 0.5, beta0 = 0.
DgpSpec dgp_preset(int id, std::size_t n, std::size_t T, double pi);

std::string to_string(LocationFamily family);

/// Non-negative AR(1) with Gamma innovations, stationary mean 1 and variance 1.
/// Started at 1, run `burn_in` discarded steps, returns the next T values.
Eigen::VectorXd ar1_gamma(std::size_t T, double alpha, long burn_in, Stream& stream);

PanelDataset simulate(const DgpSpec& spec, Stream& stream);

struct OracleFields {
  RowMatrix beta_it;      // cov_yx_cond / var_x_cond
  RowMatrix var_x_cond;   // s_x^2
  RowMatrix cov_yx_cond;  // gamma s_x^2 + rho s_y s_x
  RowMatrix weights_nT;   // var_x_cond / sum(var_x_cond)
  RowMatrix gamma_it;
  RowMatrix scale_y;      // s_y
  RowMatrix scale_x;      // s_x
};

OracleFields oracle_fields(const LatentDraws& latents);

/// beta0 + (kappa + rho)(6 - 4 pi)/6, the closed form tabulated with the
/// reference Monte Carlo tables.
double beta_star_analytic(const DgpSpec& spec);

/// beta0 + (kappa + rho) E[s_y s_x] / E[s_x^2] evaluated from the stationary
/// Gamma moments, which gives (6 - 2 pi)/6. Agrees with beta_star_analytic at pi = 0.
double beta_star_moment(const DgpSpec& spec);

/// Finite-population estimand sum(cov_yx_cond) / sum(var_x_cond) from the
/// realized latents. Throws MissingLatents.
double beta_star_nT(const PanelDataset& dataset);

/// One-factor counterexample: Y = eta_i + lambda_i z_t + eps, X = kappa_i + lambda_i z_t + nu,
/// all components i.i.d. standard normal. beta_it = 0, while two-way demeaning
/// and CCE both converge to 1/2.
struct CounterexamplePanel {
  PanelDataset data;
  double beta_it = 0.0;
  double plim_twfe = 0.5;
  double plim_cce = 0.5;
};

CounterexamplePanel counterexample_simulate(std::size_t n, std::size_t T, Stream& stream);

}  // namespace panelfactor
