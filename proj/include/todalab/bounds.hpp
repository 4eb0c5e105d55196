#pragma once

#include <array>

#include "todalab/hierarchy.hpp"

namespace todalab {

// e^{mu+1} + 1/mu, the factor shared by every velocity formula.
double decay_factor(double mu);

struct OptimalMu {
  double mu;
  double f;  // decay_factor(mu)
};

// Minimizer of decay_factor: the root of mu^2 e^{mu+1} = 1, i.e. 2 W(1/(2 sqrt e)).
OptimalMu optimal_mu();

// (1 + sqrt 17) ||L(0)|| (e^{mu+1} + 1/mu).
double velocity_toda(double mu, double lnorm);
// 8 / sqrt 17.
double toda_prefactor();

// (1 + sqrt(17 + 4 C2 ||W''|| / C1)) C1 (e^{mu+1} + 1/mu).
double velocity_perturbed(double mu, double c1, double c2, double w2_norm);
// 2 alpha / sqrt(1 + 4 alpha) with alpha = 4 + C2 ||W''|| / C1.
double perturbed_prefactor(double c1, double c2, double w2_norm);

enum class HierarchyVelocityMode { kMatrixNorm, kClosedForm };

using Mat2 = std::array<std::array<double, 2>, 2>;

double mat_inf_norm(const Mat2& m);
// Path-count matrix attached to the power j + 1 term of the hierarchy field.
Mat2 path_matrix(int j);
// D(r) = Σ_j |c_{r-j}| ||L||^j D^(j).
Mat2 hierarchy_matrix(double lnorm, const HierarchySpec& spec);

double velocity_hierarchy(double mu, double lnorm, const HierarchySpec& spec,
                          HierarchyVelocityMode mode);

// ||D_r^w|| (e^{mu+1} + 1/mu) with weights C1^{j+1} |c_{r-j}| and the forcing
// block C2 ||W''||.
double velocity_perturbed_hierarchy(double mu, double c1, double c2, double w2_norm,
                                    const HierarchySpec& spec);

// Spatial rescaling ceil(d / (floor(r/2) + 1)).
long hierarchy_distance(long d, int r);

// h(t)(e^{mu+1} + 1/mu) with h(t) = 2 ∫_0^|t| 1 + (||L|| + ||W'|| s)^2 + ||W''||/4 ds.
double velocity_timedep(double t, double mu, double lnorm, double w1_norm, double w2_norm);
// Polynomial coefficients of h(t) in |t| (constant term is 0).
std::array<double, 4> timedep_h_coefficients(double lnorm, double w1_norm, double w2_norm);

double G_mu(double mu, long k);
// 4 Σ_{k in Z} (1 + |k|)^{-2}.
double gamma_const();
// sup_x (1 + |x|)^2 e^{-eps |x|}.
double C_epsilon(double eps);

struct ConvolutionReport {
  double max_ratio = 0.0;  // max over (j, k) of Σ_l G(j-l) G(l-k) / G(j-k)
  long worst_separation = 0;
  std::vector<double> ratio_by_separation;  // index |j - k|
  bool within_gamma = true;
};

// Checks Σ_l G(j-l) G(l-k) <= gamma G(j-k) for 0 <= |j-k| <= max_sep, with the
// l-sum truncated to |l| <= range (must be >= 10 max_sep).
ConvolutionReport check_G_convolution(double mu, long max_sep, long range);

// Largest eigenvalue of [[2, e^{2mu}+1], [4(e^{2mu}+1), 0]]:
// 1 + sqrt(1 + 4 (e^{2mu}+1)^2).
double second_derivative_eigenvalue(double mu);
// beta = ||L|| lambda_+ / (2 mu v) - 1.
double h_growth_beta(double mu, double v, double lnorm);
// (e^{rate beta |t|} - 1) / beta, with the limit rate |t| at beta = 0.
double h_growth_raw(double t, double rate, double beta);
// h_growth_raw with rate 2 mu v.
double h_growth(double t, double mu, double v, double lnorm);

// v* = (1 + sqrt 17) 3 C1 (e^{mu+eps+1} + 1/(mu+eps)).
double interpolation_velocity_star(double c1, double mu, double eps);

// (2 / sqrt 17)(1 + e^mu).
double observables_prefactor(double mu);

// 2 C (e^{mu+1} + 1/mu).
double velocity_ghs(double mu, double c);

}  // namespace todalab
