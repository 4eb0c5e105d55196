#include "todalab/bounds.hpp"

#include <cmath>
#include <string>

#include "todalab/error.hpp"

namespace todalab {

namespace {

void require_mu(double mu, const char* who) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw domain_error(std::string(who) + ": mu must be a finite positive number");
  }
}

}  // namespace

double decay_factor(double mu) {
  require_mu(mu, "decay_factor");
  return std::exp(mu + 1.0) + 1.0 / mu;
}

OptimalMu optimal_mu() {
  // phi(mu) = mu + 1 + 2 ln mu vanishes exactly where mu^2 e^{mu+1} = 1.
  auto phi = [](double m) { return m + 1.0 + 2.0 * std::log(m); };
  double lo = 0.1, hi = 1.0;  // phi(lo) < 0 < phi(hi)
  double mu = 0.5;
  for (int it = 0; it < 100; ++it) {
    const double val = phi(mu);
    if (val < 0.0) lo = mu; else hi = mu;
    double next = mu - val / (1.0 + 2.0 / mu);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - mu) <= 1e-12 * mu) {
      mu = next;
      break;
    }
    mu = next;
  }
  return {mu, decay_factor(mu)};
}

double velocity_toda(double mu, double lnorm) {
  require_mu(mu, "velocity_toda");
  if (!(lnorm >= 0.0)) throw domain_error("velocity_toda: ||L|| must be >= 0");
  return (1.0 + std::sqrt(17.0)) * lnorm * decay_factor(mu);
}

double toda_prefactor() { return 8.0 / std::sqrt(17.0); }

double velocity_perturbed(double mu, double c1, double c2, double w2_norm) {
  require_mu(mu, "velocity_perturbed");
  if (!(c1 > 0.0)) throw domain_error("velocity_perturbed: C1 must be > 0");
  if (!(c2 >= 0.0) || !(w2_norm >= 0.0)) {
    throw domain_error("velocity_perturbed: C2 and ||W''|| must be >= 0");
  }
  return (1.0 + std::sqrt(17.0 + 4.0 * c2 * w2_norm / c1)) * c1 * decay_factor(mu);
}

double perturbed_prefactor(double c1, double c2, double w2_norm) {
  if (!(c1 > 0.0)) throw domain_error("perturbed_prefactor: C1 must be > 0");
  const double alpha = 4.0 + c2 * w2_norm / c1;
  return 2.0 * alpha / std::sqrt(1.0 + 4.0 * alpha);
}

double mat_inf_norm(const Mat2& m) {
  return std::max(std::fabs(m[0][0]) + std::fabs(m[0][1]),
                  std::fabs(m[1][0]) + std::fabs(m[1][1]));
}

Mat2 path_matrix(int j) {
  const PathCounts pc = path_counts(j + 1);
  const double eta = static_cast<double>(pc.eta);
  const double xi = static_cast<double>(pc.xi);
  return {{{2.0 * eta, 2.0 * eta}, {4.0 * xi, 4.0 * xi}}};
}

Mat2 hierarchy_matrix(double lnorm, const HierarchySpec& spec) {
  spec.validate();
  Mat2 d{{{0.0, 0.0}, {0.0, 0.0}}};
  for (int j = 0; j <= spec.r; ++j) {
    const double w = std::fabs(spec.c[spec.r - j]) * std::pow(lnorm, j);
    if (w == 0.0) continue;
    const Mat2 p = path_matrix(j);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) d[r][c] += w * p[r][c];
    }
  }
  return d;
}

double velocity_hierarchy(double mu, double lnorm, const HierarchySpec& spec,
                          HierarchyVelocityMode mode) {
  require_mu(mu, "velocity_hierarchy");
  spec.validate();
  if (mode == HierarchyVelocityMode::kMatrixNorm) {
    return mat_inf_norm(hierarchy_matrix(lnorm, spec)) * lnorm * decay_factor(mu);
  }
  double sum = 0.0;
  for (int j = 0; j <= spec.r; ++j) {
    sum += std::fabs(spec.c[spec.r - j]) * std::pow(lnorm, j + 1) * (j + 2) *
           std::pow(3.0, j);
  }
  return 8.0 * decay_factor(mu) * sum;
}

double velocity_perturbed_hierarchy(double mu, double c1, double c2, double w2_norm,
                                    const HierarchySpec& spec) {
  require_mu(mu, "velocity_perturbed_hierarchy");
  spec.validate();
  Mat2 d{{{0.0, 0.0}, {0.0, 0.0}}};
  for (int j = 0; j <= spec.r; ++j) {
    const double w = std::fabs(spec.c[spec.r - j]) * std::pow(c1, j + 1);
    if (w == 0.0) continue;
    const Mat2 p = path_matrix(j);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) d[r][c] += w * p[r][c];
    }
  }
  d[1][0] += 2.0 * c2 * w2_norm;
  return mat_inf_norm(d) * decay_factor(mu);
}

long hierarchy_distance(long d, int r) {
  const long span = r / 2 + 1;
  d = std::labs(d);
  return (d + span - 1) / span;
}

std::array<double, 4> timedep_h_coefficients(double lnorm, double w1_norm, double w2_norm) {
  return {0.0, 2.0 * (1.0 + w2_norm / 4.0 + lnorm * lnorm), 2.0 * lnorm * w1_norm,
          2.0 * w1_norm * w1_norm / 3.0};
}

double velocity_timedep(double t, double mu, double lnorm, double w1_norm, double w2_norm) {
  const auto c = timedep_h_coefficients(lnorm, w1_norm, w2_norm);
  const double T = std::fabs(t);
  return ((c[3] * T + c[2]) * T + c[1]) * T * decay_factor(mu);
}

double G_mu(double mu, long k) {
  const double ak = static_cast<double>(std::labs(k));
  return std::exp(-mu * ak) / ((1.0 + ak) * (1.0 + ak));
}

double gamma_const() {
  const long M = 100000;
  double s = 0.0;
  for (long m = M; m >= 2; --m) s += 1.0 / (static_cast<double>(m) * m);
  const double x = static_cast<double>(M);
  s += 1.0 / x - 0.5 / (x * x) + 1.0 / (6.0 * x * x * x) - 1.0 / (30.0 * std::pow(x, 5));
  return 4.0 * (1.0 + 2.0 * s);
}

double C_epsilon(double eps) {
  if (!(eps > 0.0)) throw domain_error("C_epsilon: eps must be > 0");
  const double x = 2.0 / eps - 1.0;
  if (x <= 0.0) return 1.0;
  return (1.0 + x) * (1.0 + x) * std::exp(-eps * x);
}

ConvolutionReport check_G_convolution(double mu, long max_sep, long range) {
  require_mu(mu, "check_G_convolution");
  if (max_sep < 0) throw invalid_argument("check_G_convolution: max_sep must be >= 0");
  if (range < 10 * std::max(1L, max_sep)) {
    throw invalid_argument("check_G_convolution: range must be at least 10x the separation");
  }
  const double gamma = gamma_const();
  ConvolutionReport rep;
  for (long s = 0; s <= max_sep; ++s) {
    double sum = 0.0;
    for (long l = -range; l <= range; ++l) sum += G_mu(mu, s - l) * G_mu(mu, l);
    const double ratio = sum / G_mu(mu, s);
    rep.ratio_by_separation.push_back(ratio);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst_separation = s;
    }
  }
  rep.within_gamma = rep.max_ratio <= gamma * (1.0 + 1e-12);
  return rep;
}

double second_derivative_eigenvalue(double mu) {
  const double e = std::exp(2.0 * mu) + 1.0;
  return 1.0 + std::sqrt(1.0 + 4.0 * e * e);
}

double h_growth_beta(double mu, double v, double lnorm) {
  require_mu(mu, "h_growth_beta");
  if (!(v > 0.0)) throw domain_error("h_growth_beta: v must be > 0");
  return lnorm * second_derivative_eigenvalue(mu) / (2.0 * mu * v) - 1.0;
}

double h_growth_raw(double t, double rate, double beta) {
  const double base = rate * std::fabs(t);
  const double x = base * beta;
  if (x == 0.0) return base;
  return base * std::expm1(x) / x;
}

double h_growth(double t, double mu, double v, double lnorm) {
  return h_growth_raw(t, 2.0 * mu * v, h_growth_beta(mu, v, lnorm));
}

double interpolation_velocity_star(double c1, double mu, double eps) {
  return (1.0 + std::sqrt(17.0)) * 3.0 * c1 * decay_factor(mu + eps);
}

double observables_prefactor(double mu) {
  require_mu(mu, "observables_prefactor");
  return 2.0 / std::sqrt(17.0) * (1.0 + std::exp(mu));
}

double velocity_ghs(double mu, double c) { return 2.0 * c * decay_factor(mu); }

}  // namespace todalab
