#include "todalab/soliton.hpp"

#include <cmath>

#include "todalab/error.hpp"

namespace todalab {

namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double exponent(const SolitonSpec& s, double x, double t) {
  return -2.0 * s.kappa * x + s.sign * 2.0 * std::sinh(s.kappa) * t + s.delta;
}

}  // namespace

void SolitonSpec::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw invalid_argument("soliton: kappa must be a finite positive number");
  }
  if (sign != 1 && sign != -1) throw invalid_argument("soliton: sign must be +1 or -1");
  if (!std::isfinite(q) || !std::isfinite(delta)) {
    throw invalid_argument("soliton: q and delta must be finite");
  }
}

FlaschkaPair soliton_flaschka(const SolitonSpec& s, long n, double t) {
  s.validate();
  const double zm = exponent(s, n - 1.0, t);
  const double z0 = exponent(s, static_cast<double>(n), t);
  const double zp = exponent(s, n + 1.0, t);
  const double a = 0.5 * std::exp(0.5 * (softplus(zm) + softplus(zp)) - softplus(z0));
  const double b = s.sign * std::sinh(s.kappa) * (logistic(z0) - logistic(zm));
  return {a, b};
}

FlaschkaPair soliton_flaschka_dot(const SolitonSpec& s, long n, double t) {
  s.validate();
  const double zdot = s.sign * 2.0 * std::sinh(s.kappa);
  const double zm = exponent(s, n - 1.0, t);
  const double z0 = exponent(s, static_cast<double>(n), t);
  const double zp = exponent(s, n + 1.0, t);
  const double a = soliton_flaschka(s, n, t).a;
  const double da = a * (0.5 * (logistic(zm) + logistic(zp)) - logistic(z0)) * zdot;
  auto dlogistic = [](double z) {
    const double sg = logistic(z);
    return sg * (1.0 - sg);
  };
  const double db = s.sign * std::sinh(s.kappa) * (dlogistic(z0) - dlogistic(zm)) * zdot;
  return {da, db};
}

PQPair soliton_pq(const SolitonSpec& s, long n, double t) {
  s.validate();
  const double zm = exponent(s, n - 1.0, t);
  const double z0 = exponent(s, static_cast<double>(n), t);
  const double q = s.q - (softplus(z0) - softplus(zm));
  const double p = s.sign * 2.0 * std::sinh(s.kappa) * (logistic(zm) - logistic(z0));
  return {q, p};
}

double soliton_speed(const SolitonSpec& s) {
  s.validate();
  return std::sinh(s.kappa) / s.kappa;
}

double soliton_Lnorm(const SolitonSpec& s) {
  s.validate();
  return std::cosh(s.kappa);
}

LatticeState soliton_state(const SolitonSpec& s, std::size_t n, long offset, double t) {
  LatticeState st = LatticeState::background(n, offset);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ab = soliton_flaschka(s, offset + static_cast<long>(i), t);
    st.a[i] = ab.a;
    st.b[i] = ab.b;
  }
  return st;
}

PQState soliton_pq_state(const SolitonSpec& s, std::size_t n, long offset, double t) {
  PQState st;
  st.offset = offset;
  st.q.resize(n);
  st.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto qp = soliton_pq(s, offset + static_cast<long>(i), t);
    st.q[i] = qp.q;
    st.p[i] = qp.p;
  }
  return st;
}

}  // namespace todalab
