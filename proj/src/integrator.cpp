#include "todalab/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "todalab/error.hpp"

namespace todalab {

void IntegratorConfig::validate() const {
  if (method == Method::kRk4Fixed && !(step > 0.0 && std::isfinite(step))) {
    throw config_error("integrator: step must be > 0");
  }
  if (method == Method::kRkAdaptive && !(tolerance > 0.0 && std::isfinite(tolerance))) {
    throw config_error("integrator: tolerance must be > 0");
  }
  if (!(max_step > 0.0)) throw config_error("integrator: max_step must be > 0");
}

Method IntegratorConfig::parse_method(const std::string& name) {
  if (name == "rk4-fixed") return Method::kRk4Fixed;
  if (name == "rk-adaptive") return Method::kRkAdaptive;
  throw config_error("integrator: unknown method '" + name +
                     "' (expected rk4-fixed or rk-adaptive)");
}

std::string IntegratorConfig::method_name(Method m) {
  return m == Method::kRk4Fixed ? "rk4-fixed" : "rk-adaptive";
}

std::vector<double> sample_times(double t_final, double dt) {
  if (!(t_final > 0.0) || !(dt > 0.0)) {
    throw config_error("sample times: t_final and sample_dt must be > 0");
  }
  const long n = std::max(1L, std::lround(std::ceil(t_final / dt - 1e-9)));
  std::vector<double> t(n + 1);
  for (long i = 0; i <= n; ++i) t[i] = std::min(t_final, dt * static_cast<double>(i));
  t[n] = t_final;
  return t;
}

namespace {

void check_finite(const std::vector<double>& y, double t) {
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw numerical_error("integrator: non-finite state at t = " + std::to_string(t));
    }
  }
}

class Rk4 {
 public:
  explicit Rk4(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}

  void step(const OdeRhs& f, double t, double h, std::vector<double>& y) {
    const std::size_t n = y.size();
    f(t, y.data(), k1.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp.data(), k2.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp.data(), k3.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    f(t + h, tmp.data(), k4.data());
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }

 private:
  std::vector<double> k1, k2, k3, k4, tmp;
};

// Dormand-Prince 5(4) with first-same-as-last reuse.
class Dopri5 {
 public:
  explicit Dopri5(std::size_t n)
      : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n) {}

  // Attempts one step; returns the scaled error norm. On acceptance the caller
  // swaps in `ynew` and `k7`.
  double attempt(const OdeRhs& f, double t, double h, const std::vector<double>& y,
                 double tol) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a21 * k1[i]);
    f(t + c2 * h, tmp.data(), k2.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, tmp.data(), k3.data());
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    }
    f(t + c4 * h, tmp.data(), k4.data());
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    f(t + c5 * h, tmp.data(), k5.data());
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                           a65 * k5[i]);
    }
    f(t + h, tmp.data(), k6.data());
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    f(t + h, ynew.data(), k7.data());
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                            e6 * k6[i] + e7 * k7[i]);
      const double scale = tol * (1.0 + std::max(std::fabs(y[i]), std::fabs(ynew[i])));
      err = std::max(err, std::fabs(e) / scale);
    }
    return std::isfinite(err) ? err : 1e300;
  }

  std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;

 private:
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace

OdeSolution integrate_ode(const OdeRhs& f, std::vector<double> y,
                          const std::vector<double>& times,
                          const IntegratorConfig& cfg) {
  cfg.validate();
  if (times.empty()) throw invalid_argument("integrate_ode: no sample times");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] >= times[i - 1])) {
      throw invalid_argument("integrate_ode: sample times must be non-decreasing");
    }
  }
  check_finite(y, times.front());
  OdeSolution sol;
  sol.times = times;
  sol.states.reserve(times.size());
  sol.states.push_back(y);
  double t = times.front();

  if (cfg.method == Method::kRk4Fixed) {
    Rk4 rk(y.size());
    const double h_target = std::min(cfg.step, cfg.max_step);
    for (std::size_t s = 1; s < times.size(); ++s) {
      const double span = times[s] - t;
      if (span > 0.0) {
        const long nsteps = std::max(1L, std::lround(std::ceil(span / h_target - 1e-9)));
        const double h = span / static_cast<double>(nsteps);
        for (long k = 0; k < nsteps; ++k) {
          rk.step(f, t, h, y);
          t = times[s - 1] + h * static_cast<double>(k + 1);
          ++sol.accepted_steps;
        }
        t = times[s];
        check_finite(y, t);
      }
      sol.states.push_back(y);
    }
    return sol;
  }

  Dopri5 dp(y.size());
  const double tol = cfg.tolerance;
  f(t, y.data(), dp.k1.data());
  double h = std::min(cfg.max_step, 0.01);
  for (std::size_t s = 1; s < times.size(); ++s) {
    const double target = times[s];
    while (t < target) {
      const double remaining = target - t;
      bool clamped = false;
      double hs = std::min(h, cfg.max_step);
      if (hs >= remaining - 1e-12 * std::max(1.0, std::fabs(target))) {
        hs = remaining;
        clamped = true;
      }
      if (hs < 1e-14 * std::max(1.0, std::fabs(t))) {
        throw numerical_error("integrator: step size underflow at t = " + std::to_string(t));
      }
      const double err = dp.attempt(f, t, hs, y, tol);
      const double factor =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t = clamped ? target : t + hs;
        std::swap(y, dp.ynew);
        std::swap(dp.k1, dp.k7);
        ++sol.accepted_steps;
        h = clamped ? std::max(h, hs * factor) : hs * factor;
      } else {
        ++sol.rejected_steps;
        h = hs * factor;
      }
    }
    check_finite(y, t);
    sol.states.push_back(y);
  }
  return sol;
}

}  // namespace todalab
