#pragma once

#include <functional>
#include <string>
#include <vector>

namespace todalab {

enum class Method { kRk4Fixed, kRkAdaptive };

struct IntegratorConfig {
  Method method = Method::kRkAdaptive;
  double step = 0.01;        // fixed step (rk4-fixed)
  double tolerance = 1e-10;  // mixed abs/rel tolerance (rk-adaptive)
  double max_step = 0.05;

  void validate() const;
  static Method parse_method(const std::string& name);
  static std::string method_name(Method m);
};

using OdeRhs = std::function<void(double t, const double* y, double* dy)>;

struct OdeSolution {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

// Integrates y' = f(t, y) from times.front() and records y at every entry of
// `times` (non-decreasing). Steps are clamped so sample times are hit exactly.
OdeSolution integrate_ode(const OdeRhs& f, std::vector<double> y0,
                          const std::vector<double>& times,
                          const IntegratorConfig& cfg);

// 0, dt, 2dt, ..., with the last sample exactly t_final.
std::vector<double> sample_times(double t_final, double dt);

}  // namespace todalab
