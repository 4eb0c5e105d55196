#include "todalab/perturbed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "todalab/error.hpp"
#include "todalab/jacobi.hpp"

namespace todalab {

PerturbationSpec PerturbationSpec::cosine(double w0) {
  PerturbationSpec p;
  p.family = PerturbationFamily::kCosine;
  p.w0 = w0;
  return p;
}

PerturbationSpec PerturbationSpec::rational(double w0) {
  PerturbationSpec p;
  p.family = PerturbationFamily::kRational;
  p.w0 = w0;
  return p;
}

PerturbationSpec PerturbationSpec::custom(std::function<double(double)> w,
                                          std::function<double(double)> dw,
                                          std::function<double(double)> d2w,
                                          double dw_norm, double d2w_norm) {
  PerturbationSpec p;
  p.family = PerturbationFamily::kCustom;
  p.custom_w = std::move(w);
  p.custom_dw = std::move(dw);
  p.custom_d2w = std::move(d2w);
  p.custom_dw_norm = dw_norm;
  p.custom_d2w_norm = d2w_norm;
  return p;
}

PerturbationFamily PerturbationSpec::parse_family(const std::string& name) {
  if (name == "cosine") return PerturbationFamily::kCosine;
  if (name == "rational") return PerturbationFamily::kRational;
  if (name == "custom") return PerturbationFamily::kCustom;
  throw config_error("perturbation: unknown family '" + name +
                     "' (expected cosine, rational or custom)");
}

std::string PerturbationSpec::family_name(PerturbationFamily f) {
  switch (f) {
    case PerturbationFamily::kCosine: return "cosine";
    case PerturbationFamily::kRational: return "rational";
    case PerturbationFamily::kCustom: return "custom";
  }
  return "unknown";
}

void PerturbationSpec::validate() const {
  if (family == PerturbationFamily::kCustom) {
    if (!custom_w || !custom_dw || !custom_d2w) {
      throw invalid_argument("perturbation: custom family needs W, W' and W''");
    }
    if (!(custom_dw_norm >= 0.0) || !(custom_d2w_norm >= 0.0)) {
      throw invalid_argument("perturbation: custom family must declare ||W'|| and ||W''|| >= 0");
    }
    return;
  }
  if (!(w0 >= 0.0) || !std::isfinite(w0)) {
    throw invalid_argument("perturbation: w0 must be finite and >= 0");
  }
}

double PerturbationSpec::value(double x) const {
  switch (family) {
    case PerturbationFamily::kCosine: return w0 * (1.0 - std::cos(x));
    case PerturbationFamily::kRational: return w0 * x * x / (1.0 + x * x);
    case PerturbationFamily::kCustom: return custom_w(x);
  }
  return 0.0;
}

double PerturbationSpec::first(double x) const {
  switch (family) {
    case PerturbationFamily::kCosine: return w0 * std::sin(x);
    case PerturbationFamily::kRational: {
      const double d = 1.0 + x * x;
      return w0 * 2.0 * x / (d * d);
    }
    case PerturbationFamily::kCustom: return custom_dw(x);
  }
  return 0.0;
}

double PerturbationSpec::second(double x) const {
  switch (family) {
    case PerturbationFamily::kCosine: return w0 * std::cos(x);
    case PerturbationFamily::kRational: {
      const double d = 1.0 + x * x;
      return w0 * (2.0 - 6.0 * x * x) / (d * d * d);
    }
    case PerturbationFamily::kCustom: return custom_d2w(x);
  }
  return 0.0;
}

double PerturbationSpec::first_norm() const {
  switch (family) {
    case PerturbationFamily::kCosine: return w0;
    // max of 2x/(1+x^2)^2 at x = 1/sqrt(3)
    case PerturbationFamily::kRational: return w0 * 3.0 * std::sqrt(3.0) / 8.0;
    case PerturbationFamily::kCustom: return custom_dw_norm;
  }
  return 0.0;
}

double PerturbationSpec::second_norm() const {
  switch (family) {
    case PerturbationFamily::kCosine: return w0;
    case PerturbationFamily::kRational: return 2.0 * w0;
    case PerturbationFamily::kCustom: return custom_d2w_norm;
  }
  return 0.0;
}

Fields perturbed_rhs(const LatticeState& s, const PerturbationSpec& p) {
  return FlaschkaFlow::perturbed(p).rhs(s);
}

Fields perturbed_hierarchy_rhs(const LatticeState& s, const HierarchySpec& spec,
                               const PerturbationSpec& p) {
  return FlaschkaFlow::perturbed_hierarchy(spec, p).rhs(s);
}

double onsite_energy(const LatticeState& s, const PerturbationSpec& p) {
  double e = 0.0;
  for (double a : s.a) {
    if (a == 0.0) throw domain_error("onsite_energy: a_n = 0 is singular");
    e += p.value(std::log(4.0 * a * a));
  }
  return e;
}

TrajectoryMonitors monitor_trajectory(const Trajectory& traj) {
  if (traj.states.empty()) throw invalid_argument("monitor_trajectory: empty trajectory");
  TrajectoryMonitors m;
  m.times = traj.times;
  m.horizon = traj.times.back() - traj.times.front();
  m.a_star = std::numeric_limits<double>::infinity();
  for (double a : traj.states.front().a) m.a_star = std::min(m.a_star, std::fabs(a));
  for (const auto& s : traj.states) {
    double amax = std::fabs(s.a_bg), bmax = std::fabs(s.b_bg), inv = 1.0 / std::fabs(s.a_bg);
    for (std::size_t i = 0; i < s.size(); ++i) {
      amax = std::max(amax, std::fabs(s.a[i]));
      bmax = std::max(bmax, std::fabs(s.b[i]));
      inv = std::max(inv, 1.0 / std::fabs(s.a[i]));
    }
    m.C1 = std::max(m.C1, std::max(amax, bmax));
    m.C2 = std::max(m.C2, inv);
    m.Lnorm_t.push_back(jacobi_norm(s));
  }
  const std::size_t n = m.Lnorm_t.size();
  const std::size_t start = n - std::max<std::size_t>(2, n / 5);
  if (n >= 5) {
    bool increasing = true;
    for (std::size_t i = start + 1; i < n; ++i) {
      if (!(m.Lnorm_t[i] > m.Lnorm_t[i - 1] * (1.0 + 1e-9))) increasing = false;
    }
    m.unbounded_flag = increasing;
  }
  return m;
}

double linear_growth_excess(const TrajectoryMonitors& m, double dw_norm) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.Lnorm_t.size(); ++i) {
    const double allowed = m.Lnorm_t.front() + dw_norm * std::fabs(m.times[i] - m.times.front());
    worst = std::max(worst, m.Lnorm_t[i] - allowed);
  }
  return worst;
}

}  // namespace todalab
