#include "todalab/ghs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "todalab/bounds.hpp"
#include "todalab/error.hpp"

namespace todalab {

PotentialSpec PotentialSpec::toda() {
  PotentialSpec v;
  v.family = PotentialFamily::kToda;
  return v;
}

PotentialSpec PotentialSpec::quartic(double beta) {
  PotentialSpec v;
  v.family = PotentialFamily::kQuartic;
  v.beta = beta;
  return v;
}

PotentialSpec PotentialSpec::custom(std::function<double(double)> f,
                                    std::function<double(double)> df,
                                    std::function<double(double)> d2f) {
  PotentialSpec v;
  v.family = PotentialFamily::kCustom;
  v.custom_v = std::move(f);
  v.custom_dv = std::move(df);
  v.custom_d2v = std::move(d2f);
  return v;
}

PotentialFamily PotentialSpec::parse_family(const std::string& name) {
  if (name == "toda") return PotentialFamily::kToda;
  if (name == "quartic") return PotentialFamily::kQuartic;
  if (name == "custom") return PotentialFamily::kCustom;
  throw config_error("potential family must be \"toda\" or \"quartic\", got \"" + name + "\"");
}

std::string PotentialSpec::family_name(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::kToda: return "toda";
    case PotentialFamily::kQuartic: return "quartic";
    case PotentialFamily::kCustom: return "custom";
  }
  return "unknown";
}

double PotentialSpec::V(double x) const {
  switch (family) {
    case PotentialFamily::kToda: return std::expm1(-x) + x;
    case PotentialFamily::kQuartic: return 0.5 * x * x + 0.25 * beta * x * x * x * x;
    case PotentialFamily::kCustom: return custom_v(x);
  }
  return 0.0;
}

double PotentialSpec::dV(double x) const {
  switch (family) {
    case PotentialFamily::kToda: return -std::expm1(-x);
    case PotentialFamily::kQuartic: return x + beta * x * x * x;
    case PotentialFamily::kCustom: return custom_dv(x);
  }
  return 0.0;
}

double PotentialSpec::d2V(double x) const {
  switch (family) {
    case PotentialFamily::kToda: return std::exp(-x);
    case PotentialFamily::kQuartic: return 1.0 + 3.0 * beta * x * x;
    case PotentialFamily::kCustom: return custom_d2v(x);
  }
  return 0.0;
}

void PotentialSpec::validate() const {
  if (family == PotentialFamily::kQuartic && !(beta >= 0.0 && std::isfinite(beta))) {
    throw invalid_argument("quartic potential: beta must be finite and >= 0");
  }
  if (family == PotentialFamily::kCustom &&
      (!custom_v || !custom_dv || !custom_d2v)) {
    throw invalid_argument("custom potential: V, V' and V'' must all be provided");
  }
  if (std::fabs(V(0.0)) > 1e-14 || std::fabs(dV(0.0)) > 1e-14) {
    throw domain_error("potential: V(0) and V'(0) must vanish");
  }
  if (!(d2V(0.0) > 0.0)) throw domain_error("potential: V''(0) must be positive");
  for (int i = -400; i <= 400; ++i) {
    const double x = 0.025 * i;
    if (V(x) < -1e-14) {
      throw domain_error("potential: V(" + std::to_string(x) + ") is negative");
    }
  }
}

bool PotentialSpec::confining() const {
  if (family != PotentialFamily::kCustom) return true;
  double lo = 0.0, hi = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double vp = V(static_cast<double>(i)), vm = V(-static_cast<double>(i));
    if (vp < hi || vm < lo) return false;
    hi = vp;
    lo = vm;
  }
  return true;
}

void GHSState::validate() const {
  if (r.size() != p.size()) throw invalid_argument("ghs state: r and p differ in length");
  if (r.size() < 3) throw invalid_argument("ghs state: window must hold at least 3 sites");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(p[i])) {
      throw domain_error("ghs state: non-finite entry at site " +
                         std::to_string(offset + static_cast<long>(i)));
    }
  }
}

GHSState GHSState::zero(std::size_t n, long offset) {
  GHSState s;
  s.offset = offset;
  s.r.assign(n, 0.0);
  s.p.assign(n, 0.0);
  return s;
}

namespace {

void field(std::size_t n, const double* r, const double* p, const PotentialSpec& V,
           double* dr, double* dp) {
  double dv_prev = 0.0;  // V'(0) for the background site left of the window
  for (std::size_t i = 0; i < n; ++i) {
    const double p_next = i + 1 < n ? p[i + 1] : 0.0;
    const double dv = V.dV(r[i]);
    dr[i] = p_next - p[i];
    dp[i] = dv - dv_prev;
    dv_prev = dv;
  }
}

void tangent_field(std::size_t n, const double* r, const double* u, const double* w,
                   const PotentialSpec& V, double* du, double* dw) {
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w_next = i + 1 < n ? w[i + 1] : 0.0;
    const double cur = V.d2V(r[i]) * u[i];
    du[i] = w_next - w[i];
    dw[i] = cur - prev;
    prev = cur;
  }
}

long ghs_margin(const GHSState& s, double level) {
  const long n = static_cast<long>(s.size());
  long first = n, last = -1;
  for (long i = 0; i < n; ++i) {
    if (std::fabs(s.r[i]) > level || std::fabs(s.p[i]) > level) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  if (last < 0) return n;
  return std::min(first, n - 1 - last);
}

GHSState unpack(const GHSState& like, const std::vector<double>& y) {
  GHSState s;
  s.offset = like.offset;
  const std::size_t n = like.size();
  s.r.assign(y.begin(), y.begin() + static_cast<long>(n));
  s.p.assign(y.begin() + static_cast<long>(n), y.begin() + static_cast<long>(2 * n));
  return s;
}

}  // namespace

GHSFields ghs_rhs(const GHSState& s, const PotentialSpec& V) {
  s.validate();
  GHSFields f;
  f.dr.resize(s.size());
  f.dp.resize(s.size());
  field(s.size(), s.r.data(), s.p.data(), V, f.dr.data(), f.dp.data());
  return f;
}

double ghs_energy(const GHSState& s, const PotentialSpec& V) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) e += 0.5 * s.p[i] * s.p[i] + V.V(s.r[i]);
  return e;
}

GHSTrajectory ghs_integrate(const GHSState& s, const PotentialSpec& V,
                            const std::vector<double>& times, const IntegratorConfig& cfg,
                            int guard) {
  s.validate();
  V.validate();
  const std::size_t n = s.size();
  std::vector<double> y(2 * n);
  std::copy(s.r.begin(), s.r.end(), y.begin());
  std::copy(s.p.begin(), s.p.end(), y.begin() + static_cast<long>(n));
  OdeRhs f = [&](double, const double* yy, double* dy) {
    field(n, yy, yy + n, V, dy, dy + n);
  };
  const auto sol = integrate_ode(f, std::move(y), times, cfg);
  GHSTrajectory traj;
  traj.times = sol.times;
  traj.energy_initial = ghs_energy(s, V);
  traj.boundary_margin = static_cast<long>(n);
  for (const auto& yt : sol.states) {
    GHSState st = unpack(s, yt);
    traj.max_energy_drift =
        std::max(traj.max_energy_drift, std::fabs(ghs_energy(st, V) - traj.energy_initial));
    traj.boundary_margin = std::min(traj.boundary_margin, ghs_margin(st, kSignificance));
    traj.states.push_back(std::move(st));
  }
  traj.clean = traj.boundary_margin >= guard;
  return traj;
}

MagnitudeGrid GHSSensitivity::magnitudes() const {
  MagnitudeGrid g;
  g.offset = offset;
  g.source = m;
  g.times = times;
  g.values.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    g.values[k].resize(dr[k].size());
    for (std::size_t i = 0; i < dr[k].size(); ++i) {
      g.values[k][i] = std::max(std::fabs(dr[k][i]), std::fabs(dp[k][i]));
    }
  }
  return g;
}

GHSSensitivity ghs_tangent(const GHSState& s, long m, GHSCoord coord,
                           const PotentialSpec& V, const std::vector<double>& times,
                           const IntegratorConfig& cfg, int guard) {
  s.validate();
  V.validate();
  if (m < s.lo() || m > s.hi()) {
    throw invalid_argument("ghs_tangent: seed site " + std::to_string(m) +
                           " lies outside the window");
  }
  const std::size_t n = s.size();
  std::vector<double> y(4 * n, 0.0);
  std::copy(s.r.begin(), s.r.end(), y.begin());
  std::copy(s.p.begin(), s.p.end(), y.begin() + static_cast<long>(n));
  const std::size_t seed_index = static_cast<std::size_t>(m - s.offset);
  y[(coord == GHSCoord::kR ? 2 * n : 3 * n) + seed_index] = 1.0;
  OdeRhs f = [&](double, const double* yy, double* dy) {
    field(n, yy, yy + n, V, dy, dy + n);
    tangent_field(n, yy, yy + 2 * n, yy + 3 * n, V, dy + 2 * n, dy + 3 * n);
  };
  const auto sol = integrate_ode(f, std::move(y), times, cfg);
  GHSSensitivity out;
  out.offset = s.offset;
  out.m = m;
  out.coord = coord;
  out.times = sol.times;
  out.base.times = sol.times;
  out.base.energy_initial = ghs_energy(s, V);
  out.base.boundary_margin = static_cast<long>(n);
  for (const auto& yt : sol.states) {
    GHSState st = unpack(s, yt);
    out.base.max_energy_drift = std::max(out.base.max_energy_drift,
                                         std::fabs(ghs_energy(st, V) - out.base.energy_initial));
    GHSState tan = unpack(s, std::vector<double>(yt.begin() + static_cast<long>(2 * n), yt.end()));
    out.base.boundary_margin = std::min(
        {out.base.boundary_margin, ghs_margin(st, kSignificance), ghs_margin(tan, kSignificance)});
    out.base.states.push_back(std::move(st));
    out.dr.push_back(std::move(tan.r));
    out.dp.push_back(std::move(tan.p));
  }
  out.base.clean = out.base.boundary_margin >= guard;
  return out;
}

double energy_radius(const PotentialSpec& V, double E) {
  if (!(E >= 0.0) || !std::isfinite(E)) throw invalid_argument("energy_radius: E must be >= 0");
  if (E == 0.0) return 0.0;
  if (V.family == PotentialFamily::kQuartic) {
    if (V.beta == 0.0) return std::sqrt(2.0 * E);
    return std::sqrt((std::sqrt(1.0 + 4.0 * V.beta * E) - 1.0) / V.beta);
  }
  if (!V.confining()) throw domain_error("energy_radius: potential is not confining");
  auto side = [&](double sign) {
    double hi = 1.0;
    while (V.V(sign * hi) <= E) {
      hi *= 2.0;
      if (hi > 1e12) throw numerical_error("energy_radius: no crossing of V = E found");
    }
    double lo = 0.0;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (V.V(sign * mid) <= E ? lo : hi) = mid;
    }
    return hi;
  };
  return std::max(side(1.0), side(-1.0));
}

double quadratic_lower_bound(const PotentialSpec& V, double R, int samples) {
  if (!(R > 0.0)) return 0.5 * V.d2V(0.0);
  double c = 0.5 * V.d2V(0.0);
  for (int i = 1; i <= samples; ++i) {
    const double x = R * static_cast<double>(i) / samples;
    c = std::min({c, V.V(x) / (x * x), V.V(-x) / (x * x)});
  }
  return c;
}

GHSDiagnostics ghs_stability_diagnostics(const GHSTrajectory& traj, const PotentialSpec& V) {
  if (traj.states.empty()) throw invalid_argument("ghs diagnostics: empty trajectory");
  if (!V.confining()) throw domain_error("ghs diagnostics: potential is not confining");
  GHSDiagnostics d;
  d.energy = traj.energy_initial;
  d.radius = energy_radius(V, std::max(0.0, d.energy));
  d.quad_lower = quadratic_lower_bound(V, d.radius);
  d.p2_bound = std::sqrt(2.0 * std::max(0.0, d.energy));
  d.r2_bound = std::sqrt(std::max(0.0, d.energy) / d.quad_lower);
  d.max_energy_drift = traj.max_energy_drift;
  const double slack = 1e-9 + 2.0 * traj.max_energy_drift;

  const GHSState& s0 = traj.states.front();
  const std::size_t n = s0.size();
  // Positions with q at the left edge pinned to 0, advanced by trapezoidal
  // integration of p.
  std::vector<double> q(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) q[i] = q[i - 1] + s0.r[i - 1];
  double q0_inf = 0.0;
  for (double v : q) q0_inf = std::max(q0_inf, std::fabs(v));

  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const GHSState& s = traj.states[k];
    double p2 = 0.0, r2 = 0.0, rinf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p2 += s.p[i] * s.p[i];
      r2 += s.r[i] * s.r[i];
      rinf = std::max(rinf, std::fabs(s.r[i]));
    }
    d.max_p2 = std::max(d.max_p2, std::sqrt(p2));
    d.max_r2 = std::max(d.max_r2, std::sqrt(r2));
    d.max_rinf = std::max(d.max_rinf, rinf);
    if (k > 0) {
      const double dt = traj.times[k] - traj.times[k - 1];
      const GHSState& prev = traj.states[k - 1];
      double qinf = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        q[i] += 0.5 * dt * (prev.p[i] + s.p[i]);
        qinf = std::max(qinf, std::fabs(q[i]));
      }
      const double t = std::fabs(traj.times[k] - traj.times.front());
      d.max_q_excess = std::max(d.max_q_excess, qinf - q0_inf - d.p2_bound * t);
    }
  }
  d.p2_ok = d.max_p2 <= d.p2_bound + slack;
  d.rinf_ok = d.max_rinf <= d.radius + 1e-9 + slack;
  d.r2_ok = d.max_r2 <= d.r2_bound + slack;
  d.q_ok = d.max_q_excess <= 1e-9;
  return d;
}

double ghs_constant(const GHSTrajectory& traj, const PotentialSpec& V) {
  double c = std::sqrt(std::fabs(V.d2V(0.0)));
  for (const GHSState& s : traj.states) {
    for (double r : s.r) {
      c = std::max({c, std::sqrt(std::fabs(V.dV(r))), std::sqrt(std::fabs(V.d2V(r)))});
    }
  }
  return std::max(c, 1.0);
}

double ghs_velocity(double mu, const GHSTrajectory& traj, const PotentialSpec& V) {
  return velocity_ghs(mu, ghs_constant(traj, V));
}

LightConeReport check_ghs_bound(const GHSSensitivity& sens, double mu, const PotentialSpec& V,
                                const LightConeOptions& opt) {
  const Envelope env = ghs_envelope(mu, ghs_constant(sens.base, V));
  return verify_light_cone(sens.magnitudes(), env, opt);
}

LatticeState ghs_to_flaschka(const GHSState& s) {
  RelState rel;
  rel.offset = s.offset;
  rel.r = s.r;
  rel.p = s.p;
  return flaschka_from_relative(rel);
}

GHSState ghs_from_flaschka(const LatticeState& s) {
  if (s.a_bg != 0.5 || s.b_bg != 0.0) {
    throw domain_error("ghs_from_flaschka: background must be (1/2, 0)");
  }
  const RelState rel = flaschka_inverse(s);
  GHSState out;
  out.offset = rel.offset;
  out.r = rel.r;
  out.p = rel.p;
  return out;
}

}  // namespace todalab
