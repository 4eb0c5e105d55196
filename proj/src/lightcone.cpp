#include "todalab/lightcone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "todalab/bounds.hpp"
#include "todalab/error.hpp"

namespace todalab {

MagnitudeGrid magnitudes(const SensitivityGrid& g) {
  MagnitudeGrid m;
  m.offset = g.offset;
  m.source = g.seed.m;
  m.times = g.times;
  m.values.resize(g.times.size());
  for (std::size_t k = 0; k < g.times.size(); ++k) {
    m.values[k].resize(g.sites());
    for (std::size_t i = 0; i < g.sites(); ++i) m.values[k][i] = g.magnitude(k, i);
  }
  return m;
}

Envelope toda_envelope(double mu, double lnorm) {
  const double v = velocity_toda(mu, lnorm);
  const double c = toda_prefactor();
  Envelope e;
  e.kind = "toda";
  e.bound_speed = v;
  e.params = {{"mu", mu}, {"Lnorm", lnorm}, {"v", v}, {"C", c}};
  e.eval = [mu, v, c](long d, double t) {
    return c * std::exp(-mu * (static_cast<double>(std::labs(d)) - v * std::fabs(t)));
  };
  return e;
}

Envelope hierarchy_envelope(double mu, double lnorm, const HierarchySpec& spec,
                            HierarchyVelocityMode mode) {
  const double v = velocity_hierarchy(mu, lnorm, spec, mode);
  const int r = spec.r;
  Envelope e;
  e.kind = mode == HierarchyVelocityMode::kMatrixNorm ? "hierarchy-matrix-norm"
                                                       : "hierarchy-closed-form";
  e.bound_speed = v * (r / 2 + 1);
  e.params = {{"mu", mu}, {"Lnorm", lnorm}, {"r", r}, {"v_r", v}};
  e.eval = [mu, v, r](long d, double t) {
    return std::exp(-mu * (static_cast<double>(hierarchy_distance(d, r)) - v * std::fabs(t)));
  };
  return e;
}

Envelope perturbed_envelope(double mu, double c1, double c2, double w2_norm) {
  const double v = velocity_perturbed(mu, c1, c2, w2_norm);
  const double c = perturbed_prefactor(c1, c2, w2_norm);
  Envelope e;
  e.kind = "perturbed";
  e.bound_speed = v;
  e.params = {{"mu", mu}, {"C1", c1}, {"C2", c2}, {"W2_norm", w2_norm}, {"v", v}, {"C", c}};
  e.eval = [mu, v, c](long d, double t) {
    return c * std::exp(-mu * (static_cast<double>(std::labs(d)) - v * std::fabs(t)));
  };
  return e;
}

Envelope perturbed_hierarchy_envelope(double mu, double c1, double c2, double w2_norm,
                                      const HierarchySpec& spec) {
  const double v = velocity_perturbed_hierarchy(mu, c1, c2, w2_norm, spec);
  const int r = spec.r;
  Envelope e;
  e.kind = "perturbed-hierarchy";
  e.bound_speed = v * (r / 2 + 1);
  e.params = {{"mu", mu}, {"C1", c1}, {"C2", c2}, {"W2_norm", w2_norm}, {"r", r}, {"v_r", v}};
  e.eval = [mu, v, r](long d, double t) {
    return std::exp(-mu * (static_cast<double>(hierarchy_distance(d, r)) - v * std::fabs(t)));
  };
  return e;
}

Envelope timedep_envelope(double mu, double lnorm, double w1_norm, double w2_norm,
                          double a_star) {
  if (!(a_star > 0.0)) throw domain_error("timedep_envelope: a* must be > 0");
  const double c = std::max(1.0, 2.0 / a_star);
  Envelope e;
  e.kind = "timedep";
  e.params = {{"mu", mu}, {"Lnorm", lnorm}, {"W1_norm", w1_norm},
              {"W2_norm", w2_norm}, {"a_star", a_star}, {"C", c}};
  e.eval = [=](long d, double t) {
    const double v = velocity_timedep(t, mu, lnorm, w1_norm, w2_norm);
    return c * std::exp(-mu * (static_cast<double>(std::labs(d)) - v));
  };
  return e;
}

Envelope ghs_envelope(double mu, double c) {
  const double v = velocity_ghs(mu, c);
  Envelope e;
  e.kind = "ghs";
  e.bound_speed = v;
  e.params = {{"mu", mu}, {"C", c}, {"v", v}};
  e.eval = [mu, v, c](long d, double t) {
    return c * std::exp(-mu * (static_cast<double>(std::labs(d)) - v * std::fabs(t)));
  };
  return e;
}

Envelope interpolation_shape_envelope(double mu, double c, double rate, double d_coef,
                                      double delta) {
  Envelope e;
  e.kind = "interpolation";
  e.bound_speed = rate / mu;
  e.params = {{"mu", mu}, {"C", c}, {"rate", rate}, {"D", d_coef}, {"delta", delta}};
  e.eval = [=](long d, double t) {
    const double at = std::fabs(t);
    return c * G_mu(mu, d) * std::exp(rate * at) * (1.0 + d_coef * std::expm1(delta * at));
  };
  return e;
}

Envelope scaled(Envelope e, double factor) {
  auto inner = e.eval;
  e.eval = [inner, factor](long d, double t) { return factor * inner(d, t); };
  e.params.emplace_back("scale", factor);
  return e;
}

bool guard_band_quiet(const MagnitudeGrid& grid, int guard, double level) {
  for (const auto& row : grid.values) {
    const long n = static_cast<long>(row.size());
    for (long i = 0; i < n; ++i) {
      if ((i < guard || i >= n - guard) && row[i] > level) return false;
    }
  }
  return true;
}

double empirical_front_speed(const MagnitudeGrid& grid, double threshold) {
  if (grid.times.empty()) return 0.0;
  const long n = static_cast<long>(grid.values.front().size());
  std::vector<double> first(static_cast<std::size_t>(n) + 1,
                            std::numeric_limits<double>::infinity());
  for (long i = 0; i < n; ++i) {
    const long d = std::labs(grid.offset + i - grid.source);
    for (std::size_t k = 0; k < grid.times.size(); ++k) {
      const double v = grid.values[k][i];
      if (v >= threshold) {
        double t = grid.times[k];
        if (k > 0) {
          const double lv = std::log(std::max(grid.values[k - 1][i], 1e-300));
          const double lt = std::log(threshold), lc = std::log(v);
          if (lc > lv) {
            const double frac = (lt - lv) / (lc - lv);
            t = grid.times[k - 1] + frac * (grid.times[k] - grid.times[k - 1]);
          }
        }
        first[d] = std::min(first[d], t);
        break;
      }
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (long d = 1; d <= n; ++d) {
    const double t = first[d];
    if (!std::isfinite(t) || t <= 0.0) continue;
    sx += t;
    sy += static_cast<double>(d);
    sxx += t * t;
    sxy += t * static_cast<double>(d);
    ++cnt;
  }
  if (cnt < 2) return 0.0;
  const double den = cnt * sxx - sx * sx;
  if (den <= 0.0) return 0.0;
  return (cnt * sxy - sx * sy) / den;
}

LightConeReport verify_light_cone(const MagnitudeGrid& grid, const Envelope& env,
                                  const LightConeOptions& opt) {
  LightConeReport rep;
  rep.envelope_kind = env.kind;
  rep.params = env.params;
  rep.bound_speed = env.bound_speed;
  rep.clean = guard_band_quiet(grid, opt.guard, opt.clean_level);
  for (std::size_t k = 0; k < grid.times.size(); ++k) {
    const auto& row = grid.values[k];
    const long n = static_cast<long>(row.size());
    for (long i = 0; i < n; ++i) {
      if (!rep.clean && (i < opt.guard || i >= n - opt.guard)) continue;
      const long site = grid.offset + i;
      const double bound = env.eval(site - grid.source, grid.times[k]);
      ++rep.checked;
      if (bound > 0.0) rep.max_ratio = std::max(rep.max_ratio, row[i] / bound);
      if (row[i] > bound * (1.0 + opt.rel_slack)) {
        rep.violations.push_back({site, grid.times[k], row[i], bound});
      }
    }
  }
  rep.empirical_front_speed = empirical_front_speed(grid, opt.front_threshold);
  return rep;
}

ShapeFit spatial_shape_fit(const MagnitudeGrid& grid, std::size_t sample,
                           const ShapeFitOptions& opt) {
  const auto& row = grid.values.at(sample);
  const long n = static_cast<long>(row.size());
  std::vector<double> by_d(static_cast<std::size_t>(n) + 1, -1.0);
  for (long i = 0; i < n; ++i) {
    const long d = std::labs(grid.offset + i - grid.source);
    by_d[d] = std::max(by_d[d], row[i]);
  }
  std::size_t peak = 0;
  for (std::size_t d = 0; d < by_d.size(); ++d) {
    if (by_d[d] > by_d[peak]) peak = d;
  }
  std::vector<double> xs, ys;
  for (std::size_t d = peak + 1; d < by_d.size(); ++d) {
    const double v = by_d[d];
    if (v <= opt.floor || v >= opt.ceiling) continue;
    const double x = static_cast<double>(d);
    xs.push_back(x);
    ys.push_back(std::log(v) + 2.0 * std::log1p(x));
  }
  ShapeFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return fit;
  fit.rate = -sxy / sxx;
  fit.r2 = sxy * sxy / (sxx * syy);
  return fit;
}

InterpolationFit fit_interpolation_envelope(const MagnitudeGrid& grid, double mu,
                                            double eps, double v, double c1,
                                            double spatial_mu,
                                            const ShapeFitOptions& opt) {
  InterpolationFit fit;
  fit.mu = mu;
  fit.eps = eps;
  fit.C = toda_prefactor() * C_epsilon(eps);
  fit.v = v;
  fit.v_star = interpolation_velocity_star(c1, mu, eps);
  const double rate = (mu + eps) * v;

  std::vector<double> deltas{0.0};
  for (double d = 1e-3; d <= 20.0; d *= 1.5) deltas.push_back(d);

  double best = std::numeric_limits<double>::infinity();
  for (double delta : deltas) {
    double dcoef = 0.0;
    for (std::size_t k = 0; k < grid.times.size(); ++k) {
      const double t = std::fabs(grid.times[k]);
      const double grow = std::expm1(delta * t);
      for (std::size_t i = 0; i < grid.values[k].size(); ++i) {
        const long d = grid.offset + static_cast<long>(i) - grid.source;
        const double base = fit.C * G_mu(spatial_mu, d) * std::exp(rate * t);
        const double need = grid.values[k][i] / base - 1.0;
        if (need > 0.0 && grow > 0.0) dcoef = std::max(dcoef, need / grow);
      }
    }
    double misfit = 0.0;
    std::size_t cnt = 0;
    for (std::size_t k = 0; k < grid.times.size(); ++k) {
      const double t = std::fabs(grid.times[k]);
      for (std::size_t i = 0; i < grid.values[k].size(); ++i) {
        const double obs = grid.values[k][i];
        if (obs <= opt.floor) continue;
        const long d = grid.offset + static_cast<long>(i) - grid.source;
        const double env = fit.C * G_mu(spatial_mu, d) * std::exp(rate * t) *
                           (1.0 + dcoef * std::expm1(delta * t));
        const double r = std::log(env) - std::log(obs);
        misfit += r * r;
        ++cnt;
      }
    }
    if (cnt > 0) misfit /= static_cast<double>(cnt);
    if (misfit < best) {
      best = misfit;
      fit.D = dcoef;
      fit.delta = delta;
      fit.misfit = misfit;
    }
  }
  const Envelope env =
      interpolation_shape_envelope(spatial_mu, fit.C, rate, fit.D, fit.delta);
  LightConeOptions lo;
  lo.guard = 0;
  fit.violations = verify_light_cone(grid, env, lo).violations.size();

  const ShapeFit shape = spatial_shape_fit(grid, grid.times.size() - 1, opt);
  fit.shape_r2 = shape.r2;
  fit.shape_rate = shape.rate;
  fit.shape_points = shape.points;
  fit.shape_pass = shape.points >= opt.min_points && shape.r2 >= opt.min_r2 &&
                   shape.rate >= spatial_mu;
  return fit;
}

}  // namespace todalab
