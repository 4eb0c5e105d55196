#include "todalab/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "todalab/error.hpp"

namespace todalab {

std::string seed_name(const Seed& s) {
  return std::string(s.coord == Coord::kA ? "a" : "b") + "_" + std::to_string(s.m);
}

Coord parse_coord(const std::string& c) {
  if (c == "a") return Coord::kA;
  if (c == "b") return Coord::kB;
  throw config_error("seed coordinate must be \"a\" or \"b\", got \"" + c + "\"");
}

Direction seed_direction(const LatticeState& s, const Seed& seed) {
  if (!s.contains(seed.m)) {
    throw invalid_argument("seed site " + std::to_string(seed.m) + " lies outside window [" +
                           std::to_string(s.lo()) + ", " + std::to_string(s.hi()) + "]");
  }
  Direction d{std::vector<double>(s.size(), 0.0), std::vector<double>(s.size(), 0.0)};
  const std::size_t i = static_cast<std::size_t>(seed.m - s.offset);
  (seed.coord == Coord::kA ? d.da : d.db)[i] = 1.0;
  return d;
}

Direction btilde_direction(const LatticeState& s, long k) {
  if (!s.contains(k) || !s.contains(k + 1)) {
    throw invalid_argument("b~ seed at " + std::to_string(k) + " needs sites " +
                           std::to_string(k) + " and " + std::to_string(k + 1) +
                           " inside the window");
  }
  Direction d{std::vector<double>(s.size(), 0.0), std::vector<double>(s.size(), 0.0)};
  const std::size_t i = static_cast<std::size_t>(k - s.offset);
  d.db[i + 1] = 1.0;
  d.db[i] = -1.0;
  return d;
}

double SensitivityGrid::magnitude(std::size_t ti, std::size_t i) const {
  return std::max(std::fabs(da[ti][i]), std::fabs(db[ti][i]));
}

long tangent_margin(const std::vector<double>& da, const std::vector<double>& db,
                    double level) {
  const long n = static_cast<long>(da.size());
  long first = -1, last = -1;
  for (long i = 0; i < n; ++i) {
    if (std::fabs(da[i]) > level || std::fabs(db[i]) > level) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return n;
  return std::min(first, n - 1 - last);
}

namespace {

void toda_tangent(std::size_t n, const double* a, const double* b, const double* ua,
                  const double* ub, double a_bg, double b_bg, double* dua, double* dub) {
  for (std::size_t i = 0; i < n; ++i) {
    const double b_next = i + 1 < n ? b[i + 1] : b_bg;
    const double ub_next = i + 1 < n ? ub[i + 1] : 0.0;
    const double a_prev = i > 0 ? a[i - 1] : a_bg;
    const double ua_prev = i > 0 ? ua[i - 1] : 0.0;
    dua[i] = ua[i] * (b_next - b[i]) + a[i] * (ub_next - ub[i]);
    dub[i] = 4.0 * (a[i] * ua[i] - a_prev * ua_prev);
  }
}

// Evaluates base field and tangent field of `flow` together.
class TangentField {
 public:
  TangentField(const FlaschkaFlow& flow, std::size_t n, double a_bg, double b_bg)
      : flow_(flow), n_(n), a_bg_(a_bg), b_bg_(b_bg) {
    if (flow.kind != FlowKind::kToda) {
      xa_.resize(n);
      xb_.resize(n);
      fa_.resize(n);
      fb_.resize(n);
    }
  }

  // y = [a, b, ua, ub]; dy likewise.
  void operator()(const double* y, double* dy) {
    const double* a = y;
    const double* b = y + n_;
    const double* ua = y + 2 * n_;
    const double* ub = y + 3 * n_;
    if (flow_.kind == FlowKind::kToda) {
      toda_field(n_, a, b, a_bg_, b_bg_, dy, dy + n_);
      toda_tangent(n_, a, b, ua, ub, a_bg_, b_bg_, dy + 2 * n_, dy + 3 * n_);
      return;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      xa_[i] = {a[i], ua[i]};
      xb_[i] = {b[i], ub[i]};
    }
    flow_.eval(n_, xa_.data(), xb_.data(), a_bg_, b_bg_, fa_.data(), fb_.data());
    for (std::size_t i = 0; i < n_; ++i) {
      dy[i] = fa_[i].v;
      dy[n_ + i] = fb_[i].v;
      dy[2 * n_ + i] = fa_[i].d;
      dy[3 * n_ + i] = fb_[i].d;
    }
  }

 private:
  const FlaschkaFlow& flow_;
  std::size_t n_;
  double a_bg_, b_bg_;
  std::vector<Dual<double>> xa_, xb_, fa_, fb_;
};

void copy_out(const std::vector<double>& y, std::size_t n, std::size_t block,
              std::vector<double>& out) {
  out.assign(y.begin() + static_cast<long>(block * n),
             y.begin() + static_cast<long>((block + 1) * n));
}

LatticeState with_values(const LatticeState& like, const std::vector<double>& y) {
  LatticeState s = like;
  const std::size_t n = like.size();
  std::copy(y.begin(), y.begin() + static_cast<long>(n), s.a.begin());
  std::copy(y.begin() + static_cast<long>(n), y.begin() + static_cast<long>(2 * n),
            s.b.begin());
  return s;
}

}  // namespace

Fields tangent_rhs(const TangentState& ts, const FlaschkaFlow& flow) {
  const std::size_t n = ts.base.size();
  if (ts.da.size() != n || ts.db.size() != n) {
    throw invalid_argument("tangent_rhs: tangent and base differ in length");
  }
  flow.validate();
  std::vector<double> y(4 * n), dy(4 * n);
  std::copy(ts.base.a.begin(), ts.base.a.end(), y.begin());
  std::copy(ts.base.b.begin(), ts.base.b.end(), y.begin() + static_cast<long>(n));
  std::copy(ts.da.begin(), ts.da.end(), y.begin() + static_cast<long>(2 * n));
  std::copy(ts.db.begin(), ts.db.end(), y.begin() + static_cast<long>(3 * n));
  TangentField field(flow, n, ts.base.a_bg, ts.base.b_bg);
  field(y.data(), dy.data());
  Fields f;
  copy_out(dy, n, 2, f.da);
  copy_out(dy, n, 3, f.db);
  return f;
}

SensitivityGrid evolve_tangent(const LatticeState& x, const Seed& seed,
                               const std::vector<double>& times, const FlaschkaFlow& flow,
                               const IntegratorConfig& cfg, int guard) {
  x.validate();
  flow.validate();
  const Direction dir = seed_direction(x, seed);
  const std::size_t n = x.size();
  std::vector<double> y(4 * n);
  std::copy(x.a.begin(), x.a.end(), y.begin());
  std::copy(x.b.begin(), x.b.end(), y.begin() + static_cast<long>(n));
  std::copy(dir.da.begin(), dir.da.end(), y.begin() + static_cast<long>(2 * n));
  std::copy(dir.db.begin(), dir.db.end(), y.begin() + static_cast<long>(3 * n));
  auto field = std::make_shared<TangentField>(flow, n, x.a_bg, x.b_bg);
  OdeRhs rhs = [field](double, const double* yy, double* dy) { (*field)(yy, dy); };
  const OdeSolution sol = integrate_ode(rhs, std::move(y), times, cfg);

  SensitivityGrid g;
  g.offset = x.offset;
  g.seed = seed;
  g.times = sol.times;
  g.boundary_margin = static_cast<long>(n);
  for (const auto& st : sol.states) {
    LatticeState base = with_values(x, st);
    std::vector<double> da, db;
    copy_out(st, n, 2, da);
    copy_out(st, n, 3, db);
    g.boundary_margin =
        std::min({g.boundary_margin, state_margin(base), tangent_margin(da, db)});
    g.base.push_back(std::move(base));
    g.da.push_back(std::move(da));
    g.db.push_back(std::move(db));
  }
  g.clean = g.boundary_margin >= guard;
  return g;
}

SensitivityGrid finite_difference_oracle(const LatticeState& x, const Seed& seed,
                                         const std::vector<double>& times,
                                         const FlaschkaFlow& flow,
                                         const IntegratorConfig& cfg, double h) {
  const Direction dir = seed_direction(x, seed);
  const std::size_t i = static_cast<std::size_t>(seed.m - x.offset);
  const double z = seed.coord == Coord::kA ? x.a[i] : x.b[i];
  if (h <= 0.0) h = 1e-5 * std::max(1.0, std::fabs(z));
  LatticeState plus = x, minus = x;
  (seed.coord == Coord::kA ? plus.a : plus.b)[i] += h;
  (seed.coord == Coord::kA ? minus.a : minus.b)[i] -= h;
  const Trajectory tp = integrate(plus, flow, times, cfg);
  const Trajectory tm = integrate(minus, flow, times, cfg);

  SensitivityGrid g;
  g.offset = x.offset;
  g.seed = seed;
  g.times = tp.times;
  g.boundary_margin = std::min(tp.boundary_margin, tm.boundary_margin);
  double scale = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> da(x.size()), db(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      da[j] = (tp.states[k].a[j] - tm.states[k].a[j]) / (2.0 * h);
      db[j] = (tp.states[k].b[j] - tm.states[k].b[j]) / (2.0 * h);
      scale = std::max({scale, std::fabs(da[j]), std::fabs(db[j])});
    }
    LatticeState base = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
      base.a[j] = 0.5 * (tp.states[k].a[j] + tm.states[k].a[j]);
      base.b[j] = 0.5 * (tp.states[k].b[j] + tm.states[k].b[j]);
    }
    g.base.push_back(std::move(base));
    g.da.push_back(std::move(da));
    g.db.push_back(std::move(db));
  }
  g.truncation_estimate = h * h * scale;
  return g;
}

SecondGrid evolve_second_tangent(const LatticeState& x, const Direction& u,
                                 const Direction& w, const std::vector<double>& times,
                                 const IntegratorConfig& cfg) {
  x.validate();
  const std::size_t n = x.size();
  for (const Direction* d : {&u, &w}) {
    if (d->da.size() != n || d->db.size() != n) {
      throw invalid_argument("evolve_second_tangent: direction length differs from window");
    }
  }
  // Blocks: a, b, ua, ub, wa, wb, sa, sb.
  std::vector<double> y(8 * n, 0.0);
  auto put = [&](std::size_t block, const std::vector<double>& v) {
    std::copy(v.begin(), v.end(), y.begin() + static_cast<long>(block * n));
  };
  put(0, x.a);
  put(1, x.b);
  put(2, u.da);
  put(3, u.db);
  put(4, w.da);
  put(5, w.db);
  const double a_bg = x.a_bg, b_bg = x.b_bg;
  OdeRhs rhs = [n, a_bg, b_bg](double, const double* yy, double* dy) {
    const double *a = yy, *b = yy + n, *ua = yy + 2 * n, *ub = yy + 3 * n,
                 *wa = yy + 4 * n, *wb = yy + 5 * n, *sa = yy + 6 * n, *sb = yy + 7 * n;
    toda_field(n, a, b, a_bg, b_bg, dy, dy + n);
    toda_tangent(n, a, b, ua, ub, a_bg, b_bg, dy + 2 * n, dy + 3 * n);
    toda_tangent(n, a, b, wa, wb, a_bg, b_bg, dy + 4 * n, dy + 5 * n);
    double* dsa = dy + 6 * n;
    double* dsb = dy + 7 * n;
    for (std::size_t i = 0; i < n; ++i) {
      const bool last = i + 1 == n;
      const double db_ = (last ? b_bg : b[i + 1]) - b[i];
      const double dsb_ = (last ? 0.0 : sb[i + 1]) - sb[i];
      const double dwb = (last ? 0.0 : wb[i + 1]) - wb[i];
      const double dub = (last ? 0.0 : ub[i + 1]) - ub[i];
      dsa[i] = sa[i] * db_ + a[i] * dsb_ + ua[i] * dwb + wa[i] * dub;
      const double here = a[i] * sa[i] + ua[i] * wa[i];
      const double prev = i > 0 ? a[i - 1] * sa[i - 1] + ua[i - 1] * wa[i - 1] : 0.0;
      dsb[i] = 4.0 * (here - prev);
    }
  };
  const OdeSolution sol = integrate_ode(rhs, std::move(y), times, cfg);
  SecondGrid g;
  g.offset = x.offset;
  g.times = sol.times;
  for (const auto& st : sol.states) {
    std::vector<double> sa, sb;
    copy_out(st, n, 6, sa);
    copy_out(st, n, 7, sb);
    g.d2a.push_back(std::move(sa));
    g.d2b.push_back(std::move(sb));
  }
  return g;
}

SecondGrid evolve_second_tangent(const LatticeState& x, const Seed& z, long k,
                                 const std::vector<double>& times,
                                 const IntegratorConfig& cfg) {
  return evolve_second_tangent(x, seed_direction(x, z), btilde_direction(x, k), times, cfg);
}

SecondGrid nested_difference_oracle(const LatticeState& x, const Direction& u,
                                    const Direction& w, const std::vector<double>& times,
                                    const IntegratorConfig& cfg, double h) {
  const std::size_t n = x.size();
  auto shifted = [&](double su, double sw) {
    LatticeState s = x;
    for (std::size_t i = 0; i < n; ++i) {
      s.a[i] += su * h * u.da[i] + sw * h * w.da[i];
      s.b[i] += su * h * u.db[i] + sw * h * w.db[i];
    }
    return integrate(s, FlaschkaFlow::toda(), times, cfg);
  };
  const Trajectory pp = shifted(1, 1), pm = shifted(1, -1), mp = shifted(-1, 1),
                   mm = shifted(-1, -1);
  SecondGrid g;
  g.offset = x.offset;
  g.times = pp.times;
  const double denom = 4.0 * h * h;
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> sa(n), sb(n);
    for (std::size_t i = 0; i < n; ++i) {
      sa[i] = (pp.states[k].a[i] - pm.states[k].a[i] - mp.states[k].a[i] +
               mm.states[k].a[i]) / denom;
      sb[i] = (pp.states[k].b[i] - pm.states[k].b[i] - mp.states[k].b[i] +
               mm.states[k].b[i]) / denom;
    }
    g.d2a.push_back(std::move(sa));
    g.d2b.push_back(std::move(sb));
  }
  return g;
}

}  // namespace todalab
