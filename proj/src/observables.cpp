#include "todalab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <string>

#include "todalab/bounds.hpp"
#include "todalab/error.hpp"
#include "todalab/jacobi.hpp"

namespace todalab {

bool Observable::supports(long n) const {
  return std::binary_search(support.begin(), support.end(), n);
}

BasicObservables basic_observables(long n) {
  BasicObservables o;
  o.A.name = "A_" + std::to_string(n);
  o.A.support = {n};
  o.A.eval = [n](const LatticeState& x) { return x.a_at(n); };
  o.A.d_da = [n](const LatticeState&, long k) { return k == n ? 1.0 : 0.0; };
  o.A.d_db = [](const LatticeState&, long) { return 0.0; };
  o.A.declared_norms = {1.0};

  o.B.name = "B_" + std::to_string(n);
  o.B.support = {n};
  o.B.eval = [n](const LatticeState& x) { return x.b_at(n); };
  o.B.d_da = [](const LatticeState&, long) { return 0.0; };
  o.B.d_db = [n](const LatticeState&, long k) { return k == n ? 1.0 : 0.0; };
  o.B.declared_norms = {1.0};
  return o;
}

Observable windowed_hamiltonian(long lo, long hi) {
  if (hi < lo) throw invalid_argument("windowed_hamiltonian: empty site range");
  Observable h;
  h.name = "H[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
  for (long k = lo; k <= hi; ++k) h.support.push_back(k);
  h.eval = [lo, hi](const LatticeState& x) {
    double s = 0.0;
    for (long k = lo; k <= hi; ++k) {
      const double a = x.a_at(k), b = x.b_at(k);
      s += 2.0 * b * b + 4.0 * a * a - 2.0 * std::log(2.0 * std::fabs(a)) - 1.0;
    }
    return s;
  };
  h.d_da = [lo, hi](const LatticeState& x, long k) {
    if (k < lo || k > hi) return 0.0;
    const double a = x.a_at(k);
    return 8.0 * a - 2.0 / a;
  };
  h.d_db = [lo, hi](const LatticeState& x, long k) {
    if (k < lo || k > hi) return 0.0;
    return 4.0 * x.b_at(k);
  };
  return h;
}

namespace {

double d_btilde(const Observable& A, const LatticeState& x, long k) {
  return A.d_db(x, k + 1) - A.d_db(x, k);
}

// Sites k where a_k-derivative or b~_k-derivative of B can be nonzero.
std::vector<long> bracket_sites(const Observable& A, const Observable& B) {
  std::set<long> ks;
  for (const Observable* o : {&A, &B}) {
    for (long n : o->support) {
      ks.insert(n);
      ks.insert(n - 1);
    }
  }
  return {ks.begin(), ks.end()};
}

}  // namespace

double poisson_bracket(const Observable& A, const Observable& B, const LatticeState& x) {
  double s = 0.0;
  for (long k : bracket_sites(A, B)) {
    const double term = A.d_da(x, k) * d_btilde(B, x, k) - d_btilde(A, x, k) * B.d_da(x, k);
    if (term != 0.0) s += x.a_at(k) * term;
  }
  return 0.25 * s;
}

std::vector<Seed> required_seeds(const Observable& B) {
  std::set<long> as, bs;
  for (long n : B.support) {
    as.insert(n - 1);
    as.insert(n);
    bs.insert(n);
    bs.insert(n + 1);
  }
  std::vector<Seed> out;
  for (long m : as) out.push_back({m, Coord::kA});
  for (long m : bs) out.push_back({m, Coord::kB});
  return out;
}

GridSet compute_grids(const LatticeState& x, const std::vector<Seed>& seeds,
                      const std::vector<double>& times, const FlaschkaFlow& flow,
                      const IntegratorConfig& cfg, int guard) {
  std::vector<std::future<SensitivityGrid>> jobs;
  jobs.reserve(seeds.size());
  for (const Seed& s : seeds) {
    jobs.push_back(std::async(std::launch::async, [&, s] {
      return evolve_tangent(x, s, times, flow, cfg, guard);
    }));
  }
  GridSet out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    out.emplace(SeedKey{seeds[i].m, seeds[i].coord}, jobs[i].get());
  }
  return out;
}

namespace {

const SensitivityGrid& grid_for(const GridSet& grids, const Observable& B, long m,
                                Coord c) {
  const auto it = grids.find(SeedKey{m, c});
  if (it == grids.end()) {
    std::string need;
    for (const Seed& s : required_seeds(B)) {
      if (!need.empty()) need += ", ";
      need += seed_name(s);
    }
    throw invalid_argument("evolved_bracket: missing sensitivity grid for " +
                           seed_name({m, c}) + "; " + B.name + " requires seeds {" +
                           need + "}");
  }
  return it->second;
}

// ∂(A ∘ Φ_t)/∂z at one sample, contracting A's derivatives at the evolved
// state with the sensitivity grid for z.
double evolved_derivative(const Observable& A, const SensitivityGrid& g,
                          std::size_t sample) {
  if (sample >= g.times.size()) {
    throw invalid_argument("evolved_bracket: sample index out of range");
  }
  const LatticeState& xt = g.base[sample];
  double s = 0.0;
  for (long n : A.support) {
    if (n < g.offset || n >= g.offset + static_cast<long>(g.sites())) {
      throw margin_error("evolved_bracket: support site " + std::to_string(n) +
                         " lies outside the sensitivity window");
    }
    const std::size_t i = static_cast<std::size_t>(n - g.offset);
    s += A.d_da(xt, n) * g.da[sample][i] + A.d_db(xt, n) * g.db[sample][i];
  }
  return s;
}

}  // namespace

double evolved_bracket(const Observable& A, const Observable& B, const LatticeState& x,
                       const GridSet& grids, std::size_t sample) {
  std::set<long> ks;
  for (long n : B.support) {
    ks.insert(n - 1);
    ks.insert(n);
  }
  double s = 0.0;
  for (long k : ks) {
    const double dB_dbt = d_btilde(B, x, k);
    const double dB_da = B.d_da(x, k);
    double term = 0.0;
    if (dB_dbt != 0.0) {
      term += evolved_derivative(A, grid_for(grids, B, k, Coord::kA), sample) * dB_dbt;
    }
    if (dB_da != 0.0) {
      const double dA_bt =
          evolved_derivative(A, grid_for(grids, B, k + 1, Coord::kB), sample) -
          evolved_derivative(A, grid_for(grids, B, k, Coord::kB), sample);
      term -= dA_bt * dB_da;
    }
    s += x.a_at(k) * term;
  }
  return 0.25 * s;
}

std::vector<double> derivative_norms(const Observable& A,
                                     const std::vector<LatticeState>& states) {
  if (!A.declared_norms.empty()) {
    if (A.declared_norms.size() != A.support.size()) {
      throw invalid_argument("observable " + A.name +
                             ": declared norms do not match the support size");
    }
    return A.declared_norms;
  }
  std::vector<double> out(A.support.size(), 0.0);
  for (const LatticeState& s : states) {
    for (std::size_t i = 0; i < A.support.size(); ++i) {
      const long n = A.support[i];
      out[i] = std::max(out[i], std::fabs(A.d_da(s, n)) + std::fabs(A.d_db(s, n)));
    }
  }
  return out;
}

BracketBoundReport check_bracket_bound(const Observable& A, const Observable& B,
                                       const LatticeState& x, const GridSet& grids,
                                       double mu) {
  if (grids.empty()) throw invalid_argument("check_bracket_bound: no sensitivity grids");
  const SensitivityGrid& any = grids.begin()->second;
  BracketBoundReport rep;
  rep.times = any.times;
  rep.C = observables_prefactor(mu);
  rep.a_sup = std::fabs(x.a_bg);
  for (double a : x.a) rep.a_sup = std::max(rep.a_sup, std::fabs(a));
  rep.v = velocity_toda(mu, jacobi_norm(x));
  const auto na = derivative_norms(A, any.base);
  const auto nb = derivative_norms(B, {x});
  for (std::size_t ti = 0; ti < rep.times.size(); ++ti) {
    const double t = std::fabs(rep.times[ti]);
    double env = 0.0;
    for (std::size_t i = 0; i < A.support.size(); ++i) {
      for (std::size_t j = 0; j < B.support.size(); ++j) {
        const double d = static_cast<double>(std::labs(A.support[i] - B.support[j]));
        env += na[i] * nb[j] * std::exp(-mu * (d - rep.v * t));
      }
    }
    env *= rep.C * rep.a_sup;
    const double br = evolved_bracket(A, B, x, grids, ti);
    rep.bracket.push_back(br);
    rep.bound.push_back(env);
    if (env > 0.0) rep.max_ratio = std::max(rep.max_ratio, std::fabs(br) / env);
    if (std::fabs(br) > env * (1.0 + 1e-9)) ++rep.violations;
  }
  return rep;
}

double flow_derivative_fd(const Observable& A, const LatticeState& x,
                          const FlaschkaFlow& flow, double h) {
  if (!(h > 0.0)) throw invalid_argument("flow_derivative_fd: step must be positive");
  const std::size_t n = x.size();
  auto shot = [&](double sign) {
    std::vector<double> y(2 * n);
    std::copy(x.a.begin(), x.a.end(), y.begin());
    std::copy(x.b.begin(), x.b.end(), y.begin() + static_cast<long>(n));
    OdeRhs f = [&](double, const double* yy, double* dy) {
      flow.eval(n, yy, yy + n, x.a_bg, x.b_bg, dy, dy + n);
      for (std::size_t i = 0; i < 2 * n; ++i) dy[i] *= sign;
    };
    IntegratorConfig cfg;
    cfg.method = Method::kRk4Fixed;
    cfg.step = h / 16.0;
    const auto sol = integrate_ode(f, std::move(y), {0.0, h}, cfg);
    LatticeState out = x;
    const auto& yf = sol.states.back();
    std::copy(yf.begin(), yf.begin() + static_cast<long>(n), out.a.begin());
    std::copy(yf.begin() + static_cast<long>(n), yf.end(), out.b.begin());
    return A.eval(out);
  };
  return (shot(1.0) - shot(-1.0)) / (2.0 * h);
}

}  // namespace todalab
