#include "todalab/lattice.hpp"

#include <cmath>
#include <random>
#include <string>

#include "todalab/error.hpp"
#include "todalab/hierarchy.hpp"

namespace todalab {

void LatticeState::validate() const {
  if (a.size() != b.size()) {
    throw invalid_argument("lattice state: a and b differ in length (" +
                           std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
  }
  if (a.size() < 3) {
    throw invalid_argument("lattice state: window must hold at least 3 sites");
  }
  if (!std::isfinite(a_bg) || a_bg == 0.0 || !std::isfinite(b_bg)) {
    throw invalid_argument("lattice state: background a must be finite and nonzero");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long n = offset + static_cast<long>(i);
    if (!std::isfinite(a[i]) || a[i] == 0.0) {
      throw domain_error("lattice state: a_" + std::to_string(n) +
                         " must be finite and nonzero");
    }
    if (!std::isfinite(b[i])) {
      throw domain_error("lattice state: b_" + std::to_string(n) + " is not finite");
    }
  }
}

LatticeState LatticeState::background(std::size_t n, long offset, double a_bg,
                                      double b_bg) {
  LatticeState s;
  s.offset = offset;
  s.a.assign(n, a_bg);
  s.b.assign(n, b_bg);
  s.a_bg = a_bg;
  s.b_bg = b_bg;
  return s;
}

LatticeState flaschka_forward(const PQState& s) {
  if (s.q.size() != s.p.size()) {
    throw invalid_argument("pq state: q and p differ in length");
  }
  if (s.q.size() < 2) {
    throw invalid_argument("pq state: need at least 2 sites");
  }
  LatticeState out;
  out.offset = s.offset;
  const std::size_t n = s.q.size() - 1;
  out.a.resize(n);
  out.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 0.5 * std::exp(-(s.q[i + 1] - s.q[i]) / 2.0);
    const double b = -0.5 * s.p[i];
    if (!std::isfinite(a) || a == 0.0 || !std::isfinite(b)) {
      throw numerical_error("flaschka_forward: non-finite or vanishing value at site " +
                            std::to_string(s.offset + static_cast<long>(i)));
    }
    out.a[i] = a;
    out.b[i] = b;
  }
  return out;
}

RelState flaschka_inverse(const LatticeState& s) {
  RelState out;
  out.offset = s.offset;
  out.r.resize(s.size());
  out.p.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.a[i] == 0.0) {
      throw domain_error("flaschka_inverse: a_" +
                         std::to_string(s.offset + static_cast<long>(i)) +
                         " = 0 is a singular point of the parametrization");
    }
    out.r[i] = -std::log(4.0 * s.a[i] * s.a[i]);
    out.p[i] = -2.0 * s.b[i];
  }
  return out;
}

LatticeState flaschka_from_relative(const RelState& s) {
  if (s.r.size() != s.p.size()) {
    throw invalid_argument("relative state: r and p differ in length");
  }
  LatticeState out;
  out.offset = s.offset;
  out.a.resize(s.r.size());
  out.b.resize(s.r.size());
  for (std::size_t i = 0; i < s.r.size(); ++i) {
    out.a[i] = 0.5 * std::exp(-s.r[i] / 2.0);
    out.b[i] = -0.5 * s.p[i];
  }
  return out;
}

void toda_field(std::size_t n, const double* a, const double* b, double a_bg,
                double b_bg, double* da, double* db) {
  for (std::size_t i = 0; i < n; ++i) {
    const double b_next = i + 1 < n ? b[i + 1] : b_bg;
    const double a_prev = i > 0 ? a[i - 1] : a_bg;
    da[i] = a[i] * (b_next - b[i]);
    db[i] = 2.0 * (a[i] * a[i] - a_prev * a_prev);
  }
}

Fields toda_rhs(const LatticeState& s) {
  Fields f;
  f.da.resize(s.size());
  f.db.resize(s.size());
  toda_field(s.size(), s.a.data(), s.b.data(), s.a_bg, s.b_bg, f.da.data(),
             f.db.data());
  return f;
}

double hamiltonian_ab(const LatticeState& s) {
  double h = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double a = s.a[i];
    if (a == 0.0 || !std::isfinite(a)) {
      throw domain_error("hamiltonian_ab: a_" +
                         std::to_string(s.offset + static_cast<long>(i)) +
                         " must be finite and nonzero");
    }
    h += 2.0 * s.b[i] * s.b[i] + 4.0 * a * a - 2.0 * std::log(2.0 * std::fabs(a)) - 1.0;
  }
  return h;
}

std::vector<double> trace_invariants(const LatticeState& s, int jmax) {
  if (jmax < 1) throw invalid_argument("trace_invariants: jmax must be >= 1");
  const PaddedLattice pad(s, jmax, jmax);
  const LatticeState bg = LatticeState::background(2 * jmax + 1, -jmax, s.a_bg, s.b_bg);
  const PaddedLattice pad_bg(bg, 0, jmax);
  const auto m_bg = pad_bg.moments(0, jmax);
  std::vector<double> out(jmax, 0.0);
  for (long n = s.lo() - jmax; n <= s.hi() + jmax; ++n) {
    const auto m = pad.moments(n, jmax);
    for (int j = 1; j <= jmax; ++j) out[j - 1] += m.g[j] - m_bg.g[j];
  }
  return out;
}

LatticeState make_random_state(std::size_t n, long offset, int width,
                               double amplitude, std::uint64_t seed) {
  LatticeState s = LatticeState::background(n, offset);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (long site = -width; site <= width; ++site) {
    if (!s.contains(site)) continue;
    const std::size_t i = static_cast<std::size_t>(site - offset);
    s.a[i] = 0.5 * (1.0 + amplitude * u(rng));
    s.b[i] = 0.5 * amplitude * u(rng);
  }
  return s;
}

}  // namespace todalab
