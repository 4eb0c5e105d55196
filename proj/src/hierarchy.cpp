#include "todalab/hierarchy.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace todalab {

void HierarchySpec::validate() const {
  if (r < 0) throw invalid_argument("hierarchy: order r must be >= 0");
  if (c.size() != static_cast<std::size_t>(r) + 1) {
    throw invalid_argument("hierarchy: expected " + std::to_string(r + 1) +
                           " coefficients c_0..c_r, got " + std::to_string(c.size()));
  }
  if (c[0] != 1.0) throw invalid_argument("hierarchy: c_0 must equal 1");
  for (double v : c) {
    if (!std::isfinite(v)) throw invalid_argument("hierarchy: coefficients must be finite");
  }
}

PaddedLattice::PaddedLattice(const LatticeState& s, int extent, int kmax)
    : pad_(s.size(), s.a.data(), s.b.data(), s.a_bg, s.b_bg,
           static_cast<std::size_t>(extent + kmax + 2)),
      first_(s.offset - extent - kmax - 2) {}

MomentColumn<double> PaddedLattice::moments(long n, int kmax) const {
  const long c = n - first_;
  const long last = static_cast<long>(pad_.a.size()) - 1;
  if (kmax < 0 || c - kmax - 1 < 0 || c + kmax + 1 > last) {
    throw margin_error("moments at site " + std::to_string(n) + " up to power " +
                       std::to_string(kmax) + " need radius " +
                       std::to_string(kmax + 1) + " inside the padded window");
  }
  MomentColumn<double> m;
  m.g.resize(kmax + 1);
  m.h.resize(kmax + 1);
  std::vector<double> work, next;
  detail::band_moments(pad_.a.data(), pad_.b.data(), static_cast<std::size_t>(c),
                       kmax, work, next, m.g.data(), m.h.data());
  return m;
}

namespace {

void require_margin(const LatticeState& s, int j, long n) {
  if (j < 0) throw invalid_argument("matrix element power must be >= 0");
  if (!s.contains(n - j) || !s.contains(n + j)) {
    throw margin_error("site " + std::to_string(n) + " with power " +
                       std::to_string(j) + " needs radius " + std::to_string(j) +
                       " inside window [" + std::to_string(s.lo()) + ", " +
                       std::to_string(s.hi()) + "]");
  }
}

}  // namespace

double g_tilde(const LatticeState& s, int j, long n) {
  require_margin(s, j, n);
  return PaddedLattice(s, 0, j).moments(n, j).g[j];
}

double h_tilde(const LatticeState& s, int j, long n) {
  require_margin(s, j, n);
  return PaddedLattice(s, 0, j).moments(n, j).h[j];
}

Fields hierarchy_rhs(const LatticeState& s, const HierarchySpec& spec) {
  spec.validate();
  Fields f;
  f.da.resize(s.size());
  f.db.resize(s.size());
  detail::hierarchy_field(s.size(), s.a.data(), s.b.data(), s.a_bg, s.b_bg, spec,
                          f.da.data(), f.db.data());
  return f;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      throw numerical_error("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                            ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

double lambda_const(int r) {
  if (r < 0) throw invalid_argument("lambda: r must be >= 0");
  if (r % 2 != 0) return 0.0;
  return std::ldexp(static_cast<double>(binomial(r, r / 2)), -r);
}

double hierarchy_hamiltonian(const LatticeState& s, const HierarchySpec& spec) {
  spec.validate();
  const int kmax = spec.r + 2;
  const PaddedLattice pad(s, kmax, kmax);
  double total = 0.0;
  for (long k = s.lo() - kmax; k <= s.hi() + kmax; ++k) {
    const auto m = pad.moments(k, kmax);
    for (int j = 0; j <= spec.r; ++j) {
      const double cj = spec.c[spec.r - j];
      if (cj == 0.0) continue;
      total += cj * (m.g[j + 2] - lambda_const(j + 2));
    }
  }
  return 4.0 / (spec.r + 2) * total;
}

Fields kvm_rhs(const LatticeState& s, const HierarchySpec& spec) {
  spec.validate();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.b[i] != 0.0) {
      throw domain_error("kvm_rhs: constraint b = 0 violated at site " +
                         std::to_string(s.offset + static_cast<long>(i)));
    }
  }
  if (s.b_bg != 0.0) throw domain_error("kvm_rhs: background b must be 0");
  for (int j = 0; j <= spec.r; j += 2) {
    if (spec.c[spec.r - j] != 0.0) {
      throw invalid_argument("kvm_rhs: not an even-order flow (c_" +
                             std::to_string(spec.r - j) + " multiplies an odd power)");
    }
  }
  Fields f = hierarchy_rhs(s, spec);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::fabs(f.db[i]) > 1e-12) {
      throw numerical_error("kvm_rhs: b-field " + std::to_string(f.db[i]) +
                            " at site " + std::to_string(s.offset + static_cast<long>(i)) +
                            " breaks the b = 0 constraint");
    }
    f.db[i] = 0.0;
  }
  return f;
}

PathCounts path_counts(int j) {
  if (j < 0) throw invalid_argument("path_counts: j must be >= 0");
  const int len = j + 1;
  unsigned __int128 eta = 0, xi = 0;
  for (int k = 0; k <= len; ++k) {
    const unsigned __int128 choose_steps = binomial(len, k);
    if (k % 2 == 0) {
      eta += choose_steps * binomial(k, k / 2);
    } else {
      xi += choose_steps * binomial(k, (k + 1) / 2);
    }
  }
  const auto cap = std::numeric_limits<std::uint64_t>::max();
  if (eta > cap || xi > cap) {
    throw numerical_error("path_counts: j = " + std::to_string(j) + " overflows 64 bits");
  }
  return {static_cast<std::uint64_t>(eta), static_cast<std::uint64_t>(xi)};
}

}  // namespace todalab
