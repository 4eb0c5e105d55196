#pragma once

#include <cstdint>
#include <vector>

#include "todalab/error.hpp"
#include "todalab/lattice.hpp"

namespace todalab {

// Order r plus coefficients c_0..c_r (c_0 = 1).
struct HierarchySpec {
  int r = 0;
  std::vector<double> c{1.0};

  void validate() const;
  // Number of extra sites reached on each side by the order-r field.
  int reach() const { return r + 1; }
  static HierarchySpec toda() { return {}; }
};

// Diagonal moments <d_n, L^k d_n> and scaled next-diagonal elements
// 2 a_n <d_{n+1}, L^k d_n> for k = 0..kmax at one site.
template <class T>
struct MomentColumn {
  std::vector<T> g;
  std::vector<T> h;
};

namespace detail {

// Applies L repeatedly to the unit vector at padded index c. The arrays must
// hold at least kmax + 2 valid entries on each side of c.
template <class T>
void band_moments(const T* a, const T* b, std::size_t c, int kmax,
                  std::vector<T>& work, std::vector<T>& next, T* g, T* h) {
  const std::size_t width = 2 * static_cast<std::size_t>(kmax) + 3;
  work.assign(width, T(0.0));
  next.assign(width, T(0.0));
  const std::size_t mid = static_cast<std::size_t>(kmax) + 1;
  const std::size_t base = c - mid;  // padded index of work[0]
  work[mid] = T(1.0);
  g[0] = T(1.0);
  h[0] = T(0.0);
  for (int k = 1; k <= kmax; ++k) {
    const std::size_t j0 = mid - static_cast<std::size_t>(k);
    const std::size_t j1 = mid + static_cast<std::size_t>(k);
    for (std::size_t j = j0; j <= j1; ++j) {
      const std::size_t p = base + j;
      next[j] = a[p - 1] * work[j - 1] + b[p] * work[j] + a[p] * work[j + 1];
    }
    std::swap(work, next);
    g[k] = work[mid];
    h[k] = 2.0 * a[c] * work[mid + 1];
  }
}

// Window plus a halo of `pad` background sites on each side.
template <class T>
struct Padded {
  std::vector<T> a;
  std::vector<T> b;
  std::size_t pad = 0;

  Padded(std::size_t n, const T* wa, const T* wb, double a_bg, double b_bg,
         std::size_t halo)
      : a(n + 2 * halo, T(a_bg)), b(n + 2 * halo, T(b_bg)), pad(halo) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i + halo] = wa[i];
      b[i + halo] = wb[i];
    }
  }
};

// ȧ_n = a_n (g_{n+1} - g_n), ḃ_n = h_n - h_{n-1} with
// g_n = Σ_j c_{r-j} g̃^(j+1)_n and h_n likewise.
template <class T>
void hierarchy_field(std::size_t n, const T* a, const T* b, double a_bg,
                     double b_bg, const HierarchySpec& spec, T* da, T* db) {
  const int kmax = spec.r + 1;
  const std::size_t halo = static_cast<std::size_t>(kmax) + 3;
  Padded<T> pad(n, a, b, a_bg, b_bg, halo);
  std::vector<T> work, next, gk(kmax + 1), hk(kmax + 1);
  // Combined g, h for window sites -1..n (shifted by one).
  std::vector<T> g(n + 2), h(n + 2);
  for (std::size_t i = 0; i < n + 2; ++i) {
    const std::size_t c = halo + i - 1;
    band_moments(pad.a.data(), pad.b.data(), c, kmax, work, next, gk.data(),
                 hk.data());
    T gs(0.0), hs(0.0);
    for (int j = 0; j <= spec.r; ++j) {
      const double cj = spec.c[spec.r - j];
      if (cj == 0.0) continue;
      gs += cj * gk[j + 1];
      hs += cj * hk[j + 1];
    }
    g[i] = gs;
    h[i] = hs;
  }
  for (std::size_t i = 0; i < n; ++i) {
    da[i] = a[i] * (g[i + 2] - g[i + 1]);
    db[i] = h[i + 1] - h[i];
  }
}

}  // namespace detail

// Double-precision padded view used for moments of a state near or beyond its
// window edges.
class PaddedLattice {
 public:
  // Supports moments up to power kmax at sites up to `extent` beyond the window.
  PaddedLattice(const LatticeState& s, int extent, int kmax);
  // Moments up to kmax at site n; n +- (kmax + 1) must fall inside the pad.
  MomentColumn<double> moments(long n, int kmax) const;

 private:
  detail::Padded<double> pad_;
  long first_;  // site number of pad_.a[0]
};

// Strict matrix elements: [n - j, n + j] must lie inside the window.
double g_tilde(const LatticeState& s, int j, long n);
double h_tilde(const LatticeState& s, int j, long n);

Fields hierarchy_rhs(const LatticeState& s, const HierarchySpec& spec);

// lambda_r = 2^-r binom(r, r/2) for even r, 0 for odd r.
double lambda_const(int r);

double hierarchy_hamiltonian(const LatticeState& s, const HierarchySpec& spec);

// Even-order flow restricted to b = 0. Returns the a-field; db is zero.
Fields kvm_rhs(const LatticeState& s, const HierarchySpec& spec);

struct PathCounts {
  std::uint64_t eta = 0;  // paths of length j+1 from n back to n
  std::uint64_t xi = 0;   // paths of length j+1 from n to n+1
};

// Motzkin-type path counts for the step set {-1, 0, +1}.
PathCounts path_counts(int j);

std::uint64_t binomial(int n, int k);

}  // namespace todalab
