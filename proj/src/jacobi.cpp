#include "todalab/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "todalab/error.hpp"

namespace todalab {

JacobiMatrix jacobi_matrix(const LatticeState& s) {
  if (s.size() < 2) throw invalid_argument("jacobi_matrix: window must hold at least 2 sites");
  JacobiMatrix J;
  J.diag = s.b;
  J.offdiag.assign(s.a.begin(), s.a.end() - 1);
  return J;
}

std::size_t sturm_count(const JacobiMatrix& J, double x) {
  const std::size_t n = J.diag.size();
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double off2 = i == 0 ? 0.0 : J.offdiag[i - 1] * J.offdiag[i - 1];
    d = J.diag[i] - x - (i == 0 ? 0.0 : off2 / d);
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

SpectrumEdges spectrum_edges(const JacobiMatrix& J, double tol) {
  const std::size_t n = J.diag.size();
  if (n == 0) throw invalid_argument("spectrum_edges: empty matrix");
  if (J.offdiag.size() + 1 != n) {
    throw invalid_argument("spectrum_edges: off-diagonal length must be n - 1");
  }
  // Gershgorin interval.
  double lo = J.diag[0], hi = J.diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::fabs(J.offdiag[i - 1]) : 0.0) +
                     (i + 1 < n ? std::fabs(J.offdiag[i]) : 0.0);
    lo = std::min(lo, J.diag[i] - r);
    hi = std::max(hi, J.diag[i] + r);
  }
  const double span = std::max(hi - lo, 1.0);
  lo -= 1e-12 * span;
  hi += 1e-12 * span;

  auto bisect = [&](std::size_t k) {
    // Smallest x with count(x) > k, i.e. the (k+1)-th eigenvalue.
    double l = lo, h = hi;
    while (h - l > tol) {
      const double mid = 0.5 * (l + h);
      if (mid <= l || mid >= h) break;
      if (sturm_count(J, mid) > k) {
        h = mid;
      } else {
        l = mid;
      }
    }
    return 0.5 * (l + h);
  };
  return {bisect(0), bisect(n - 1)};
}

double jacobi_norm(const JacobiMatrix& J) {
  const auto e = spectrum_edges(J);
  return std::max(std::fabs(e.lowest), std::fabs(e.highest));
}

double jacobi_norm(const LatticeState& s) { return jacobi_norm(jacobi_matrix(s)); }

std::vector<double> jacobi_apply(const JacobiMatrix& J, const std::vector<double>& x) {
  const std::size_t n = J.diag.size();
  if (x.size() != n) throw invalid_argument("jacobi_apply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = J.diag[i] * x[i];
    if (i > 0) v += J.offdiag[i - 1] * x[i - 1];
    if (i + 1 < n) v += J.offdiag[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

}  // namespace todalab
