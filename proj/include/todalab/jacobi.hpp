#pragma once

#include <vector>

#include "todalab/lattice.hpp"

namespace todalab {

// Symmetric tridiagonal matrix: diagonal b, off-diagonal a.
struct JacobiMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;  // length diag.size() - 1
};

// Truncation of L to the window; the coupling a_hi to the site beyond the
// window is dropped.
JacobiMatrix jacobi_matrix(const LatticeState& s);

// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t sturm_count(const JacobiMatrix& J, double x);

struct SpectrumEdges {
  double lowest;
  double highest;
};

// Extreme eigenvalues by bisection on the Sturm count, absolute tolerance tol.
SpectrumEdges spectrum_edges(const JacobiMatrix& J, double tol = 1e-13);

// Spectral norm max(|lowest|, |highest|).
double jacobi_norm(const JacobiMatrix& J);
double jacobi_norm(const LatticeState& s);

// Dense product y = J x, for tests and oracles.
std::vector<double> jacobi_apply(const JacobiMatrix& J, const std::vector<double>& x);

}  // namespace todalab
