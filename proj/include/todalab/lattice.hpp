#pragma once

#include <cstdint>
#include <vector>

namespace todalab {

// Finite window of Flaschka pairs. Site n lives at index n - offset; every
// site outside [offset, offset + size) reads the background pair.
struct LatticeState {
  long offset = 0;
  std::vector<double> a;
  std::vector<double> b;
  double a_bg = 0.5;
  double b_bg = 0.0;

  std::size_t size() const { return a.size(); }
  long lo() const { return offset; }
  long hi() const { return offset + static_cast<long>(a.size()) - 1; }
  bool contains(long n) const { return n >= lo() && n <= hi(); }
  double a_at(long n) const { return contains(n) ? a[n - offset] : a_bg; }
  double b_at(long n) const { return contains(n) ? b[n - offset] : b_bg; }

  // Throws on violated invariants (length, finiteness, a_n != 0).
  void validate() const;

  static LatticeState background(std::size_t n, long offset, double a_bg = 0.5,
                                 double b_bg = 0.0);
};

struct PQState {
  long offset = 0;
  std::vector<double> q;
  std::vector<double> p;
};

// Relative coordinates r_n = q_{n+1} - q_n together with momenta.
struct RelState {
  long offset = 0;
  std::vector<double> r;
  std::vector<double> p;
};

struct Fields {
  std::vector<double> da;
  std::vector<double> db;
};

// a_n = exp(-(q_{n+1}-q_n)/2)/2 and b_n = -p_n/2. The last stored site has no
// right neighbour and is dropped.
LatticeState flaschka_forward(const PQState& s);

// r_n = -ln(4 a_n^2), p_n = -2 b_n. Absolute positions are only recoverable
// up to an additive constant, so they are not returned.
RelState flaschka_inverse(const LatticeState& s);

// Inverse of flaschka_inverse.
LatticeState flaschka_from_relative(const RelState& s);

Fields toda_rhs(const LatticeState& s);

// Raw kernel on a window of n sites: a, b in, da, db out.
void toda_field(std::size_t n, const double* a, const double* b, double a_bg,
                double b_bg, double* da, double* db);

// Sum over the window of 2b^2 + 4a^2 - 2 ln(2|a|) - 1.
double hamiltonian_ab(const LatticeState& s);

// tr(L^j) - tr(L_bg^j) for j = 1..jmax, where the trace runs over every site
// whose moment differs from the background one.
std::vector<double> trace_invariants(const LatticeState& s, int jmax);

// Background state plus a compactly supported random bump of given width and
// amplitude centred on site 0. Deterministic for a given seed.
LatticeState make_random_state(std::size_t n, long offset, int width,
                               double amplitude, std::uint64_t seed);

}  // namespace todalab
