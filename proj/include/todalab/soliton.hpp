#pragma once

#include "todalab/lattice.hpp"

namespace todalab {

struct SolitonSpec {
  double kappa = 1.0;
  int sign = 1;  // +1 travels right, -1 left
  double q = 0.0;
  double delta = 0.0;

  void validate() const;
};

struct FlaschkaPair {
  double a;
  double b;
};

struct PQPair {
  double q;
  double p;
};

// All closed forms are evaluated through softplus/logistic functions of the
// exponent z_n = -2 kappa n +- 2 sinh(kappa) t + delta, so no exponential is
// ever formed for large |z|.
FlaschkaPair soliton_flaschka(const SolitonSpec& s, long n, double t);
// Analytic time derivative of soliton_flaschka.
FlaschkaPair soliton_flaschka_dot(const SolitonSpec& s, long n, double t);
PQPair soliton_pq(const SolitonSpec& s, long n, double t);

double soliton_speed(const SolitonSpec& s);
double soliton_Lnorm(const SolitonSpec& s);

LatticeState soliton_state(const SolitonSpec& s, std::size_t n, long offset, double t);
PQState soliton_pq_state(const SolitonSpec& s, std::size_t n, long offset, double t);

}  // namespace todalab
