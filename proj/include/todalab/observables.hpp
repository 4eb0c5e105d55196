#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "todalab/flow.hpp"
#include "todalab/lattice.hpp"
#include "todalab/sensitivity.hpp"

namespace todalab {

// A function of the state with finite support and known partial derivatives.
struct Observable {
  std::string name;
  std::vector<long> support;  // sorted
  std::function<double(const LatticeState&)> eval;
  std::function<double(const LatticeState&, long)> d_da;
  std::function<double(const LatticeState&, long)> d_db;
  // Declared bounds on |∂A/∂a_n| + |∂A/∂b_n| for each support site; empty
  // means "measure along the trajectory".
  std::vector<double> declared_norms;

  bool supports(long n) const;
};

struct BasicObservables {
  Observable A;  // x -> a_n
  Observable B;  // x -> b_n
};

BasicObservables basic_observables(long n);

// Σ_{k=lo}^{hi} (2 b_k^2 + 4 a_k^2 - 2 ln(2|a_k|) - 1).
Observable windowed_hamiltonian(long lo, long hi);

// {A,B} = 1/4 Σ_n a_n [∂A/∂a_n ∂B/∂b~_n - ∂A/∂b~_n ∂B/∂a_n].
double poisson_bracket(const Observable& A, const Observable& B, const LatticeState& x);

// Seeds whose sensitivity grids are needed to evaluate {α_t(A), B}.
std::vector<Seed> required_seeds(const Observable& B);

struct SeedKey {
  long m;
  Coord coord;
  bool operator<(const SeedKey& o) const {
    return m != o.m ? m < o.m : static_cast<int>(coord) < static_cast<int>(o.coord);
  }
};

using GridSet = std::map<SeedKey, SensitivityGrid>;

// Sensitivity grids for every seed in required_seeds(B), computed in parallel.
GridSet compute_grids(const LatticeState& x, const std::vector<Seed>& seeds,
                      const std::vector<double>& times, const FlaschkaFlow& flow,
                      const IntegratorConfig& cfg, int guard);

// {α_t(A), B}(x) at sample index `sample` of the grids (chain rule through the
// sensitivity grids; A's derivatives are taken at the evolved state).
double evolved_bracket(const Observable& A, const Observable& B, const LatticeState& x,
                       const GridSet& grids, std::size_t sample);

// Per-site |∂A/∂a_n| + |∂A/∂b_n|, declared or measured as a sup over `states`.
std::vector<double> derivative_norms(const Observable& A,
                                     const std::vector<LatticeState>& states);

struct BracketBoundReport {
  std::vector<double> times;
  std::vector<double> bracket;
  std::vector<double> bound;
  std::size_t violations = 0;
  double C = 0.0;
  double a_sup = 0.0;
  double v = 0.0;
  double max_ratio = 0.0;
};

// |{α_t(A),B}(x)| <= C ||a|| Σ_{n,m} N_A(m) N_B(n) e^{-mu(|n-m| - v|t|)} with
// C = (2/sqrt 17)(1 + e^mu) and v the Toda velocity of x.
BracketBoundReport check_bracket_bound(const Observable& A, const Observable& B,
                                       const LatticeState& x, const GridSet& grids,
                                       double mu);

// Central difference of t -> A(Φ_t x) at t = 0 with step h (RK4 sub-steps).
double flow_derivative_fd(const Observable& A, const LatticeState& x,
                          const FlaschkaFlow& flow, double h = 1e-3);

}  // namespace todalab
