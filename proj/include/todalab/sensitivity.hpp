#pragma once

#include <string>
#include <vector>

#include "todalab/flow.hpp"
#include "todalab/integrator.hpp"
#include "todalab/lattice.hpp"

namespace todalab {

enum class Coord { kA, kB };

// Differentiation variable z = a_m or b_m.
struct Seed {
  long m = 0;
  Coord coord = Coord::kB;
};

std::string seed_name(const Seed& s);
Coord parse_coord(const std::string& c);

// Initial direction in (a, b) space.
struct Direction {
  std::vector<double> da;
  std::vector<double> db;
};

Direction seed_direction(const LatticeState& s, const Seed& seed);
// d/d b~_k = d/d b_{k+1} - d/d b_k.
Direction btilde_direction(const LatticeState& s, long k);

struct TangentState {
  LatticeState base;
  std::vector<double> da;
  std::vector<double> db;
  Seed seed;
};

Fields tangent_rhs(const TangentState& ts, const FlaschkaFlow& flow);

// Derivatives of (a_n(t), b_n(t)) with respect to one initial coordinate.
struct SensitivityGrid {
  long offset = 0;
  Seed seed;
  std::vector<double> times;
  std::vector<std::vector<double>> da;  // [sample][site]
  std::vector<std::vector<double>> db;
  std::vector<LatticeState> base;
  long boundary_margin = 0;  // min over samples of base and tangent margins
  bool clean = true;
  double truncation_estimate = 0.0;  // finite-difference grids only

  std::size_t sites() const { return da.empty() ? 0 : da.front().size(); }
  // max(|da|, |db|) at one sample and site.
  double magnitude(std::size_t ti, std::size_t i) const;
};

SensitivityGrid evolve_tangent(const LatticeState& x, const Seed& seed,
                               const std::vector<double>& times, const FlaschkaFlow& flow,
                               const IntegratorConfig& cfg, int guard = 0);

// Central difference (Φ_t(x + h e) - Φ_t(x - h e)) / 2h; h <= 0 selects
// 1e-5 max(1, |z|).
SensitivityGrid finite_difference_oracle(const LatticeState& x, const Seed& seed,
                                         const std::vector<double>& times,
                                         const FlaschkaFlow& flow,
                                         const IntegratorConfig& cfg, double h = 0.0);

// Mixed second derivative along two initial directions under the Toda flow.
struct SecondGrid {
  long offset = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> d2a;
  std::vector<std::vector<double>> d2b;
};

SecondGrid evolve_second_tangent(const LatticeState& x, const Direction& u,
                                 const Direction& w, const std::vector<double>& times,
                                 const IntegratorConfig& cfg);
// ∂²/∂z∂b~_k.
SecondGrid evolve_second_tangent(const LatticeState& x, const Seed& z, long k,
                                 const std::vector<double>& times,
                                 const IntegratorConfig& cfg);

SecondGrid nested_difference_oracle(const LatticeState& x, const Direction& u,
                                    const Direction& w, const std::vector<double>& times,
                                    const IntegratorConfig& cfg, double h = 1e-4);

// Distance from the window edge to the nearest site with |dx| above level.
long tangent_margin(const std::vector<double>& da, const std::vector<double>& db,
                    double level = kSignificance);

}  // namespace todalab
