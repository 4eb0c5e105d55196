#pragma once

#include <vector>

#include "todalab/flow.hpp"
#include "todalab/hierarchy.hpp"
#include "todalab/lattice.hpp"
#include "todalab/perturbation.hpp"

namespace todalab {

Fields perturbed_rhs(const LatticeState& s, const PerturbationSpec& p);
Fields perturbed_hierarchy_rhs(const LatticeState& s, const HierarchySpec& spec,
                               const PerturbationSpec& p);

// Σ_n W(ln 4 a_n^2) over the window.
double onsite_energy(const LatticeState& s, const PerturbationSpec& p);

struct TrajectoryMonitors {
  double C1 = 0.0;  // sup_t max(||a||, ||b||)
  double C2 = 0.0;  // sup_t sup_n 1/|a_n|
  double a_star = 0.0;  // inf_n |a_n(0)|
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<double> Lnorm_t;
  // ||L|| grows monotonically across the last 20% of samples.
  bool unbounded_flag = false;
};

TrajectoryMonitors monitor_trajectory(const Trajectory& traj);

// Largest excess of ||L(t)|| over ||L(0)|| + ||W'|| t across the samples
// (non-positive when the linear growth estimate holds).
double linear_growth_excess(const TrajectoryMonitors& m, double dw_norm);

}  // namespace todalab
