#pragma once

#include <string>
#include <vector>

#include "todalab/dual.hpp"
#include "todalab/hierarchy.hpp"
#include "todalab/integrator.hpp"
#include "todalab/lattice.hpp"
#include "todalab/perturbation.hpp"

namespace todalab {

enum class FlowKind { kToda, kHierarchy, kPerturbed, kPerturbedHierarchy };

// A vector field on Flaschka variables.
struct FlaschkaFlow {
  FlowKind kind = FlowKind::kToda;
  HierarchySpec spec;
  PerturbationSpec pert;

  static FlaschkaFlow toda();
  static FlaschkaFlow hierarchy(const HierarchySpec& spec);
  static FlaschkaFlow perturbed(const PerturbationSpec& p);
  static FlaschkaFlow perturbed_hierarchy(const HierarchySpec& spec,
                                          const PerturbationSpec& p);

  std::string name() const;
  void validate() const;
  bool has_hierarchy() const {
    return kind == FlowKind::kHierarchy || kind == FlowKind::kPerturbedHierarchy;
  }
  bool has_perturbation() const {
    return kind == FlowKind::kPerturbed || kind == FlowKind::kPerturbedHierarchy;
  }
  int order() const { return has_hierarchy() ? spec.r : 0; }

  void eval(std::size_t n, const double* a, const double* b, double a_bg, double b_bg,
            double* da, double* db) const;
  void eval(std::size_t n, const Dual<double>* a, const Dual<double>* b, double a_bg,
            double b_bg, Dual<double>* da, Dual<double>* db) const;

  Fields rhs(const LatticeState& s) const;
  // Energy functional conserved by this flow.
  double conserved(const LatticeState& s) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<LatticeState> states;
  double conserved_initial = 0.0;
  double max_conserved_drift = 0.0;  // max |E(t) - E(0)|
  // Smallest distance (in sites) between the window edge and any site whose
  // state differs from the background by more than the significance level.
  long boundary_margin = 0;
  bool clean = true;  // boundary_margin >= guard at every sample
  std::size_t steps = 0;
};

inline constexpr double kSignificance = 1e-10;

Trajectory integrate(const LatticeState& s, const FlaschkaFlow& flow,
                     const std::vector<double>& times, const IntegratorConfig& cfg,
                     int guard = 0);

// Distance from the window edge to the nearest site whose |a - a_bg| or
// |b - b_bg| exceeds `level`; equals the window size when none does.
long state_margin(const LatticeState& s, double level = kSignificance);

// Sign preservation check: true if every a_n keeps the sign it has in `ref`.
bool same_signs(const LatticeState& ref, const LatticeState& s);

}  // namespace todalab
