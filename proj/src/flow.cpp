#include "todalab/flow.hpp"

#include <algorithm>
#include <cmath>

#include "todalab/error.hpp"
#include "todalab/perturbed.hpp"

namespace todalab {

namespace {

template <class T>
void toda_kernel(std::size_t n, const T* a, const T* b, double a_bg, double b_bg, T* da,
                 T* db) {
  for (std::size_t i = 0; i < n; ++i) {
    const T b_next = i + 1 < n ? b[i + 1] : T(b_bg);
    const T a_prev = i > 0 ? a[i - 1] : T(a_bg);
    da[i] = a[i] * (b_next - b[i]);
    db[i] = 2.0 * (a[i] * a[i] - a_prev * a_prev);
  }
}

template <class T>
void eval_flow(const FlaschkaFlow& f, std::size_t n, const T* a, const T* b, double a_bg,
               double b_bg, T* da, T* db) {
  if (f.has_hierarchy()) {
    detail::hierarchy_field(n, a, b, a_bg, b_bg, f.spec, da, db);
  } else {
    toda_kernel(n, a, b, a_bg, b_bg, da, db);
  }
  if (f.has_perturbation() && !f.pert.is_zero()) {
    detail::add_onsite_forcing(n, a, a_bg, f.pert, db);
  }
}

}  // namespace

FlaschkaFlow FlaschkaFlow::toda() { return {}; }

FlaschkaFlow FlaschkaFlow::hierarchy(const HierarchySpec& spec) {
  FlaschkaFlow f;
  f.kind = FlowKind::kHierarchy;
  f.spec = spec;
  return f;
}

FlaschkaFlow FlaschkaFlow::perturbed(const PerturbationSpec& p) {
  FlaschkaFlow f;
  f.kind = FlowKind::kPerturbed;
  f.pert = p;
  return f;
}

FlaschkaFlow FlaschkaFlow::perturbed_hierarchy(const HierarchySpec& spec,
                                               const PerturbationSpec& p) {
  FlaschkaFlow f;
  f.kind = FlowKind::kPerturbedHierarchy;
  f.spec = spec;
  f.pert = p;
  return f;
}

std::string FlaschkaFlow::name() const {
  switch (kind) {
    case FlowKind::kToda: return "toda";
    case FlowKind::kHierarchy: return "hierarchy";
    case FlowKind::kPerturbed: return "perturbed";
    case FlowKind::kPerturbedHierarchy: return "perturbed-hierarchy";
  }
  return "unknown";
}

void FlaschkaFlow::validate() const {
  if (has_hierarchy()) spec.validate();
  if (has_perturbation()) pert.validate();
}

void FlaschkaFlow::eval(std::size_t n, const double* a, const double* b, double a_bg,
                        double b_bg, double* da, double* db) const {
  if (kind == FlowKind::kToda) {
    toda_field(n, a, b, a_bg, b_bg, da, db);
    return;
  }
  eval_flow(*this, n, a, b, a_bg, b_bg, da, db);
}

void FlaschkaFlow::eval(std::size_t n, const Dual<double>* a, const Dual<double>* b,
                        double a_bg, double b_bg, Dual<double>* da,
                        Dual<double>* db) const {
  eval_flow(*this, n, a, b, a_bg, b_bg, da, db);
}

Fields FlaschkaFlow::rhs(const LatticeState& s) const {
  validate();
  Fields f;
  f.da.resize(s.size());
  f.db.resize(s.size());
  eval(s.size(), s.a.data(), s.b.data(), s.a_bg, s.b_bg, f.da.data(), f.db.data());
  return f;
}

double FlaschkaFlow::conserved(const LatticeState& s) const {
  double e = has_hierarchy() ? hierarchy_hamiltonian(s, spec) : hamiltonian_ab(s);
  if (has_perturbation()) e += onsite_energy(s, pert);
  return e;
}

long state_margin(const LatticeState& s, double level) {
  const long n = static_cast<long>(s.size());
  long first = -1, last = -1;
  for (long i = 0; i < n; ++i) {
    if (std::fabs(s.a[i] - s.a_bg) > level || std::fabs(s.b[i] - s.b_bg) > level) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return n;
  return std::min(first, n - 1 - last);
}

bool same_signs(const LatticeState& ref, const LatticeState& s) {
  if (ref.size() != s.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((ref.a[i] > 0.0) != (s.a[i] > 0.0)) return false;
  }
  return true;
}

Trajectory integrate(const LatticeState& s, const FlaschkaFlow& flow,
                     const std::vector<double>& times, const IntegratorConfig& cfg,
                     int guard) {
  s.validate();
  flow.validate();
  const std::size_t n = s.size();
  std::vector<double> y(2 * n);
  std::copy(s.a.begin(), s.a.end(), y.begin());
  std::copy(s.b.begin(), s.b.end(), y.begin() + static_cast<long>(n));
  const double a_bg = s.a_bg, b_bg = s.b_bg;
  OdeRhs rhs = [&flow, n, a_bg, b_bg](double, const double* yy, double* dy) {
    flow.eval(n, yy, yy + n, a_bg, b_bg, dy, dy + n);
  };
  const OdeSolution sol = integrate_ode(rhs, std::move(y), times, cfg);

  Trajectory tr;
  tr.times = sol.times;
  tr.steps = sol.accepted_steps;
  tr.states.reserve(sol.states.size());
  tr.boundary_margin = static_cast<long>(n);
  for (const auto& st : sol.states) {
    LatticeState ls = s;
    std::copy(st.begin(), st.begin() + static_cast<long>(n), ls.a.begin());
    std::copy(st.begin() + static_cast<long>(n), st.end(), ls.b.begin());
    tr.boundary_margin = std::min(tr.boundary_margin, state_margin(ls));
    tr.states.push_back(std::move(ls));
  }
  tr.clean = tr.boundary_margin >= guard;
  tr.conserved_initial = flow.conserved(tr.states.front());
  for (const auto& st : tr.states) {
    tr.max_conserved_drift =
        std::max(tr.max_conserved_drift, std::fabs(flow.conserved(st) - tr.conserved_initial));
  }
  return tr;
}

}  // namespace todalab
