#pragma once

#include <functional>
#include <string>
#include <vector>

#include "todalab/integrator.hpp"
#include "todalab/lattice.hpp"
#include "todalab/lightcone.hpp"

namespace todalab {

enum class PotentialFamily { kToda, kQuartic, kCustom };

// Nearest-neighbour interaction potential V(r).
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::kQuartic;
  double beta = 0.1;  // quartic coefficient
  std::function<double(double)> custom_v, custom_dv, custom_d2v;

  static PotentialSpec toda();
  static PotentialSpec quartic(double beta);
  static PotentialSpec custom(std::function<double(double)> v, std::function<double(double)> dv,
                              std::function<double(double)> d2v);
  static PotentialFamily parse_family(const std::string& name);
  static std::string family_name(PotentialFamily f);

  double V(double x) const;
  double dV(double x) const;
  double d2V(double x) const;

  // Numerical checks of V(0) = V'(0) = 0, V''(0) > 0 and V >= 0 on a grid.
  void validate() const;
  // V grows without bound in both directions (known for the built-in families,
  // sampled out to |x| = 50 for custom ones).
  bool confining() const;
};

// Relative coordinates r_n = q_{n+1} - q_n and momenta; background (0, 0).
struct GHSState {
  long offset = 0;
  std::vector<double> r;
  std::vector<double> p;

  std::size_t size() const { return r.size(); }
  long lo() const { return offset; }
  long hi() const { return offset + static_cast<long>(r.size()) - 1; }
  void validate() const;
  static GHSState zero(std::size_t n, long offset);
};

struct GHSFields {
  std::vector<double> dr;
  std::vector<double> dp;
};

// ṙ_n = p_{n+1} - p_n, ṗ_n = V'(r_n) - V'(r_{n-1}).
GHSFields ghs_rhs(const GHSState& s, const PotentialSpec& V);

// Σ (p_n^2 / 2 + V(r_n)) over the window.
double ghs_energy(const GHSState& s, const PotentialSpec& V);

struct GHSTrajectory {
  std::vector<double> times;
  std::vector<GHSState> states;
  double energy_initial = 0.0;
  double max_energy_drift = 0.0;
  long boundary_margin = 0;
  bool clean = true;
};

GHSTrajectory ghs_integrate(const GHSState& s, const PotentialSpec& V,
                            const std::vector<double>& times, const IntegratorConfig& cfg,
                            int guard = 0);

enum class GHSCoord { kR, kP };

// ∂(r_n(t), p_n(t)) / ∂z for z = r_m or p_m.
struct GHSSensitivity {
  long offset = 0;
  long m = 0;
  GHSCoord coord = GHSCoord::kP;
  std::vector<double> times;
  std::vector<std::vector<double>> dr;
  std::vector<std::vector<double>> dp;
  GHSTrajectory base;

  MagnitudeGrid magnitudes() const;
};

GHSSensitivity ghs_tangent(const GHSState& s, long m, GHSCoord coord,
                           const PotentialSpec& V, const std::vector<double>& times,
                           const IntegratorConfig& cfg, int guard = 0);

// Smallest M with V(x) <= E implying |x| <= M (bisection on each side to 1e-10;
// closed form for the quartic family).
double energy_radius(const PotentialSpec& V, double E);

// Sampled quadratic lower bound min_{0 < |x| <= R} V(x) / x^2.
double quadratic_lower_bound(const PotentialSpec& V, double R, int samples = 4000);

struct GHSDiagnostics {
  double energy = 0.0;
  double radius = 0.0;          // M_E
  double quad_lower = 0.0;      // c_{M_E}, sampled stand-in
  double p2_bound = 0.0;        // sqrt(2E)
  double r2_bound = 0.0;        // sqrt(E / c_{M_E})
  double max_p2 = 0.0;
  double max_rinf = 0.0;
  double max_r2 = 0.0;
  double max_q_excess = 0.0;    // max_t ||q(t)||_inf - ||q(0)||_inf - sqrt(2E) t
  double max_energy_drift = 0.0;
  bool p2_ok = true;
  bool rinf_ok = true;
  bool r2_ok = true;
  bool q_ok = true;
  bool pass() const { return p2_ok && rinf_ok && r2_ok && q_ok; }
};

GHSDiagnostics ghs_stability_diagnostics(const GHSTrajectory& traj, const PotentialSpec& V);

// max(sup |V'(r_n(t))|^{1/2}, sup |V''(r_n(t))|^{1/2}, 1) over the samples.
double ghs_constant(const GHSTrajectory& traj, const PotentialSpec& V);

double ghs_velocity(double mu, const GHSTrajectory& traj, const PotentialSpec& V);

LightConeReport check_ghs_bound(const GHSSensitivity& sens, double mu, const PotentialSpec& V,
                                const LightConeOptions& opt);

// a_n = e^{-r_n/2}/2, b_n = -p_n/2.
LatticeState ghs_to_flaschka(const GHSState& s);
GHSState ghs_from_flaschka(const LatticeState& s);

}  // namespace todalab
