#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "todalab/bounds.hpp"
#include "todalab/hierarchy.hpp"
#include "todalab/sensitivity.hpp"

namespace todalab {

// Observed magnitudes on an (n, t) grid relative to a source site.
struct MagnitudeGrid {
  long offset = 0;
  long source = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // [sample][site]
};

// max(|da|, |db|) from a sensitivity grid.
MagnitudeGrid magnitudes(const SensitivityGrid& g);

// Theoretical upper envelope as a function of distance |n - m| and time.
struct Envelope {
  std::string kind;
  std::function<double(long, double)> eval;
  double bound_speed = 0.0;
  std::vector<std::pair<std::string, double>> params;
};

Envelope toda_envelope(double mu, double lnorm);
Envelope hierarchy_envelope(double mu, double lnorm, const HierarchySpec& spec,
                            HierarchyVelocityMode mode);
Envelope perturbed_envelope(double mu, double c1, double c2, double w2_norm);
Envelope perturbed_hierarchy_envelope(double mu, double c1, double c2, double w2_norm,
                                      const HierarchySpec& spec);
Envelope timedep_envelope(double mu, double lnorm, double w1_norm, double w2_norm,
                          double a_star);
Envelope ghs_envelope(double mu, double c);
// C G_mu(d) e^{rate t} [1 + D (e^{delta t} - 1)].
Envelope interpolation_shape_envelope(double mu, double c, double rate, double d_coef,
                                      double delta);
// Multiplies an envelope by a constant (used to force violations in fixtures).
Envelope scaled(Envelope e, double factor);

struct Violation {
  long n = 0;
  double t = 0.0;
  double observed = 0.0;
  double envelope = 0.0;
};

struct LightConeOptions {
  int guard = 20;
  double clean_level = 1e-10;
  double front_threshold = 1e-8;
  double rel_slack = 1e-9;
};

struct LightConeReport {
  std::string envelope_kind;
  std::vector<std::pair<std::string, double>> params;
  std::vector<Violation> violations;
  std::size_t checked = 0;
  double max_ratio = 0.0;  // max observed / envelope
  double empirical_front_speed = 0.0;
  double bound_speed = 0.0;
  bool clean = true;
};

LightConeReport verify_light_cone(const MagnitudeGrid& grid, const Envelope& env,
                                  const LightConeOptions& opt);

// Least-squares slope of distance against first time the magnitude reaches
// `threshold` (linear interpolation between samples). Distances whose first
// crossing is at t = 0 are excluded; returns 0 if fewer than 2 crossings.
double empirical_front_speed(const MagnitudeGrid& grid, double threshold);

// True if every site within `guard` of either edge stays at or below level.
bool guard_band_quiet(const MagnitudeGrid& grid, int guard, double level);

struct InterpolationFit {
  double mu = 0.0;
  double eps = 0.0;
  double C = 0.0;       // (8/sqrt 17) C_eps
  double v = 0.0;       // Toda velocity at mu + eps
  double v_star = 0.0;  // (1 + sqrt 17) 3 C1 (e^{mu+eps+1} + 1/(mu+eps))
  double D = 0.0;
  double delta = 0.0;
  double misfit = 0.0;
  // Spatial shape at the final sample: log(obs (1+d)^2) = alpha - rate d.
  double shape_r2 = 0.0;
  double shape_rate = 0.0;
  std::size_t shape_points = 0;
  bool shape_pass = false;
  std::size_t violations = 0;
};

struct ShapeFitOptions {
  double floor = 1e-12;    // ignore magnitudes below (noise)
  double ceiling = 1e-4;   // ignore magnitudes above (inside the cone)
  double min_r2 = 0.99;
  std::size_t min_points = 4;
};

// Regresses log(observed(d) (1+d)^2) on d at one sample over the decaying
// region and returns (r2, rate, points).
struct ShapeFit {
  double r2 = 0.0;
  double rate = 0.0;
  std::size_t points = 0;
};
ShapeFit spatial_shape_fit(const MagnitudeGrid& grid, std::size_t sample,
                           const ShapeFitOptions& opt);

// Fits the interpolation-type envelope: for each delta on a grid the smallest
// D >= 0 that dominates the data, keeping the delta with least log misfit.
// `v` is the unperturbed velocity at mu + eps; `spatial_mu` is the decay rate
// inside G (mu for the direct case, reduced for the hierarchy).
InterpolationFit fit_interpolation_envelope(const MagnitudeGrid& grid, double mu,
                                            double eps, double v, double c1,
                                            double spatial_mu,
                                            const ShapeFitOptions& opt = {});

}  // namespace todalab
