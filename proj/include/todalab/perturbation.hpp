#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "todalab/dual.hpp"

namespace todalab {

enum class PerturbationFamily { kCosine, kRational, kCustom };

// On-site potential W evaluated at x = ln(4 a_n^2), with sup-norms of W' and W''.
struct PerturbationSpec {
  PerturbationFamily family = PerturbationFamily::kCosine;
  double w0 = 0.0;
  // Custom family only. The declared norms are trusted.
  std::function<double(double)> custom_w;
  std::function<double(double)> custom_dw;
  std::function<double(double)> custom_d2w;
  double custom_dw_norm = 0.0;
  double custom_d2w_norm = 0.0;

  static PerturbationSpec cosine(double w0);
  static PerturbationSpec rational(double w0);
  static PerturbationSpec custom(std::function<double(double)> w,
                                 std::function<double(double)> dw,
                                 std::function<double(double)> d2w, double dw_norm,
                                 double d2w_norm);
  static PerturbationFamily parse_family(const std::string& name);
  static std::string family_name(PerturbationFamily f);

  void validate() const;
  bool is_zero() const { return family != PerturbationFamily::kCustom && w0 == 0.0; }

  double value(double x) const;
  double first(double x) const;
  double second(double x) const;
  double first_norm() const;   // ||W'||_inf
  double second_norm() const;  // ||W''||_inf
};

inline double w_prime(const PerturbationSpec& p, double x) { return p.first(x); }

inline Dual<double> w_prime(const PerturbationSpec& p, const Dual<double>& x) {
  return {p.first(x.v), p.second(x.v) * x.d};
}

namespace detail {

// Adds R_n = (W'(ln 4a_n^2) - W'(ln 4a_{n-1}^2)) / 2 to db.
template <class T>
void add_onsite_forcing(std::size_t n, const T* a, double a_bg,
                        const PerturbationSpec& p, T* db) {
  using std::log;
  const T w_bg = w_prime(p, T(std::log(4.0 * a_bg * a_bg)));
  T w_prev = w_bg;
  for (std::size_t i = 0; i < n; ++i) {
    const T w_here = w_prime(p, log(4.0 * (a[i] * a[i])));
    db[i] += 0.5 * (w_here - w_prev);
    w_prev = w_here;
  }
}

}  // namespace detail

}  // namespace todalab
