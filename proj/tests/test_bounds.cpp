#include <cmath>
#include <random>

#include "doctest.h"
#include "todalab/bounds.hpp"
#include "todalab/error.hpp"

using namespace todalab;

TEST_CASE("optimal decay parameter") {
  const OptimalMu o = optimal_mu();
  CHECK(o.mu == doctest::Approx(0.47767006).epsilon(1e-8));
  CHECK(o.f == doctest::Approx(6.47621754).epsilon(1e-8));
  CHECK(o.mu * o.mu * std::exp(o.mu + 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (double mu = 0.2; mu < 1.5; mu += 0.01) CHECK(decay_factor(mu) >= o.f - 1e-12);
}

TEST_CASE("velocities and prefactors") {
  const OptimalMu o = optimal_mu();
  CHECK(velocity_toda(o.mu, 1.0) == doctest::Approx((1.0 + std::sqrt(17.0)) * o.f));
  CHECK(velocity_toda(o.mu, 2.0) == doctest::Approx(2.0 * velocity_toda(o.mu, 1.0)));
  CHECK(toda_prefactor() == doctest::Approx(1.9402850002906638));
  CHECK(velocity_ghs(o.mu, 1.5) == doctest::Approx(3.0 * o.f));
  CHECK(observables_prefactor(0.0 + 1.0) ==
        doctest::Approx(2.0 / std::sqrt(17.0) * (1.0 + std::exp(1.0))));
  CHECK_THROWS_AS(velocity_toda(0.0, 1.0), Error);
  CHECK_THROWS_AS(velocity_toda(-1.0, 1.0), Error);
}

TEST_CASE("perturbed velocity reduces to Toda at zero forcing") {
  const double mu = 0.5;
  CHECK(velocity_perturbed(mu, 1.0, 3.0, 0.0) == doctest::Approx(velocity_toda(mu, 1.0)));
  CHECK(perturbed_prefactor(1.0, 3.0, 0.0) == doctest::Approx(toda_prefactor()));
  CHECK(velocity_perturbed(mu, 1.0, 2.0, 0.5) > velocity_toda(mu, 1.0));
}

TEST_CASE("gamma constant equals 4(pi^2/3 - 1)") {
  CHECK(gamma_const() == doctest::Approx(4.0 * (M_PI * M_PI / 3.0 - 1.0)).epsilon(1e-12));
}

TEST_CASE("G convolution stays below gamma") {
  const double gamma = 4.0 * (M_PI * M_PI / 3.0 - 1.0);
  for (double mu : {0.25, 0.5, 1.0}) {
    const ConvolutionReport rep = check_G_convolution(mu, 50, 5000);
    CHECK(rep.within_gamma);
    CHECK(rep.max_ratio <= gamma + 1e-6);
    CHECK(rep.ratio_by_separation.size() == 51);
    // Direct sum at separation 7.
    double s = 0.0;
    for (long l = -5000; l <= 5000; ++l) s += G_mu(mu, 7 - l) * G_mu(mu, l);
    CHECK(rep.ratio_by_separation[7] == doctest::Approx(s / G_mu(mu, 7)).epsilon(1e-12));
  }
}

TEST_CASE("C_eps closed form") {
  CHECK(C_epsilon(1.0) == doctest::Approx(4.0 / std::exp(1.0)).epsilon(1e-12));
  for (double eps : {0.1, 0.5, 3.0}) {
    double best = 0.0;
    for (double x = 0.0; x < 200.0; x += 1e-3) {
      best = std::max(best, (1 + x) * (1 + x) * std::exp(-eps * x));
    }
    CHECK(C_epsilon(eps) == doctest::Approx(best).epsilon(1e-6));
    CHECK(C_epsilon(eps) >= best * (1.0 - 1e-14));
  }
}

TEST_CASE("path matrices") {
  const Mat2 d0 = path_matrix(0);
  CHECK(d0[0][0] == 6.0);
  CHECK(d0[1][0] == 8.0);
  CHECK(mat_inf_norm(d0) == 16.0);
  const Mat2 d1 = path_matrix(1);
  CHECK(d1[0][0] == 14.0);
  CHECK(d1[0][1] == 14.0);
  CHECK(d1[1][0] == 24.0);
  CHECK(d1[1][1] == 24.0);
}

TEST_CASE("hierarchy velocity at order zero") {
  const double mu = 0.5;
  HierarchySpec s;
  CHECK(velocity_hierarchy(mu, 1.3, s, HierarchyVelocityMode::kMatrixNorm) ==
        doctest::Approx(16.0 * 1.3 * decay_factor(mu)));
}

TEST_CASE("closed-form hierarchy velocity at order zero") {
  CHECK(velocity_hierarchy(0.5, 1.3, HierarchySpec{}, HierarchyVelocityMode::kClosedForm) ==
        doctest::Approx(16.0 * 1.3 * decay_factor(0.5)));
}

TEST_CASE("closed-form velocity dominates for random coefficients") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0), l(0.1, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    HierarchySpec s;
    s.r = trial % 5;
    s.c.assign(s.r + 1, 0.0);
    s.c[0] = 1.0;
    for (int j = 1; j <= s.r; ++j) s.c[j] = u(rng);
    const double lnorm = l(rng);
    CHECK(velocity_hierarchy(0.5, lnorm, s, HierarchyVelocityMode::kClosedForm) >=
          velocity_hierarchy(0.5, lnorm, s, HierarchyVelocityMode::kMatrixNorm));
  }
}

TEST_CASE("the closed-form velocity dominates the matrix-norm velocity") {
  for (int r = 0; r <= 4; ++r) {
    HierarchySpec s;
    s.r = r;
    s.c.assign(r + 1, 1.0);
    for (double lnorm : {0.5, 1.0, 1.54, 3.0}) {
      CHECK(velocity_hierarchy(0.5, lnorm, s, HierarchyVelocityMode::kClosedForm) >=
            velocity_hierarchy(0.5, lnorm, s, HierarchyVelocityMode::kMatrixNorm));
    }
  }
}

TEST_CASE("perturbed hierarchy velocity") {
  HierarchySpec s;
  s.r = 1;
  s.c = {1.0, 0.0};
  // C1^2 D^(1) plus the forcing block: rows [14, 14] and [24 + 2 C2 W2, 24].
  const double c1 = 1.0, c2 = 2.0, w2 = 0.5;
  CHECK(velocity_perturbed_hierarchy(0.5, c1, c2, w2, s) ==
        doctest::Approx((24.0 + 2.0 * c2 * w2 + 24.0) * decay_factor(0.5)));
}

TEST_CASE("rescaled hierarchy distance") {
  CHECK(hierarchy_distance(7, 0) == 7);
  CHECK(hierarchy_distance(7, 1) == 7);
  CHECK(hierarchy_distance(7, 2) == 4);
  CHECK(hierarchy_distance(-7, 3) == 4);
  CHECK(hierarchy_distance(9, 4) == 3);
  CHECK(hierarchy_distance(0, 4) == 0);
}

TEST_CASE("time-dependent velocity integrates the growth rate") {
  const double L = 1.2, w1 = 0.1, w2 = 0.1, mu = 0.5;
  for (double t : {0.5, 2.0, 5.0}) {
    const int n = 2000;
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double s = t * i / n;
      const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      integral += wgt * (1.0 + (L + w1 * s) * (L + w1 * s) + w2 / 4.0);
    }
    integral *= t / (3.0 * n);
    CHECK(velocity_timedep(t, mu, L, w1, w2) ==
          doctest::Approx(2.0 * integral * decay_factor(mu)).epsilon(1e-12));
    CHECK(velocity_timedep(-t, mu, L, w1, w2) == velocity_timedep(t, mu, L, w1, w2));
  }
  const auto c = timedep_h_coefficients(L, w1, w2);
  CHECK(c[0] == 0.0);
}

TEST_CASE("second derivative eigenvalue") {
  for (double mu : {0.3, 1.0}) {
    const double e = std::exp(2 * mu) + 1;
    const double lam = second_derivative_eigenvalue(mu);
    // Characteristic polynomial of [[2, e], [4e, 0]].
    CHECK(lam * lam - 2 * lam - 4 * e * e == doctest::Approx(0.0).scale(lam * lam));
  }
}

TEST_CASE("growth function limits") {
  CHECK(h_growth_raw(2.0, 3.0, 0.0) == 6.0);
  CHECK(h_growth_raw(2.0, 3.0, 1e-9) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(h_growth_raw(2.0, 3.0, 0.5) == doctest::Approx(std::expm1(3.0) / 0.5));
  CHECK(h_growth_raw(-2.0, 3.0, 0.5) == h_growth_raw(2.0, 3.0, 0.5));
}

TEST_CASE("interpolation velocity") {
  CHECK(interpolation_velocity_star(1.0, 0.4, 0.1) ==
        doctest::Approx(3.0 * velocity_toda(0.5, 1.0)));
}
