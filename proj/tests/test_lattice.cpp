#include <cmath>
#include <random>

#include "doctest.h"
#include "todalab/error.hpp"
#include "todalab/lattice.hpp"

using namespace todalab;

namespace {

LatticeState small_state() {
  LatticeState s;
  s.offset = -2;
  s.a = {0.5, 0.6, 0.4, 0.55, 0.5};
  s.b = {0.0, 0.1, -0.2, 0.05, 0.0};
  return s;
}

// Dense (lo-pad .. hi+pad) Jacobi matrix with background outside the window.
std::vector<std::vector<double>> dense(const LatticeState& s, long pad) {
  const long lo = s.lo() - pad, hi = s.hi() + pad;
  const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (long k = lo; k <= hi; ++k) {
    const std::size_t i = static_cast<std::size_t>(k - lo);
    m[i][i] = s.b_at(k);
    if (k < hi) m[i][i + 1] = m[i + 1][i] = s.a_at(k);
  }
  return m;
}

double trace_power(const std::vector<std::vector<double>>& m, int j) {
  const std::size_t n = m.size();
  std::vector<std::vector<double>> p = m;
  for (int k = 1; k < j; ++k) {
    std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t c = 0; c < n; ++c) q[i][c] += p[i][l] * m[l][c];
    p = q;
  }
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) t += p[i][i];
  return t;
}

}  // namespace

TEST_CASE("flaschka variables from positions and momenta") {
  PQState pq;
  pq.offset = 3;
  pq.q = {0.0, 2.0 * std::log(2.0), 2.0 * std::log(2.0)};
  pq.p = {1.0, -0.5, 0.0};
  const LatticeState s = flaschka_forward(pq);
  REQUIRE(s.size() == 2);
  CHECK(s.offset == 3);
  CHECK(s.a[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.a[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.b[0] == -0.5);
  CHECK(s.b[1] == 0.25);
}

TEST_CASE("relative coordinates round trip") {
  const LatticeState s = small_state();
  const RelState r = flaschka_inverse(s);
  CHECK(r.r[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.p[2] == doctest::Approx(0.4));
  const LatticeState back = flaschka_from_relative(r);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back.a[i] == doctest::Approx(s.a[i]).epsilon(1e-15));
    CHECK(back.b[i] == doctest::Approx(s.b[i]).epsilon(1e-15));
  }
}

TEST_CASE("flaschka_inverse rejects a = 0") {
  LatticeState s = small_state();
  s.a[1] = 0.0;
  CHECK_THROWS_AS(flaschka_inverse(s), Error);
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("toda field matches the equations of motion site by site") {
  const LatticeState s = small_state();
  const Fields f = toda_rhs(s);
  for (long n = s.lo(); n <= s.hi(); ++n) {
    const std::size_t i = static_cast<std::size_t>(n - s.offset);
    CHECK(f.da[i] == doctest::Approx(s.a_at(n) * (s.b_at(n + 1) - s.b_at(n))).epsilon(1e-15));
    CHECK(f.db[i] == doctest::Approx(2.0 * (s.a_at(n) * s.a_at(n) - s.a_at(n - 1) * s.a_at(n - 1)))
                         .epsilon(1e-15));
  }
}

TEST_CASE("toda field vanishes at the background fixed point") {
  const LatticeState s = LatticeState::background(11, -5);
  const Fields f = toda_rhs(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(f.da[i] == 0.0);
    CHECK(f.db[i] == 0.0);
  }
}

TEST_CASE("energy of the background is zero and single-site values follow the formula") {
  CHECK(hamiltonian_ab(LatticeState::background(9, 0)) == doctest::Approx(0.0).scale(1.0));
  LatticeState s = LatticeState::background(3, 0);
  s.a[1] = 1.0;
  s.b[1] = 0.5;
  CHECK(hamiltonian_ab(s) == doctest::Approx(2 * 0.25 + 4.0 - 2.0 * std::log(2.0) - 1.0));
}

TEST_CASE("per-site energy is non-negative on random states") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.05, 3.0), ub(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    LatticeState s = LatticeState::background(1, 0);
    s.a[0] = ua(rng);
    s.b[0] = ub(rng);
    CHECK(hamiltonian_ab(s) >= 0.0);
  }
}

TEST_CASE("trace invariants agree with dense matrix powers") {
  const LatticeState s = make_random_state(15, -7, 4, 0.3, 11);
  const LatticeState bg = LatticeState::background(15, -7);
  const auto inv = trace_invariants(s, 4);
  const auto m = dense(s, 10), mb = dense(bg, 10);
  for (int j = 1; j <= 4; ++j) {
    CHECK(inv[j - 1] == doctest::Approx(trace_power(m, j) - trace_power(mb, j)).epsilon(1e-12));
  }
}

TEST_CASE("random states are deterministic and compactly supported") {
  const LatticeState a = make_random_state(41, -20, 5, 0.2, 42);
  const LatticeState b = make_random_state(41, -20, 5, 0.2, 42);
  CHECK(a.a == b.a);
  CHECK(a.b == b.b);
  for (long n = a.lo(); n <= a.hi(); ++n) {
    if (std::labs(n) > 5) {
      CHECK(a.a_at(n) == 0.5);
      CHECK(a.b_at(n) == 0.0);
    } else {
      CHECK(std::fabs(a.a_at(n) - 0.5) <= 0.1 + 1e-15);
    }
  }
  const LatticeState c = make_random_state(41, -20, 5, 0.2, 43);
  CHECK(c.a != a.a);
}

TEST_CASE("validate rejects mismatched lengths and non-finite values") {
  LatticeState s = small_state();
  s.b.pop_back();
  CHECK_THROWS_AS(s.validate(), Error);
  s = small_state();
  s.b[0] = std::nan("");
  CHECK_THROWS_AS(s.validate(), Error);
}
