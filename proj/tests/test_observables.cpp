#include <cmath>
#include <string>

#include "doctest.h"
#include "todalab/bounds.hpp"
#include "todalab/error.hpp"
#include "todalab/observables.hpp"
#include "todalab/soliton.hpp"

using namespace todalab;

namespace {

// A(x) = a_i b_j with hand-written derivatives.
Observable product(long i, long j) {
  Observable o;
  o.name = "prod";
  o.support = i == j ? std::vector<long>{i} : std::vector<long>{std::min(i, j), std::max(i, j)};
  o.eval = [i, j](const LatticeState& x) { return x.a_at(i) * x.b_at(j); };
  o.d_da = [i, j](const LatticeState& x, long k) { return k == i ? x.b_at(j) : 0.0; };
  o.d_db = [i, j](const LatticeState& x, long k) { return k == j ? x.a_at(i) : 0.0; };
  return o;
}

Observable sum(const Observable& p, const Observable& q, double c) {
  Observable o;
  o.name = "sum";
  std::set_union(p.support.begin(), p.support.end(), q.support.begin(), q.support.end(),
                 std::back_inserter(o.support));
  o.eval = [=](const LatticeState& x) { return p.eval(x) + c * q.eval(x); };
  o.d_da = [=](const LatticeState& x, long k) { return p.d_da(x, k) + c * q.d_da(x, k); };
  o.d_db = [=](const LatticeState& x, long k) { return p.d_db(x, k) + c * q.d_db(x, k); };
  return o;
}

IntegratorConfig fixed_rk4() {
  IntegratorConfig c;
  c.method = Method::kRk4Fixed;
  c.step = 0.01;
  return c;
}

// {A ∘ Φ_t, B}(x) with the A ∘ Φ_t derivatives taken by central differences.
double evolved_bracket_fd(const Observable& A, const Observable& B, const LatticeState& x,
                          double t) {
  const double h = 1e-5;
  auto shot = [&](long k, bool is_a, double d) {
    LatticeState y = x;
    (is_a ? y.a : y.b)[static_cast<std::size_t>(k - x.offset)] += d;
    const Trajectory tr = integrate(y, FlaschkaFlow::toda(), {0.0, t}, fixed_rk4());
    return A.eval(tr.states.back());
  };
  auto dA = [&](long k, bool is_a) { return (shot(k, is_a, h) - shot(k, is_a, -h)) / (2 * h); };
  double s = 0.0;
  for (long k = x.lo(); k < x.hi(); ++k) {
    const double dB_da = B.d_da(x, k);
    const double dB_dbt = B.d_db(x, k + 1) - B.d_db(x, k);
    if (dB_da == 0.0 && dB_dbt == 0.0) continue;
    double term = 0.0;
    if (dB_dbt != 0.0) term += dA(k, true) * dB_dbt;
    if (dB_da != 0.0) term -= (dA(k + 1, false) - dA(k, false)) * dB_da;
    s += x.a_at(k) * term;
  }
  return 0.25 * s;
}

}  // namespace

TEST_CASE("basic brackets") {
  const LatticeState x = make_random_state(21, -10, 6, 0.4, 3);
  for (long n = -4; n <= 4; ++n) {
    const auto on = basic_observables(n);
    CHECK(poisson_bracket(on.A, basic_observables(n + 1).B, x) == doctest::Approx(x.a_at(n) / 4));
    CHECK(poisson_bracket(on.A, on.B, x) == doctest::Approx(-x.a_at(n) / 4));
    CHECK(poisson_bracket(on.A, basic_observables(n + 3).B, x) == 0.0);
    CHECK(poisson_bracket(on.A, basic_observables(n + 2).A, x) == 0.0);
    CHECK(poisson_bracket(on.B, basic_observables(n + 1).B, x) == 0.0);
  }
}

TEST_CASE("bracket is antisymmetric and bilinear") {
  const LatticeState x = make_random_state(21, -10, 6, 0.4, 4);
  const Observable p = product(0, 1), q = product(1, 1), r = product(-1, 0);
  CHECK(poisson_bracket(p, q, x) == doctest::Approx(-poisson_bracket(q, p, x)));
  CHECK(poisson_bracket(p, p, x) == doctest::Approx(0.0).scale(1.0));
  const Observable pq = sum(p, q, 2.5);
  CHECK(poisson_bracket(pq, r, x) ==
        doctest::Approx(poisson_bracket(p, r, x) + 2.5 * poisson_bracket(q, r, x)));
}

TEST_CASE("disjoint distant supports commute") {
  const LatticeState x = make_random_state(41, -20, 10, 0.4, 5);
  CHECK(poisson_bracket(product(-8, -7), product(3, 5), x) == 0.0);
}

TEST_CASE("bracket with the energy generates the flow") {
  const LatticeState x = make_random_state(41, -20, 8, 0.4, 6);
  const Observable H = windowed_hamiltonian(-10, 10);
  const Fields f = toda_rhs(x);
  for (long n = -5; n <= 5; ++n) {
    const std::size_t i = static_cast<std::size_t>(n - x.offset);
    const auto o = basic_observables(n);
    CHECK(poisson_bracket(o.A, H, x) == doctest::Approx(f.da[i]).epsilon(1e-13).scale(1.0));
    CHECK(poisson_bracket(o.B, H, x) == doctest::Approx(f.db[i]).epsilon(1e-13).scale(1.0));
    CHECK(flow_derivative_fd(o.A, x, FlaschkaFlow::toda()) ==
          doctest::Approx(f.da[i]).epsilon(1e-5).scale(1e-3));
  }
  CHECK(H.eval(x) == doctest::Approx(hamiltonian_ab(x)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("required seeds for a single-site observable") {
  const auto seeds = required_seeds(basic_observables(3).B);
  REQUIRE(seeds.size() == 4);
  CHECK(seed_name(seeds[0]) == "a_2");
  CHECK(seed_name(seeds[1]) == "a_3");
  CHECK(seed_name(seeds[2]) == "b_3");
  CHECK(seed_name(seeds[3]) == "b_4");
}

TEST_CASE("evolved bracket at t = 0 equals the plain bracket") {
  SolitonSpec sp;
  const LatticeState x = soliton_state(sp, 61, -30, 0.0);
  const auto B = basic_observables(0).B;
  const GridSet grids =
      compute_grids(x, required_seeds(B), {0.0, 0.5}, FlaschkaFlow::toda(), {}, 0);
  for (long n = -2; n <= 2; ++n) {
    const auto A = basic_observables(n).A;
    CHECK(evolved_bracket(A, B, x, grids, 0) == doctest::Approx(poisson_bracket(A, B, x)).scale(1.0));
  }
}

TEST_CASE("evolved bracket matches finite differences of the flow map") {
  SolitonSpec sp;
  const LatticeState x = soliton_state(sp, 61, -30, 0.0);
  for (const auto& B : {basic_observables(0).B, basic_observables(1).A}) {
    const GridSet grids = compute_grids(x, required_seeds(B), {0.0, 0.8}, FlaschkaFlow::toda(),
                                        fixed_rk4(), 0);
    for (long n : {-3L, 0L, 2L}) {
      for (const Observable& A : {basic_observables(n).A, basic_observables(n).B}) {
        const double got = evolved_bracket(A, B, x, grids, 1);
        CHECK(got == doctest::Approx(evolved_bracket_fd(A, B, x, 0.8)).epsilon(1e-6).scale(1e-4));
      }
    }
  }
}

TEST_CASE("missing grids name the required seeds") {
  SolitonSpec sp;
  const LatticeState x = soliton_state(sp, 41, -20, 0.0);
  const auto B = basic_observables(0).B;
  GridSet grids = compute_grids(x, required_seeds(B), {0.0, 0.5}, FlaschkaFlow::toda(), {}, 0);
  grids.erase(SeedKey{-1, Coord::kA});
  try {
    evolved_bracket(basic_observables(0).A, B, x, grids, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
    const std::string what = e.what();
    CHECK(what.find("a_-1;") != std::string::npos);
    CHECK(what.find("{a_-1, a_0, b_0, b_1}") != std::string::npos);
  }
}

TEST_CASE("bracket bound holds on the soliton") {
  SolitonSpec sp;
  const LatticeState x = soliton_state(sp, 201, -100, 0.0);
  const double mu = optimal_mu().mu;
  const auto B = basic_observables(0).B;
  const GridSet grids = compute_grids(x, required_seeds(B), sample_times(3.0, 0.25),
                                      FlaschkaFlow::toda(), {}, 20);
  for (long n = -30; n <= 30; n += 3) {
    const BracketBoundReport rep = check_bracket_bound(basic_observables(n).A, B, x, grids, mu);
    CHECK(rep.violations == 0);
    CHECK(rep.C == doctest::Approx(2.0 / std::sqrt(17.0) * (1.0 + std::exp(mu))));
    CHECK(rep.a_sup == doctest::Approx(std::cosh(1.0) / 2.0).epsilon(1e-12));
    for (std::size_t k = 1; k < rep.bound.size(); ++k) CHECK(rep.bound[k] > rep.bound[k - 1]);
  }
}

TEST_CASE("measured derivative norms take the sup over states") {
  const Observable p = product(0, 1);
  LatticeState x = LatticeState::background(5, -2);
  LatticeState y = x;
  y.b[3] = -2.0;
  const auto norms = derivative_norms(p, {x, y});
  REQUIRE(norms.size() == 2);
  CHECK(norms[0] == 2.0);
  CHECK(norms[1] == 0.5);
}
