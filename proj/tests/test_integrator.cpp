#include <cmath>

#include "doctest.h"
#include "todalab/error.hpp"
#include "todalab/flow.hpp"
#include "todalab/integrator.hpp"
#include "todalab/soliton.hpp"

using namespace todalab;

namespace {

OdeRhs oscillator() {
  return [](double, const double* y, double* dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
}

double rk4_error(double h) {
  IntegratorConfig c;
  c.method = Method::kRk4Fixed;
  c.step = h;
  c.max_step = 1.0;
  const auto sol = integrate_ode(oscillator(), {1.0, 0.0}, {0.0, 2.0}, c);
  return std::fabs(sol.states.back()[0] - std::cos(2.0));
}

}  // namespace

TEST_CASE("sample times end exactly at t_final") {
  const auto t = sample_times(5.0, 0.05);
  REQUIRE(t.size() == 101);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 5.0);
  const auto u = sample_times(1.0, 0.3);
  CHECK(u.size() == 5);
  CHECK(u.back() == 1.0);
  CHECK_THROWS_AS(sample_times(0.0, 0.1), Error);
}

TEST_CASE("rk4 converges at fourth order") {
  const double e1 = rk4_error(0.1), e2 = rk4_error(0.05);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("adaptive scheme meets its tolerance on the oscillator") {
  IntegratorConfig c;
  c.tolerance = 1e-10;
  const auto times = sample_times(10.0, 0.5);
  const auto sol = integrate_ode(oscillator(), {1.0, 0.0}, times, c);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::fabs(sol.states[k][0] - std::cos(times[k])) < 1e-8);
    CHECK(std::fabs(sol.states[k][1] + std::sin(times[k])) < 1e-8);
  }
  CHECK(sol.accepted_steps > 0);
}

TEST_CASE("sample times that are not multiples of the step are hit") {
  IntegratorConfig c;
  const auto sol = integrate_ode([](double, const double* y, double* dy) { dy[0] = y[0]; },
                                 {1.0}, {0.0, 0.1 * 3, 0.7, 1.0}, c);
  CHECK(sol.states[1][0] == doctest::Approx(std::exp(0.3)).epsilon(1e-9));
  CHECK(sol.states[3][0] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("fixed-step integration is bitwise reproducible") {
  IntegratorConfig c;
  c.method = Method::kRk4Fixed;
  const auto a = integrate_ode(oscillator(), {0.3, 0.1}, sample_times(3.0, 0.1), c);
  const auto b = integrate_ode(oscillator(), {0.3, 0.1}, sample_times(3.0, 0.1), c);
  CHECK(a.states == b.states);
}

TEST_CASE("non-finite states are reported") {
  IntegratorConfig c;
  c.method = Method::kRk4Fixed;
  auto blowup = [](double, const double* y, double* dy) { dy[0] = y[0] * y[0]; };
  CHECK_THROWS_AS(integrate_ode(blowup, {1.0}, {0.0, 2.0}, c), Error);
}

TEST_CASE("method names parse") {
  CHECK(IntegratorConfig::parse_method("rk4-fixed") == Method::kRk4Fixed);
  CHECK(IntegratorConfig::parse_method("rk-adaptive") == Method::kRkAdaptive);
  CHECK_THROWS_AS(IntegratorConfig::parse_method("euler"), Error);
}

TEST_CASE("toda energy is conserved along a soliton run") {
  SolitonSpec sp;
  const LatticeState x = soliton_state(sp, 101, -50, 0.0);
  const Trajectory tr = integrate(x, FlaschkaFlow::toda(), sample_times(4.0, 0.5), {}, 10);
  CHECK(tr.max_conserved_drift < 1e-8);
  CHECK(tr.clean);
}
