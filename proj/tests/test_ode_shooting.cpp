#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "doctest.h"
#include "hardcore/marginal_recursion.hpp"
#include "hardcore/ode_shooting.hpp"

using namespace hardcore;
using std::numbers::pi;

namespace {

// τ_C = ∫_0^1 dy / b(C, y), integrable singularity at y = 1
double tau_oracle(double C, int delta) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double d = delta;
  auto f = [&](double y, double one_minus_y) {
    const double u = y > 0.5 ? one_minus_y : 1.0 - y;
    const double ypow = y > 0.5 ? -std::expm1((d + 1.0) * std::log1p(-u)) : 1.0 - std::pow(y, d + 1.0);
    return 1.0 / (C * std::pow(ypow, d / (d + 1.0)));
  };
  return ts.integrate(f, 0.0, 1.0);
}

}  // namespace

TEST_CASE("drift") {
  CHECK(drift(2.5, 0.0, 3) == 2.5);
  CHECK(drift(2.5, 1.0, 3) == 0.0);
  CHECK(drift(2.5, 1.0 + 1e-14, 3) == 0.0);
  for (double z : {0.1, 0.4, 0.8}) {
    CHECK(drift(pi / 2, std::sin(pi * z / 2), 1) == doctest::Approx(pi / 2 * std::cos(pi * z / 2)).epsilon(1e-13));
  }
  // ∂b/∂y against a difference quotient
  const double y = 0.6;
  CHECK(drift_dy(1.3, y, 2) == doctest::Approx((drift(1.3, y + 1e-6, 2) - drift(1.3, y - 1e-6, 2)) / 2e-6).epsilon(1e-7));
}

TEST_CASE("threshold crossing") {
  const double cut = 1e-6;
  auto p = integrate_to_threshold(pi / 2, 1, cut);
  CHECK(p.sigma == doctest::Approx(2 / pi * std::asin(1 - cut)).epsilon(1e-8));
  CHECK(p.F.back() >= 1 - cut);
  CHECK(p.F[p.F.size() - 2] < 1 - cut);
  auto q = integrate_to_threshold(pi, 1, cut);
  CHECK(q.sigma == doctest::Approx(p.sigma / 2).epsilon(1e-7));
  for (int delta = 1; delta <= 5; ++delta) {
    for (double C : {0.5, 2.0}) {
      CHECK(integrate_to_threshold(C, delta, cut).sigma >= (1 - cut) / C);
    }
  }
  // the Hermite interpolant reproduces sin between nodes
  for (double z : {0.12345, 0.5, 0.987}) CHECK(p.evaluate(z) == doctest::Approx(std::sin(pi * z / 2)).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_to_threshold(1.0, 1, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(integrate_to_threshold(-1.0, 1, 1e-3), std::invalid_argument);
}

TEST_CASE("hitting time") {
  const double cut = 1e-6;
  CHECK(std::abs(tau(pi / 2, 1) - 1.0) <= 10 * std::sqrt(cut));
  CHECK(tau(pi / 2, 1) == doctest::Approx(1.0).epsilon(1e-9));
  for (double C : {0.7, 1.1, 3.3}) CHECK(tau(C, 1) == doctest::Approx(pi / (2 * C)).epsilon(1e-7));
  for (int delta = 1; delta <= 6; ++delta) CHECK(tau(1.0, delta) > tau(2.0, delta));
  for (int delta = 2; delta <= 5; ++delta) {
    for (double C : {0.8, 1.9}) CHECK(tau(C, delta) == doctest::Approx(tau_oracle(C, delta)).epsilon(1e-7));
  }
}

TEST_CASE("bounds on C tau_C") {
  for (int delta = 1; delta <= 5; ++delta) {
    const double d = delta;
    // leading-order series from the tail argument
    const double series = std::pow(d + 1, -d / (d + 1)) * boost::math::zeta((d + 2) / (d + 1));
    const double exact = tau_oracle(1.0, delta);
    for (double C : {0.5, 1.0, 2.0, 4.0}) {
      const double ct = C * tau(C, delta);
      CHECK(ct >= 1.0);
      // time scaling makes C tau_C independent of C
      CHECK(ct == doctest::Approx(exact).epsilon(1e-7));
      if (delta == 1) {
        CHECK(ct <= series);
      } else {
        // the series is not an upper bound once delta >= 2
        CHECK(ct > series);
      }
    }
  }
}

TEST_CASE("tau is strictly decreasing and continuous in C") {
  for (int delta : {1, 3}) {
    double prev = INFINITY;
    for (int k = 0; k < 20; ++k) {
      const double C = 0.3 * std::pow(1.2, k);
      const double t = tau(C, delta);
      CHECK(t < prev);
      prev = t;
    }
    const double base = tau(1.5, delta);
    double prev_gap = INFINITY;
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double gap = std::abs(tau(1.5 * (1 + h), delta) - base);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
  }
}

TEST_CASE("shooting for C*") {
  auto r = find_Cstar(1, {.tol = 1e-8});
  CHECK(std::abs(r.C_star - pi / 2) < 1e-6);
  CHECK(std::abs(r.tau_star - 1.0) <= 1e-8);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.F->size(); ++i) {
    worst = std::max(worst, std::abs((*r.F)[i] - std::sin(pi * r.F->grid()[i] / 2)));
  }
  CHECK(worst < 1e-5);
  CHECK(r.F->size() == 4097);
  CHECK_NOTHROW(r.F->validate(1e-9));
  CHECK((*r.F)[0] == 0.0);

  auto sorted = r.tau_trace;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 1; k < sorted.size(); ++k) CHECK(sorted[k].second < sorted[k - 1].second);

  // tail cut sensitivity stays far below the tolerances used downstream
  for (int delta = 1; delta <= 5; ++delta) {
    auto s = find_Cstar(delta, {.tol = 1e-7});
    CHECK(std::abs(s.tau_star - 1.0) <= 1e-7);
    CHECK(std::abs(s.tau_tenth_cut - s.tau_star) < 1e-6);
    // tau_{C*} = tau_1 / C* = 1
    CHECK(s.C_star == doctest::Approx(tau_oracle(1.0, delta)).epsilon(1e-7));
  }
}

TEST_CASE("shooting agrees with the recursion") {
  for (int delta : {1, 2, 3}) {
    auto s = find_Cstar(delta);
    auto rep = run_recursion(SpinMeasure::continuous(1.0), delta, {.tol = 1e-9});
    REQUIRE(rep.converged);
    CHECK(std::abs(s.C_star - rep.C_e) <= 1e-6);
    CHECK(sup_distance(*s.F, *rep.F_odd) <= 1e-6);
  }
}

TEST_CASE("sensitivity") {
  for (int delta : {1, 2}) {
    for (double C : {1.0, pi / 2, 3.0}) {
      auto s = sensitivity(C, delta, 0.99);
      REQUIRE(s.z.size() > 10);
      CHECK(s.R[0] == 0.0);
      for (std::size_t k = 1; k < s.R.size(); ++k) REQUIRE(s.R[k] > 0.0);
      const auto fd = central_difference_sensitivity(C, delta, 0.99, 1e-4);
      auto p = integrate_to_threshold(C, delta, 0.01);
      double worst_fd = 0.0;
      double worst_exact = 0.0;
      for (std::size_t k = 0; k < s.z.size(); ++k) {
        worst_fd = std::max(worst_fd, std::abs(s.R[k] - fd[k]));
        // time scaling F_C(z) = F_1(Cz) gives ∂F/∂C = z b(C, F) / C
        worst_exact = std::max(worst_exact, std::abs(s.R[k] - s.z[k] * drift(C, p.F[k], delta) / C));
      }
      CHECK(worst_fd <= 1e-3);
      CHECK(worst_exact <= 1e-6);
    }
  }
}

TEST_CASE("Hamiltonian invariant") {
  SUBCASE("continuous, lambda = 1: R is C^3 for delta 2") {
    auto rep = run_recursion(SpinMeasure::continuous(1.0), 2, {.tol = 1e-10});
    auto hp = hamiltonian_profile(*rep.F_odd, rep.C_o, rep.C_e, 1.0, 2);
    CHECK(hp.max_spread() <= 1e-6);
    CHECK(hp.intervals.size() == 1);
    CHECK(hp.intervals[0].mean == doctest::Approx(std::pow(rep.C_e, 3)).epsilon(1e-6));
    CHECK(hp.theta_e == doctest::Approx(rep.C_e).epsilon(1e-9));
    CHECK(hp.left_error() <= 1e-6);
    CHECK(hp.right_error() <= 1e-6);
    for (std::size_t i = 0; i < hp.R.size(); ++i) {
      CHECK(hp.R[i] > 0.0);
      CHECK(hp.phi[i] == doctest::Approx(hp.R[i]).epsilon(1e-12));
    }
  }
  SUBCASE("eps model and lambda != 1") {
    for (const char* spec : {"eps:0.25", "continuous"}) {
      for (double lambda : {0.5, 2.0}) {
        for (int delta : {2, 3}) {
          const auto m = SpinMeasure::parse(spec, lambda);
          auto rep = run_recursion(m, delta, {.tol = 1e-10});
          REQUIRE(rep.converged);
          const double eps = m.kind() == MeasureKind::kContinuous ? 0.5 : m.eps();
          auto hp = hamiltonian_profile(*rep.F_odd, rep.C_o, rep.C_e, lambda, delta, eps);
          CHECK(hp.max_spread() <= 1e-5);
          CHECK(hp.left_error() <= 1e-5);
          CHECK(hp.right_error() <= 1e-5);
          CHECK(hp.intervals.size() == (eps < 0.5 ? 2u : 1u));
        }
      }
    }
  }
  SUBCASE("the lambda^{-z/(delta+1)} weight on the cross term is not invariant") {
    const double lambda = 2.0;
    const int delta = 2;
    auto rep = run_recursion(SpinMeasure::continuous(lambda), delta, {.tol = 1e-10});
    auto hp = hamiltonian_profile(*rep.F_odd, rep.C_o, rep.C_e, lambda, delta);
    const auto& F = *rep.F_odd;
    const auto fd = F.derivative();
    const double th = hp.theta_e;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 1; i + 1 < F.size(); ++i) {
      const double z = F.grid()[i];
      const double r = std::pow(lambda, -z) * std::pow(th * F[i], 3) + std::pow(lambda, -z / 2) * std::pow(th * fd[i], 1.5) -
                       std::log(lambda) * std::pow(lambda, -z / 3) * std::pow(th, 1.5) * F[i] * std::sqrt(fd[i]);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hp.max_spread() < 1e-6);
    CHECK((hi - lo) / hi > 1e-3);
  }
  SUBCASE("delta 1 is rejected") {
    auto rep = run_recursion(SpinMeasure::continuous(1.0), 1);
    CHECK_THROWS_AS(hamiltonian_profile(*rep.F_odd, rep.C_o, rep.C_e, 1.0, 1), std::invalid_argument);
  }
}

TEST_CASE("second-order residual") {
  auto s2 = find_Cstar(2);
  auto r2 = second_order_residual(*s2.F, s2.C_star, 1.0, 2);
  CHECK(r2.sup_residual <= 1e-3);
  CHECK(r2.points > 100);
  CHECK(r2.F0 == 0.0);
  CHECK(r2.slope_left == doctest::Approx(s2.C_star));
  CHECK(std::abs(r2.slope_right) < 1e-6);
  CHECK(r2.hitting_time == doctest::Approx(1.0).epsilon(1e-3));

  auto sine = GridDistribution::from_function(Grid::uniform(4096), [](double z) { return std::sin(pi * z / 2); });
  CHECK(second_order_residual(sine, pi / 2, 1.0, 1).sup_residual <= 1e-4);

  auto wrong = GridDistribution::from_function(Grid::uniform(4096), [](double z) { return z; });
  CHECK(second_order_residual(wrong, s2.C_star, 1.0, 2).sup_residual > 0.1);

  // for lambda != 1 the recursion limit satisfies the same equation
  for (double lambda : {0.5, 2.0}) {
    auto rep = run_recursion(SpinMeasure::continuous(lambda), 2, {.tol = 1e-10});
    auto r = second_order_residual(*rep.F_odd, rep.C_e, lambda, 2);
    CHECK(r.sup_residual <= 1e-3);
    CHECK(r.slope_left == doctest::Approx(rep.C_e).epsilon(1e-8));
  }
}
