#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "hardcore/errors.hpp"
#include "hardcore/marginal_recursion.hpp"

using namespace hardcore;
using std::numbers::pi;

namespace {

double sup_error(const GridDistribution& f, const std::function<double(double)>& exact) {
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - exact(f.grid()[i])));
  return worst;
}

// Root vacancy probability for the two-state model: p -> 1/(1 + λ p^Δ).
std::pair<double, double> scalar_two_cycle(double lambda, int delta, int iters) {
  double p = 1.0;
  double q = 0.0;
  for (int k = 0; k < iters; ++k) {
    q = 1.0 / (1.0 + lambda * std::pow(p, delta));
    p = 1.0 / (1.0 + lambda * std::pow(q, delta));
  }
  return {p, q};
}

}  // namespace

TEST_CASE("initial marginal") {
  auto f = initial_marginal(SpinMeasure::continuous(1.0), 256);
  CHECK(sup_error(f, [](double z) { return z; }) < 1e-14);

  const double e = std::exp(1.0);
  auto fe = initial_marginal(SpinMeasure::continuous(e), 256);
  CHECK(sup_error(fe, [&](double z) { return std::expm1(z) / (e - 1.0); }) < 1e-12);
  CHECK(fe.total_mass() == doctest::Approx(1.0).epsilon(1e-5));

  auto two = initial_marginal(SpinMeasure::two_state(2.0), 16);
  REQUIRE(two.jumps().size() == 2);
  CHECK(two.jumps()[0].size == doctest::Approx(1.0 / 3.0));
  CHECK(two.jumps()[1].size == doctest::Approx(2.0 / 3.0));
  CHECK(two[0] == doctest::Approx(1.0 / 3.0));
  CHECK(two.left_limit(0) == doctest::Approx(0.0));
  CHECK(two.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("one recursion step") {
  auto m = SpinMeasure::continuous(1.0);
  auto f0 = initial_marginal(m, 512);
  SUBCASE("delta 2") {
    auto [f1, ratio] = iterate_marginal(m, 2, f0);
    CHECK(ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(sup_error(f1, [](double z) { return 1.0 - std::pow(1.0 - z, 3); }) < 1e-13);
    CHECK(f1[f1.size() - 1] == 1.0);
  }
  SUBCASE("delta 1") {
    auto [f1, ratio] = iterate_marginal(m, 1, f0);
    CHECK(ratio == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sup_error(f1, [](double z) { return 2.0 * z - z * z; }) < 1e-14);
  }
  SUBCASE("two-state reproduces the scalar recursion") {
    for (int delta : {1, 3, 5}) {
      const double lambda = 1.7;
      auto two = SpinMeasure::two_state(lambda);
      auto g = Grid::uniform(8);
      const double p = 0.42;
      std::vector<double> vals(g->size(), p);
      vals.back() = 1.0;
      GridDistribution prev(g, vals, {{0.0, p}, {1.0, 1.0 - p}});
      auto [next, ratio] = iterate_marginal(two, delta, prev);
      CHECK(next[0] == doctest::Approx(1.0 / (1.0 + lambda * std::pow(p, delta))).epsilon(1e-15));
      CHECK(ratio == doctest::Approx(1.0 + lambda * std::pow(p, delta)));
    }
  }
  SUBCASE("zero ratio is a numerical error") {
    // a corrupted child CDF that never reaches 1
    auto g = Grid::uniform(8);
    GridDistribution broken(g, std::vector<double>(g->size(), 0.0));
    CHECK_THROWS_AS(iterate_marginal(m, 2, broken), NumericalError);
  }
}

TEST_CASE("exact tree volumes") {
  auto m = SpinMeasure::continuous(1.0);
  CHECK(exact_tree_log_volume(m, 2, 0) == doctest::Approx(0.0));
  CHECK(exact_tree_log_volume(m, 1, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-13));
  CHECK(exact_tree_log_volume(m, 2, 2) == doctest::Approx(std::log(1.0 / 14.0)).epsilon(1e-13));
  // path on 3 vertices
  CHECK(exact_tree_log_volume(m, 1, 2) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-13));
  // two-state: independent sets of a 3-vertex star counted with activity
  const double lambda = 2.0;
  // star with three leaves: root empty (leaves free) or root occupied
  CHECK(exact_tree_log_volume(SpinMeasure::two_state(lambda), 3, 1) ==
        doctest::Approx(std::log(std::pow(1 + lambda, 3) + lambda)));
  CHECK(tree_node_count(2, 2) == 7.0);
}

TEST_CASE("delta 1 continuous limit is sin(pi z / 2)") {
  RecursionOptions opt;
  opt.tol = 1e-10;
  auto rep = run_recursion(SpinMeasure::continuous(1.0), 1, opt);
  CHECK(rep.converged);
  CHECK(rep.monotonicity_violations == 0);
  CHECK(rep.C_o == doctest::Approx(pi / 2).epsilon(1e-9));
  CHECK(rep.C_e == doctest::Approx(pi / 2).epsilon(1e-9));
  CHECK(sup_error(*rep.F_odd, [](double z) { return std::sin(pi * z / 2); }) < 1e-9);
  CHECK(!rep.theta_o.has_value());
  // along a path the per-node log volume tends to ln(2/pi)
  CHECK(rep.log_Z_per_node == doctest::Approx(std::log(2 / pi)).epsilon(0.05));
  for (double r : rep.ratios) CHECK(r <= 1.0);
}

TEST_CASE("two-state delta 5 shows the two-cycle") {
  auto rep = run_recursion(SpinMeasure::two_state(1.0), 5);
  CHECK_FALSE(rep.converged);
  CHECK(rep.stalled);
  const auto [p_odd, p_even] = scalar_two_cycle(1.0, 5, 2000);
  const double gap = std::abs((*rep.F_odd)[0] - (*rep.F_even)[0]);
  CHECK(gap == doctest::Approx(std::abs(p_odd - p_even)).epsilon(1e-9));
  CHECK(gap > 0.3);
  CHECK(rep.monotonicity_violations == 0);

  auto sub = run_recursion(SpinMeasure::two_state(0.5), 5);
  CHECK(sub.converged);
  CHECK(sub.gap_sup <= 1e-8);
  const auto [p, q] = scalar_two_cycle(0.5, 5, 2000);
  CHECK((*sub.F_odd)[0] == doctest::Approx(p).epsilon(1e-8));
  CHECK(q == doctest::Approx(p).epsilon(1e-8));
}

TEST_CASE("multi-state model respects the invariants") {
  auto rep = run_recursion(SpinMeasure::multi_state(4, 1.0), 2, {.max_depth = 400, .keep_history = true});
  CHECK(rep.monotonicity_violations == 0);
  CHECK(check_monotonicity(rep.history) == 0);
  for (const auto& f : rep.history) CHECK_NOTHROW(f.validate(1e-12));
  for (double r : rep.ratios) CHECK(r <= 5.0 + 1e-12);
}

TEST_CASE("limit relations and sandwich for the continuous model") {
  for (int delta : {2, 3}) {
    for (double lambda : {0.5, 2.0}) {
      const auto m = SpinMeasure::continuous(lambda);
      const MarginalEngine engine(m, delta, 1024);
      RecursionOptions opt;
      opt.tol = 1e-9;
      opt.keep_history = true;
      auto rep = run_recursion(engine, opt);
      REQUIRE(rep.converged);
      CHECK(rep.C_o <= rep.C_e * (1 + 1e-12));
      // F_odd = C_e ∫_0^z F_even^Δ(1-t) μ(dt)
      const auto cum = engine.cumulative(*rep.F_even);
      double worst = 0.0;
      for (std::size_t i = 0; i < cum.size(); ++i) worst = std::max(worst, std::abs((*rep.F_odd)[i] - rep.C_e * cum[i]));
      CHECK(worst <= 10 * opt.tol);
      // sandwich around the limits
      const auto& h = rep.history;
      for (std::size_t k = 0; k + 1 < h.size(); k += 2) {
        CHECK(count_exceed(h[k], *rep.F_even, 1e-12) == 0);
        CHECK(count_exceed(*rep.F_odd, h[k + 1], 1e-12) == 0);
      }
      for (std::size_t k = 1; k < rep.gap_trace.size(); ++k) {
        CHECK(rep.gap_trace[k].second <= rep.gap_trace[k - 1].second + 1e-15);
      }
      // left slope of the odd limit
      CHECK(rep.F_odd->derivative()[0] == doctest::Approx(rep.C_e).epsilon(1e-8));
      CHECK(rep.F_odd->total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("boundary reductions are exact identities") {
  for (const char* spec : {"continuous", "eps:0.25", "two-state"}) {
    const MarginalEngine engine(SpinMeasure::parse(spec, 1.3), 3, 256);
    for (int n : {2, 3, 5}) {
      const auto free_prev = boundary_marginal(engine, Boundary::kFree, n - 1);
      const auto zeros = boundary_marginal(engine, Boundary::kZeros, n);
      const auto ones = boundary_marginal(engine, Boundary::kOnes, n + 1);
      CHECK(std::ranges::equal(zeros.values(), free_prev.values()));
      CHECK(std::ranges::equal(ones.values(), free_prev.values()));
    }
    // free boundary agrees with the engine's own iteration
    auto f = engine.initial();
    for (int k = 0; k < 3; ++k) f = engine.iterate(f).first;
    CHECK(std::ranges::equal(boundary_marginal(engine, Boundary::kFree, 3).values(), f.values()));
  }
  const MarginalEngine engine(SpinMeasure::continuous(1.0), 2, 64);
  CHECK_THROWS_AS(boundary_marginal(engine, Boundary::kOnes, 1), std::invalid_argument);
}

TEST_CASE("scale invariance") {
  for (const char* spec : {"continuous", "eps:0.25", "multi:3"}) {
    const auto m = SpinMeasure::parse(spec, 1.4);
    const double c = 7.25;
    RecursionOptions opt;
    opt.intervals = 256;
    opt.max_depth = 40;
    auto a = run_recursion(m, 2, opt);
    auto b = run_recursion(m.scaled(c), 2, opt);
    CHECK(sup_distance(*a.F_odd, *b.F_odd) < 1e-14);
    CHECK(sup_distance(*a.F_even, *b.F_even) < 1e-14);
    for (int n : {0, 1, 3}) {
      const double diff = exact_tree_log_volume(m.scaled(c), 2, n, 256) - exact_tree_log_volume(m, 2, n, 256);
      CHECK(diff == doctest::Approx(tree_node_count(2, n) * std::log(c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("monotonicity checker") {
  const auto m = SpinMeasure::continuous(1.0);
  const MarginalEngine engine(m, 1, 256);
  std::vector<GridDistribution> h{engine.initial()};
  for (int k = 0; k < 5; ++k) h.push_back(engine.iterate(h.back()).first);
  CHECK(check_monotonicity(h) == 0);

  std::vector<GridDistribution> constant(5, h[0]);
  CHECK(check_monotonicity(constant) == 0);

  std::swap(h[1], h[3]);
  CHECK(check_monotonicity(h) >= 1);
}

TEST_CASE("theta is only defined for delta >= 2") {
  CHECK_THROWS_AS(theta_pair(1.0, 1.0, 1.0, 1), std::invalid_argument);
  const auto [to, te] = theta_pair(2.0, 2.0, 1.0, 2);
  CHECK(to == doctest::Approx(2.0));
  CHECK(te == doctest::Approx(2.0));
}

TEST_CASE("eps model at lambda 1 is the continuous model in disguise") {
  // z -> z/(2 eps) on [0,eps] and 1 - (1-z)/(2 eps) on [1-eps,1] preserves x + y <= 1
  const double eps = 0.25;
  for (int delta : {2, 5}) {
    auto a = run_recursion(SpinMeasure::eps_interpolated(eps, 1.0), delta, {.tol = 1e-10});
    auto b = run_recursion(SpinMeasure::continuous(1.0), delta, {.tol = 1e-10});
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.C_e == doctest::Approx(b.C_e).epsilon(1e-9));
    const auto& g = a.F_odd->grid();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double z = g[i];
      const double u = z <= eps ? z / (2 * eps) : z >= 1 - eps ? 1 - (1 - z) / (2 * eps) : 0.5;
      worst = std::max(worst, std::abs((*a.F_odd)[i] - b.F_odd->evaluate(u)));
    }
    CHECK(worst < 1e-9);
  }
}
