#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "hardcore/grid.hpp"
#include "hardcore/quadrature.hpp"

using namespace hardcore;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("uniform grid is exactly symmetric") {
  auto g = Grid::uniform(64);
  REQUIRE(g->size() == 65);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK((*g)[g->reflect(i)] == 1.0 - (*g)[i]);
  }
  CHECK((*g)[32] == 0.5);
}

TEST_CASE("required points and their reflections are grid points") {
  const std::vector<double> req{0.1, 0.3333333333333333};
  auto g = Grid::make(100, req);
  for (double x : {0.1, 0.9, 1.0 / 3.0, 2.0 / 3.0}) {
    CHECK(g->find(x).has_value());
  }
  for (std::size_t i = 1; i < g->size(); ++i) CHECK((*g)[i] > (*g)[i - 1]);
  // the upper half is built from the lower half
  for (std::size_t i = 0; 2 * i < g->size(); ++i) CHECK((*g)[g->reflect(i)] == 1.0 - (*g)[i]);
  CHECK_THROWS_AS(g->index_of(0.123456), std::invalid_argument);
  const auto bps = g->breakpoints();
  CHECK(bps.front() == 0);
  CHECK(bps.back() == g->last());
}

TEST_CASE("quadrature is exact for cubics on a ragged grid") {
  const std::vector<double> req{0.123, 0.31};
  auto g = Grid::make(37, req);
  std::vector<double> s(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = (*g)[i];
    s[i] = 1.0 - 2.0 * x + 3.0 * x * x - 4.0 * x * x * x;
  }
  IntervalQuadrature q(*g, 0, g->last());
  CHECK(q.integrate(s) == doctest::Approx(1.0 - 1.0 + 1.0 - 1.0).epsilon(1e-14));
  const std::size_t a = g->index_of(0.123);
  const std::size_t b = g->index_of(0.69);
  auto poly = [](double x) { return 1.0 - 2.0 * x + 3.0 * x * x - 4.0 * x * x * x; };
  CHECK(std::abs(q.integrate(s, a, b) - gk(poly, 0.123, 0.69)) < 1e-14);
}

TEST_CASE("short runs fall back to lower order") {
  auto g = Grid::uniform(8);
  std::vector<double> s(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) s[i] = (*g)[i] * (*g)[i];
  // three nodes: Simpson is exact for quadratics
  IntervalQuadrature q(*g, 2, 4);
  CHECK(q.integrate(s) == doctest::Approx((std::pow(0.5, 3) - std::pow(0.25, 3)) / 3.0).epsilon(1e-14));
  IntervalQuadrature lin(*g, 2, 3);
  CHECK(lin.integrate(s) == doctest::Approx(0.125 * (0.0625 + 0.140625) / 2.0).epsilon(1e-14));
}

TEST_CASE("smooth integrands converge at fourth order") {
  auto f = [](double x) { return std::exp(std::sin(3.0 * x)); };
  const double exact = gk(f, 0.0, 1.0);
  double prev_err = 0.0;
  for (std::size_t k : {32, 64, 128}) {
    auto g = Grid::uniform(k);
    std::vector<double> s(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) s[i] = f((*g)[i]);
    const double err = std::abs(IntervalQuadrature(*g, 0, g->last()).integrate(s) - exact);
    if (prev_err > 0.0) CHECK(prev_err / err > 12.0);
    prev_err = err;
  }
}

TEST_CASE("distribution bookkeeping") {
  auto g = Grid::uniform(4);
  GridDistribution f(g, {0.25, 0.25, 0.25, 0.25, 1.0}, {{0.0, 0.25}, {1.0, 0.75}});
  CHECK(f.left_limit(0) == 0.0);
  CHECK(f.left_limit(4) == 0.25);
  CHECK(f.jump_at(2) == 0.0);
  CHECK(f.total_mass() == 1.0);
  CHECK_NOTHROW(f.validate(1e-12));
  CHECK(f.evaluate(0.6) == doctest::Approx(0.25));

  auto u = GridDistribution::from_function(
      Grid::uniform(16), [](double z) { return z * z; }, [](double z) { return 2 * z; });
  CHECK(u.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u.evaluate(0.3) == doctest::Approx(0.3 * 0.3).epsilon(0.01));
  CHECK_THROWS_AS(GridDistribution(Grid::uniform(4), {0.0, 1.0}), std::invalid_argument);

  GridDistribution bad(g, {0.0, 0.5, 0.4, 0.8, 1.0});
  CHECK_THROWS(bad.validate(1e-12));
}
