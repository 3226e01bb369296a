#include "hardcore/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hardcore {

namespace {

// Lagrange basis polynomial j over `nodes`, evaluated at x.
double lagrange_basis(std::span<const double> nodes, std::size_t j, double x) {
  double value = 1.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    if (m != j) value *= (x - nodes[m]) / (nodes[j] - nodes[m]);
  }
  return value;
}

}  // namespace

IntervalQuadrature::IntervalQuadrature(const Grid& grid, std::size_t first, std::size_t last)
    : first_(first), last_(last) {
  if (first > last || last >= grid.size()) {
    throw std::invalid_argument("quadrature run outside the grid");
  }
  const std::size_t nodes_in_run = last - first + 1;
  const std::size_t order = std::min<std::size_t>(4, nodes_in_run);
  // Two-point Gauss-Legendre integrates the cubic interpolant exactly.
  const double g = 1.0 / std::sqrt(3.0);

  stencils_.resize(last - first);
  for (std::size_t k = first; k < last; ++k) {
    Stencil& s = stencils_[k - first];
    s.count = order;
    // Centre the window on the cell, then clamp it into the run.
    std::size_t start = (k >= first + 1) ? k - 1 : first;
    if (order < 4) start = first;
    if (start + order - 1 > last) start = last + 1 - order;
    s.start = start;

    std::array<double, 4> nodes{};
    for (std::size_t j = 0; j < order; ++j) nodes[j] = grid[start + j];
    const std::span<const double> node_span(nodes.data(), order);
    const double a = grid[k];
    const double b = grid[k + 1];
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t j = 0; j < order; ++j) {
      s.weights[j] = half * (lagrange_basis(node_span, j, mid - half * g) + lagrange_basis(node_span, j, mid + half * g));
    }
  }
}

double IntervalQuadrature::cell(std::size_t k, std::span<const double> samples) const {
  const Stencil& s = stencils_[k - first_];
  double acc = 0.0;
  for (std::size_t j = 0; j < s.count; ++j) acc += s.weights[j] * samples[s.start + j];
  return acc;
}

double IntervalQuadrature::integrate(std::span<const double> samples, std::size_t from, std::size_t to) const {
  if (from < first_ || to > last_ || from > to) {
    throw std::invalid_argument("integration range outside the quadrature run");
  }
  double acc = 0.0;
  for (std::size_t k = from; k < to; ++k) acc += cell(k, samples);
  return acc;
}

}  // namespace hardcore
