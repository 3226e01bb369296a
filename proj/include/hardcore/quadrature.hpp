#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hardcore/grid.hpp"

namespace hardcore {

/// Per-interval weights for integrating grid-sampled functions over the
/// contiguous index run [first, last]. Each cell integral uses the cubic
/// Lagrange interpolant through the four nearest nodes inside the run
/// (quadratic / linear when the run is shorter), so the rule is exact for
/// cubics and reduces to composite Simpson on a uniform three-node run.
class IntervalQuadrature {
 public:
  IntervalQuadrature() = default;
  IntervalQuadrature(const Grid& grid, std::size_t first, std::size_t last);

  std::size_t first() const { return first_; }
  std::size_t last() const { return last_; }

  /// Integral over [z_k, z_{k+1}] for first <= k < last.
  double cell(std::size_t k, std::span<const double> samples) const;

  /// Integral over [z_from, z_to] with first <= from <= to <= last.
  double integrate(std::span<const double> samples, std::size_t from, std::size_t to) const;
  double integrate(std::span<const double> samples) const { return integrate(samples, first_, last_); }

 private:
  struct Stencil {
    std::size_t start = 0;
    std::size_t count = 0;
    std::array<double, 4> weights{};
  };

  std::size_t first_ = 0;
  std::size_t last_ = 0;
  std::vector<Stencil> stencils_;
};

}  // namespace hardcore
