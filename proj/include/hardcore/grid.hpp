#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace hardcore {

/// Tolerance used when matching breakpoints and atom locations to grid points.
inline constexpr double kSnapTolerance = 1e-12;

/// A strictly increasing point set on [0,1] that is exactly symmetric under
/// z -> 1-z at the index level: point K-i is computed as 1 - point i, so
/// reflection never interpolates.
class Grid {
 public:
  /// Uniform grid with `intervals` cells, refined by `required` points and
  /// their reflections. Uniform points closer than a quarter cell to a
  /// required point are dropped.
  static std::shared_ptr<const Grid> make(std::size_t intervals, std::span<const double> required = {});

  /// Uniform grid without refinement.
  static std::shared_ptr<const Grid> uniform(std::size_t intervals) { return make(intervals, {}); }

  std::size_t size() const { return points_.size(); }
  std::size_t last() const { return points_.size() - 1; }
  double operator[](std::size_t i) const { return points_[i]; }
  std::span<const double> points() const { return points_; }
  std::size_t reflect(std::size_t i) const { return points_.size() - 1 - i; }

  /// Nominal uniform cell count the grid was built from.
  std::size_t intervals() const { return intervals_; }

  std::optional<std::size_t> find(double x, double tol = kSnapTolerance) const;

  /// Index of the grid point at x; throws std::invalid_argument if x is not a grid point.
  std::size_t index_of(double x) const;

  /// Sorted indices of 0, 1, every required point and every reflection.
  std::span<const std::size_t> breakpoints() const { return breakpoints_; }

  /// Index of the first point >= x (clamped to the last point).
  std::size_t lower_bound(double x) const;

 private:
  Grid() = default;

  std::vector<double> points_;
  std::vector<std::size_t> breakpoints_;
  std::size_t intervals_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

struct Jump {
  double location;
  double size;
};

/// A CDF sampled on a symmetric grid. Values are right-continuous,
/// F(z_i) = P(X <= z_i); atoms are recorded as explicit jumps so that the
/// left limit at an atom is values[i] - jump.
class GridDistribution {
 public:
  GridDistribution(GridPtr grid, std::vector<double> values, std::vector<Jump> jumps = {},
                   std::optional<std::vector<double>> derivative = std::nullopt);

  /// Samples F (and optionally its derivative) on every grid point.
  static GridDistribution from_function(GridPtr grid, const std::function<double(double)>& cdf,
                                        const std::function<double(double)>& density = {});

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Jump>& jumps() const { return jumps_; }

  bool has_derivative() const { return derivative_.has_value(); }
  /// Density samples; throws std::logic_error when absent.
  std::span<const double> derivative() const;

  /// Size of the jump at grid index i (0 when there is none).
  double jump_at(std::size_t i) const;
  double left_limit(std::size_t i) const { return values_[i] - jump_at(i); }

  /// Piecewise-linear evaluation between grid points (right-continuous at jumps).
  double evaluate(double z) const;

  /// Trapezoid mass of the density restricted to intervals strictly inside
  /// the pieces delimited by grid breakpoints, plus total jump mass.
  double total_mass() const;

  /// Throws std::runtime_error when a structural invariant is broken.
  void validate(double tol) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  std::vector<Jump> jumps_;
  std::vector<std::size_t> jump_index_;
  std::optional<std::vector<double>> derivative_;
};

/// max_i |F(z_i) - G(z_i)|; both distributions must share a grid.
double sup_distance(const GridDistribution& f, const GridDistribution& g);

}  // namespace hardcore
