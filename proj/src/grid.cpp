#include "hardcore/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hardcore {

std::shared_ptr<const Grid> Grid::make(std::size_t intervals, std::span<const double> required) {
  if (intervals < 2) {
    throw std::invalid_argument("grid needs at least 2 intervals");
  }
  const double h = 1.0 / static_cast<double>(intervals);

  // Build the left half [0, 1/2]; the right half is its exact reflection.
  std::vector<double> anchors{0.0};
  for (double p : required) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("required grid point outside [0,1]: " + std::to_string(p));
    }
    anchors.push_back(std::min(p, 1.0 - p));
  }
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end(),
                            [](double a, double b) { return std::abs(a - b) <= kSnapTolerance; }),
                anchors.end());

  std::vector<double> left = anchors;
  for (std::size_t i = 1; 2 * i <= intervals; ++i) {
    const double x = static_cast<double>(i) * h;
    auto it = std::lower_bound(anchors.begin(), anchors.end(), x);
    double nearest = std::numeric_limits<double>::infinity();
    if (it != anchors.end()) nearest = std::min(nearest, *it - x);
    if (it != anchors.begin()) nearest = std::min(nearest, x - *std::prev(it));
    if (nearest >= 0.25 * h) left.push_back(x);
  }
  std::sort(left.begin(), left.end());

  auto grid = std::shared_ptr<Grid>(new Grid());
  grid->intervals_ = intervals;
  const bool has_midpoint = std::abs(left.back() - 0.5) <= kSnapTolerance;
  if (has_midpoint) left.back() = 0.5;

  auto& pts = grid->points_;
  pts = left;
  for (std::size_t k = left.size(); k-- > 0;) {
    if (has_midpoint && k + 1 == left.size()) continue;
    pts.push_back(1.0 - left[k]);
  }

  std::vector<std::size_t> bps;
  for (double a : anchors) {
    const std::size_t i = grid->index_of(a);
    bps.push_back(i);
    bps.push_back(grid->reflect(i));
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  grid->breakpoints_ = std::move(bps);
  return grid;
}

std::optional<std::size_t> Grid::find(double x, double tol) const {
  const std::size_t i = lower_bound(x);
  if (std::abs(points_[i] - x) <= tol) return i;
  if (i > 0 && std::abs(points_[i - 1] - x) <= tol) return i - 1;
  return std::nullopt;
}

std::size_t Grid::index_of(double x) const {
  if (auto i = find(x)) return *i;
  throw std::invalid_argument("grid does not contain required point " + std::to_string(x));
}

std::size_t Grid::lower_bound(double x) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it == points_.end()) return last();
  return static_cast<std::size_t>(it - points_.begin());
}

GridDistribution::GridDistribution(GridPtr grid, std::vector<double> values, std::vector<Jump> jumps,
                                   std::optional<std::vector<double>> derivative)
    : grid_(std::move(grid)), values_(std::move(values)), jumps_(std::move(jumps)), derivative_(std::move(derivative)) {
  if (!grid_ || values_.size() != grid_->size()) {
    throw std::invalid_argument("distribution values do not match the grid");
  }
  if (derivative_ && derivative_->size() != grid_->size()) {
    throw std::invalid_argument("derivative samples do not match the grid");
  }
  std::sort(jumps_.begin(), jumps_.end(), [](const Jump& a, const Jump& b) { return a.location < b.location; });
  jump_index_.reserve(jumps_.size());
  for (const Jump& j : jumps_) jump_index_.push_back(grid_->index_of(j.location));
}

GridDistribution GridDistribution::from_function(GridPtr grid, const std::function<double(double)>& cdf,
                                                 const std::function<double(double)>& density) {
  std::vector<double> values(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) values[i] = cdf((*grid)[i]);
  std::optional<std::vector<double>> deriv;
  if (density) {
    deriv.emplace(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) (*deriv)[i] = density((*grid)[i]);
  }
  return GridDistribution(std::move(grid), std::move(values), {}, std::move(deriv));
}

std::span<const double> GridDistribution::derivative() const {
  if (!derivative_) throw std::logic_error("distribution carries no derivative samples");
  return *derivative_;
}

double GridDistribution::jump_at(std::size_t i) const {
  for (std::size_t k = 0; k < jump_index_.size(); ++k) {
    if (jump_index_[k] == i) return jumps_[k].size;
  }
  return 0.0;
}

double GridDistribution::evaluate(double z) const {
  const Grid& g = *grid_;
  if (z <= 0.0) return z < 0.0 ? 0.0 : values_.front();
  if (z >= 1.0) return values_.back();
  const std::size_t hi = g.lower_bound(z);
  if (g[hi] == z || hi == 0) return values_[hi];
  const std::size_t lo = hi - 1;
  const double right = left_limit(hi);
  const double t = (z - g[lo]) / (g[hi] - g[lo]);
  return values_[lo] + t * (right - values_[lo]);
}

double GridDistribution::total_mass() const {
  double mass = 0.0;
  for (const Jump& j : jumps_) mass += j.size;
  if (!derivative_) return mass;
  const Grid& g = *grid_;
  const auto& f = *derivative_;
  const auto bps = grid_->breakpoints();
  auto is_inner_breakpoint = [&](std::size_t i) {
    return i != 0 && i != g.last() && std::binary_search(bps.begin(), bps.end(), i);
  };
  // A density sample at an interior breakpoint belongs to one side only, so
  // the value facing each interval is extrapolated from that interval's side.
  for (std::size_t i = 0; i < g.last(); ++i) {
    const double h = g[i + 1] - g[i];
    double left = f[i];
    double right = f[i + 1];
    if (is_inner_breakpoint(i) && i + 2 <= g.last()) {
      left = f[i + 1] - (f[i + 2] - f[i + 1]) * h / (g[i + 2] - g[i + 1]);
    }
    if (is_inner_breakpoint(i + 1) && i >= 1) {
      right = f[i] + (f[i] - f[i - 1]) * h / (g[i] - g[i - 1]);
    }
    mass += 0.5 * h * (left + right);
  }
  return mass;
}

void GridDistribution::validate(double tol) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= -tol && values_[i] <= 1.0 + tol)) {
      throw std::runtime_error("distribution value outside [0,1] at z=" + std::to_string((*grid_)[i]));
    }
    if (i > 0 && values_[i] < values_[i - 1] - tol) {
      throw std::runtime_error("distribution decreases at z=" + std::to_string((*grid_)[i]));
    }
  }
  if (std::abs(values_.back() - 1.0) > tol) throw std::runtime_error("distribution does not reach 1 at z=1");
  if (left_limit(0) > tol) throw std::runtime_error("distribution has mass below 0");
  for (const Jump& j : jumps_) {
    if (j.size < -tol) throw std::runtime_error("negative jump");
  }
}

double sup_distance(const GridDistribution& f, const GridDistribution& g) {
  if (f.grid_ptr() != g.grid_ptr() && f.grid().points().size() != g.grid().points().size()) {
    throw std::invalid_argument("distributions live on different grids");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - g[i]));
  return worst;
}

}  // namespace hardcore
