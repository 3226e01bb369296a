#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "hardcore/grid.hpp"
#include "hardcore/quadrature.hpp"
#include "hardcore/spin_measure.hpp"

namespace hardcore {

inline constexpr std::size_t kDefaultIntervals = 4096;

/// Tree recursion for a fixed spin measure and branching number Δ on a
/// breakpoint-aligned symmetric grid. Stateless after construction.
class MarginalEngine {
 public:
  MarginalEngine(SpinMeasure measure, int delta, std::size_t intervals = kDefaultIntervals);
  /// Reuses an existing grid; it must contain every breakpoint of the measure.
  MarginalEngine(SpinMeasure measure, int delta, GridPtr grid);

  const SpinMeasure& measure() const { return measure_; }
  int delta() const { return delta_; }
  const GridPtr& grid() const { return grid_; }

  /// F_0(z) = μ[0,z]/μ[0,1]. Computed as one recursion step from a child
  /// pinned at 0, so that boundary reductions are exact array identities.
  GridDistribution initial() const;

  /// One step of the recursion; returns (F_next, Z_n / Z_{n-1}^Δ).
  std::pair<GridDistribution, double> iterate(const GridDistribution& prev) const;

  /// ∫ F^Δ(1-t) μ(dt).
  double partition_ratio(const GridDistribution& f) const;

  /// Unnormalized ∫_{[0,z_i]} F^Δ(1-x) μ(dx) for every grid point.
  std::vector<double> cumulative(const GridDistribution& f) const;

 private:
  void setup();
  std::vector<double> reflected_power(const GridDistribution& f) const;
  void check_grid(const GridDistribution& f) const;

  SpinMeasure measure_;
  int delta_;
  GridPtr grid_;
  // Per grid cell: index into piece_quad_ or -1 when the cell is outside
  // every density piece.
  std::vector<int> cell_piece_;
  std::vector<IntervalQuadrature> piece_quad_;
  // Density of each piece sampled on the grid (zero outside the piece).
  std::vector<std::vector<double>> piece_density_;
  std::vector<double> density_at_;
  std::vector<std::pair<std::size_t, double>> atom_at_;
};

GridDistribution initial_marginal(const SpinMeasure& m, std::size_t intervals = kDefaultIntervals);

/// F_prev must live on a grid that contains the breakpoints of m.
std::pair<GridDistribution, double> iterate_marginal(const SpinMeasure& m, int delta, const GridDistribution& f_prev);

struct RecursionOptions {
  std::size_t max_depth = 10000;
  double tol = 1e-8;
  std::size_t intervals = kDefaultIntervals;
  bool keep_history = false;
  double monotonicity_tol = 1e-9;
};

struct RecursionReport {
  int delta = 0;
  std::size_t depth_reached = 0;
  std::vector<double> ratios;  // Z_n / Z_{n-1}^Δ for n = 1..depth_reached
  std::optional<double> log_Z;  // absent once ln Z_n overflows a double
  double log_Z_per_node = 0.0;
  std::optional<GridDistribution> F_odd;
  std::optional<GridDistribution> F_even;
  double C_o = 0.0;
  double C_e = 0.0;
  std::optional<double> theta_o;  // Δ >= 2 only
  std::optional<double> theta_e;
  double gap_sup = 0.0;
  double C_gap = 0.0;  // |C_o - C_e| / C_e
  double parity_step = 0.0;  // last same-parity sup change
  bool converged = false;
  bool stalled = false;  // settled on a two-cycle
  std::size_t monotonicity_violations = 0;
  std::vector<std::pair<std::size_t, double>> gap_trace;
  std::vector<GridDistribution> history;  // F_0..F_n when requested
};

RecursionReport run_recursion(const SpinMeasure& m, int delta, const RecursionOptions& options = {});
RecursionReport run_recursion(const MarginalEngine& engine, const RecursionOptions& options = {});

/// ln Z of the depth-n tree in which every internal node has Δ children.
double exact_tree_log_volume(const SpinMeasure& m, int delta, int n, std::size_t intervals = kDefaultIntervals);

/// Number of T_{n,Δ} vertices, 1 + Δ + ... + Δ^n (as a double).
double tree_node_count(int delta, int n);

/// Violations of the odd/even sandwich ordering in a history F_0, F_1, ...
std::size_t check_monotonicity(const std::vector<GridDistribution>& history, double tol = 1e-9);

/// Count of grid points with a[i] > b[i] + tol.
std::size_t count_exceed(const GridDistribution& a, const GridDistribution& b, double tol);

enum class Boundary { kFree, kZeros, kOnes };

/// Root marginal of the depth-n tree with the given leaf boundary.
GridDistribution boundary_marginal(const MarginalEngine& engine, Boundary boundary, int depth);

/// Effective constants on the unscaled density λ^x (C times the density scale).
struct EffectiveConstants {
  double C_o;
  double C_e;
};
EffectiveConstants effective_constants(const SpinMeasure& m, double C_o, double C_e);

/// θ_o, θ_e from effective constants; requires Δ >= 2.
std::pair<double, double> theta_pair(double C_o, double C_e, double lambda, int delta);

}  // namespace hardcore
