#include "hardcore/marginal_recursion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hardcore/errors.hpp"

namespace hardcore {

namespace {

// Parity steps below this mean the odd and even iterates have both stopped moving.
constexpr double kStallStep = 1e-13;

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// CDF of a spin pinned at 0: F == 1 on the whole grid.
GridDistribution pinned_at_zero(const GridPtr& grid) {
  return GridDistribution(grid, std::vector<double>(grid->size(), 1.0), {{0.0, 1.0}});
}

}  // namespace

MarginalEngine::MarginalEngine(SpinMeasure measure, int delta, std::size_t intervals)
    : measure_(std::move(measure)), delta_(delta) {
  const auto bps = measure_.breakpoints();
  grid_ = Grid::make(intervals, bps);
  setup();
}

MarginalEngine::MarginalEngine(SpinMeasure measure, int delta, GridPtr grid)
    : measure_(std::move(measure)), delta_(delta), grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("null grid");
  for (double b : measure_.breakpoints()) {
    if (!grid_->find(b) || !grid_->find(1.0 - b)) {
      throw std::invalid_argument("grid lacks measure breakpoint " + std::to_string(b));
    }
  }
  setup();
}

void MarginalEngine::setup() {
  if (delta_ < 1) throw std::invalid_argument("delta must be >= 1, got " + std::to_string(delta_));
  const Grid& g = *grid_;
  cell_piece_.assign(g.last(), -1);
  density_at_.assign(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) density_at_[i] = measure_.density(g[i]);
  int p = 0;
  for (const DensityPiece& piece : measure_.pieces()) {
    const std::size_t first = g.index_of(piece.a);
    const std::size_t last = g.index_of(piece.b);
    piece_quad_.emplace_back(g, first, last);
    std::vector<double> dens(g.size(), 0.0);
    for (std::size_t i = first; i <= last; ++i) dens[i] = piece.density(g[i]);
    piece_density_.push_back(std::move(dens));
    for (std::size_t k = first; k < last; ++k) cell_piece_[k] = p;
    ++p;
  }
  for (const Atom& a : measure_.atoms()) atom_at_.emplace_back(g.index_of(a.location), a.weight);
}

void MarginalEngine::check_grid(const GridDistribution& f) const {
  if (f.grid_ptr() == grid_) return;
  const auto a = f.grid().points();
  const auto b = grid_->points();
  if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
    throw std::invalid_argument("distribution does not live on the engine grid");
  }
}

std::vector<double> MarginalEngine::reflected_power(const GridDistribution& f) const {
  check_grid(f);
  const Grid& g = *grid_;
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = ipow(f[g.reflect(i)], delta_);
  return out;
}

std::vector<double> MarginalEngine::cumulative(const GridDistribution& f) const {
  const std::vector<double> g = reflected_power(f);
  const std::size_t n = grid_->size();

  std::vector<std::vector<double>> weighted(piece_quad_.size());
  for (std::size_t p = 0; p < piece_quad_.size(); ++p) {
    weighted[p].assign(n, 0.0);
    for (std::size_t i = piece_quad_[p].first(); i <= piece_quad_[p].last(); ++i) {
      weighted[p][i] = g[i] * piece_density_[p][i];
    }
  }

  std::vector<double> out(n);
  double dens = 0.0;
  double atoms = 0.0;
  std::size_t next_atom = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const int p = cell_piece_[i - 1];
      if (p >= 0) dens += piece_quad_[p].cell(i - 1, weighted[p]);
    }
    while (next_atom < atom_at_.size() && atom_at_[next_atom].first == i) {
      atoms += atom_at_[next_atom].second * g[i];
      ++next_atom;
    }
    out[i] = dens + atoms;
  }
  return out;
}

double MarginalEngine::partition_ratio(const GridDistribution& f) const { return cumulative(f).back(); }

std::pair<GridDistribution, double> MarginalEngine::iterate(const GridDistribution& prev) const {
  std::vector<double> cum = cumulative(prev);
  const double ratio = cum.back();
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw NumericalError("recursion ratio is " + std::to_string(ratio) + " for measure " + measure_.tag() +
                         "; the measure needs mass on [0, 1/2]");
  }
  for (double& v : cum) v /= ratio;
  cum.back() = 1.0;

  std::vector<Jump> jumps;
  const Grid& g = *grid_;
  for (const auto& [idx, weight] : atom_at_) {
    jumps.push_back({g[idx], weight * ipow(prev[g.reflect(idx)], delta_) / ratio});
  }
  std::optional<std::vector<double>> deriv;
  if (measure_.has_density()) {
    deriv.emplace(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      (*deriv)[i] = ipow(prev[g.reflect(i)], delta_) * density_at_[i] / ratio;
    }
  }
  return {GridDistribution(grid_, std::move(cum), std::move(jumps), std::move(deriv)), ratio};
}

GridDistribution MarginalEngine::initial() const { return iterate(pinned_at_zero(grid_)).first; }

GridDistribution initial_marginal(const SpinMeasure& m, std::size_t intervals) {
  return MarginalEngine(m, 1, intervals).initial();
}

std::pair<GridDistribution, double> iterate_marginal(const SpinMeasure& m, int delta, const GridDistribution& f_prev) {
  return MarginalEngine(m, delta, f_prev.grid_ptr()).iterate(f_prev);
}

std::size_t count_exceed(const GridDistribution& a, const GridDistribution& b, double tol) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + tol) ++count;
  }
  return count;
}

EffectiveConstants effective_constants(const SpinMeasure& m, double C_o, double C_e) {
  const double s = m.density_scale();
  return {C_o * s, C_e * s};
}

std::pair<double, double> theta_pair(double C_o, double C_e, double lambda, int delta) {
  if (delta < 2) throw std::invalid_argument("theta is singular at delta = 1");
  const double d = delta;
  const double expo = d / (d * d - 1.0);
  const double theta_o = std::pow(lambda * std::pow(C_o, 1.0 / d) * C_e, expo);
  const double theta_e = std::pow(lambda * std::pow(C_e, 1.0 / d) * C_o, expo);
  return {theta_o, theta_e};
}

RecursionReport run_recursion(const SpinMeasure& m, int delta, const RecursionOptions& options) {
  return run_recursion(MarginalEngine(m, delta, options.intervals), options);
}

RecursionReport run_recursion(const MarginalEngine& engine, const RecursionOptions& options) {
  if (options.max_depth < 2) throw std::invalid_argument("max_depth must be >= 2");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const int delta = engine.delta();
  const double mtol = options.monotonicity_tol;

  RecursionReport rep;
  rep.delta = delta;

  GridDistribution current = engine.initial();
  double log_z = std::log(engine.measure().total_mass());
  double per_node = log_z;
  double inv_nodes = 1.0;
  if (options.keep_history) rep.history.push_back(current);

  std::optional<GridDistribution> odd;
  GridDistribution even = current;
  double step_odd = INFINITY;
  double step_even = INFINITY;

  auto evaluate = [&] {
    rep.gap_sup = sup_distance(*odd, even);
    rep.C_o = 1.0 / engine.partition_ratio(*odd);
    rep.C_e = 1.0 / engine.partition_ratio(even);
    rep.C_gap = std::abs(rep.C_o - rep.C_e) / rep.C_e;
    rep.parity_step = std::max(step_odd, step_even);
  };

  for (std::size_t depth = 1; depth <= options.max_depth; ++depth) {
    auto [next, ratio] = engine.iterate(current);
    rep.ratios.push_back(ratio);
    const double log_r = std::log(ratio);
    log_z = log_r + delta * log_z;
    const double inv_next = inv_nodes / (inv_nodes + delta);
    per_node = log_r * inv_next + delta * per_node / (inv_nodes + delta);
    inv_nodes = inv_next;

    if (depth % 2 == 1) {
      if (odd) {
        rep.monotonicity_violations += count_exceed(next, *odd, mtol);
        step_odd = sup_distance(next, *odd);
      }
      rep.monotonicity_violations += count_exceed(even, next, mtol);
      odd = next;
    } else {
      rep.monotonicity_violations += count_exceed(even, next, mtol);
      rep.monotonicity_violations += count_exceed(next, *odd, mtol);
      step_even = sup_distance(next, even);
      even = next;
    }
    if (options.keep_history) rep.history.push_back(next);
    current = std::move(next);
    rep.depth_reached = depth;

    if (depth % 2 == 0) {
      evaluate();
      rep.gap_trace.emplace_back(depth, rep.gap_sup);
      if (rep.gap_sup <= options.tol && rep.C_gap <= options.tol) {
        rep.converged = true;
        break;
      }
      if (rep.parity_step <= kStallStep) {
        rep.stalled = true;
        break;
      }
    }
  }
  if (rep.depth_reached % 2 == 1) evaluate();

  rep.log_Z = std::isfinite(log_z) ? std::optional<double>(log_z) : std::nullopt;
  rep.log_Z_per_node = per_node;
  if (delta >= 2) {
    const auto eff = effective_constants(engine.measure(), rep.C_o, rep.C_e);
    const auto [to, te] = theta_pair(eff.C_o, eff.C_e, engine.measure().lambda(), delta);
    rep.theta_o = to;
    rep.theta_e = te;
  }
  rep.F_odd = std::move(odd);
  rep.F_even = std::move(even);
  return rep;
}

double exact_tree_log_volume(const SpinMeasure& m, int delta, int n, std::size_t intervals) {
  if (n < 0) throw std::invalid_argument("tree depth must be >= 0");
  const MarginalEngine engine(m, delta, intervals);
  double log_z = std::log(m.total_mass());
  GridDistribution f = engine.initial();
  for (int k = 1; k <= n; ++k) {
    auto [next, ratio] = engine.iterate(f);
    log_z = std::log(ratio) + delta * log_z;
    f = std::move(next);
  }
  return log_z;
}

double tree_node_count(int delta, int n) {
  double count = 0.0;
  double level = 1.0;
  for (int k = 0; k <= n; ++k) {
    count += level;
    level *= delta;
  }
  return count;
}

std::size_t check_monotonicity(const std::vector<GridDistribution>& history, double tol) {
  std::size_t violations = 0;
  for (std::size_t k = 2; k < history.size(); ++k) {
    if (k % 2 == 1) {
      violations += count_exceed(history[k], history[k - 2], tol);
    } else {
      violations += count_exceed(history[k - 2], history[k], tol);
    }
  }
  for (std::size_t a = 1; a < history.size(); a += 2) {
    for (std::size_t b = 0; b < history.size(); b += 2) {
      violations += count_exceed(history[b], history[a], tol);
    }
  }
  return violations;
}

GridDistribution boundary_marginal(const MarginalEngine& engine, Boundary boundary, int depth) {
  // Leaves pinned at 1 force their parents to 0, so the ones boundary at
  // depth n is the zeros boundary at depth n-1; free leaves at depth n-1
  // are what the zeros boundary leaves behind.
  int steps = 0;
  switch (boundary) {
    case Boundary::kFree:
      if (depth < 0) throw std::invalid_argument("depth must be >= 0");
      steps = depth + 1;
      break;
    case Boundary::kZeros:
      if (depth < 1) throw std::invalid_argument("zeros boundary needs depth >= 1");
      steps = depth;
      break;
    case Boundary::kOnes:
      if (depth < 2) throw std::invalid_argument("ones boundary needs depth >= 2");
      steps = depth - 1;
      break;
  }
  GridDistribution f = pinned_at_zero(engine.grid());
  for (int k = 0; k < steps; ++k) f = engine.iterate(f).first;
  return f;
}

}  // namespace hardcore
