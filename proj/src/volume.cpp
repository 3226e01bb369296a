#include "hardcore/volume.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "hardcore/errors.hpp"
#include "hardcore/marginal_recursion.hpp"
#include "hardcore/ode_shooting.hpp"
#include "hardcore/quadrature.hpp"
#include "hardcore/rng.hpp"

namespace hardcore {

std::string to_string(VolumeMethod method) {
  switch (method) {
    case VolumeMethod::kSis:
      return "sis";
    case VolumeMethod::kTransfer:
      return "transfer";
    case VolumeMethod::kExactTree:
      return "exact_tree";
    case VolumeMethod::kQuadrature:
      return "quadrature";
  }
  return "unknown";
}

std::string to_string(SignVariant sign) { return sign == SignVariant::kCorrected ? "corrected" : "as-printed"; }

SignVariant parse_sign(std::string_view text) {
  if (text == "corrected") return SignVariant::kCorrected;
  if (text == "as-printed" || text == "as_printed") return SignVariant::kAsPrinted;
  throw std::invalid_argument("unknown sign variant '" + std::string(text) + "' (expected corrected or as-printed)");
}

namespace {

// Running log-sum-exp.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double x) {
    if (x <= max) {
      sum += std::exp(x - max);
    } else {
      sum = sum * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  double value() const { return max + std::log(sum); }
};

// One connected component in BFS order: earlier[k] lists the positions of
// already-placed neighbors of the k-th node.
struct SisPlan {
  std::vector<std::vector<int>> earlier;
};

SisPlan plan_component(const Graph& g, const std::vector<int>& nodes) {
  std::vector<int> position(static_cast<std::size_t>(g.size()), -1);
  std::vector<int> order{nodes.front()};
  position[static_cast<std::size_t>(nodes.front())] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (int w : g.neighbors(order[head])) {
      if (position[static_cast<std::size_t>(w)] < 0) {
        position[static_cast<std::size_t>(w)] = static_cast<int>(order.size());
        order.push_back(w);
      }
    }
  }
  SisPlan plan;
  plan.earlier.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (int w : g.neighbors(order[k])) {
      const int p = position[static_cast<std::size_t>(w)];
      if (p < static_cast<int>(k)) plan.earlier[k].push_back(p);
    }
  }
  return plan;
}

double sample_log_weight(const SisPlan& plan, const SpinMeasure& m, SplitMix64& rng, std::vector<double>& x) {
  double log_w = 0.0;
  double w = 1.0;
  for (std::size_t k = 0; k < plan.earlier.size(); ++k) {
    double cap = 1.0;
    for (int p : plan.earlier[k]) cap = std::min(cap, 1.0 - x[static_cast<std::size_t>(p)]);
    const double mass = m.mass_below(cap);
    if (!(mass > 0.0)) {
      throw NumericalError("zero-weight SIS sample: measure " + m.tag() + " has no mass on [0, " +
                           std::to_string(cap) + "]");
    }
    w *= mass;
    if (w < 1e-250 || w > 1e250) {
      log_w += std::log(w);
      w = 1.0;
    }
    x[k] = m.sample_below(cap, rng.uniform());
  }
  return log_w + std::log(w);
}

struct ComponentEstimate {
  double log_Z = 0.0;
  double std_err = 0.0;
};

ComponentEstimate sis_component(const SisPlan& plan, const SpinMeasure& m, long long samples, std::uint64_t seed,
                                int workers) {
  const int batches = kSisBatches;
  std::vector<LogSum> batch_sum(static_cast<std::size_t>(batches));
  std::vector<long long> batch_count(static_cast<std::size_t>(batches));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto work = [&] {
    std::vector<double> x(plan.earlier.size());
    try {
      for (int b = next++; b < batches && !failed; b = next++) {
        const long long lo = samples * b / batches;
        const long long hi = samples * (b + 1) / batches;
        LogSum acc;
        for (long long i = lo; i < hi; ++i) {
          auto rng = stream(seed, static_cast<std::uint64_t>(i));
          acc.add(sample_log_weight(plan, m, rng, x));
        }
        batch_sum[static_cast<std::size_t>(b)] = acc;
        batch_count[static_cast<std::size_t>(b)] = hi - lo;
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  LogSum total;
  for (const auto& b : batch_sum) {
    if (b.sum > 0.0) total.add(b.value());
  }
  ComponentEstimate est;
  est.log_Z = total.value() - std::log(static_cast<double>(samples));
  // Delta method on the batch means of W / Ẑ.
  std::vector<double> rel(static_cast<std::size_t>(batches));
  double mean = 0.0;
  for (int b = 0; b < batches; ++b) {
    const auto& s = batch_sum[static_cast<std::size_t>(b)];
    const double log_mean = s.value() - std::log(static_cast<double>(batch_count[static_cast<std::size_t>(b)]));
    rel[static_cast<std::size_t>(b)] = std::exp(log_mean - est.log_Z);
    mean += rel[static_cast<std::size_t>(b)];
  }
  mean /= batches;
  double var = 0.0;
  for (double r : rel) var += (r - mean) * (r - mean);
  var /= batches - 1;
  est.std_err = std::sqrt(var / batches);
  return est;
}

}  // namespace

VolumeEstimate mc_volume_sis(const Graph& g, const SpinMeasure& m, long long samples, std::uint64_t seed,
                             const SisOptions& options) {
  if (samples < 1000) throw std::invalid_argument("SIS needs at least 1000 samples");
  if (g.size() == 0) throw std::invalid_argument("SIS needs a nonempty graph");
  int workers = options.workers > 0 ? options.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, kSisBatches);

  VolumeEstimate out;
  out.method = VolumeMethod::kSis;
  out.samples = samples;
  out.seed = seed;
  double var = 0.0;
  const auto comps = components(g);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const auto plan = plan_component(g, comps[c]);
    const auto est = sis_component(plan, m, samples, derive_seed(seed, c), workers);
    out.component_log_Z.push_back(est.log_Z);
    out.log_Z += est.log_Z;
    var += est.std_err * est.std_err;
  }
  out.std_err = std::sqrt(var);
  return out;
}

namespace {

// Kernel A_ij = h √(w_i w_j) c_ij on midpoints, c = 1 below the
// anti-diagonal and 1/2 on it; applied in O(bins) with a prefix sum.
class TransferKernel {
 public:
  TransferKernel(const SpinMeasure& m, int bins) : h_(1.0 / bins), root_w_(static_cast<std::size_t>(bins)) {
    if (m.has_atoms()) {
      throw std::invalid_argument("transfer oracle needs a measure without atoms, got " + m.tag());
    }
    if (bins < 2) throw std::invalid_argument("transfer oracle needs at least 2 bins");
    for (int i = 0; i < bins; ++i) root_w_[static_cast<std::size_t>(i)] = std::sqrt(m.density((i + 0.5) * h_));
  }

  std::size_t size() const { return root_w_.size(); }
  double root_weight(std::size_t i) const { return root_w_[i]; }
  double h() const { return h_; }

  void apply(const std::vector<double>& v, std::vector<double>& out, std::vector<double>& prefix) const {
    const std::size_t n = size();
    prefix[0] = 0.0;
    for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + root_w_[j] * v[j];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = n - 1 - i;
      out[i] = h_ * root_w_[i] * (prefix[r] + 0.5 * root_w_[r] * v[r]);
    }
  }

 private:
  double h_;
  std::vector<double> root_w_;
};

// Applies A `steps` times with renormalization; returns the log of the
// accumulated scale (or -inf once the vector vanishes).
double power(const TransferKernel& a, std::vector<double>& v, int steps) {
  std::vector<double> tmp(v.size());
  std::vector<double> prefix(v.size() + 1);
  double log_scale = 0.0;
  for (int s = 0; s < steps; ++s) {
    a.apply(v, tmp, prefix);
    double top = 0.0;
    for (double t : tmp) top = std::max(top, std::abs(t));
    if (top == 0.0) return -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = tmp[i] / top;
    log_scale += std::log(top);
  }
  return log_scale;
}

double cycle_log_trace(int n, const SpinMeasure& m, int bins) {
  const TransferKernel a(m, bins);
  LogSum trace;
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.root_weight(k) == 0.0) continue;
    std::fill(v.begin(), v.end(), 0.0);
    v[k] = 1.0;
    const double log_scale = power(a, v, n);
    if (v[k] > 0.0) trace.add(log_scale + std::log(v[k]));
  }
  if (!(trace.sum > 0.0)) throw NumericalError("transfer trace vanished");
  return trace.value();
}

double path_log_form(int n, const SpinMeasure& m, int bins) {
  const TransferKernel a(m, bins);
  std::vector<double> u(a.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sqrt(a.h()) * a.root_weight(i);
  std::vector<double> v = u;
  const double log_scale = power(a, v, n - 1);
  double form = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) form += u[i] * v[i];
  if (!(form > 0.0)) throw NumericalError("transfer bilinear form vanished");
  return log_scale + std::log(form);
}

VolumeEstimate transfer_estimate(double coarse, double fine) {
  VolumeEstimate out;
  out.method = VolumeMethod::kTransfer;
  out.log_Z = coarse;
  out.refined_log_Z = fine;
  // midpoint error is O(h^2)
  out.extrapolated_log_Z = fine + (fine - coarse) / 3.0;
  return out;
}

}  // namespace

VolumeEstimate transfer_cycle_logZ(int n, const SpinMeasure& m, int bins) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  return transfer_estimate(cycle_log_trace(n, m, bins), cycle_log_trace(n, m, 2 * bins));
}

VolumeEstimate transfer_path_logZ(int n, const SpinMeasure& m, int bins) {
  if (n < 1) throw std::invalid_argument("path needs n >= 1");
  return transfer_estimate(path_log_form(n, m, bins), path_log_form(n, m, 2 * bins));
}

namespace {

struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;

  explicit GaussLegendre(int n) : x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) {
      double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = t;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        const double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      x[static_cast<std::size_t>(i)] = t;
      w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

// ∫ f dμ over (lo, hi] (or [lo, hi] when include_lo), splitting density
// pieces at `splits` so the integrand is smooth on every panel.
template <class F>
double integrate_measure(const SpinMeasure& m, double lo, double hi, bool include_lo, const std::vector<double>& splits,
                         F&& f) {
  static const GaussLegendre gl(20);
  double total = 0.0;
  if (hi < lo) return 0.0;
  for (const Atom& a : m.atoms()) {
    const bool above = include_lo ? a.location >= lo - kSnapTolerance : a.location > lo + kSnapTolerance;
    if (above && a.location <= hi + kSnapTolerance) total += a.weight * f(a.location);
  }
  for (const DensityPiece& p : m.pieces()) {
    const double a = std::max(lo, p.a);
    const double b = std::min(hi, p.b);
    if (!(b > a)) continue;
    std::vector<double> cuts{a, b};
    for (double s : splits) {
      if (s > a && s < b) cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
      const double half = 0.5 * (cuts[k + 1] - cuts[k]);
      for (std::size_t q = 0; q < gl.x.size(); ++q) {
        const double x = mid + half * gl.x[q];
        total += half * gl.w[q] * p.density(x) * f(x);
      }
    }
  }
  return total;
}

double component_volume(const Graph& g, const std::vector<int>& nodes, const SpinMeasure& m) {
  std::vector<double> splits{0.5};
  for (double b : m.breakpoints()) {
    splits.push_back(b);
    splits.push_back(1.0 - b);
  }
  auto below = [&](double cap) { return m.mass_below(std::max(0.0, cap)); };
  const std::size_t n = nodes.size();
  const std::size_t edges = [&] {
    std::size_t e = 0;
    for (int u : nodes) e += static_cast<std::size_t>(g.degree(u));
    return e / 2;
  }();
  if (n == 1) return m.total_mass();
  if (n == 2) return integrate_measure(m, 0.0, 1.0, true, splits, [&](double x) { return below(1.0 - x); });
  if (n == 3 && edges == 2) {
    return integrate_measure(m, 0.0, 1.0, true, splits, [&](double y) {
      const double c = below(1.0 - y);
      return c * c;
    });
  }
  if (n == 3 && edges == 3) {
    // y <= x contributes μ[0,1-x] μ[0, min(x, 1-x)]; y > x needs the
    // inner integral of μ[0,1-y] over (x, 1-x].
    return integrate_measure(m, 0.0, 1.0, true, splits, [&](double x) {
      const double lower = below(1.0 - x) * below(std::min(x, 1.0 - x));
      std::vector<double> inner = splits;
      inner.push_back(x);
      inner.push_back(1.0 - x);
      const double upper =
          integrate_measure(m, x, 1.0 - x, false, inner, [&](double y) { return below(1.0 - y); });
      return lower + upper;
    });
  }
  throw std::invalid_argument("quadrature volume handles components of at most 3 nodes");
}

}  // namespace

VolumeEstimate quadrature_log_volume(const Graph& g, const SpinMeasure& m) {
  if (g.size() == 0 || g.size() > 3) throw std::invalid_argument("quadrature volume needs 1 to 3 nodes");
  VolumeEstimate out;
  out.method = VolumeMethod::kQuadrature;
  for (const auto& c : components(g)) out.log_Z += std::log(component_volume(g, c, m));
  return out;
}

VolumeEstimate tree_log_volume(const SpinMeasure& m, int delta, int depth) {
  VolumeEstimate out;
  out.method = VolumeMethod::kExactTree;
  out.log_Z = exact_tree_log_volume(m, delta, depth);
  return out;
}

GammaIntegrals gamma_integrals(int delta, double lambda, const GridDistribution& F) {
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!F.has_derivative()) throw std::invalid_argument("gamma needs F with derivative samples");
  if (!F.jumps().empty()) throw std::invalid_argument("gamma needs a continuous F");
  const Grid& grid = F.grid();
  const auto dF = F.derivative();
  std::vector<double> a(grid.size());
  std::vector<double> b(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double mirror = F[grid.reflect(i)];
    a[i] = std::pow(lambda, grid[i]) * std::pow(mirror, delta);
    b[i] = dF[i] * mirror;
  }
  GammaIntegrals out;
  const auto bp = grid.breakpoints();
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const IntervalQuadrature q(grid, bp[k], bp[k + 1]);
    out.I1 += q.integrate(a);
    out.I2 += q.integrate(b);
  }
  if (!(out.I1 > 0.0 && out.I2 > 0.0)) throw NumericalError("gamma integrals are not positive");
  return out;
}

double gamma_asymptotic(int delta, double lambda, const GridDistribution& F, SignVariant sign) {
  const auto [I1, I2] = gamma_integrals(delta, lambda, F);
  const double first = sign == SignVariant::kCorrected ? std::log(I1) : -std::log(I1);
  return first - 0.5 * delta * std::log(I2);
}

double rewire_ratio(int delta, double lambda, const GridDistribution& F, SignVariant sign) {
  const auto [I1, I2] = gamma_integrals(delta, lambda, F);
  const double e = sign == SignVariant::kCorrected ? 2.0 : -2.0;
  return std::pow(I1, e) * std::pow(I2, -delta);
}

std::pair<double, double> ratio_lemma_check(int delta, double lambda, const GridDistribution& F) {
  const auto [I1, I2] = gamma_integrals(delta, lambda, F);
  return {std::pow(I1, -2.0), std::pow(I2, delta)};
}

GridDistribution limit_marginal(int delta, double lambda, std::size_t intervals) {
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  const auto m = SpinMeasure::continuous(lambda);
  if (delta == 1) return initial_marginal(m, intervals);
  if (lambda == 1.0) {
    ShootingOptions opts;
    opts.intervals = intervals;
    return *find_Cstar(delta - 1, opts).F;
  }
  RecursionOptions opts;
  opts.intervals = intervals;
  auto report = run_recursion(m, delta - 1, opts);
  if (!report.converged) {
    throw NumericalError("recursion for tree degree " + std::to_string(delta - 1) + " did not converge");
  }
  return *report.F_odd;
}

std::vector<TrajectoryPoint> empirical_gamma(const std::vector<RegularGraph>& graphs, const SpinMeasure& m,
                                             long long samples, std::uint64_t seed, const SisOptions& options) {
  std::vector<TrajectoryPoint> out;
  if (graphs.empty()) return out;
  const int delta = graphs.front().delta();
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const auto& g = graphs[k];
    if (g.delta() != delta) throw std::invalid_argument("empirical_gamma needs graphs of one degree");
    const auto est = mc_volume_sis(g, m, samples, derive_seed(seed, k), options);
    out.push_back({g.size(), est.log_Z / g.size(), est.std_err / g.size()});
  }
  return out;
}

}  // namespace hardcore
