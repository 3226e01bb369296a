#include "hardcore/ode_shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hardcore/errors.hpp"

namespace hardcore {

namespace {

void require_shooting_args(double C, int delta) {
  if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("C must be positive, got " + std::to_string(C));
  if (delta < 1) throw std::invalid_argument("delta must be >= 1, got " + std::to_string(delta));
}

double hermite(double y0, double y1, double d0, double d1, double h, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

// RK4 from F(0) = 0 until F >= 1 - cut; cut may be anywhere in (0, 1).
ThresholdProfile rk4_profile(double C, int delta, double cut, double step) {
  require_shooting_args(C, delta);
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  ThresholdProfile p;
  p.C = C;
  p.delta = delta;
  p.step = step;
  p.delta_cut = cut;
  const double target = 1.0 - cut;
  const double z_limit = 10.0 / C + 10.0;
  const std::size_t max_steps = static_cast<std::size_t>(std::ceil(z_limit / step)) + 1;
  p.F.reserve(static_cast<std::size_t>(2.0 / (C * step)) + 16);

  double y = 0.0;
  p.F.push_back(y);
  const double h = step;
  while (y < target) {
    if (p.F.size() > max_steps) {
      throw NumericalError("F did not reach 1 - " + std::to_string(cut) + " before z = " + std::to_string(z_limit));
    }
    const double k1 = drift(C, y, delta);
    const double k2 = drift(C, y + 0.5 * h * k1, delta);
    const double k3 = drift(C, y + 0.5 * h * k2, delta);
    const double k4 = drift(C, y + h * k3, delta);
    y = std::min(1.0, y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
    p.F.push_back(y);
  }

  // Invert the Hermite cubic of the final step.
  const std::size_t k = p.F.size() - 2;
  const double y0 = p.F[k];
  const double y1 = p.F[k + 1];
  const double d0 = drift(C, y0, delta);
  const double d1 = drift(C, y1, delta);
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (hermite(y0, y1, d0, d1, h, mid) < target ? lo : hi) = mid;
  }
  p.sigma = (static_cast<double>(k) + 0.5 * (lo + hi)) * h;
  return p;
}

}  // namespace

double drift(double C, double y, int delta) {
  y = std::clamp(y, 0.0, 1.0);
  const double d = delta;
  return C * std::pow(1.0 - std::pow(y, d + 1.0), d / (d + 1.0));
}

double drift_dy(double C, double y, int delta) {
  y = std::clamp(y, 0.0, 1.0 - 1e-15);
  const double d = delta;
  return -C * d * std::pow(1.0 - std::pow(y, d + 1.0), -1.0 / (d + 1.0)) * std::pow(y, d);
}

double ThresholdProfile::evaluate(double zq) const {
  if (zq <= 0.0) return 0.0;
  const std::size_t last_cell = F.size() - 2;
  const std::size_t k = std::min(static_cast<std::size_t>(zq / step), last_cell);
  const double t = (zq - z(k)) / step;
  return hermite(F[k], F[k + 1], drift(C, F[k], delta), drift(C, F[k + 1], delta), step, t);
}

ThresholdProfile integrate_to_threshold(double C, int delta, double delta_cut, double step) {
  if (!(delta_cut > 0.0 && delta_cut < 0.5)) {
    throw std::invalid_argument("delta_cut must lie in (0, 0.5), got " + std::to_string(delta_cut));
  }
  return rk4_profile(C, delta, delta_cut, step);
}

double tail_length(double C, int delta, double delta_cut) {
  const double e = 1.0 / (delta + 1.0);
  return std::pow(delta + 1.0, e) * std::pow(delta_cut, e) / C;
}

double tau(double C, int delta, double delta_cut, double step) {
  const auto p = integrate_to_threshold(C, delta, delta_cut, step);
  return p.sigma + tail_length(C, delta, delta_cut);
}

GridDistribution shooting_distribution(const ThresholdProfile& p, double tau_value, const GridPtr& grid) {
  const double d = p.delta;
  const double C = p.C;
  std::vector<double> F(grid->size());
  std::vector<double> f(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double z = (*grid)[i];
    if (z <= p.sigma) {
      F[i] = p.evaluate(z);
      f[i] = drift(C, F[i], p.delta);
    } else if (z < tau_value) {
      // near F = 1: 1 - F ≈ C^{Δ+1} (τ - z)^{Δ+1} / (Δ+1)
      const double r = tau_value - z;
      F[i] = 1.0 - std::pow(C * r, d + 1.0) / (d + 1.0);
      f[i] = std::pow(C, d + 1.0) * std::pow(r, d);
    } else {
      F[i] = 1.0;
      f[i] = 0.0;
    }
  }
  return GridDistribution(grid, std::move(F), {}, std::move(f));
}

ShootingResult find_Cstar(int delta, const ShootingOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  ShootingResult res;
  res.delta = delta;
  res.delta_cut = options.delta_cut;
  auto tau_of = [&](double C) { return tau(C, delta, options.delta_cut, options.step); };

  double lo = 1e-2;
  double hi = 1e2;
  // Ḟ <= C gives τ_C >= 1/C, so any lo < 1 already brackets from below.
  for (int k = 0; lo >= 1.0 && tau_of(lo) <= 1.0; ++k) {
    if (k > 60) throw NumericalError("could not bracket C* from below");
    lo *= 0.5;
  }
  double tau_hi = tau_of(hi);
  for (int k = 0; tau_hi >= 1.0; ++k) {
    if (k > 60) throw NumericalError("could not bracket C* from above");
    hi *= 2.0;
    tau_hi = tau_of(hi);
  }

  double best_C = std::sqrt(lo * hi);
  double best_tau = tau_of(best_C);
  res.tau_trace.emplace_back(best_C, best_tau);
  int it = 0;
  while (std::abs(best_tau - 1.0) > options.tol) {
    if (it >= options.max_iterations || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) {
      throw NumericalError("bisection stalled at C = " + std::to_string(best_C) +
                           " with |tau - 1| = " + std::to_string(std::abs(best_tau - 1.0)));
    }
    (best_tau > 1.0 ? lo : hi) = best_C;
    // geometric midpoint while the bracket is wide
    best_C = hi / lo > 1.5 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    best_tau = tau_of(best_C);
    res.tau_trace.emplace_back(best_C, best_tau);
    ++it;
  }
  res.bisection_iters = it;
  res.C_star = best_C;
  res.tau_star = best_tau;
  const auto profile = integrate_to_threshold(best_C, delta, options.delta_cut, options.step);
  res.F = shooting_distribution(profile, best_tau, Grid::uniform(options.intervals));
  res.tau_tenth_cut = tau(best_C, delta, options.delta_cut / 10.0, options.step);
  return res;
}

SensitivityProfile sensitivity(double C, int delta, double level, double step) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  const auto p = rk4_profile(C, delta, 1.0 - level, step);
  SensitivityProfile out;
  double R = 0.0;
  for (std::size_t k = 0; k < p.F.size() && p.F[k] <= level; ++k) {
    if (k > 0) {
      const double a = 0.5 * step * (drift_dy(C, p.F[k - 1], delta) + drift_dy(C, p.F[k], delta));
      const double ea = std::exp(a);
      // ∂b/∂C = b / C
      R = ea * R + 0.5 * step * (ea * drift(1.0, p.F[k - 1], delta) + drift(1.0, p.F[k], delta));
    }
    out.z.push_back(p.z(k));
    out.R.push_back(R);
  }
  return out;
}

std::vector<double> central_difference_sensitivity(double C, int delta, double level, double h, double step) {
  if (!(h > 0.0 && h < C)) throw std::invalid_argument("difference step must lie in (0, C)");
  const std::size_t n = sensitivity(C, delta, level, step).z.size();
  const double cut = (1.0 - level) / 100.0;
  const auto plus = rk4_profile(C + h, delta, cut, step);
  const auto minus = rk4_profile(C - h, delta, cut, step);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fp = k < plus.F.size() ? plus.F[k] : plus.F.back();
    out[k] = (fp - minus.F[k]) / (2.0 * h);
  }
  return out;
}

double HamiltonianProfile::max_spread() const {
  double s = 0.0;
  for (const auto& iv : intervals) s = std::max(s, iv.spread);
  return s;
}

double HamiltonianProfile::left_error() const { return std::abs(R_left - target_left) / target_left; }
double HamiltonianProfile::right_error() const { return std::abs(R_right - target_right) / target_right; }

HamiltonianProfile hamiltonian_profile(const GridDistribution& F_o, double C_o, double C_e, double lambda, int delta,
                                       double eps) {
  if (delta < 2) throw std::invalid_argument("the Hamiltonian needs delta >= 2 (theta is singular at delta = 1)");
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2]");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!F_o.has_derivative()) throw std::invalid_argument("F_o carries no derivative samples");

  HamiltonianProfile hp;
  hp.delta = delta;
  hp.lambda = lambda;
  hp.eps = eps;
  // The constants refer to the density λ^x on the support; our measure carries 1/(2ε).
  const double scale = 1.0 / (2.0 * eps);
  const double co = C_o * scale;
  const double ce = C_e * scale;
  const double d = delta;
  const double expo = d / (d * d - 1.0);
  hp.theta_o = std::pow(lambda * std::pow(co, 1.0 / d) * ce, expo);
  hp.theta_e = std::pow(lambda * std::pow(ce, 1.0 / d) * co, expo);
  const double th = hp.theta_e;
  const double ll = std::log(lambda);

  const Grid& g = F_o.grid();
  const auto fdot = F_o.derivative();
  auto at = [&](std::size_t i, double& h1, double& h2) {
    const double z = g[i];
    h1 = std::pow(lambda, -z / (d + 1.0)) * th * F_o[i];
    h2 = std::pow(lambda, -z / (d * (d + 1.0))) * std::pow(th, 1.0 / d) * std::pow(std::max(fdot[i], 0.0), 1.0 / d);
    const double F = F_o[i];
    const double Fd = std::max(fdot[i], 0.0);
    return std::pow(lambda, -z) * std::pow(th * F, d + 1.0) + std::pow(lambda, -z / d) * std::pow(th * Fd, (d + 1.0) / d) -
           ll * std::pow(lambda, -z / d) * std::pow(th, (d + 1.0) / d) * F * std::pow(Fd, 1.0 / d);
  };

  std::vector<std::pair<double, double>> spans;
  if (eps >= 0.5) {
    spans = {{0.0, 1.0}};
  } else {
    spans = {{0.0, eps}, {1.0 - eps, 1.0}};
  }
  for (const auto& [a, b] : spans) {
    const std::size_t ia = g.index_of(a);
    const std::size_t ib = g.index_of(b);
    HamiltonianInterval iv{a, b};
    double lo = INFINITY;
    double hi = -INFINITY;
    double sum = 0.0;
    for (std::size_t i = ia; i <= ib; ++i) {
      double h1 = 0.0;
      double h2 = 0.0;
      const double R = at(i, h1, h2);
      hp.z.push_back(g[i]);
      hp.R.push_back(R);
      hp.h1.push_back(h1);
      hp.h2.push_back(h2);
      hp.phi.push_back(std::pow(h1, d + 1.0) + std::pow(h2, d + 1.0) - ll * h1 * h2);
      if (i == ia || i == ib) continue;
      lo = std::min(lo, R);
      hi = std::max(hi, R);
      sum += R;
      ++iv.samples;
    }
    if (iv.samples == 0) throw std::invalid_argument("no grid points inside a smooth interval");
    iv.mean = sum / static_cast<double>(iv.samples);
    iv.spread = (hi - lo) / iv.mean;
    hp.intervals.push_back(iv);
  }
  double h1 = 0.0;
  double h2 = 0.0;
  hp.R_left = at(0, h1, h2);
  hp.R_right = at(g.last(), h1, h2);
  hp.target_left = std::pow(th * ce, (d + 1.0) / d);
  hp.target_right = std::pow(th, d + 1.0) / lambda;
  return hp;
}

ResidualReport second_order_residual(const GridDistribution& F, double C, double lambda, int delta, double a, double b,
                                     double min_spacing) {
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const Grid& g = F.grid();
  std::vector<std::size_t> idx{0};
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g[i] - g[idx.back()] >= min_spacing - 1e-12) idx.push_back(i);
  }
  const double d = delta;
  const double ll = std::log(lambda);
  const bool have_deriv = F.has_derivative();

  ResidualReport rep;
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    const std::size_t i0 = idx[k - 1];
    const std::size_t i1 = idx[k];
    const std::size_t i2 = idx[k + 1];
    const double z = g[i1];
    if (z < a || z > b) continue;
    const double h1 = g[i1] - g[i0];
    const double h2 = g[i2] - g[i1];
    const double fpp = 2.0 * ((F[i2] - F[i1]) / h2 - (F[i1] - F[i0]) / h1) / (h1 + h2);
    const double fp = have_deriv ? F.derivative()[i1] : (F[i2] - F[i0]) / (h1 + h2);
    const double rhs = ll * fp - std::pow(C, 1.0 / d + 1.0) * d * std::pow(lambda, 1.0 - z) * std::pow(lambda, z / d) *
                                     std::pow(std::max(fp, 0.0), 1.0 - 1.0 / d) * std::pow(F[i1], d);
    const double r = std::abs(fpp - rhs);
    if (r > rep.sup_residual) {
      rep.sup_residual = r;
      rep.at_z = z;
    }
    ++rep.points;
  }
  rep.F0 = F[0];
  rep.hitting_time = 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (F[i] >= 1.0 - 1e-12) {
      rep.hitting_time = g[i];
      break;
    }
  }
  if (have_deriv) {
    rep.slope_left = F.derivative().front();
    rep.slope_right = F.derivative().back();
  } else {
    rep.slope_left = (F[1] - F[0]) / (g[1] - g[0]);
    rep.slope_right = (F[g.last()] - F[g.last() - 1]) / (g[g.last()] - g[g.last() - 1]);
  }
  return rep;
}

}  // namespace hardcore
