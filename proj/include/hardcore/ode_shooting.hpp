#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "hardcore/grid.hpp"

namespace hardcore {

inline constexpr double kDefaultDeltaCut = 1e-6;
inline constexpr double kDefaultStep = 1e-4;

/// b(C, y) = C (1 - y^{Δ+1})^{Δ/(Δ+1)}, with y clamped to [0,1].
double drift(double C, double y, int delta);
/// ∂b/∂y; -inf is avoided by clamping y strictly below 1.
double drift_dy(double C, double y, int delta);

/// Fixed-step RK4 solution of Ḟ = b(C, F), F(0) = 0, stopped at the first
/// step that reaches 1 - delta_cut. Nodes are z_k = k·step.
struct ThresholdProfile {
  double C = 0.0;
  int delta = 1;
  double step = 0.0;
  double delta_cut = 0.0;
  std::vector<double> F;  // F(z_k); the last entry is at or above 1 - delta_cut
  double sigma = 0.0;     // first crossing of 1 - delta_cut

  double z(std::size_t k) const { return static_cast<double>(k) * step; }
  /// Cubic Hermite evaluation for 0 <= z <= sigma.
  double evaluate(double z) const;
};

ThresholdProfile integrate_to_threshold(double C, int delta, double delta_cut = kDefaultDeltaCut,
                                        double step = kDefaultStep);

/// Leading-order time from 1 - delta_cut to 1: (Δ+1)^{1/(Δ+1)} delta_cut^{1/(Δ+1)} / C.
double tail_length(double C, int delta, double delta_cut);

/// τ_C = inf{z : F_C(z) = 1}.
double tau(double C, int delta, double delta_cut = kDefaultDeltaCut, double step = kDefaultStep);

struct ShootingOptions {
  double tol = 1e-8;
  double delta_cut = kDefaultDeltaCut;
  double step = kDefaultStep;
  std::size_t intervals = 4096;  // output grid
  int max_iterations = 200;
};

struct ShootingResult {
  int delta = 1;
  double C_star = 0.0;
  double tau_star = 0.0;
  std::optional<GridDistribution> F;  // with derivative samples
  std::vector<std::pair<double, double>> tau_trace;  // (C, τ_C) per bisection step
  double delta_cut = 0.0;
  int bisection_iters = 0;
  // τ_{C*} recomputed at delta_cut / 10, to expose tail-formula sensitivity
  double tau_tenth_cut = 0.0;
};

ShootingResult find_Cstar(int delta, const ShootingOptions& options = {});

/// F_C sampled on `grid`: RK4 profile up to σ, tail expansion up to τ, 1 after.
GridDistribution shooting_distribution(const ThresholdProfile& profile, double tau_value, const GridPtr& grid);

/// R_C(z) = ∂F_C/∂C on the RK4 nodes with F_C(z) <= level.
struct SensitivityProfile {
  std::vector<double> z;
  std::vector<double> R;
};
SensitivityProfile sensitivity(double C, int delta, double level, double step = kDefaultStep);

/// (F_{C+h} - F_{C-h}) / 2h on the same nodes as `sensitivity`.
std::vector<double> central_difference_sensitivity(double C, int delta, double level, double h,
                                                   double step = kDefaultStep);

struct HamiltonianInterval {
  double a = 0.0;
  double b = 0.0;
  std::size_t samples = 0;
  double mean = 0.0;
  double spread = 0.0;  // (max - min) / mean
};

struct HamiltonianProfile {
  int delta = 2;
  double lambda = 1.0;
  double eps = 0.5;
  double theta_o = 0.0;
  double theta_e = 0.0;
  std::vector<double> z;
  std::vector<double> R;
  std::vector<double> h1;
  std::vector<double> h2;
  std::vector<double> phi;
  std::vector<HamiltonianInterval> intervals;
  double R_left = 0.0;  // R at 0+
  double R_right = 0.0;  // R at 1-
  double target_left = 0.0;
  double target_right = 0.0;

  double max_spread() const;
  double left_error() const;  // relative
  double right_error() const;
};

/// C_o, C_e are the recursion constants for the measure with density
/// λ^x/(2ε) on [0,ε] ∪ [1-ε,1] (ε = 1/2 is the continuous model).
HamiltonianProfile hamiltonian_profile(const GridDistribution& F_o, double C_o, double C_e, double lambda, int delta,
                                       double eps = 0.5);

struct ResidualReport {
  double sup_residual = 0.0;
  double at_z = 0.0;
  std::size_t points = 0;
  double F0 = 0.0;            // F(0)
  double hitting_time = 0.0;  // first grid point where F reaches 1
  double slope_left = 0.0;    // Ḟ(0+), should equal C
  double slope_right = 0.0;   // Ḟ(1), should vanish
};

/// Residual of F̈ = (ln λ)Ḟ - C^{1/Δ+1} Δ λ^{1-z} λ^{z/Δ} Ḟ^{1-1/Δ} F^Δ
/// on [a, b] using centered differences at spacing >= min_spacing.
ResidualReport second_order_residual(const GridDistribution& F, double C, double lambda, int delta, double a = 0.05,
                                     double b = 0.95, double min_spacing = 1.0 / 1024.0);

}  // namespace hardcore
