#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardcore/graph.hpp"
#include "hardcore/grid.hpp"
#include "hardcore/spin_measure.hpp"

namespace hardcore {

enum class VolumeMethod { kSis, kTransfer, kExactTree, kQuadrature };

std::string to_string(VolumeMethod method);

struct VolumeEstimate {
  double log_Z = 0.0;
  double std_err = 0.0;  // of log_Z; 0 for exact methods
  long long samples = 0;
  VolumeMethod method = VolumeMethod::kSis;
  std::uint64_t seed = 0;
  // SIS: one entry per connected component, summing to log_Z.
  std::vector<double> component_log_Z;
  // transfer: the same quantity at twice the bins, and the extrapolation.
  std::optional<double> refined_log_Z;
  std::optional<double> extrapolated_log_Z;
};

inline constexpr int kSisBatches = 100;
inline constexpr int kDefaultTransferBins = 2048;

struct SisOptions {
  int workers = 0;  // 0: hardware concurrency
};

/// Sequential importance sampling of Z_G = μ^{⊗V}(P(G)). Each component is
/// sampled in BFS order from its smallest node with seed derive_seed(seed, c);
/// sample i of a component draws from stream(component_seed, i), so the
/// result does not depend on the worker count.
VolumeEstimate mc_volume_sis(const Graph& g, const SpinMeasure& m, long long samples, std::uint64_t seed,
                             const SisOptions& options = {});

/// Midpoint discretization of the kernel √w(x) 1{x+y<=1} √w(y).
VolumeEstimate transfer_cycle_logZ(int n, const SpinMeasure& m, int bins = kDefaultTransferBins);
VolumeEstimate transfer_path_logZ(int n, const SpinMeasure& m, int bins = kDefaultTransferBins);

/// Exact ln Z for graphs with at most three nodes by nested quadrature.
VolumeEstimate quadrature_log_volume(const Graph& g, const SpinMeasure& m);

/// exact_tree_log_volume wrapped as an estimate.
VolumeEstimate tree_log_volume(const SpinMeasure& m, int delta, int depth);

enum class SignVariant { kCorrected, kAsPrinted };

std::string to_string(SignVariant sign);
SignVariant parse_sign(std::string_view text);

/// I1 = ∫ λ^x F^Δ(1-x) dx and I2 = ∫ Ḟ(x) F(1-x) dx.
struct GammaIntegrals {
  double I1 = 0.0;
  double I2 = 0.0;
};
/// F must carry derivative samples and be the limit CDF for tree degree Δ-1.
GammaIntegrals gamma_integrals(int delta, double lambda, const GridDistribution& F);

/// Corrected: ln I1 - (Δ/2) ln I2. As printed: -ln I1 - (Δ/2) ln I2.
double gamma_asymptotic(int delta, double lambda, const GridDistribution& F,
                        SignVariant sign = SignVariant::kCorrected);

/// Corrected: I1^2 I2^{-Δ}. As printed: I1^{-2} I2^{-Δ}.
double rewire_ratio(int delta, double lambda, const GridDistribution& F, SignVariant sign = SignVariant::kCorrected);

/// r1 = I1^{-2} (Z_{G-u1-u2}/Z_G), r2 = I2^Δ (Z_H/Z_{G-u1-u2}).
std::pair<double, double> ratio_lemma_check(int delta, double lambda, const GridDistribution& F);

/// Limit CDF for tree degree Δ-1 at activity λ, with derivative samples:
/// the measure itself for Δ = 1, shooting for λ = 1, the recursion otherwise.
GridDistribution limit_marginal(int delta, double lambda, std::size_t intervals = 4096);

struct TrajectoryPoint {
  int n = 0;
  double log_Z_per_node = 0.0;
  double std_err = 0.0;  // per node
};

/// SIS per graph with seed derive_seed(seed, k) for the k-th graph.
std::vector<TrajectoryPoint> empirical_gamma(const std::vector<RegularGraph>& graphs, const SpinMeasure& m,
                                             long long samples, std::uint64_t seed, const SisOptions& options = {});

}  // namespace hardcore
