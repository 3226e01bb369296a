#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardcore/grid.hpp"

namespace hardcore {

enum class MeasureKind { kTwoState, kMultiState, kContinuous, kEpsInterpolated };

struct Atom {
  double location;
  double weight;
};

/// Density scale * rate^x on [a, b].
struct DensityPiece {
  double a;
  double b;
  double scale;
  double rate;

  double density(double x) const;
  /// Closed-form integral of the density over [lo, hi] ∩ [a, b].
  double mass(double lo, double hi) const;
  /// Point x in [a, b] whose cumulative mass from a equals `target`.
  double inverse_mass(double target) const;
};

/// Parameters that only some measure kinds use.
struct MeasureParams {
  double eps = 0.25;
  int states = 1;  // M for the (M+1)-state model
};

/// A finite Borel measure on [0,1]: atoms plus piecewise-exponential density.
/// Immutable after construction.
class SpinMeasure {
 public:
  /// lambda δ_1 + δ_0.
  static SpinMeasure two_state(double lambda);
  /// Σ_{i=0..M} lambda^i δ_{i/M}.
  static SpinMeasure multi_state(int m, double lambda);
  /// Density lambda^x on [0,1].
  static SpinMeasure continuous(double lambda);
  /// Density lambda^x / (2 eps) on [0, eps] ∪ [1-eps, 1].
  static SpinMeasure eps_interpolated(double eps, double lambda);

  /// Parses the CLI spellings `continuous`, `two-state`, `multi:M`, `eps:E`.
  static SpinMeasure parse(std::string_view spec, double lambda);

  MeasureKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double eps() const { return eps_; }
  int states() const { return states_; }
  /// Serialized kind tag (`two-state`, `multi:M`, `continuous`, `eps:E`).
  std::string tag() const;

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const DensityPiece> pieces() const { return pieces_; }
  bool has_atoms() const { return !atoms_.empty(); }
  bool has_density() const { return !pieces_.empty(); }

  double total_mass() const;
  /// μ of the interval between a and b with explicit endpoint inclusion.
  double mass(double a, double b, bool include_a = true, bool include_b = true) const;
  /// Density at x; on a piece boundary the closed piece containing x wins.
  double density(double x) const;
  /// Common scale factor of the density pieces (1 for purely atomic measures).
  double density_scale() const;

  /// Atom locations and density breakpoints, sorted and deduplicated.
  std::vector<double> breakpoints() const;

  /// c·μ for c > 0.
  SpinMeasure scaled(double c) const;

  /// μ[0, cap] with the same atom snapping as sample_below.
  double mass_below(double cap) const;

  /// Inverse-CDF draw from μ restricted to [0, cap]; u in [0,1). Atoms within
  /// kSnapTolerance of the cap count as inside.
  double sample_below(double cap, double u) const;

 private:
  SpinMeasure() = default;
  void validate() const;

  MeasureKind kind_ = MeasureKind::kContinuous;
  double lambda_ = 1.0;
  double eps_ = 0.5;
  int states_ = 1;
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
};

SpinMeasure make_measure(MeasureKind kind, double lambda, const MeasureParams& params = {});

/// ∫_{[a,b]} g dμ for g sampled on `grid`: exact atom sums plus fourth-order
/// quadrature of g·density on every density piece intersected with [a,b].
/// Throws std::invalid_argument if a, b, an atom or a density breakpoint
/// inside [a,b] is not a grid point.
double stieltjes_integrate(const SpinMeasure& m, const Grid& grid, std::span<const double> g, double a = 0.0,
                           double b = 1.0);

}  // namespace hardcore
