#include "hardcore/spin_measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hardcore/quadrature.hpp"

namespace hardcore {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("activity lambda must be positive, got " + std::to_string(lambda));
  }
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Shortest representation that round-trips, for readable tags.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
    if (std::strtod(shorter, nullptr) == x) return shorter;
  }
  return buf;
}

}  // namespace

double DensityPiece::density(double x) const { return scale * std::pow(rate, x); }

double DensityPiece::mass(double lo, double hi) const {
  lo = std::max(lo, a);
  hi = std::min(hi, b);
  if (hi <= lo) return 0.0;
  if (rate == 1.0) return scale * (hi - lo);
  const double log_rate = std::log(rate);
  // s (λ^hi - λ^lo) / ln λ, written to stay accurate for λ close to 1.
  return scale * std::pow(rate, lo) * std::expm1(log_rate * (hi - lo)) / log_rate;
}

double DensityPiece::inverse_mass(double target) const {
  if (target <= 0.0) return a;
  if (rate == 1.0) return std::min(b, a + target / scale);
  const double log_rate = std::log(rate);
  const double x = a + std::log1p(target * log_rate / (scale * std::pow(rate, a))) / log_rate;
  return std::clamp(x, a, b);
}

SpinMeasure SpinMeasure::two_state(double lambda) {
  require_lambda(lambda);
  SpinMeasure m;
  m.kind_ = MeasureKind::kTwoState;
  m.lambda_ = lambda;
  m.states_ = 1;
  m.atoms_ = {{0.0, 1.0}, {1.0, lambda}};
  m.validate();
  return m;
}

SpinMeasure SpinMeasure::multi_state(int states, double lambda) {
  require_lambda(lambda);
  if (states < 1) throw std::invalid_argument("multi-state model needs M >= 1, got " + std::to_string(states));
  SpinMeasure m;
  m.kind_ = states == 1 ? MeasureKind::kTwoState : MeasureKind::kMultiState;
  m.lambda_ = lambda;
  m.states_ = states;
  for (int i = 0; i <= states; ++i) {
    // Upper-half atoms are stored as exact reflections of lower-half ones.
    const double loc = 2 * i <= states ? static_cast<double>(i) / states : 1.0 - static_cast<double>(states - i) / states;
    m.atoms_.push_back({loc, std::pow(lambda, i)});
  }
  m.validate();
  return m;
}

SpinMeasure SpinMeasure::continuous(double lambda) {
  require_lambda(lambda);
  SpinMeasure m;
  m.kind_ = MeasureKind::kContinuous;
  m.lambda_ = lambda;
  m.pieces_ = {{0.0, 1.0, 1.0, lambda}};
  m.validate();
  return m;
}

SpinMeasure SpinMeasure::eps_interpolated(double eps, double lambda) {
  require_lambda(lambda);
  if (!(eps > 0.0 && eps < 0.5)) {
    throw std::invalid_argument("eps must lie in (0, 1/2), got " + std::to_string(eps));
  }
  SpinMeasure m;
  m.kind_ = MeasureKind::kEpsInterpolated;
  m.lambda_ = lambda;
  m.eps_ = eps;
  const double scale = 1.0 / (2.0 * eps);
  m.pieces_ = {{0.0, eps, scale, lambda}, {1.0 - eps, 1.0, scale, lambda}};
  m.validate();
  return m;
}

SpinMeasure make_measure(MeasureKind kind, double lambda, const MeasureParams& params) {
  switch (kind) {
    case MeasureKind::kTwoState:
      return SpinMeasure::two_state(lambda);
    case MeasureKind::kMultiState:
      return SpinMeasure::multi_state(params.states, lambda);
    case MeasureKind::kContinuous:
      return SpinMeasure::continuous(lambda);
    case MeasureKind::kEpsInterpolated:
      return SpinMeasure::eps_interpolated(params.eps, lambda);
  }
  throw std::invalid_argument("unknown measure kind");
}

SpinMeasure SpinMeasure::parse(std::string_view spec, double lambda) {
  auto parse_suffix = [&](std::string_view prefix) -> std::string_view {
    return spec.substr(prefix.size());
  };
  if (spec == "continuous") return continuous(lambda);
  if (spec == "two-state") return two_state(lambda);
  if (spec.starts_with("multi:")) {
    const auto digits = parse_suffix("multi:");
    int states = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), states);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
      throw std::invalid_argument("bad multi-state spec '" + std::string(spec) + "'");
    }
    return multi_state(states, lambda);
  }
  if (spec.starts_with("eps:")) {
    const std::string text(parse_suffix("eps:"));
    char* end = nullptr;
    const double eps = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) {
      throw std::invalid_argument("bad eps spec '" + std::string(spec) + "'");
    }
    return eps_interpolated(eps, lambda);
  }
  throw std::invalid_argument("unknown measure '" + std::string(spec) +
                              "' (expected continuous, two-state, multi:M or eps:E)");
}

std::string SpinMeasure::tag() const {
  switch (kind_) {
    case MeasureKind::kTwoState:
      return "two-state";
    case MeasureKind::kMultiState:
      return "multi:" + std::to_string(states_);
    case MeasureKind::kContinuous:
      return "continuous";
    case MeasureKind::kEpsInterpolated:
      return "eps:" + format_number(eps_);
  }
  return "unknown";
}

void SpinMeasure::validate() const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!(a.location >= 0.0 && a.location <= 1.0) || !(a.weight > 0.0)) {
      throw std::invalid_argument("atom outside [0,1] or with non-positive weight");
    }
    if (i > 0 && !(a.location > atoms_[i - 1].location)) {
      throw std::invalid_argument("atom locations must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const DensityPiece& p = pieces_[i];
    if (!(p.a >= 0.0 && p.b <= 1.0 && p.a < p.b) || !(p.scale > 0.0) || !(p.rate > 0.0)) {
      throw std::invalid_argument("invalid density piece");
    }
    if (i > 0 && p.a < pieces_[i - 1].b) throw std::invalid_argument("density pieces overlap");
  }
  const double total = total_mass();
  if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("measure has no finite positive mass");
  if (!(mass(0.0, 0.5) > 0.0)) throw std::invalid_argument("measure puts no mass on [0, 1/2]");
}

double SpinMeasure::total_mass() const { return mass(0.0, 1.0); }

double SpinMeasure::mass(double a, double b, bool include_a, bool include_b) const {
  if (!(a >= 0.0 && a <= b && b <= 1.0)) {
    throw std::invalid_argument("mass() needs 0 <= a <= b <= 1");
  }
  double total = 0.0;
  for (const DensityPiece& p : pieces_) total += p.mass(a, b);
  for (const Atom& atom : atoms_) {
    const double x = atom.location;
    const bool inside = (x > a && x < b) || (x == a && include_a) || (x == b && include_b);
    if (inside && (a != b || (include_a && include_b))) total += atom.weight;
  }
  return total;
}

double SpinMeasure::density(double x) const {
  for (const DensityPiece& p : pieces_) {
    if (x >= p.a && x <= p.b) return p.density(x);
  }
  return 0.0;
}

double SpinMeasure::density_scale() const { return pieces_.empty() ? 1.0 : pieces_.front().scale; }

std::vector<double> SpinMeasure::breakpoints() const {
  std::vector<double> pts;
  for (const Atom& a : atoms_) pts.push_back(a.location);
  for (const DensityPiece& p : pieces_) {
    pts.push_back(p.a);
    pts.push_back(p.b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

SpinMeasure SpinMeasure::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scale factor must be positive");
  SpinMeasure m = *this;
  for (Atom& a : m.atoms_) a.weight *= c;
  for (DensityPiece& p : m.pieces_) p.scale *= c;
  return m;
}

double SpinMeasure::mass_below(double cap) const {
  cap = std::clamp(cap, 0.0, 1.0);
  double t = 0.0;
  for (const DensityPiece& p : pieces_) t += p.mass(0.0, cap);
  for (const Atom& a : atoms_) {
    if (a.location <= cap + kSnapTolerance) t += a.weight;
  }
  return t;
}

double SpinMeasure::sample_below(double cap, double u) const {
  cap = std::clamp(cap, 0.0, 1.0);
  double remaining = u * mass_below(cap);
  // Walk atoms and pieces in order of location.
  std::size_t ai = 0;
  std::size_t pi = 0;
  double last_candidate = 0.0;
  while (ai < atoms_.size() || pi < pieces_.size()) {
    const bool take_atom =
        pi >= pieces_.size() || (ai < atoms_.size() && atoms_[ai].location <= pieces_[pi].a);
    if (take_atom) {
      const Atom& a = atoms_[ai++];
      if (a.location > cap + kSnapTolerance) break;
      last_candidate = a.location;
      if (remaining < a.weight) return a.location;
      remaining -= a.weight;
    } else {
      const DensityPiece& p = pieces_[pi++];
      if (p.a >= cap) break;
      const double piece_mass = p.mass(p.a, cap);
      last_candidate = std::min(cap, p.b);
      if (remaining < piece_mass) return std::min(p.inverse_mass(remaining), cap);
      remaining -= piece_mass;
    }
  }
  return last_candidate;
}

double stieltjes_integrate(const SpinMeasure& m, const Grid& grid, std::span<const double> g, double a, double b) {
  if (g.size() != grid.size()) throw std::invalid_argument("function samples do not match the grid");
  if (!(a >= 0.0 && a <= b && b <= 1.0)) throw std::invalid_argument("stieltjes_integrate needs 0 <= a <= b <= 1");
  const std::size_t ia = grid.index_of(a);
  const std::size_t ib = grid.index_of(b);
  double total = 0.0;
  for (const Atom& atom : m.atoms()) {
    if (atom.location < grid[ia] - kSnapTolerance || atom.location > grid[ib] + kSnapTolerance) continue;
    total += atom.weight * g[grid.index_of(atom.location)];
  }
  for (const DensityPiece& p : m.pieces()) {
    const double lo = std::max(p.a, a);
    const double hi = std::min(p.b, b);
    if (hi <= lo) continue;
    const std::size_t first = grid.index_of(lo);
    const std::size_t last = grid.index_of(hi);
    std::vector<double> weighted(grid.size(), 0.0);
    for (std::size_t i = first; i <= last; ++i) weighted[i] = g[i] * p.density(grid[i]);
    total += IntervalQuadrature(grid, first, last).integrate(weighted);
  }
  return total;
}

}  // namespace hardcore
