#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracial/phase_space.hpp"

namespace tracial {

/// Weighted point cloud on one phase space; weights sum to 1.
struct EmpiricalMeasure {
  SpaceKind space = SpaceKind::Interval;
  std::vector<PhasePoint> points;
  std::vector<double> weights;
  std::uint64_t seed = 0;
  std::string source;

  std::size_t size() const noexcept { return points.size(); }
};

/// Normalised measure from points and optional nonnegative weights
/// (uniform when omitted).
EmpiricalMeasure empirical_measure(std::vector<PhasePoint> points,
                                   std::optional<std::vector<double>> weights = std::nullopt);

/// Weighted mean of fn over the measure, summed in index order.
template <typename Fn>
double integrate(const EmpiricalMeasure& mu, Fn&& fn) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu.points.size(); ++i) total += mu.weights[i] * fn(mu.points[i]);
  return total;
}

/// Total weight on points equal to x.
double mass_at(const EmpiricalMeasure& mu, const PhasePoint& x);

/// lambda * mu + (1 - lambda) * nu by concatenating supports.
EmpiricalMeasure mixture(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double lambda);

}  // namespace tracial
