#include "tracial/empirical_measure.hpp"

#include <numeric>
#include <stdexcept>

namespace tracial {

EmpiricalMeasure empirical_measure(std::vector<PhasePoint> points,
                                   std::optional<std::vector<double>> weights) {
  if (points.empty()) throw std::invalid_argument("empirical measure needs at least one point");
  EmpiricalMeasure mu;
  mu.space = space_of(points.front());
  for (const auto& p : points)
    if (space_of(p) != mu.space) throw std::invalid_argument("points lie on different phase spaces");
  std::vector<double> w = weights ? std::move(*weights) : std::vector<double>(points.size(), 1.0);
  if (w.size() != points.size()) throw std::invalid_argument("weight count does not match point count");
  double total = 0.0;
  for (double wi : w) {
    if (!(wi >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    total += wi;
  }
  if (!(total > 0.0)) throw std::invalid_argument("weights must not all be zero");
  for (double& wi : w) wi /= total;
  mu.points = std::move(points);
  mu.weights = std::move(w);
  mu.source = "empirical_measure";
  return mu;
}

double mass_at(const EmpiricalMeasure& mu, const PhasePoint& x) {
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu.points[i] == x) m += mu.weights[i];
  return m;
}

EmpiricalMeasure mixture(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double lambda) {
  if (mu.space != nu.space) throw std::invalid_argument("mixture of measures on different spaces");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("mixture weight outside [0,1]");
  EmpiricalMeasure out;
  out.space = mu.space;
  out.source = "mixture";
  out.points = mu.points;
  out.points.insert(out.points.end(), nu.points.begin(), nu.points.end());
  out.weights.reserve(out.points.size());
  for (double w : mu.weights) out.weights.push_back(lambda * w);
  for (double w : nu.weights) out.weights.push_back((1.0 - lambda) * w);
  return out;
}

}  // namespace tracial
