#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>

#include "tracial/dynamics.hpp"
#include "tracial/empirical_measure.hpp"

namespace tracial {

using PointMap = std::function<PhasePoint(const PhasePoint&)>;

PointMap as_map(const SystemSpec& sys);
/// h o g
PointMap compose(PointMap h, PointMap g);

/// Finite-resolution proxies for the Oxtoby-Ulam conditions.
struct OUReport {
  double eps = 0.0;
  double atom_mass = 0.0;         // max weight in any eps-ball
  double coverage = 0.0;          // fraction of eps-grid cells with positive mass
  std::uint64_t cells_total = 0;
  std::uint64_t cells_charged = 0;
  double boundary_mass = 0.0;     // weight within eps of the boundary (interval only)
};

/// `sys` is only consulted on sequence spaces, to count admissible cylinders.
OUReport ou_diagnostics(const EmpiricalMeasure& mu, double eps, const SystemSpec* sys = nullptr);

EmpiricalMeasure pushforward_measure(const PointMap& h, const EmpiricalMeasure& mu);
EmpiricalMeasure pushforward_measure(const SystemSpec& h, const EmpiricalMeasure& mu);

inline constexpr std::size_t kTransportCap = 4096;

/// Wasserstein-1 distance: sorted-CDF formula on the interval, the same with
/// the optimal offset on the circle, exact min-cost flow otherwise.
double wasserstein1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap = kTransportCap);

/// Wasserstein-1 by exact min-cost flow on any space.
double wasserstein1_flow(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap = kTransportCap);

/// CSV with one coordinate column per dimension (`t`; `angle`; `s,t`; `word`)
/// and a `weight` column, preceded by optional `# key=value` metadata lines.
void write_measure_csv(std::ostream& out, const EmpiricalMeasure& mu,
                       const std::map<std::string, std::string>& metadata = {});
EmpiricalMeasure read_measure_csv(std::istream& in, std::map<std::string, std::string>* metadata = nullptr);

}  // namespace tracial
