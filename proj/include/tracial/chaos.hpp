#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tracial/dynamics.hpp"
#include "tracial/phase_space.hpp"

namespace tracial {

/// h^n(x) lies in `to` for x in `from`.
struct OrbitWitness {
  Cell from, to;
  PhasePoint x;
  std::size_t n = 0;
};

struct TransitivityReport {
  double eps = 0.0;
  int depth = 0;
  std::size_t horizon = 0;
  bool pass = false;
  bool symbolic = false;        // witnesses built from cell addresses
  std::size_t cells = 0, empty_cells = 0;
  std::vector<OrbitWitness> witnesses;
  std::vector<std::pair<Cell, Cell>> missing;
  std::uint64_t seed = 0;
};

struct PeriodicWitness {
  Cell cell;
  PhasePoint x;
  int period = 0;
  /// k / (2^p - 1) for doubling-map witnesses
  std::optional<std::pair<std::uint64_t, std::uint64_t>> rational;
};

struct PeriodicDensityReport {
  double eps = 0.0;
  int depth = 0;
  int max_period = 0;
  double tol = 1e-9;
  bool pass = false;
  std::vector<PeriodicWitness> witnesses;
  std::vector<Cell> missing;
};

struct SeparationWitness {
  PhasePoint x, y;
  std::size_t n = 0;            // time of maximal separation
  double initial = 0.0;
  double separation = 0.0;
};

struct SensitivityReport {
  double probe_eps = 0.0;
  std::size_t trials = 0, horizon = 0;
  double delta_hat = 0.0;
  bool sensitive = false;       // delta_hat > 10 probe_eps
  std::vector<SeparationWitness> witnesses;  // one per base point
  std::uint64_t seed = 0;
};

/// A periodic point whose orbit visits u at time visit_u and v at time visit_v.
struct TouheyWitness {
  Cell u, v;
  PhasePoint x;
  int period = 0;
  std::size_t visit_u = 0, visit_v = 0;
};

inline constexpr int kCellFills = 32;

/// Every ordered pair of eps-grid cells (U, V) needs x in U and 1 <= n <= horizon
/// with h^n x in V. Seeds are cell centres plus kCellFills random points per
/// cell; the doubling map and full shifts use x = address(U) address(V), n = depth.
TransitivityReport transitivity_check(const SystemSpec& sys, double eps, std::size_t horizon, std::uint64_t seed = 1);

PeriodicDensityReport periodic_density_check(const SystemSpec& sys, double eps, int max_period, double tol = 1e-9);

/// Base points from the reference measure; each probe y shares the tail of x
/// and starts probe_eps / 2 away (or agrees on a cylinder of diameter below
/// probe_eps). delta_hat = min over base points of max_{n <= horizon} d(h^n x, h^n y).
SensitivityReport sensitivity_estimate(const SystemSpec& sys, std::size_t trials, std::size_t horizon,
                                       double probe_eps, std::uint64_t seed = 1);

/// Doubling map and full shifts: (u v) repeated when 2 depth <= max_period.
/// Otherwise periodic points of period 1..max_period are enumerated and replayed.
std::optional<TouheyWitness> touhey_witness(const SystemSpec& sys, const Cell& u, const Cell& v, int max_period);

struct ChaosOptions {
  double transitivity_eps = 0.0625;
  std::size_t horizon = 64;
  double periodic_eps = 0.015625;
  int max_period = 10;
  std::size_t sensitivity_trials = 1000;
  std::size_t sensitivity_horizon = 40;
  double probe_eps = 1e-6;
  std::uint64_t seed = 1;
};

struct ChaosCertificate {
  TransitivityReport transitivity;
  PeriodicDensityReport periodic;
  SensitivityReport sensitivity;
  bool devaney = false;         // all three pass at this resolution
};

ChaosCertificate chaos_certificate(const SystemSpec& sys, const ChaosOptions& options = {});

// Exact replays through the dynamics.
bool replay(const SystemSpec& sys, const OrbitWitness& w);
bool replay(const SystemSpec& sys, const PeriodicWitness& w, double tol = 1e-9);
bool replay(const SystemSpec& sys, const SeparationWitness& w);
bool replay(const SystemSpec& sys, const TouheyWitness& w);

}  // namespace tracial
