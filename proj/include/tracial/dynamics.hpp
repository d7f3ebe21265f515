#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracial/empirical_measure.hpp"
#include "tracial/phase_space.hpp"

namespace tracial {

enum class SystemKind { Identity, Doubling, Rotation, Intermittent, Toral, Shift, DyadicPermutation };

using IntMatrix2 = Eigen::Matrix<std::int64_t, 2, 2>;

/// A named measure-preserving system. Build with the factory functions
/// below; they enforce the parameter invariants.
struct SystemSpec {
  std::string name;
  SystemKind kind = SystemKind::Identity;
  SpaceKind space = SpaceKind::Interval;

  double alpha = 0.0;              // intermittent exponent
  double theta = 0.0;              // rotation angle in turns
  std::uint64_t theta_turns = 0;   // same, fixed point
  IntMatrix2 toral = IntMatrix2::Identity();
  Eigen::MatrixXi transition;      // 0-1 matrix of allowed transitions
  Eigen::MatrixXd markov;          // row-stochastic weights on allowed transitions
  Eigen::MatrixXd markov_cdf;      // row-wise cumulative sums of markov
  std::optional<Eigen::VectorXd> initial;  // explicit stationary vector, if supplied
  int window = 64;                 // symbol window length L
  int rank = 0;                    // dyadic permutation rank k

  int alphabet() const { return static_cast<int>(transition.rows()); }
};

SystemSpec identity_map(SpaceKind space = SpaceKind::Interval);
SystemSpec doubling_map();
SystemSpec rotation(double theta);
SystemSpec golden_rotation();
SystemSpec intermittent_map(double alpha);
SystemSpec toral_automorphism(const IntMatrix2& matrix = (IntMatrix2() << 2, 1, 1, 1).finished());
SystemSpec subshift(const Eigen::MatrixXi& transition, const Eigen::MatrixXd& markov,
                    std::optional<Eigen::VectorXd> initial = std::nullopt, int window = 64);
SystemSpec full_shift(int symbols = 2, int window = 64);
SystemSpec dyadic_permutation(int rank);

/// Names accepted by the [system] block of a config.
std::vector<std::string> system_names();

/// h(x). Checks that x lies on the system's space and, for subshifts, that
/// the window is admissible.
PhasePoint step(const SystemSpec& sys, const PhasePoint& x);

/// In-place h(x) without validation; used in hot loops over validated points.
void advance(const SystemSpec& sys, PhasePoint& x);

/// Throws std::domain_error unless x is a legal point of sys.
void validate_point(const SystemSpec& sys, const PhasePoint& x);

struct Trajectory {
  PhasePoint initial;
  std::vector<PhasePoint> points;  // n + 1 entries, points[0] == initial
  std::uint64_t seed = 0;
};

Trajectory orbit(const SystemSpec& sys, const PhasePoint& x0, std::size_t n);

/// h^n(x).
PhasePoint iterate(const SystemSpec& sys, PhasePoint x, std::size_t n);

/// One draw from the reference invariant measure using stream `seed`.
PhasePoint sample_point(const SystemSpec& sys, std::uint64_t seed, std::size_t burn_in = 1000);

/// n samples of the reference invariant measure: exact iid draws where it is
/// known in closed form; for the intermittent map each sample is an
/// independent uniform start pushed forward burn_in times.
EmpiricalMeasure sample_invariant(const SystemSpec& sys, std::size_t n, std::size_t burn_in,
                                  std::uint64_t seed);

/// Stationary vector of a subshift (explicit initial vector, or the Perron
/// vector of a primitive matrix). Throws when neither is available.
Eigen::VectorXd stationary_vector(const SystemSpec& sys);

/// A point of the cylinder `word` extended by the system's Markov chain.
PhasePoint cylinder_point(const SystemSpec& sys, std::span<const int> word, std::uint64_t seed);

inline constexpr int kMaxPeriod = 20;

/// Points with d(h^period x, x) <= tol. Doubling and toral maps are solved
/// exactly; the intermittent map by bisection on each of the 2^period laps;
/// subshifts enumerate admissible loops. When every point is periodic
/// (identity, rational rotations, dyadic permutations with 2^rank | period)
/// the 2^-10 grid (32 x 32 on the torus) is returned.
std::vector<PhasePoint> periodic_points(const SystemSpec& sys, int period, double tol);

/// Least M <= (n-1)^2 + 1 with A^M entrywise positive, or nullopt.
std::optional<int> primitivity_check(const Eigen::MatrixXi& a);

}  // namespace tracial
