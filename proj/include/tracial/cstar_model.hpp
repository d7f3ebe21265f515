#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tracial/empirical_measure.hpp"
#include "tracial/smith.hpp"

namespace tracial {

/// Stage m of the dimension-drop model on the circle (turns, geodesic
/// metric, x0 = 0, x1 = 1/2). Entries with has_next carry the data of the
/// connecting map to stage m + 1.
struct StageParams {
  int m = 1;
  BigInt p, q;
  double K = 1.0;
  double x0 = 0.0, x1 = 0.5;
  double z = 0.25;

  bool has_next = false;
  BigInt p_next, q_next, N;
  double bound = 0.0;              // min(1/m^2, (e^{1/m^2} - 1)/K)
  double ratio = 0.0;              // q_next / N
  double identity_fraction = 0.0;  // 1 - q_next / N
};

/// Dyadic waypoints 1/4, 3/4, 1/8, 5/8, ... (van der Corput from index 2).
double waypoint(int m);

/// Stages 1 .. stages + 1 from (p1, q1). p_{m+1} is the least p above
/// p_m q_m max(m^2, K_m / (e^{1/m^2} - 1)) admitting a completion, and
/// q_{m+1} the least multiple of p_m q_m / gcd(p_m q_m, p_{m+1}) that is
/// >= p_{m+1} and coprime to it. Missing K_m default to 1.
std::vector<StageParams> generate_parameters(int stages, const BigInt& p1, const BigInt& q1,
                                             const std::vector<double>& K = {});

/// Violated invariants, empty when the stage is valid.
std::vector<std::string> validate_stage(const StageParams& s);

/// "a/b" in lowest terms for 1 - q_next / N.
std::string identity_fraction_exact(const StageParams& s);

struct XiSchedule {
  int m = 1;
  BigInt N, identity, constant, retraction;  // band sizes
  double z = 0.25;
  double K = 1.0;

  std::uint64_t z_turns() const;
  /// e_m: fold onto the half-circle from x0 to x1 through z, then clamp
  /// along it at z. 1-Lipschitz, e(x0) = z, e(x1) = x1.
  std::uint64_t retract(std::uint64_t turns) const;
  double identity_weight() const;
  double constant_weight() const;
  double retraction_weight() const;
};

XiSchedule xi_schedule(const StageParams& s);

/// (1/N) sum_i (xi_i)_* mu on circle measures: each atom splits into its
/// identity, constant and retraction images.
EmpiricalMeasure connecting_trace_pushforward(const XiSchedule& schedule, const EmpiricalMeasure& mu);

struct LipschitzScaling {
  double factor = 0.0;   // (N - q + K (q - p)) / N * L
  double budget = 0.0;   // e^{1/m^2} L
  bool pass = false;
};

LipschitzScaling lipschitz_scaling_check(double L, const XiSchedule& schedule, double K);

/// Matrix-valued function on a circle mesh; values are (pq) x (pq).
struct MeshFunction {
  std::vector<double> mesh;             // turns in [0,1)
  std::vector<Eigen::MatrixXcd> values;
  int p = 1, q = 1;
  double lipschitz = 0.0;
  bool self_adjoint = false;
};

/// kron(a, b), index (i * b.rows() + k, j * b.cols() + l).
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct BoundaryVerdict {
  double residual_x0 = 0.0;    // distance of f(x0) from M_p (x) 1_q
  double commutator_x0 = 0.0;  // max ||[f(x0), 1_p (x) e_ij]||
  double residual_x1 = 0.0;    // distance of f(x1) from 1_p (x) M_q
  double commutator_x1 = 0.0;
  double hermitian_defect = 0.0;
  bool pass = false;
};

BoundaryVerdict boundary_check(const MeshFunction& f, int p, int q, double tol = 1e-10);

/// Multiplicities of the irreducible blocks of diag(f o xi_i) at x0 and x1
/// for generic f, and whether a unitary can move them into M_{p'} (x) 1_{q'}
/// (resp. 1_{p'} (x) M_{q'}): each multiplicity must be divisible by q'
/// (resp. p').
struct BoundaryFeasibility {
  BigInt x0_boundary_multiplicity, x0_waypoint_multiplicity;
  BigInt x1_boundary_multiplicity, x1_waypoint_multiplicity;
  bool x0_feasible = false, x1_feasible = false;
};

BoundaryFeasibility boundary_feasibility(const StageParams& s);

/// diag(f o xi_1, ..., f o xi_N) on the mesh of f, without the conjugating
/// unitary; f is interpolated linearly between mesh points.
MeshFunction connecting_map_mesh(const XiSchedule& schedule, const MeshFunction& f);

/// m, p, q, N, bound, ratio, identity_fraction
void write_stage_csv(std::ostream& out, const std::vector<StageParams>& params);
/// point, x, row, col, re, im
void write_mesh_csv(std::ostream& out, const MeshFunction& f);

}  // namespace tracial
