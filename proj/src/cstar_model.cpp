#include "tracial/cstar_model.hpp"

#include <algorithm>
#include <boost/integer/common_factor.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tracial/phase_space.hpp"

namespace tracial {

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

Real to_real(const BigInt& v) { return Real(v); }

Real budget_growth(int m) { return boost::multiprecision::exp(Real(1) / (Real(m) * m)); }

Real stage_bound(int m, double K) {
  const Real inv = Real(1) / (Real(m) * m);
  const Real lip = (budget_growth(m) - 1) / Real(K);
  return std::min(inv, lip);
}

double ratio_double(const BigInt& a, const BigInt& b) { return static_cast<double>(to_real(a) / to_real(b)); }

}  // namespace

double waypoint(int m) {
  if (m < 1) throw std::invalid_argument("stage index starts at 1");
  // van der Corput base 2 at index m + 1
  unsigned long long i = static_cast<unsigned long long>(m) + 1;
  double x = 0.0, scale = 0.5;
  for (; i > 0; i >>= 1, scale *= 0.5)
    if (i & 1U) x += scale;
  return x;
}

std::vector<StageParams> generate_parameters(int stages, const BigInt& p1, const BigInt& q1, const std::vector<double>& K) {
  if (stages < 0) throw std::invalid_argument("stage count must be nonnegative");
  if (p1 < 1 || q1 < 1 || gcd(p1, q1) != 1) throw std::invalid_argument("(p1, q1) must be a coprime pair of positive integers");
  auto k_at = [&](int m) {
    const double k = static_cast<std::size_t>(m - 1) < K.size() ? K[static_cast<std::size_t>(m - 1)] : 1.0;
    if (!(k >= 1.0)) throw std::invalid_argument("Lipschitz constants K_m must be >= 1");
    return k;
  };
  std::vector<StageParams> out;
  StageParams first;
  first.m = 1;
  first.p = p1;
  first.q = q1;
  first.K = k_at(1);
  first.z = waypoint(1);
  out.push_back(first);
  for (int m = 1; m <= stages; ++m) {
    auto& cur = out.back();
    const BigInt pq = cur.p * cur.q;
    const Real m2 = Real(m) * m;
    const Real factor = std::max(m2, Real(cur.K) / (budget_growth(m) - 1));
    const Real threshold = to_real(pq) * factor;
    BigInt p = static_cast<BigInt>(boost::multiprecision::floor(threshold)) + 1;
    auto step_of = [&](const BigInt& cand) { return pq / gcd(pq, cand); };
    while (gcd(step_of(p), p) != 1) ++p;
    const BigInt r = step_of(p);
    BigInt k = (p + r - 1) / r;
    while (gcd(k * r, p) != 1) ++k;
    const BigInt q = k * r;

    cur.has_next = true;
    cur.p_next = p;
    cur.q_next = q;
    cur.N = p * q / pq;
    cur.bound = static_cast<double>(stage_bound(m, cur.K));
    cur.ratio = ratio_double(q, cur.N);
    cur.identity_fraction = ratio_double(cur.N - q, cur.N);

    StageParams next;
    next.m = m + 1;
    next.p = p;
    next.q = q;
    next.K = k_at(m + 1);
    next.z = waypoint(m + 1);
    out.push_back(next);
  }
  return out;
}

std::vector<std::string> validate_stage(const StageParams& s) {
  std::vector<std::string> bad;
  if (gcd(s.p, s.q) != 1) bad.push_back("gcd(p, q) != 1");
  if (!(s.K >= 1.0)) bad.push_back("K < 1");
  if (!s.has_next) return bad;
  if (gcd(s.p_next, s.q_next) != 1) bad.push_back("gcd(p_next, q_next) != 1");
  if (s.N < 1 || s.N * s.p * s.q != s.p_next * s.q_next) bad.push_back("N != p_next q_next / (p q)");
  if (s.N - s.q_next < 0) bad.push_back("identity band negative");
  if (s.q_next - s.p_next < 0) bad.push_back("retraction band negative");
  if (!(to_real(s.q_next) / to_real(s.N) < stage_bound(s.m, s.K))) bad.push_back("q_next / N not below the bound");
  const Real id = to_real(s.N - s.q_next) / to_real(s.N);
  if (!(id > 1 - Real(1) / (Real(s.m) * s.m))) bad.push_back("identity fraction not above 1 - 1/m^2");
  return bad;
}

std::string identity_fraction_exact(const StageParams& s) {
  if (!s.has_next) throw std::invalid_argument("final stage has no connecting map");
  const BigInt num = s.N - s.q_next;
  const BigInt g = gcd(num, s.N);
  return (num / g).str() + "/" + (s.N / g).str();
}

// ---- xi schedule ----------------------------------------------------------------

std::uint64_t XiSchedule::z_turns() const { return turns_from(z); }

std::uint64_t XiSchedule::retract(std::uint64_t turns) const {
  // arc parameter is the geodesic distance from x0 = 0; the arc runs through z
  auto from_x0 = [](std::uint64_t t) { return std::min(t, std::uint64_t(0) - t); };
  const std::uint64_t zt = z_turns();
  const std::uint64_t s = std::max(from_x0(turns), from_x0(zt));
  const bool lower = zt <= (std::uint64_t(1) << 63);
  return lower ? s : std::uint64_t(0) - s;
}

double XiSchedule::identity_weight() const { return ratio_double(identity, N); }
double XiSchedule::constant_weight() const { return ratio_double(constant, N); }
double XiSchedule::retraction_weight() const { return ratio_double(retraction, N); }

XiSchedule xi_schedule(const StageParams& s) {
  if (!s.has_next) throw std::invalid_argument("final stage has no connecting map");
  const auto bad = validate_stage(s);
  if (s.N - s.q_next < 0 || s.q_next - s.p_next < 0)
    throw std::invalid_argument("invalid stage: " + bad.front());
  XiSchedule x;
  x.m = s.m;
  x.N = s.N;
  x.identity = s.N - s.q_next;
  x.constant = s.p_next;
  x.retraction = s.q_next - s.p_next;
  x.z = s.z;
  x.K = s.K;
  return x;
}

EmpiricalMeasure connecting_trace_pushforward(const XiSchedule& x, const EmpiricalMeasure& mu) {
  if (mu.space != SpaceKind::Circle) throw std::invalid_argument("the model space is the circle");
  const double wi = x.identity_weight(), wc = x.constant_weight(), wr = x.retraction_weight();
  EmpiricalMeasure out;
  out.space = SpaceKind::Circle;
  out.source = "connecting_trace_pushforward";
  out.seed = mu.seed;
  const CirclePoint zp{x.z_turns(), {}};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& c = std::get<CirclePoint>(mu.points[i]);
    const double w = mu.weights[i];
    if (wi > 0.0) {
      out.points.push_back(c);
      out.weights.push_back(w * wi);
    }
    if (wc > 0.0) {
      out.points.push_back(zp);
      out.weights.push_back(w * wc);
    }
    if (wr > 0.0) {
      out.points.push_back(CirclePoint{x.retract(c.turns), c.tail});
      out.weights.push_back(w * wr);
    }
  }
  return out;
}

LipschitzScaling lipschitz_scaling_check(double L, const XiSchedule& x, double K) {
  if (!(L > 0.0)) throw std::invalid_argument("Lipschitz constant must be positive");
  LipschitzScaling r;
  const Real factor = (to_real(x.identity) + Real(K) * to_real(x.retraction)) / to_real(x.N);
  const Real budget = budget_growth(x.m);
  r.factor = static_cast<double>(factor * L);
  r.budget = static_cast<double>(budget * L);
  r.pass = factor <= budget;
  return r;
}

// ---- mesh functions ---------------------------------------------------------------

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

std::size_t mesh_index(const MeshFunction& f, double x) {
  for (std::size_t i = 0; i < f.mesh.size(); ++i)
    if (f.mesh[i] == x) return i;
  throw std::invalid_argument("mesh does not contain the base point");
}

double commutator_norm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& g) { return (a * g - g * a).norm(); }

}  // namespace

BoundaryVerdict boundary_check(const MeshFunction& f, int p, int q, double tol) {
  const Eigen::Index n = static_cast<Eigen::Index>(p) * q;
  for (const auto& v : f.values)
    if (v.rows() != n || v.cols() != n) throw std::invalid_argument("mesh matrices are not (pq) x (pq)");
  BoundaryVerdict r;
  const auto& a0 = f.values.at(mesh_index(f, 0.0));
  const auto& a1 = f.values.at(mesh_index(f, 0.5));

  Eigen::MatrixXcd head = Eigen::MatrixXcd::Zero(p, p);  // partial trace over the q factor
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      for (int k = 0; k < q; ++k) head(i, j) += a0(i * q + k, j * q + k);
  r.residual_x0 = (a0 - kron(head / static_cast<double>(q), Eigen::MatrixXcd::Identity(q, q))).norm();
  Eigen::MatrixXcd tail = Eigen::MatrixXcd::Zero(q, q);  // partial trace over the p factor
  for (int k = 0; k < q; ++k)
    for (int l = 0; l < q; ++l)
      for (int i = 0; i < p; ++i) tail(k, l) += a1(i * q + k, i * q + l);
  r.residual_x1 = (a1 - kron(Eigen::MatrixXcd::Identity(p, p), tail / static_cast<double>(p))).norm();

  for (int k = 0; k < q; ++k)
    for (int l = 0; l < q; ++l) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(q, q);
      e(k, l) = 1.0;
      r.commutator_x0 = std::max(r.commutator_x0, commutator_norm(a0, kron(Eigen::MatrixXcd::Identity(p, p), e)));
    }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(p, p);
      e(i, j) = 1.0;
      r.commutator_x1 = std::max(r.commutator_x1, commutator_norm(a1, kron(e, Eigen::MatrixXcd::Identity(q, q))));
    }
  if (f.self_adjoint)
    for (const auto& v : f.values) r.hermitian_defect = std::max(r.hermitian_defect, (v - v.adjoint()).norm());
  r.pass = r.residual_x0 <= tol && r.residual_x1 <= tol && r.commutator_x0 <= tol && r.commutator_x1 <= tol &&
           r.hermitian_defect <= tol;
  return r;
}

BoundaryFeasibility boundary_feasibility(const StageParams& s) {
  if (!s.has_next) throw std::invalid_argument("final stage has no connecting map");
  BoundaryFeasibility b;
  // at x0: identity blocks see f(x0) = a (x) 1_q, the other bands see f(z)
  b.x0_boundary_multiplicity = s.q * (s.N - s.q_next);
  b.x0_waypoint_multiplicity = s.q_next;
  // at x1: identity and retraction blocks see f(x1) = 1_p (x) c, the constant band f(z)
  b.x1_boundary_multiplicity = s.p * (s.N - s.p_next);
  b.x1_waypoint_multiplicity = s.p_next;
  b.x0_feasible = b.x0_boundary_multiplicity % s.q_next == 0 && b.x0_waypoint_multiplicity % s.q_next == 0;
  b.x1_feasible = b.x1_boundary_multiplicity % s.p_next == 0 && b.x1_waypoint_multiplicity % s.p_next == 0;
  return b;
}

namespace {

Eigen::MatrixXcd interpolate(const MeshFunction& f, double x) {
  const std::size_t n = f.mesh.size();
  std::size_t best = 0;
  double best_gap = 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = x - f.mesh[i] - std::floor(x - f.mesh[i]);  // forward distance from mesh[i] to x
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  if (best_gap == 0.0 || n == 1) return f.values[best];
  std::size_t next = 0;
  double next_gap = 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = f.mesh[i] - x - std::floor(f.mesh[i] - x);
    if (gap > 0.0 && gap < next_gap) {
      next_gap = gap;
      next = i;
    }
  }
  const double lambda = best_gap / (best_gap + next_gap);
  return (1.0 - lambda) * f.values[best] + lambda * f.values[next];
}

}  // namespace

MeshFunction connecting_map_mesh(const XiSchedule& x, const MeshFunction& f) {
  if (x.N > 64) throw std::invalid_argument("mesh-level connecting maps are limited to 64 blocks");
  if (f.mesh.empty()) throw std::invalid_argument("empty mesh");
  const int blocks = static_cast<int>(x.N);
  const int nid = static_cast<int>(x.identity), nconst = static_cast<int>(x.constant);
  const Eigen::Index b = static_cast<Eigen::Index>(f.p) * f.q;
  MeshFunction out;
  out.mesh = f.mesh;
  out.self_adjoint = f.self_adjoint;
  out.lipschitz = f.lipschitz * std::max(1.0, x.K);
  const Eigen::MatrixXcd fz = interpolate(f, x.z);
  for (double t : f.mesh) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(blocks * b, blocks * b);
    const Eigen::MatrixXcd fx = interpolate(f, t);
    const Eigen::MatrixXcd fe = interpolate(f, turns_to_double(x.retract(turns_from(t))));
    for (int i = 0; i < blocks; ++i) m.block(i * b, i * b, b, b) = i < nid ? fx : (i < nid + nconst ? fz : fe);
    out.values.push_back(std::move(m));
  }
  return out;
}

void write_stage_csv(std::ostream& out, const std::vector<StageParams>& params) {
  out << "m,p,q,N,bound,ratio,identity_fraction\n";
  out.precision(17);
  for (const auto& s : params) {
    out << s.m << ',' << s.p << ',' << s.q << ',';
    if (s.has_next) out << s.N << ',' << s.bound << ',' << s.ratio << ',' << s.identity_fraction << '\n';
    else out << ",,,\n";
  }
}

void write_mesh_csv(std::ostream& out, const MeshFunction& f) {
  out << "point,x,row,col,re,im\n";
  out.precision(17);
  for (std::size_t i = 0; i < f.mesh.size(); ++i)
    for (Eigen::Index r = 0; r < f.values[i].rows(); ++r)
      for (Eigen::Index c = 0; c < f.values[i].cols(); ++c)
        out << i << ',' << f.mesh[i] << ',' << r << ',' << c << ',' << f.values[i](r, c).real() << ','
            << f.values[i](r, c).imag() << '\n';
}

}  // namespace tracial
