#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "tracial/cstar_model.hpp"
#include "tracial/random.hpp"

using namespace tracial;

namespace {

std::vector<StageParams> table() { return generate_parameters(2, 2, 3); }

double mass_at(const EmpiricalMeasure& mu, std::uint64_t turns) {
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (std::get<CirclePoint>(mu.points[i]).turns == turns) m += mu.weights[i];
  return m;
}

double total(const EmpiricalMeasure& mu) {
  double s = 0.0;
  for (double w : mu.weights) s += w;
  return s;
}

MeshFunction constant_mesh(const Eigen::MatrixXcd& a, int p, int q) {
  MeshFunction f;
  f.mesh = {0.0, 0.25, 0.5, 0.75};
  f.values.assign(4, a);
  f.p = p;
  f.q = q;
  f.self_adjoint = true;
  return f;
}

}  // namespace

TEST_CASE("waypoints") {
  CHECK(waypoint(1) == 0.25);
  CHECK(waypoint(2) == 0.75);
  CHECK(waypoint(3) == 0.125);
  CHECK(waypoint(4) == 0.625);
  CHECK(waypoint(5) == 0.375);
  CHECK_THROWS(waypoint(0));
}

TEST_CASE("parameter table") {
  const auto t = table();
  REQUIRE(t.size() == 3);
  CHECK(t[0].p == 2);
  CHECK(t[0].q == 3);
  CHECK(t[0].p_next == 7);
  CHECK(t[0].q_next == 12);
  CHECK(t[0].N == 14);
  CHECK(t[1].p == 7);
  CHECK(t[1].p_next == 337);
  CHECK(t[1].q_next == 420);
  CHECK(t[1].N == 1685);
  CHECK_FALSE(t[2].has_next);
  CHECK(identity_fraction_exact(t[1]) == "253/337");
  CHECK(t[1].identity_fraction == doctest::Approx(1265.0 / 1685.0).epsilon(1e-15));
  CHECK(t[0].ratio == doctest::Approx(12.0 / 14.0).epsilon(1e-15));

  const auto none = generate_parameters(0, 2, 3);
  REQUIRE(none.size() == 1);
  CHECK_FALSE(none[0].has_next);
  CHECK_THROWS(generate_parameters(1, 2, 4));
  CHECK_THROWS(generate_parameters(1, 2, 3, {0.5}));
}

TEST_CASE("parameter invariants") {
  for (double K : {1.0, 2.0, 10.0}) {
    const auto t = generate_parameters(4, 2, 3, {K, K, K, K});
    for (const auto& s : t) {
      CHECK(validate_stage(s).empty());
      if (!s.has_next) continue;
      CHECK(s.p_next > s.p * s.q * s.m * s.m);
      CHECK(s.ratio <= s.bound);
      CHECK(s.identity_fraction > 1.0 - 1.0 / (s.m * s.m) - 1e-15);
    }
  }
  auto broken = table()[0];
  broken.N += 1;
  CHECK_FALSE(validate_stage(broken).empty());
}

TEST_CASE("xi schedule bands") {
  const auto x = xi_schedule(table()[0]);
  CHECK(x.identity == 2);
  CHECK(x.constant == 7);
  CHECK(x.retraction == 5);
  CHECK(x.identity_weight() + x.constant_weight() + x.retraction_weight() == doctest::Approx(1.0));

  StageParams flat = table()[0];
  flat.q_next = flat.p_next;
  flat.N = flat.p_next;
  const auto d = xi_schedule(flat);
  CHECK(d.retraction == 0);
  CHECK(d.identity == 0);
  const auto pushed = connecting_trace_pushforward(d, empirical_measure({circle_point(0.6)}));
  CHECK(pushed.size() == 1);
  CHECK(mass_at(pushed, d.z_turns()) == 1.0);
  CHECK_THROWS(xi_schedule(table()[2]));
}

TEST_CASE("retraction endpoints and Lipschitz") {
  for (const auto& s : generate_parameters(5, 2, 3)) {
    if (!s.has_next) continue;
    const auto x = xi_schedule(s);
    CHECK(x.retract(0) == x.z_turns());
    CHECK(x.retract(turns_from(0.5)) == turns_from(0.5));
    CHECK(x.retract(x.z_turns()) == x.z_turns());
    SplitMix64 rng(17 + s.m);
    auto dist = [](std::uint64_t a, std::uint64_t b) { return std::min(a - b, b - a); };
    for (int i = 0; i < 2000; ++i) {
      const std::uint64_t a = rng(), b = rng();
      CHECK(dist(x.retract(a), x.retract(b)) <= dist(a, b));
    }
  }
}

TEST_CASE("connecting pushforward examples") {
  const auto x = xi_schedule(table()[0]);
  const std::uint64_t half = turns_from(0.5);

  // a point on the arc beyond z is fixed by the retraction
  const auto on_arc = connecting_trace_pushforward(x, empirical_measure({circle_point(0.4)}));
  CHECK(mass_at(on_arc, turns_from(0.4)) == doctest::Approx(7.0 / 14.0));
  CHECK(mass_at(on_arc, x.z_turns()) == doctest::Approx(7.0 / 14.0));

  const auto at_x1 = connecting_trace_pushforward(x, empirical_measure({circle_point(0.5)}));
  CHECK(mass_at(at_x1, half) == doctest::Approx(7.0 / 14.0));

  std::vector<PhasePoint> grid;
  for (int k = 0; k < 64; ++k) grid.push_back(circle_point(k / 64.0));
  const auto uniform = connecting_trace_pushforward(x, empirical_measure(grid));
  CHECK(mass_at(uniform, x.z_turns()) >= 7.0 / 14.0);
  CHECK(total(uniform) == doctest::Approx(1.0).epsilon(1e-14));

  StageParams only_id = table()[0];
  only_id.q_next = 0;
  only_id.p_next = 0;
  const auto ident = xi_schedule(only_id);
  const auto mu = empirical_measure(grid);
  const auto same = connecting_trace_pushforward(ident, mu);
  CHECK(same.points == mu.points);
  CHECK(same.weights == mu.weights);
}

TEST_CASE("pushforward preserves mass and is affine") {
  const auto x = xi_schedule(table()[1]);
  SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PhasePoint> a, b;
    for (int i = 0; i < 20; ++i) a.push_back(circle_point(uniform01(rng)));
    for (int i = 0; i < 30; ++i) b.push_back(circle_point(uniform01(rng)));
    const auto ma = empirical_measure(a), mb = empirical_measure(b);
    const double lambda = uniform01(rng);
    CHECK(total(connecting_trace_pushforward(x, ma)) == doctest::Approx(1.0).epsilon(1e-13));

    auto mix = ma;
    for (auto& w : mix.weights) w *= lambda;
    for (std::size_t i = 0; i < mb.size(); ++i) {
      mix.points.push_back(mb.points[i]);
      mix.weights.push_back((1.0 - lambda) * mb.weights[i]);
    }
    const auto lhs = connecting_trace_pushforward(x, mix);
    const auto pa = connecting_trace_pushforward(x, ma), pb = connecting_trace_pushforward(x, mb);
    auto eval = [](const EmpiricalMeasure& m) {
      double s = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i)
        s += m.weights[i] * std::cos(2 * M_PI * turns_to_double(std::get<CirclePoint>(m.points[i]).turns));
      return s;
    };
    CHECK(std::abs(eval(lhs) - (lambda * eval(pa) + (1.0 - lambda) * eval(pb))) < 1e-12);
  }
}

TEST_CASE("composed pushforward of the base point") {
  const auto t = table();
  auto mu = empirical_measure({circle_point(0.0)});
  double expected = 1.0;
  for (int m = 0; m < 2; ++m) {
    const auto x = xi_schedule(t[m]);
    mu = connecting_trace_pushforward(x, mu);
    expected *= x.identity_weight();
  }
  CHECK(expected == doctest::Approx(2.0 / 14.0 * 1265.0 / 1685.0));
  CHECK(mass_at(mu, 0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(total(mu) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Lipschitz scaling") {
  const auto x = xi_schedule(table()[0]);
  const auto one = lipschitz_scaling_check(1.0, x, 1.0);
  CHECK(one.pass);
  CHECK(one.factor == doctest::Approx(0.5));
  const auto two = lipschitz_scaling_check(3.0, x, 2.0);
  CHECK(two.pass);
  CHECK(two.factor == doctest::Approx(3.0 * 6.0 / 7.0));
  CHECK(two.budget == doctest::Approx(3.0 * std::exp(1.0)));
  CHECK_FALSE(lipschitz_scaling_check(1.0, x, 100.0).pass);
  CHECK_THROWS(lipschitz_scaling_check(0.0, x, 1.0));

  double cumulative = 1.0;
  for (const auto& s : generate_parameters(8, 2, 3)) {
    if (!s.has_next) continue;
    const auto r = lipschitz_scaling_check(1.0, xi_schedule(s), s.K);
    CHECK(r.pass);
    cumulative *= r.budget;
  }
  CHECK(cumulative < std::exp(M_PI * M_PI / 6.0));
}

TEST_CASE("boundary checks") {
  const int p = 2, q = 3;
  CHECK(boundary_check(constant_mesh(Eigen::MatrixXcd::Identity(6, 6), p, q), p, q).pass);

  SplitMix64 rng(9);
  Eigen::MatrixXcd h(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) h(i, j) = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};
  h = (h + h.adjoint()).eval();
  const auto generic = boundary_check(constant_mesh(h, p, q), p, q);
  CHECK_FALSE(generic.pass);
  CHECK(generic.residual_x0 > 0.1);
  CHECK(generic.hermitian_defect < 1e-12);

  Eigen::MatrixXcd a(2, 2);
  a << 1.0, std::complex<double>(0.0, 2.0), std::complex<double>(0.0, -2.0), -1.0;
  auto f = constant_mesh(kron(a, Eigen::MatrixXcd::Identity(3, 3)), p, q);
  f.values[2] = kron(Eigen::MatrixXcd::Identity(2, 2), Eigen::MatrixXcd::Identity(3, 3) * 0.5);
  const auto ok = boundary_check(f, p, q);
  CHECK(ok.pass);
  CHECK(ok.residual_x0 == 0.0);
  CHECK(ok.commutator_x0 == 0.0);

  CHECK_THROWS(boundary_check(constant_mesh(Eigen::MatrixXcd::Identity(4, 4), p, q), p, q));
  auto missing = constant_mesh(Eigen::MatrixXcd::Identity(6, 6), p, q);
  missing.mesh[2] = 0.6;
  CHECK_THROWS(boundary_check(missing, p, q));
}

TEST_CASE("boundary feasibility") {
  const auto b = boundary_feasibility(table()[0]);
  CHECK(b.x0_boundary_multiplicity == 6);
  CHECK(b.x0_waypoint_multiplicity == 12);
  CHECK_FALSE(b.x0_feasible);
  CHECK(b.x1_boundary_multiplicity == 14);
  CHECK(b.x1_waypoint_multiplicity == 7);
  CHECK(b.x1_feasible);
}

TEST_CASE("mesh connecting map") {
  const auto x = xi_schedule(table()[0]);
  Eigen::MatrixXcd a(2, 2);
  a << 1.0, 0.0, 0.0, 2.0;
  auto f = constant_mesh(kron(a, Eigen::MatrixXcd::Identity(3, 3)), 2, 3);
  f.values[1] *= 3.0;  // value at z = 1/4
  f.lipschitz = 1.0;
  const auto g = connecting_map_mesh(x, f);
  REQUIRE(g.values.size() == 4);
  CHECK(g.values[0].rows() == 84);
  // the first two blocks are f itself, the constant band carries f(z)
  CHECK((g.values[0].block(0, 0, 6, 6) - f.values[0]).norm() == 0.0);
  CHECK((g.values[0].block(12, 12, 6, 6) - f.values[1]).norm() == 0.0);
  // retraction sends x0 to z
  CHECK((g.values[0].block(78, 78, 6, 6) - f.values[1]).norm() == 0.0);
  CHECK(g.self_adjoint);
  CHECK_THROWS(connecting_map_mesh(xi_schedule(table()[1]), f));
}

TEST_CASE("stage csv") {
  std::ostringstream out;
  write_stage_csv(out, table());
  const auto s = out.str();
  CHECK(s.rfind("m,p,q,N,bound,ratio,identity_fraction\n", 0) == 0);
  CHECK(s.find("1,2,3,14,") != std::string::npos);
  CHECK(s.find("2,7,12,1685,") != std::string::npos);
  CHECK(s.find("3,337,420,,,,") != std::string::npos);

  std::ostringstream mesh;
  write_mesh_csv(mesh, constant_mesh(Eigen::MatrixXcd::Identity(6, 6), 2, 3));
  const auto text = mesh.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 36);
}
