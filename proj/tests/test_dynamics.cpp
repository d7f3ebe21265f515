#include "doctest.h"

#include <cmath>
#include <set>

#include "tracial/dynamics.hpp"
#include "tracial/random.hpp"

using namespace tracial;

namespace {

double c(const PhasePoint& x) { return coordinate(x); }

}  // namespace

TEST_CASE("intermittent map: fixed point, right branch and left branch value") {
  for (double alpha : {0.1, 0.25, 0.5, 0.9}) {
    const auto sys = intermittent_map(alpha);
    CHECK(c(step(sys, circle_point(0.0))) == 0.0);
    CHECK(c(step(sys, circle_point(0.75))) == doctest::Approx(0.5).epsilon(1e-15));
  }
  // 0.25 + 2^0.25 * 0.25^1.25, evaluated at 40 digits with mpmath
  const double expected = 0.46022410381342863575778136905830372376;
  CHECK(std::abs(c(step(intermittent_map(0.25), circle_point(0.25))) - expected) < 1e-15);
}

TEST_CASE("intermittent map: branch point belongs to the right branch") {
  const auto sys = intermittent_map(0.3);
  CHECK(c(step(sys, circle_point(0.5))) == 0.0);
}

TEST_CASE("intermittent map is increasing on each branch") {
  const auto sys = intermittent_map(0.25);
  SplitMix64 gen(7);
  for (int i = 0; i < 1000; ++i) {
    const double a = 0.49 * uniform01(gen), b = 0.49 * uniform01(gen);
    const double s = std::min(a, b), t = std::max(a, b);
    if (t - s < 1e-9) continue;
    CHECK(c(step(sys, circle_point(s))) < c(step(sys, circle_point(t))));
    const double s2 = 0.5 + s, t2 = 0.5 + t;
    CHECK(c(step(sys, circle_point(s2))) < c(step(sys, circle_point(t2))));
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(intermittent_map(1.5), std::domain_error);
  CHECK_THROWS_AS(intermittent_map(0.0), std::domain_error);
  CHECK_THROWS_AS(toral_automorphism((IntMatrix2() << 1, 1, 0, 1).finished()), std::domain_error);
  CHECK_THROWS_AS(toral_automorphism((IntMatrix2() << 0, 1, -1, 0).finished()), std::domain_error);
  CHECK_THROWS_AS(toral_automorphism((IntMatrix2() << 2, 0, 0, 1).finished()), std::domain_error);
  Eigen::MatrixXi a(2, 2);
  a << 1, 1, 1, 0;
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;  // weight on a forbidden transition
  CHECK_THROWS_AS(subshift(a, p), std::domain_error);
  Eigen::MatrixXi bad(2, 2);
  bad << 2, 1, 1, 0;
  Eigen::MatrixXd q(2, 2);
  q << 0.5, 0.5, 1.0, 0.0;
  CHECK_THROWS_AS(subshift(bad, q), std::domain_error);
}

TEST_CASE("toral automorphism steps exactly mod 1") {
  const auto sys = toral_automorphism();
  const auto y = std::get<TorusPoint>(step(sys, torus_point(0.5, 0.5)));
  CHECK(turns_to_double(y.s) == 0.5);
  CHECK(turns_to_double(y.t) == 0.0);
}

TEST_CASE("orbit examples") {
  const auto dbl = doubling_map();
  const auto tr = orbit(dbl, circle_point(0.3), 2);
  REQUIRE(tr.points.size() == 3);
  CHECK(c(tr.points[0]) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c(tr.points[1]) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(c(tr.points[2]) == doctest::Approx(0.2).epsilon(1e-15));

  const auto third = orbit(dbl, circle_point(1.0 / 3.0), 2);
  CHECK(c(third.points[1]) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(c(third.points[2]) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const auto zero = orbit(intermittent_map(0.4), circle_point(0.123), 0);
  REQUIRE(zero.points.size() == 1);
  CHECK(zero.points[0] == circle_point(0.123));
}

TEST_CASE("orbits are reproducible and satisfy the step relation") {
  for (const auto& sys : {doubling_map(), intermittent_map(0.25), golden_rotation(), toral_automorphism(),
                          full_shift(), dyadic_permutation(3)}) {
    const auto x0 = sample_point(sys, 99);
    const auto a = orbit(sys, x0, 200);
    const auto b = orbit(sys, x0, 200);
    CHECK(a.points == b.points);
    for (std::size_t i = 0; i + 1 < a.points.size(); ++i) CHECK(a.points[i + 1] == step(sys, a.points[i]));
  }
}

TEST_CASE("subshift steps reject inadmissible windows") {
  Eigen::MatrixXi a(2, 2);
  a << 1, 1, 1, 0;
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.5, 1.0, 0.0;
  const auto golden = subshift(a, p, std::nullopt, 8);
  const std::vector<int> bad{0, 1, 1, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(step(golden, symbol_point(bad)), std::domain_error);
  const std::vector<int> good{0, 1, 0, 0, 1, 0, 1, 0};
  const auto y = std::get<SymbolPoint>(step(golden, symbol_point(good)));
  CHECK(y.at(0) == 1);
  CHECK(y.at(6) == 0);
}

TEST_CASE("dyadic permutation has order 2^rank exactly on sampled points") {
  for (int rank : {1, 3, 5}) {
    const auto sys = dyadic_permutation(rank);
    const auto mu = sample_invariant(sys, 2000, 0, 5);
    for (const auto& x : mu.points) {
      CHECK(iterate(sys, x, std::size_t(1) << rank) == x);
      if (rank > 1) CHECK_FALSE(iterate(sys, x, std::size_t(1) << (rank - 1)) == x);
    }
  }
}

TEST_CASE("primitivity check") {
  Eigen::MatrixXi ones = Eigen::MatrixXi::Ones(2, 2);
  CHECK(primitivity_check(ones) == 1);
  Eigen::MatrixXi golden(2, 2);
  golden << 1, 1, 1, 0;
  CHECK(primitivity_check(golden) == 2);
  Eigen::MatrixXi swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK_FALSE(primitivity_check(swap).has_value());

  // oracle: direct integer matrix powers
  SplitMix64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 4);
    Eigen::MatrixXi m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = static_cast<int>(gen() % 2);
    std::optional<int> expect;
    Eigen::MatrixXd power = m.cast<double>();
    for (int k = 1; k <= (n - 1) * (n - 1) + 1; ++k) {
      if ((power.array() > 0).all()) {
        expect = k;
        break;
      }
      power = power * m.cast<double>();
    }
    CHECK(primitivity_check(m) == expect);
  }
}

TEST_CASE("non-primitive subshift without stationary vector cannot be sampled") {
  Eigen::MatrixXi swap(2, 2);
  swap << 0, 1, 1, 0;
  Eigen::MatrixXd p(2, 2);
  p << 0.0, 1.0, 1.0, 0.0;
  const auto sys = subshift(swap, p, std::nullopt, 16);
  CHECK_THROWS_AS(sample_invariant(sys, 10, 0, 1), std::domain_error);
  Eigen::VectorXd pi(2);
  pi << 0.5, 0.5;
  const auto with_pi = subshift(swap, p, pi, 16);
  const auto mu = sample_invariant(with_pi, 10, 0, 1);
  CHECK(mu.size() == 10);
}

TEST_CASE("periodic points of the doubling map") {
  const auto pts = periodic_points(doubling_map(), 2, 1e-12);
  REQUIRE(pts.size() == 3);
  std::set<double> values;
  for (const auto& p : pts) values.insert(c(p));
  auto it = values.begin();
  CHECK(*it++ == 0.0);
  CHECK(*it++ == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(*it++ == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("periodic points re-validate by orbit replay") {
  for (const auto& sys : {doubling_map(), intermittent_map(0.25), toral_automorphism()}) {
    for (int p = 1; p <= 6; ++p) {
      const auto pts = periodic_points(sys, p, 1e-9);
      CHECK_FALSE(pts.empty());
      for (const auto& x : pts) CHECK(distance(iterate(sys, x, p), x) <= 1e-9);
    }
  }
  // doubling: 2^p - 1 points; intermittent: one per lap (the laps at 0 and 1 share t = 0)
  CHECK(periodic_points(doubling_map(), 5, 1e-12).size() == 31);
  CHECK(periodic_points(intermittent_map(0.25), 5, 1e-12).size() == 31);
  // cat map: |det(A^p - I)| = L_p - 2 (Lucas numbers 1, 3, 4, 7, 11, 18, ... for A^2 = [[5,3],[3,2]])
  CHECK(periodic_points(toral_automorphism(), 1, 1e-12).size() == 1);
  CHECK(periodic_points(toral_automorphism(), 2, 1e-12).size() == 5);
  CHECK(periodic_points(toral_automorphism(), 3, 1e-12).size() == 16);
}

TEST_CASE("periodic points: rotations and subshift loops") {
  CHECK(periodic_points(golden_rotation(), 7, 1e-9).empty());
  CHECK(periodic_points(rotation(0.25), 4, 1e-12).size() == 1024);
  CHECK_THROWS_AS(periodic_points(doubling_map(), 2, 0.0), std::invalid_argument);

  Eigen::MatrixXi a(2, 2);
  a << 1, 1, 1, 0;
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.5, 1.0, 0.0;
  const auto golden = subshift(a, p, std::nullopt, 16);
  const auto loops = periodic_points(golden, 2, 1e-12);
  std::set<std::vector<int>> prefixes;
  for (const auto& x : loops) {
    const auto w = std::get<SymbolPoint>(x).word();
    prefixes.insert({w[0], w[1]});
    CHECK(iterate(golden, x, 2) == x);
  }
  CHECK(prefixes == std::set<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}});
}

TEST_CASE("sampling is deterministic and independent of worker count") {
  const auto a = sample_invariant(intermittent_map(0.25), 500, 100, 11);
  const auto b = sample_invariant(intermittent_map(0.25), 500, 100, 11);
  CHECK(a.points == b.points);
  const auto shift = sample_invariant(full_shift(), 10000, 0, 3);
  double zeros = 0.0;
  for (const auto& x : shift.points) zeros += std::get<SymbolPoint>(x).at(0) == 0 ? 1.0 : 0.0;
  CHECK(std::abs(zeros / 10000.0 - 0.5) < 0.015);  // 3 sigma of a fair coin
}
