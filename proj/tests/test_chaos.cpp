#include "doctest.h"

#include "tracial/chaos.hpp"

using namespace tracial;

namespace {

// floor(2^64 k / (2^p - 1))
std::uint64_t rational_turns(std::uint64_t k, std::uint64_t den) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(k) << 64) / den);
}

}  // namespace

TEST_CASE("transitivity examples") {
  const auto dbl = doubling_map();
  const auto r = transitivity_check(dbl, 0.0625, 64);
  CHECK(r.pass);
  CHECK(r.symbolic);
  CHECK(r.witnesses.size() == 256);
  for (const auto& w : r.witnesses) CHECK(replay(dbl, w));

  const auto rot = golden_rotation();
  const auto rr = transitivity_check(rot, 0.0625, 10000);
  CHECK(rr.pass);
  CHECK_FALSE(rr.symbolic);
  for (const auto& w : rr.witnesses) CHECK(replay(rot, w));

  const auto id = identity_map();
  const auto ri = transitivity_check(id, 0.25, 100);
  CHECK_FALSE(ri.pass);
  CHECK(ri.missing.size() == 12);
  for (const auto& [u, v] : ri.missing) CHECK(u.code != v.code);

  const auto shift = full_shift(2, 16);
  const auto rs = transitivity_check(shift, 0.125, 10);
  CHECK(rs.pass);
  for (const auto& w : rs.witnesses) CHECK(replay(shift, w));

  // golden-mean shift: the cylinder [11] is empty and is skipped
  const auto gm = subshift((Eigen::MatrixXi(2, 2) << 1, 1, 1, 0).finished(),
                           (Eigen::MatrixXd(2, 2) << 0.5, 0.5, 1, 0).finished());
  const auto rg = transitivity_check(gm, 0.25, 20);
  CHECK(rg.empty_cells == 1);
  CHECK(rg.pass);
  for (const auto& w : rg.witnesses) CHECK(replay(gm, w));

  const auto cat = toral_automorphism();
  const auto rc = transitivity_check(cat, 0.25, 64);
  CHECK(rc.pass);
  for (const auto& w : rc.witnesses) CHECK(replay(cat, w));
}

TEST_CASE("periodic density examples") {
  const auto dbl = doubling_map();
  const auto r = periodic_density_check(dbl, 0.015625, 10);
  CHECK(r.pass);
  CHECK(r.witnesses.size() == 64);
  for (const auto& w : r.witnesses) {
    CHECK(replay(dbl, w));
    REQUIRE(w.rational);
    CHECK(w.rational->second == (std::uint64_t(1) << w.period) - 1);
    // the stored point is the exact fixed-point expansion of k / (2^p - 1)
    CHECK(std::get<CirclePoint>(w.x).turns == rational_turns(w.rational->first, w.rational->second));
    CHECK(distance(iterate(dbl, w.x, static_cast<std::size_t>(w.period)), w.x) == 0.0);
  }

  CHECK_FALSE(periodic_density_check(golden_rotation(), 0.0625, 10).pass);

  const auto shift = full_shift();
  const auto rs = periodic_density_check(shift, 0.015625, 6);
  CHECK(rs.pass);
  for (const auto& w : rs.witnesses) CHECK(replay(shift, w));

  const auto cat = toral_automorphism();
  const auto rc = periodic_density_check(cat, 0.25, 10);
  CHECK(rc.pass);
  for (const auto& w : rc.witnesses) CHECK(replay(cat, w));
}

TEST_CASE("sensitivity examples") {
  const auto dbl = doubling_map();
  const auto r = sensitivity_estimate(dbl, 1000, 40, 1e-6);
  CHECK(r.delta_hat >= 0.25);
  CHECK(r.sensitive);
  for (std::size_t i = 0; i < r.witnesses.size(); i += 37) CHECK(replay(dbl, r.witnesses[i]));

  const auto id = sensitivity_estimate(identity_map(), 100, 40, 1e-6);
  CHECK(id.delta_hat <= 1e-6);
  CHECK_FALSE(id.sensitive);

  const auto rot = golden_rotation();
  const auto rr = sensitivity_estimate(rot, 100, 40, 1e-6);
  CHECK(rr.delta_hat <= 1e-6);
  for (const auto& w : rr.witnesses) CHECK(w.separation == w.initial);
  CHECK_FALSE(rr.sensitive);
}

TEST_CASE("transitive plus dense periodic points gives sensitivity") {
  for (const auto& sys : {doubling_map(), full_shift(), toral_automorphism(), intermittent_map(0.25)}) {
    CAPTURE(sys.name);
    const bool t = transitivity_check(sys, 0.0625, 256).pass;
    const bool p = periodic_density_check(sys, 0.0625, 12).pass;
    CHECK(t);
    CHECK(p);
    if (t && p) CHECK(sensitivity_estimate(sys, 200, 60, 1e-6).delta_hat > 1e-5);
  }
}

TEST_CASE("touhey witnesses") {
  const auto dbl = doubling_map();
  const auto w = touhey_witness(dbl, Cell{3, 0}, Cell{3, 4}, 6);
  REQUIRE(w);
  CHECK(w->period == 6);
  CHECK(std::get<CirclePoint>(w->x).turns == rational_turns(4, 63));
  CHECK(replay(dbl, *w));

  for (std::uint64_t a = 0; a < 8; ++a)
    for (std::uint64_t b = 0; b < 8; ++b) {
      const auto t = touhey_witness(dbl, Cell{3, a}, Cell{3, b}, 6);
      REQUIRE(t);
      CHECK(replay(dbl, *t));
    }

  CHECK_FALSE(touhey_witness(identity_map(), Cell{2, 0}, Cell{2, 3}, 4));

  const auto shift = full_shift(2, 12);
  for (std::uint64_t a = 0; a < 8; ++a)
    for (std::uint64_t b = 0; b < 8; ++b) {
      const auto t = touhey_witness(shift, Cell{3, a}, Cell{3, b}, 6);
      REQUIRE(t);
      CHECK(replay(shift, *t));
      const auto word = std::get<SymbolPoint>(t->x).word();
      const auto u = cell_word(Cell{3, a}, 2), v = cell_word(Cell{3, b}, 2);
      for (std::size_t i = 0; i < word.size(); ++i) CHECK(word[i] == (i % 6 < 3 ? u[i % 6] : v[i % 6 - 3]));
    }

  // enumeration path
  const auto cat = toral_automorphism();
  const auto tc = touhey_witness(cat, Cell{1, 0}, Cell{1, 3}, 8);
  REQUIRE(tc);
  CHECK(replay(cat, *tc));
}

TEST_CASE("chaos certificate") {
  const auto c = chaos_certificate(doubling_map());
  CHECK(c.devaney);
  const auto r = chaos_certificate(golden_rotation(), ChaosOptions{0.0625, 10000, 0.015625, 10, 100, 40, 1e-6, 1});
  CHECK(r.transitivity.pass);
  CHECK_FALSE(r.periodic.pass);
  CHECK_FALSE(r.sensitivity.sensitive);
  CHECK_FALSE(r.devaney);
}
