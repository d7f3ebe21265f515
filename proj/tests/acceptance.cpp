// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "tracial/chaos.hpp"
#include "tracial/cstar_model.hpp"
#include "tracial/ergodic_stats.hpp"
#include "tracial/experiment.hpp"
#include "tracial/ktheory.hpp"
#include "tracial/measures.hpp"
#include "tracial/parallel.hpp"
#include "tracial/random.hpp"

using namespace tracial;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

// ---- 1 ------------------------------------------------------------------------------
Outcome iid_clt() {
  const auto shift = full_shift();
  const auto f = shifted(cylinder_indicator(0), 0.5);
  const std::size_t n = 10000, trials = 10000;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = clt_test(f, shift, sample_invariant(shift, trials, 0, 101), n, trials, Normalization::Sqrt, 0.25, 101);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = r.ks_reference && *r.ks_reference <= 0.02 && secs <= 60.0;
  return {ok, "KS vs N(0,1/4) = " + num(*r.ks_reference) + " (<= 0.02), clt time " + num(secs, 3) + " s (<= 60)"};
}

// ---- 2 ------------------------------------------------------------------------------
Outcome doubling_clt() {
  const auto dbl = doubling_map();
  const auto f = cosine_observable();
  const std::size_t n = 10000, trials = 10000;
  const auto t0 = std::chrono::steady_clock::now();
  const auto mu = sample_invariant(dbl, trials, 0, 202);
  const auto v = variance_estimate(f, dbl, mu, n, trials, 202);
  const auto c = clt_test(f, dbl, mu, n, trials, Normalization::Sqrt, std::nullopt, 202);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto in = [](double s) { return s >= 0.45 && s <= 0.55; };
  const bool ok = in(v.direct) && in(v.green_kubo) && c.ks <= 0.05 && secs <= 120.0;
  return {ok, "sigma2 direct " + num(v.direct) + ", Green-Kubo " + num(v.green_kubo) + " (in [0.45,0.55]), KS " +
                  num(c.ks) + " (<= 0.05), " + num(secs, 3) + " s (<= 120)"};
}

// ---- 3 ------------------------------------------------------------------------------
Outcome correlation_vanishing() {
  const auto dbl = doubling_map();
  const auto f = cosine_observable();
  const auto cs = correlation_series(f, f, dbl, sample_invariant(dbl, 1000000, 0, 303), 30);
  double worst = 0.0;
  int over = 0;
  for (std::size_t k = 1; k <= 30; ++k) {
    const double z = std::abs(cs.values[k]) / cs.se[k];
    worst = std::max(worst, z);
    if (z > 3.0) ++over;
  }
  const bool c0 = std::abs(cs.values[0] - 0.5) <= 0.005;
  return {over == 0 && c0, "C_0 = " + num(cs.values[0], 6) + " (0.5 +- 0.005), max |C_n|/SE over 1..30 = " + num(worst, 3) +
                               " (<= 3), lags over: " + std::to_string(over)};
}

// ---- 4 ------------------------------------------------------------------------------
Outcome mixing_controls() {
  std::vector<std::string> notes;
  bool ok = true;
  const auto dbl = doubling_map();
  const auto d = mixing_classifier(dbl, sample_invariant(dbl, 20000, 0, 401), 4, 60, 20000);
  ok = ok && d.strong.pass;
  notes.push_back(std::string("doubling strong ") + (d.strong.pass ? "yes" : "no"));

  const auto rot = golden_rotation();
  MixingOptions opt;
  opt.observable = cosine_observable();
  const auto r = mixing_classifier(rot, sample_invariant(rot, 20000, 0, 402), 2, 200, 20000, opt);
  const double ces = *r.cesaro_abs_correlation;
  const bool rot_ok = r.ergodic.pass && !r.weak.pass && std::abs(ces - 1.0 / kPi) <= 0.03;
  ok = ok && rot_ok;
  notes.push_back(std::string("rotation ergodic ") + (r.ergodic.pass ? "yes" : "no") + ", weak " +
                  (r.weak.pass ? "yes" : "no") + ", Cesaro|C| " + num(ces) + " vs 1/pi " + num(1.0 / kPi));

  const auto perm = dyadic_permutation(3);
  const auto mu = sample_invariant(perm, 20000, 0, 403);
  const auto p = mixing_classifier(perm, mu, 4, 64, 20000);
  bool period8 = true;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto& x = mu.points[i];
    period8 = period8 && iterate(perm, x, 8) == x;
  }
  const bool perm_ok = !p.ergodic.pass && !p.antiperiodic.pass && p.periodic_fraction == 1.0 && period8;
  ok = ok && perm_ok;
  notes.push_back(std::string("permutation ergodic ") + (p.ergodic.pass ? "yes" : "no") + ", periodic fraction " +
                  num(p.periodic_fraction) + ", h^8 = id exact " + (period8 ? "yes" : "no"));

  int violations = 0;
  const std::vector<SystemSpec> systems = {dbl, rot, perm, full_shift()};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto& sys = systems[seed % systems.size()];
    MixingOptions o;
    o.seed = seed;
    const auto v = mixing_classifier(sys, sample_invariant(sys, 2000, 0, seed), 3, 24, 2000, o);
    const bool nested = v.ergodic.statistic <= v.weak.statistic && v.weak.statistic <= v.strong.statistic &&
                        (!v.strong.pass || v.weak.pass) && (!v.weak.pass || v.ergodic.pass) &&
                        (!v.ergodic.pass || v.antiperiodic.pass);
    if (!nested) ++violations;
  }
  ok = ok && violations == 0;
  notes.push_back("nesting violations over 100 runs: " + std::to_string(violations));
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

// ---- 5 ------------------------------------------------------------------------------
Outcome large_deviations() {
  std::vector<std::size_t> ns;
  for (std::size_t n = 10; n <= 200; n += 10) ns.push_back(n);
  const auto dbl = doubling_map();
  const std::size_t trials = 100000;
  const auto p = deviation_profile(cosine_observable(), dbl, sample_invariant(dbl, trials, 0, 501), 0.1, ns, trials, 501);
  const double slack = 2.0 / std::sqrt(static_cast<double>(trials));
  bool mono = true;
  for (std::size_t i = 1; i < p.points.size(); ++i)
    mono = mono && p.points[i].probability <= p.points[i - 1].probability + slack;
  const auto im = intermittent_map(0.25);
  const std::size_t it = 20000;
  const auto q = deviation_profile(cosine_observable(), im, sample_invariant(im, it, 1000, 502), 0.1, ns, it, 502);
  const bool ok = mono && p.fitted && p.c2 > 0.0 && q.decaying;
  return {ok, "doubling: monotone within 2/sqrt(T) " + std::string(mono ? "yes" : "no") + ", c1 " + num(p.c1) + ", c2 " +
                  num(p.c2) + "; intermittent(0.25): c2 " + num(q.c2) + ", decaying " + (q.decaying ? "yes" : "no")};
}

// ---- 6 ------------------------------------------------------------------------------
Outcome chaos() {
  const auto dbl = doubling_map();
  bool replays = true;
  const auto t = transitivity_check(dbl, 0.0625, 64);
  for (const auto& w : t.witnesses) replays = replays && replay(dbl, w);
  const auto per = periodic_density_check(dbl, 0.015625, 10);
  bool rational = true;
  for (const auto& w : per.witnesses) {
    replays = replays && replay(dbl, w);
    if (!w.rational || w.rational->second != (std::uint64_t(1) << w.period) - 1) {
      rational = false;
      continue;
    }
    const auto turns = static_cast<std::uint64_t>((static_cast<unsigned __int128>(w.rational->first) << 64) /
                                                  w.rational->second);
    rational = rational && std::get<CirclePoint>(w.x).turns == turns;
  }
  const auto sens = sensitivity_estimate(dbl, 1000, 40, 1e-6);
  for (const auto& w : sens.witnesses) replays = replays && replay(dbl, w);

  const auto rot = golden_rotation();
  const bool rot_per = periodic_density_check(rot, 0.015625, 10).pass;
  const bool rot_sens = sensitivity_estimate(rot, 1000, 40, 1e-6).sensitive;

  int touhey = 0;
  for (std::uint64_t a = 0; a < 8; ++a)
    for (std::uint64_t b = 0; b < 8; ++b) {
      const auto w = touhey_witness(dbl, Cell{3, a}, Cell{3, b}, 6);
      if (w && replay(dbl, *w)) ++touhey;
    }
  const bool ok = t.pass && per.pass && rational && sens.delta_hat >= 0.25 && !rot_per && !rot_sens && replays &&
                  touhey == 64;
  return {ok, std::string("doubling transitivity ") + (t.pass ? "pass" : "fail") + ", periodic " +
                  (per.pass ? "pass" : "fail") + " (" + std::to_string(per.witnesses.size()) + " witnesses, exact k/(2^p-1) " +
                  (rational ? "yes" : "no") + "), delta_hat " + num(sens.delta_hat) + "; rotation periodic " +
                  (rot_per ? "pass" : "fail") + ", sensitive " + (rot_sens ? "yes" : "no") + "; replays " +
                  (replays ? "all exact" : "MISMATCH") + "; Touhey pairs " + std::to_string(touhey) + "/64"};
}

// ---- 7 ------------------------------------------------------------------------------
Outcome asclt() {
  const auto dbl = doubling_map();
  const std::size_t n = 1000000;
  const auto r = asclt_test(cosine_observable(), dbl, sample_point(dbl, 701), n, 0.0);
  // H_n against its asymptotic expansion
  const double nd = static_cast<double>(n);
  const double expansion = std::log(nd) + 0.57721566490153286 + 1.0 / (2 * nd) - 1.0 / (12 * nd * nd);
  const bool harmonic = std::abs(r.harmonic - expansion) < 1e-12;
  return {r.ks <= 0.1 && harmonic, "KS vs N(0, sigma2_hat = " + num(r.sigma2) + ") = " + num(r.ks) +
                                       " (<= 0.1), D_n = " + num(r.harmonic, 15) + (harmonic ? " exact" : " MISMATCH")};
}

// ---- 8 ------------------------------------------------------------------------------
Outcome model_table() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = generate_parameters(2, 2, 3);
  bool ok = t.size() == 3 && t[0].p_next == 7 && t[0].q_next == 12 && t[0].N == 14 && t[1].p_next == 337 &&
            t[1].q_next == 420 && t[1].N == 1685;
  std::string fractions;
  for (const auto& s : t) {
    if (!s.has_next) continue;
    ok = ok && validate_stage(s).empty();
    const auto lip = lipschitz_scaling_check(1.0, xi_schedule(s), s.K);
    ok = ok && lip.pass && s.identity_fraction > 1.0 - 1.0 / (s.m * s.m);
    fractions += (fractions.empty() ? "" : ", ") + identity_fraction_exact(s) + " (ratio q/N " + num(s.ratio) + ")";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ok = ok && secs < 1.0;
  return {ok, "(7,12,14), (337,420,1685) reproduced " + std::string(ok ? "yes" : "no") + "; identity fractions " +
                  fractions + "; " + num(secs * 1000, 3) + " ms"};
}

// ---- 9 ------------------------------------------------------------------------------
long long minor_det(const std::vector<std::vector<long long>>& m, const std::vector<int>& r, const std::vector<int>& c) {
  if (r.size() == 1) return m[r[0]][c[0]];
  long long s = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    std::vector<int> rr(r.begin() + 1, r.end()), cc;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (k != j) cc.push_back(c[k]);
    s += (j % 2 ? -1 : 1) * m[r[0]][c[j]] * minor_det(m, rr, cc);
  }
  return s;
}

Outcome ktheory() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto Z = free_group(1);
  const FGAbelianGroup zero;
  const auto a = to_string(pv_crossed_kgroups(Z, Z, identity_hom(Z), zero_hom(Z, Z)));
  const auto b = to_string(pv_crossed_kgroups(zero, zero, identity_hom(zero), identity_hom(zero)));
  SplitMix64 rng(909);
  const std::vector<std::vector<int>> subsets1 = {{0}, {1}, {2}}, subsets2 = {{0, 1}, {0, 2}, {1, 2}},
                                      subsets3 = {{0, 1, 2}};
  int agree = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::vector<long long>> m(3, std::vector<long long>(3));
    BigMatrix big(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        m[i][j] = static_cast<long long>(rng() % 11) - 5;
        big(i, j) = m[i][j];
      }
    long long prev = 1;
    bool ok = true;
    const auto s = smith_normal_form<BigInt>(big);
    ok = ok && equal(multiply(multiply(s.U, big), s.V), s.D);
    int k = 0;
    for (const auto* subsets : {&subsets1, &subsets2, &subsets3}) {
      long long g = 0;
      for (const auto& r : *subsets)
        for (const auto& c : *subsets) g = std::gcd(g, minor_det(m, r, c));
      const long long d = (g == 0 || prev == 0) ? 0 : g / prev;
      prev = g == 0 ? 0 : g;
      ok = ok && s.D(k, k) == d;
      ++k;
    }
    if (ok) ++agree;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = a == "K0 = Z, K1 = Z" && b == "K0 = 0, K1 = 0" && agree == 10000 && secs < 30.0;
  return {ok, "(Z,Z,id,0) -> " + a + "; (0,0) -> " + b + "; SNF agrees with determinantal divisors on " +
                  std::to_string(agree) + "/10000; " + num(secs, 3) + " s"};
}

// ---- 10 -----------------------------------------------------------------------------
EmpiricalMeasure random_measure(SplitMix64& gen, std::size_t max_points, bool circle) {
  const std::size_t n = 1 + gen() % max_points;
  std::vector<PhasePoint> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = uniform01(gen);
    pts.push_back(circle ? circle_point(x) : interval_point(x));
    w.push_back(0.05 + uniform01(gen));
  }
  return empirical_measure(std::move(pts), std::move(w));
}

Outcome transport() {
  SplitMix64 gen(1010);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const bool circle = i % 2 == 1;
    const auto mu = random_measure(gen, 64, circle), nu = random_measure(gen, 64, circle);
    worst = std::max(worst, std::abs(wasserstein1(mu, nu) - wasserstein1_flow(mu, nu)));
  }
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const bool circle = i % 2 == 1;
    const auto a = random_measure(gen, 32, circle), b = random_measure(gen, 32, circle),
               c = random_measure(gen, 32, circle);
    const double ab = wasserstein1(a, b), ba = wasserstein1(b, a), ac = wasserstein1(a, c), bc = wasserstein1(b, c);
    const bool ok = ab >= 0.0 && ab == ba && wasserstein1(a, a) == 0.0 && ac <= ab + bc + 1e-12;
    if (!ok) ++bad;
  }
  return {worst <= 1e-9 && bad == 0,
          "max |CDF - LP| over 1000 pairs = " + num(worst, 3) + " (<= 1e-9); metric axiom failures " + std::to_string(bad) + "/1000"};
}

// ---- 11 -----------------------------------------------------------------------------
Outcome determinism() {
  const std::vector<std::string> configs = {
      "[experiment]\nkind = clt\nseed = 1101\n[system]\nname = full-shift\n[observable]\nname = indicator\nshift = 0.5\n"
      "[params]\nn = 2000\ntrials = 2000\nreference_sigma2 = 0.25\n",
      "[experiment]\nkind = correlations\nseed = 1102\n[system]\nname = doubling\n[observable]\nname = cos\n"
      "[params]\nsamples = 50000\nlags = 30\n",
      "[experiment]\nkind = mixing-class\nseed = 1103\n[system]\nname = golden-rotation\n[observable]\nname = cos\n"
      "[params]\ndepth = 2\nN = 100\ntrials = 5000\n",
      "[experiment]\nkind = deviation\nseed = 1104\n[system]\nname = doubling\n[observable]\nname = cos\n"
      "[params]\neps = 0.1\ntrials = 5000\n",
      "[experiment]\nkind = chaos-cert\nseed = 1105\n[system]\nname = doubling\n",
      "[experiment]\nkind = asclt\nseed = 1106\n[system]\nname = doubling\n[observable]\nname = cos\n[params]\nn = 100000\n",
      "[experiment]\nkind = model-check\nseed = 1107\n[model]\nstages = 3\n",
  };
  int identical = 0;
  for (const auto& text : configs) {
    const auto cfg = parse_config(text).config;
    if (!cfg) continue;
    std::vector<std::string> dumps;
    for (unsigned w : {1u, 4u, 8u}) {
      set_worker_count(w);
      std::map<std::string, std::string> csv;
      const auto r = compute_experiment(*cfg, &csv);
      std::string all = r.report.dump(2);
      for (const auto& [name, body] : csv) all += name + body;
      dumps.push_back(all);
    }
    if (dumps[0] == dumps[1] && dumps[0] == dumps[2]) ++identical;
  }
  set_worker_count(1);
  return {identical == static_cast<int>(configs.size()),
          std::to_string(identical) + "/" + std::to_string(configs.size()) +
              " experiment kinds byte-identical with 1, 4 and 8 workers"};
}

}  // namespace

int main() {
  set_worker_count(1);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"iid CLT, full 2-shift", iid_clt},
      {"doubling-map CLT", doubling_clt},
      {"exact correlation vanishing", correlation_vanishing},
      {"mixing hierarchy controls", mixing_controls},
      {"large-deviation profile", large_deviations},
      {"chaos certificate", chaos},
      {"almost-sure CLT", asclt},
      {"model construction table", model_table},
      {"K-theory", ktheory},
      {"transport", transport},
      {"determinism across workers", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("[%2zu] %s  %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
