#include "tracial/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tracial/parallel.hpp"
#include "tracial/random.hpp"

namespace tracial {

namespace {

int alphabet_of(const SystemSpec& sys) { return sys.space == SpaceKind::Sequence ? sys.alphabet() : 2; }

bool is_full_shift(const SystemSpec& sys) {
  return sys.kind == SystemKind::Shift && (sys.transition.array() != 0).all();
}

bool admissible(const SystemSpec& sys, const std::vector<int>& word) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (sys.transition(word[i], word[i + 1]) == 0) return false;
  return true;
}

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::size_t checked_cells(const SystemSpec& sys, int depth, std::size_t cap) {
  const std::uint64_t m = cell_count(sys.space, depth, alphabet_of(sys));
  if (m > cap) throw std::invalid_argument("resolution gives more than " + std::to_string(cap) + " cells");
  return static_cast<std::size_t>(m);
}

bool cell_nonempty(const SystemSpec& sys, const Cell& c) {
  if (sys.space != SpaceKind::Sequence) return true;
  return admissible(sys, cell_word(c, sys.alphabet()));
}

// Random point of a cell; sequence cells are extended by the Markov chain.
PhasePoint fill_point(const SystemSpec& sys, const Cell& c, SplitMix64& gen) {
  if (sys.space == SpaceKind::Sequence) return cylinder_point(sys, cell_word(c, sys.alphabet()), gen());
  const double u = uniform01(gen), v = uniform01(gen);
  return cell_point(sys.space, c, u, v);
}

// Doubling-map point whose binary digits are `bits` (most significant first),
// continued periodically when period > 0.
PhasePoint binary_point(const std::vector<int>& bits, std::uint32_t period) {
  std::uint64_t turns = 0;
  for (int b = 0; b < 64; ++b) {
    const std::size_t i = period > 0 ? static_cast<std::size_t>(b) % period : static_cast<std::size_t>(b);
    if (i < bits.size() && bits[i]) turns |= std::uint64_t(1) << (63 - b);
  }
  return CirclePoint{turns, TailRule{0, 0, period}};
}

}  // namespace

// ---- transitivity -------------------------------------------------------------

TransitivityReport transitivity_check(const SystemSpec& sys, double eps, std::size_t horizon, std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("transitivity horizon must be >= 1");
  TransitivityReport r;
  r.eps = eps;
  r.depth = depth_for_eps(eps);
  r.horizon = horizon;
  r.seed = seed;
  const int alpha = alphabet_of(sys);
  const std::size_t m = checked_cells(sys, r.depth, 1024);
  r.cells = m;
  std::vector<bool> live(m);
  for (std::size_t c = 0; c < m; ++c) live[c] = cell_nonempty(sys, Cell{r.depth, c});
  r.empty_cells = static_cast<std::size_t>(std::count(live.begin(), live.end(), false));

  const auto d = static_cast<std::size_t>(r.depth);
  r.symbolic = d >= 1 && horizon >= d &&
               ((sys.kind == SystemKind::Doubling && 2 * d + 1 <= 64) ||
                (is_full_shift(sys) && 2 * d <= static_cast<std::size_t>(sys.window)));

  std::vector<std::vector<std::optional<OrbitWitness>>> found(m);
  parallel_for(m, [&](std::size_t a) {
    auto& row = found[a];
    row.assign(m, std::nullopt);
    if (!live[a]) return;
    const Cell U{r.depth, a};
    if (r.symbolic) {
      const auto wu = cell_word(U, alpha);
      for (std::size_t b = 0; b < m; ++b) {
        if (!live[b]) continue;
        const Cell V{r.depth, b};
        auto word = concat(wu, cell_word(V, alpha));
        PhasePoint x;
        if (sys.kind == SystemKind::Doubling) {
          word.push_back(1);  // centre of the sub-cell
          x = binary_point(word, 0);
        } else {
          x = cylinder_point(sys, word, derive_seed(seed, a * m + b));
        }
        row[b] = OrbitWitness{U, V, x, d};
      }
      return;
    }
    SplitMix64 gen(derive_seed(seed, a));
    std::size_t missing = 0;
    for (std::size_t b = 0; b < m; ++b) missing += live[b] ? 1 : 0;
    for (int s = 0; s <= kCellFills && missing > 0; ++s) {
      PhasePoint x;
      if (s == 0 && sys.space != SpaceKind::Sequence) x = cell_point(sys.space, U);
      else if (s == 0) continue;
      else x = fill_point(sys, U, gen);
      PhasePoint y = x;
      for (std::size_t n = 1; n <= horizon && missing > 0; ++n) {
        advance(sys, y);
        const auto b = static_cast<std::size_t>(cell_of(y, r.depth, alpha).code);
        if (!row[b]) {
          row[b] = OrbitWitness{U, Cell{r.depth, b}, x, n};
          --missing;
        }
      }
    }
  });
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      if (!live[a] || !live[b]) continue;
      if (found[a][b]) r.witnesses.push_back(*found[a][b]);
      else r.missing.emplace_back(Cell{r.depth, a}, Cell{r.depth, b});
    }
  r.pass = r.missing.empty();
  return r;
}

// ---- periodic density -----------------------------------------------------------

PeriodicDensityReport periodic_density_check(const SystemSpec& sys, double eps, int max_period, double tol) {
  if (max_period < 1) throw std::invalid_argument("max_period must be >= 1");
  PeriodicDensityReport r;
  r.eps = eps;
  r.depth = depth_for_eps(eps);
  r.max_period = max_period;
  r.tol = tol;
  const int alpha = alphabet_of(sys);
  const std::size_t m = checked_cells(sys, r.depth, std::size_t(1) << 20);
  std::vector<std::optional<PeriodicWitness>> found(m);
  std::size_t missing = 0;
  for (std::size_t c = 0; c < m; ++c) missing += cell_nonempty(sys, Cell{r.depth, c}) ? 1 : 0;
  for (int p = 1; p <= std::min(max_period, kMaxPeriod) && missing > 0; ++p) {
    std::vector<PhasePoint> pts;
    try {
      pts = periodic_points(sys, p, tol);
    } catch (const std::invalid_argument&) {
      break;  // enumeration cap reached
    }
    for (auto& x : pts) {
      const Cell c = cell_of(x, r.depth, alpha);
      auto& slot = found[static_cast<std::size_t>(c.code)];
      if (slot) continue;
      PeriodicWitness w{c, x, p, std::nullopt};
      if (sys.kind == SystemKind::Doubling) {
        const auto& cp = std::get<CirclePoint>(x);
        w.rational = std::make_pair(cp.turns >> (64 - p), (std::uint64_t(1) << p) - 1);
      }
      slot = std::move(w);
      --missing;
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (found[c]) r.witnesses.push_back(*found[c]);
    else if (cell_nonempty(sys, Cell{r.depth, c})) r.missing.push_back(Cell{r.depth, c});
  }
  r.pass = r.missing.empty();
  return r;
}

// ---- sensitivity ----------------------------------------------------------------

namespace {

PhasePoint probe_point(const SystemSpec& sys, const PhasePoint& x, double probe_eps, std::uint64_t seed) {
  const double half = 0.5 * probe_eps;
  switch (sys.space) {
    case SpaceKind::Interval: {
      const double t = std::get<IntervalPoint>(x).t;
      return IntervalPoint{t + half <= 1.0 ? t + half : t - half};
    }
    case SpaceKind::Circle: {
      auto y = std::get<CirclePoint>(x);
      y.turns += turns_from(half);
      return y;
    }
    case SpaceKind::Torus: {
      auto y = std::get<TorusPoint>(x);
      y.s += turns_from(half);
      return y;
    }
    case SpaceKind::Sequence: {
      const auto& s = std::get<SymbolPoint>(x);
      const int keep = std::min<int>(depth_for_eps(probe_eps) + 1, s.length);
      auto word = s.word();
      word.resize(static_cast<std::size_t>(keep));
      return cylinder_point(sys, word, seed);
    }
  }
  throw std::logic_error("unknown space");
}

}  // namespace

SensitivityReport sensitivity_estimate(const SystemSpec& sys, std::size_t trials, std::size_t horizon,
                                       double probe_eps, std::uint64_t seed) {
  if (!(probe_eps > 0.0)) throw std::invalid_argument("probe_eps must be positive");
  if (trials == 0) throw std::invalid_argument("sensitivity needs trials >= 1");
  SensitivityReport r;
  r.probe_eps = probe_eps;
  r.trials = trials;
  r.horizon = horizon;
  r.seed = seed;
  r.witnesses.resize(trials);
  parallel_for(trials, [&](std::size_t i) {
    const PhasePoint x = sample_point(sys, derive_seed(seed, 2 * i));
    const PhasePoint y = probe_point(sys, x, probe_eps, derive_seed(seed, 2 * i + 1));
    SeparationWitness w{x, y, 0, distance(x, y), distance(x, y)};
    PhasePoint a = x, b = y;
    for (std::size_t n = 1; n <= horizon; ++n) {
      advance(sys, a);
      advance(sys, b);
      const double d = distance(a, b);
      if (d > w.separation) {
        w.separation = d;
        w.n = n;
      }
    }
    r.witnesses[i] = std::move(w);
  });
  r.delta_hat = r.witnesses.front().separation;
  for (const auto& w : r.witnesses) r.delta_hat = std::min(r.delta_hat, w.separation);
  r.sensitive = r.delta_hat > 10.0 * probe_eps;
  return r;
}

// ---- Touhey -------------------------------------------------------------------

std::optional<TouheyWitness> touhey_witness(const SystemSpec& sys, const Cell& u, const Cell& v, int max_period) {
  const int alpha = alphabet_of(sys);
  if (!cell_nonempty(sys, u) || !cell_nonempty(sys, v)) throw std::invalid_argument("Touhey cells must be nonempty");
  const int period = u.depth + v.depth;
  if (period >= 1 && period <= max_period) {
    const auto word = concat(cell_word(u, alpha), cell_word(v, alpha));
    if (sys.kind == SystemKind::Doubling)
      return TouheyWitness{u, v, binary_point(word, static_cast<std::uint32_t>(period)), period, 0,
                           static_cast<std::size_t>(u.depth)};
    if (is_full_shift(sys) && period <= sys.window) {
      std::vector<int> window(static_cast<std::size_t>(sys.window));
      for (std::size_t i = 0; i < window.size(); ++i) window[i] = word[i % word.size()];
      return TouheyWitness{u, v, symbol_point(window, TailRule{0, 0, static_cast<std::uint32_t>(period)}), period, 0,
                           static_cast<std::size_t>(u.depth)};
    }
  }
  for (int p = 1; p <= std::min(max_period, kMaxPeriod); ++p) {
    std::vector<PhasePoint> pts;
    try {
      pts = periodic_points(sys, p, 1e-9);
    } catch (const std::invalid_argument&) {
      break;
    }
    for (const auto& x : pts) {
      std::optional<std::size_t> ku, kv;
      PhasePoint y = x;
      for (int k = 0; k < p; ++k) {
        if (!ku && in_cell(y, u, alpha)) ku = static_cast<std::size_t>(k);
        if (!kv && in_cell(y, v, alpha)) kv = static_cast<std::size_t>(k);
        advance(sys, y);
      }
      if (ku && kv) return TouheyWitness{u, v, x, p, *ku, *kv};
    }
  }
  return std::nullopt;
}

// ---- certificate --------------------------------------------------------------

ChaosCertificate chaos_certificate(const SystemSpec& sys, const ChaosOptions& o) {
  ChaosCertificate c;
  c.transitivity = transitivity_check(sys, o.transitivity_eps, o.horizon, o.seed);
  c.periodic = periodic_density_check(sys, o.periodic_eps, o.max_period);
  c.sensitivity = sensitivity_estimate(sys, o.sensitivity_trials, o.sensitivity_horizon, o.probe_eps, o.seed);
  c.devaney = c.transitivity.pass && c.periodic.pass && c.sensitivity.sensitive;
  return c;
}

// ---- replay -------------------------------------------------------------------

bool replay(const SystemSpec& sys, const OrbitWitness& w) {
  const int alpha = alphabet_of(sys);
  validate_point(sys, w.x);
  return w.n >= 1 && in_cell(w.x, w.from, alpha) && in_cell(iterate(sys, w.x, w.n), w.to, alpha);
}

bool replay(const SystemSpec& sys, const PeriodicWitness& w, double tol) {
  validate_point(sys, w.x);
  return w.period >= 1 && in_cell(w.x, w.cell, alphabet_of(sys)) &&
         distance(iterate(sys, w.x, static_cast<std::size_t>(w.period)), w.x) <= tol;
}

bool replay(const SystemSpec& sys, const SeparationWitness& w) {
  validate_point(sys, w.x);
  validate_point(sys, w.y);
  return distance(w.x, w.y) == w.initial &&
         distance(iterate(sys, w.x, w.n), iterate(sys, w.y, w.n)) == w.separation;
}

bool replay(const SystemSpec& sys, const TouheyWitness& w) {
  const int alpha = alphabet_of(sys);
  validate_point(sys, w.x);
  return w.period >= 1 && distance(iterate(sys, w.x, static_cast<std::size_t>(w.period)), w.x) <= 1e-9 &&
         in_cell(iterate(sys, w.x, w.visit_u), w.u, alpha) && in_cell(iterate(sys, w.x, w.visit_v), w.v, alpha);
}

}  // namespace tracial
