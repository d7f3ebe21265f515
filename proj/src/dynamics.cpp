#include "tracial/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tracial/parallel.hpp"
#include "tracial/random.hpp"
#include "tracial/smith.hpp"

namespace tracial {

// ---- construction -----------------------------------------------------------

SystemSpec identity_map(SpaceKind space) {
  if (space != SpaceKind::Interval && space != SpaceKind::Circle)
    throw std::invalid_argument("identity map is provided on the interval and the circle");
  SystemSpec s;
  s.name = "identity";
  s.kind = SystemKind::Identity;
  s.space = space;
  return s;
}

SystemSpec doubling_map() {
  SystemSpec s;
  s.name = "doubling";
  s.kind = SystemKind::Doubling;
  s.space = SpaceKind::Circle;
  return s;
}

SystemSpec rotation(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotation angle must be finite");
  SystemSpec s;
  s.name = "rotation";
  s.kind = SystemKind::Rotation;
  s.space = SpaceKind::Circle;
  s.theta = theta - std::floor(theta);
  s.theta_turns = turns_from(theta);
  return s;
}

SystemSpec golden_rotation() {
  auto s = rotation((std::sqrt(5.0) - 1.0) / 2.0);
  s.name = "golden-rotation";
  return s;
}

SystemSpec intermittent_map(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("intermittency exponent alpha must lie in (0,1)");
  SystemSpec s;
  s.name = "intermittent";
  s.kind = SystemKind::Intermittent;
  s.space = SpaceKind::Circle;
  s.alpha = alpha;
  return s;
}

SystemSpec toral_automorphism(const IntMatrix2& matrix) {
  const std::int64_t det = matrix(0, 0) * matrix(1, 1) - matrix(0, 1) * matrix(1, 0);
  if (det != 1 && det != -1) throw std::domain_error("toral matrix must have determinant +-1");
  const Eigen::Matrix2d m = matrix.cast<double>();
  const Eigen::Vector2cd eig = m.eigenvalues();
  for (Eigen::Index i = 0; i < 2; ++i)
    if (std::abs(std::abs(eig(i)) - 1.0) < 1e-9)
      throw std::domain_error("toral matrix is not hyperbolic (eigenvalue of modulus 1)");
  SystemSpec s;
  s.name = "toral";
  s.kind = SystemKind::Toral;
  s.space = SpaceKind::Torus;
  s.toral = matrix;
  return s;
}

SystemSpec subshift(const Eigen::MatrixXi& transition, const Eigen::MatrixXd& markov,
                    std::optional<Eigen::VectorXd> initial, int window) {
  const Eigen::Index n = transition.rows();
  if (n < 1 || transition.cols() != n) throw std::invalid_argument("transition matrix must be square and nonempty");
  if (markov.rows() != n || markov.cols() != n) throw std::invalid_argument("Markov weights must match the transition matrix");
  if (window < 1 || window > static_cast<int>(kMaxWindow)) throw std::invalid_argument("window length must be in [1, 64]");
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (transition(i, j) != 0 && transition(i, j) != 1)
        throw std::domain_error("transition matrix entries must be 0 or 1");
      if (markov(i, j) < 0.0) throw std::domain_error("Markov weights must be nonnegative");
      if (transition(i, j) == 0 && markov(i, j) != 0.0)
        throw std::domain_error("Markov weights must be supported on allowed transitions");
      row += markov(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12) throw std::domain_error("Markov weights must be row-stochastic");
  }
  SystemSpec s;
  s.name = "subshift";
  s.kind = SystemKind::Shift;
  s.space = SpaceKind::Sequence;
  s.transition = transition;
  s.markov = markov;
  s.markov_cdf = markov;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 1; j < n; ++j) s.markov_cdf(i, j) += s.markov_cdf(i, j - 1);
  s.window = window;
  if (initial) {
    if (initial->size() != n) throw std::invalid_argument("initial distribution has the wrong size");
    if (std::abs(initial->sum() - 1.0) > 1e-12 || initial->minCoeff() < 0.0)
      throw std::domain_error("initial distribution must be a probability vector");
    if ((initial->transpose() * markov - initial->transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::domain_error("initial distribution is not stationary for the Markov weights");
    s.initial = initial;
  }
  return s;
}

SystemSpec full_shift(int symbols, int window) {
  if (symbols < 2 || symbols > 255) throw std::invalid_argument("alphabet size must be in [2, 255]");
  const Eigen::MatrixXi a = Eigen::MatrixXi::Ones(symbols, symbols);
  const Eigen::MatrixXd p = Eigen::MatrixXd::Constant(symbols, symbols, 1.0 / symbols);
  auto s = subshift(a, p, std::nullopt, window);
  s.name = "full-shift";
  return s;
}

SystemSpec dyadic_permutation(int rank) {
  if (rank < 1 || rank > 20) throw std::invalid_argument("dyadic permutation rank must be in [1, 20]");
  SystemSpec s;
  s.name = "dyadic-permutation";
  s.kind = SystemKind::DyadicPermutation;
  s.space = SpaceKind::Interval;
  s.rank = rank;
  return s;
}

std::vector<std::string> system_names() {
  return {"identity", "doubling", "rotation", "golden-rotation", "intermittent",
          "toral",    "full-shift", "golden-mean-shift", "subshift", "dyadic-permutation"};
}

// ---- stepping ---------------------------------------------------------------

namespace {

inline std::uint64_t next_tail_bit(CirclePoint& p) {
  if (p.tail.period > 0) return (p.turns >> (p.tail.period - 1)) & 1U;
  return hash_at(p.tail.seed, p.tail.pos++) >> 63;
}

inline void shift_in_bit(CirclePoint& p) {
  const std::uint64_t bit = next_tail_bit(p);
  p.turns = (p.turns << 1) | bit;
}

inline double intermittent_left(double t, double alpha) {
  return t + std::exp2(alpha) * std::pow(t, 1.0 + alpha);
}

inline int next_symbol(const SystemSpec& sys, SymbolPoint& p) {
  if (p.tail.period > 0) return p.at(p.length - p.tail.period);
  const int last = p.at(p.length - 1);
  const double u = to_unit(hash_at(p.tail.seed, p.tail.pos++));
  const Eigen::Index n = sys.markov_cdf.cols();
  int chosen = -1;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (sys.transition(last, j) == 0) continue;
    chosen = static_cast<int>(j);
    if (u < sys.markov_cdf(last, j)) break;
  }
  return chosen;
}

}  // namespace

void advance(const SystemSpec& sys, PhasePoint& x) {
  switch (sys.kind) {
    case SystemKind::Identity: return;
    case SystemKind::Doubling: shift_in_bit(std::get<CirclePoint>(x)); return;
    case SystemKind::Rotation: std::get<CirclePoint>(x).turns += sys.theta_turns; return;
    case SystemKind::Intermittent: {
      auto& p = std::get<CirclePoint>(x);
      if (p.turns >> 63) {  // right branch 2t - 1, exact in fixed point
        shift_in_bit(p);
      } else {
        const double h = intermittent_left(turns_to_double(p.turns), sys.alpha);
        p.turns = h >= 1.0 ? 0 : turns_from(h);
      }
      return;
    }
    case SystemKind::Toral: {
      auto& p = std::get<TorusPoint>(x);
      const auto a = sys.toral.cast<std::uint64_t>();  // arithmetic mod 2^64 == mod 1 in turns
      const std::uint64_t s = a(0, 0) * p.s + a(0, 1) * p.t;
      const std::uint64_t t = a(1, 0) * p.s + a(1, 1) * p.t;
      p.s = s;
      p.t = t;
      return;
    }
    case SystemKind::Shift: {
      auto& p = std::get<SymbolPoint>(x);
      const int next = next_symbol(sys, p);
      if (next < 0) throw std::domain_error("symbol has no admissible successor");
      p.ring[p.head] = static_cast<std::uint8_t>(next);
      p.head = static_cast<std::uint8_t>((p.head + 1) % p.length);
      return;
    }
    case SystemKind::DyadicPermutation: {
      auto& p = std::get<IntervalPoint>(x);
      if (p.t >= 1.0) return;
      const double cells = std::ldexp(1.0, sys.rank);
      const double j = std::floor(p.t * cells);
      const double r = p.t - j / cells;  // exact (Sterbenz)
      const double next = std::fmod(j + 1.0, cells);
      p.t = next / cells + r;
      return;
    }
  }
}

void validate_point(const SystemSpec& sys, const PhasePoint& x) {
  if (space_of(x) != sys.space)
    throw std::domain_error("point lies on " + to_string(space_of(x)) + ", system acts on " + to_string(sys.space));
  if (sys.space == SpaceKind::Interval) {
    const double t = std::get<IntervalPoint>(x).t;
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("interval coordinate outside [0,1]");
  }
  if (sys.space == SpaceKind::Sequence) {
    const auto& p = std::get<SymbolPoint>(x);
    if (p.length < 1) throw std::domain_error("empty symbol window");
    if (p.tail.period > p.length) throw std::domain_error("tail period exceeds window length");
    for (std::size_t i = 0; i < p.length; ++i) {
      if (p.at(i) >= sys.alphabet()) throw std::domain_error("illegal symbol in window");
      if (i + 1 < p.length && sys.transition(p.at(i), p.at(i + 1)) == 0)
        throw std::domain_error("inadmissible symbol window");
    }
  }
}

PhasePoint step(const SystemSpec& sys, const PhasePoint& x) {
  validate_point(sys, x);
  PhasePoint y = x;
  advance(sys, y);
  return y;
}

PhasePoint iterate(const SystemSpec& sys, PhasePoint x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) advance(sys, x);
  return x;
}

Trajectory orbit(const SystemSpec& sys, const PhasePoint& x0, std::size_t n) {
  validate_point(sys, x0);
  Trajectory tr;
  tr.initial = x0;
  if (const auto* c = std::get_if<CirclePoint>(&x0)) tr.seed = c->tail.seed;
  if (const auto* s = std::get_if<SymbolPoint>(&x0)) tr.seed = s->tail.seed;
  tr.points.reserve(n + 1);
  tr.points.push_back(x0);
  PhasePoint x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    advance(sys, x);
    tr.points.push_back(x);
  }
  return tr;
}

// ---- invariant measures -----------------------------------------------------

std::optional<int> primitivity_check(const Eigen::MatrixXi& a) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n) return std::nullopt;
  const Eigen::MatrixXi base = a.unaryExpr([](int v) { return v != 0 ? 1 : 0; });
  Eigen::MatrixXi power = base;
  const int bound = static_cast<int>((n - 1) * (n - 1) + 1);
  for (int m = 1; m <= bound; ++m) {
    if ((power.array() > 0).all()) return m;
    power = (power * base).unaryExpr([](int v) { return v != 0 ? 1 : 0; });
  }
  return std::nullopt;
}

Eigen::VectorXd stationary_vector(const SystemSpec& sys) {
  if (sys.kind != SystemKind::Shift) throw std::invalid_argument("stationary vectors belong to subshifts");
  if (sys.initial) return *sys.initial;
  if (!primitivity_check(sys.transition))
    throw std::domain_error("transition matrix is not primitive; supply an explicit stationary vector");
  const Eigen::Index n = sys.markov.rows();
  Eigen::MatrixXd lhs(n + 1, n);
  lhs.topRows(n) = sys.markov.transpose() - Eigen::MatrixXd::Identity(n, n);
  lhs.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd pi = lhs.colPivHouseholderQr().solve(rhs);
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

namespace {

int draw_index(const Eigen::VectorXd& probs, double u) {
  double acc = 0.0;
  int chosen = -1;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    if (probs(j) <= 0.0) continue;
    chosen = static_cast<int>(j);
    acc += probs(j);
    if (u < acc) break;
  }
  return chosen;
}

PhasePoint extend_word(const SystemSpec& sys, std::vector<int> word, SplitMix64& gen) {
  while (static_cast<int>(word.size()) < sys.window) {
    const int last = word.back();
    const Eigen::VectorXd row = sys.markov.row(last).transpose();
    const int next = draw_index(row, uniform01(gen));
    if (next < 0) throw std::domain_error("symbol has no admissible successor");
    word.push_back(next);
  }
  return symbol_point(word, TailRule{gen(), 0, 0});
}

PhasePoint draw_point(const SystemSpec& sys, std::uint64_t seed, std::size_t burn_in,
                      const Eigen::VectorXd* pi) {
  SplitMix64 gen(seed);
  switch (sys.kind) {
    case SystemKind::Identity:
      if (sys.space == SpaceKind::Circle) return CirclePoint{gen(), TailRule{gen(), 0, 0}};
      return IntervalPoint{uniform01(gen)};
    case SystemKind::DyadicPermutation: return IntervalPoint{uniform01(gen)};
    case SystemKind::Doubling:
    case SystemKind::Rotation: {
      const std::uint64_t turns = gen();
      return CirclePoint{turns, TailRule{gen(), 0, 0}};
    }
    case SystemKind::Intermittent: {
      const std::uint64_t turns = gen();
      PhasePoint x = CirclePoint{turns, TailRule{gen(), 0, 0}};
      for (std::size_t i = 0; i < burn_in; ++i) advance(sys, x);
      return x;
    }
    case SystemKind::Toral: {
      const std::uint64_t s = gen();
      return TorusPoint{s, gen()};
    }
    case SystemKind::Shift: {
      std::vector<int> word{draw_index(*pi, uniform01(gen))};
      return extend_word(sys, std::move(word), gen);
    }
  }
  throw std::logic_error("unhandled system kind");
}

}  // namespace

PhasePoint sample_point(const SystemSpec& sys, std::uint64_t seed, std::size_t burn_in) {
  if (sys.kind == SystemKind::Shift) {
    const Eigen::VectorXd pi = stationary_vector(sys);
    return draw_point(sys, seed, burn_in, &pi);
  }
  return draw_point(sys, seed, burn_in, nullptr);
}

EmpiricalMeasure sample_invariant(const SystemSpec& sys, std::size_t n, std::size_t burn_in,
                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_invariant needs n >= 1");
  Eigen::VectorXd pi;
  if (sys.kind == SystemKind::Shift) pi = stationary_vector(sys);
  EmpiricalMeasure mu;
  mu.space = sys.space;
  mu.seed = seed;
  mu.source = "sample_invariant:" + sys.name;
  mu.points.resize(n);
  mu.weights.assign(n, 1.0 / static_cast<double>(n));
  parallel_for(n, [&](std::size_t i) {
    mu.points[i] = draw_point(sys, derive_seed(seed, i), burn_in, sys.kind == SystemKind::Shift ? &pi : nullptr);
  });
  return mu;
}

PhasePoint cylinder_point(const SystemSpec& sys, std::span<const int> word, std::uint64_t seed) {
  if (sys.kind != SystemKind::Shift) throw std::invalid_argument("cylinder points belong to subshifts");
  if (word.empty() || static_cast<int>(word.size()) > sys.window)
    throw std::invalid_argument("cylinder word length must be in [1, window]");
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (sys.transition(word[i], word[i + 1]) == 0) throw std::domain_error("inadmissible cylinder word");
  SplitMix64 gen(seed);
  return extend_word(sys, std::vector<int>(word.begin(), word.end()), gen);
}

// ---- periodic points --------------------------------------------------------

namespace {

std::vector<PhasePoint> grid_points(SpaceKind space) {
  std::vector<PhasePoint> out;
  if (space == SpaceKind::Torus) {
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j) out.push_back(TorusPoint{turns_from(i / 32.0), turns_from(j / 32.0)});
    return out;
  }
  if (space == SpaceKind::Sequence) throw std::invalid_argument("no periodic grid on sequence spaces");
  for (int j = 0; j < 1024; ++j) {
    const double t = j / 1024.0;
    if (space == SpaceKind::Interval)
      out.push_back(IntervalPoint{t});
    else
      out.push_back(CirclePoint{turns_from(t), {}});
  }
  return out;
}

std::vector<PhasePoint> doubling_periodic(int period) {
  if (period > kMaxPeriod) throw std::invalid_argument("period above the enumeration cap");
  std::vector<PhasePoint> out;
  const std::uint64_t count = (std::uint64_t(1) << period) - 1;
  for (std::uint64_t k = 0; k < count; ++k) {
    // k / (2^p - 1) has binary expansion (k as p bits) repeated
    std::uint64_t turns = 0;
    for (int b = 0; b < 64; ++b) {
      const int pos = b % period;
      const std::uint64_t bit = (k >> (period - 1 - pos)) & 1U;
      turns |= bit << (63 - b);
    }
    out.push_back(CirclePoint{turns, TailRule{0, 0, static_cast<std::uint32_t>(period)}});
  }
  return out;
}

std::uint64_t fraction_turns(__int128 num, __int128 den) {
  // floor(num / den * 2^64) for 0 <= num < den
  const unsigned __int128 scaled = (static_cast<unsigned __int128>(num) << 64) / static_cast<unsigned __int128>(den);
  return static_cast<std::uint64_t>(scaled);
}

std::vector<PhasePoint> toral_periodic(const SystemSpec& sys, int period) {
  using M = IntegerMatrix<std::int64_t>;
  M a(2, 2);
  a << sys.toral(0, 0), sys.toral(0, 1), sys.toral(1, 0), sys.toral(1, 1);
  M power = M::Identity(2, 2);
  for (int i = 0; i < period; ++i) power = power * a;
  const M b = power - M::Identity(2, 2);
  const auto snf = smith_normal_form<std::int64_t>(b);
  const std::int64_t d1 = snf.D(0, 0), d2 = snf.D(1, 1);
  if (d1 == 0 || d2 == 0) throw std::domain_error("A^p - I is singular");
  if (d1 * d2 > (std::int64_t(1) << 20)) throw std::invalid_argument("too many periodic points to enumerate");
  std::vector<PhasePoint> out;
  const std::int64_t den[2] = {d1, d2};
  for (std::int64_t e1 = 0; e1 < d1; ++e1)
    for (std::int64_t e2 = 0; e2 < d2; ++e2) {
      const std::int64_t e[2] = {e1, e2};
      std::uint64_t coord[2] = {0, 0};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          __int128 num = static_cast<__int128>(snf.V(i, j)) * e[j] % den[j];
          if (num < 0) num += den[j];
          coord[i] += fraction_turns(num, den[j]);
        }
      out.push_back(TorusPoint{coord[0], coord[1]});
    }
  return out;
}

double intermittent_inverse(int branch, double y, double alpha) {
  if (branch == 1) return (y + 1.0) / 2.0;
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 80 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (intermittent_left(mid, alpha) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Lift of h^p along the lap with itinerary `word` (bit i = branch at step i).
double intermittent_lap_lift(double t, std::uint64_t word, int period, double alpha) {
  for (int i = 0; i < period; ++i) {
    const int branch = static_cast<int>((word >> i) & 1U);
    if (branch == 0) {
      t = std::clamp(t, 0.0, 0.5);
      t = intermittent_left(t, alpha);
    } else {
      t = std::clamp(t, 0.5, 1.0);
      t = 2.0 * t - 1.0;
    }
    if (i + 1 < period) t = std::clamp(t, 0.0, 1.0);
  }
  return t;
}

std::vector<PhasePoint> intermittent_periodic(const SystemSpec& sys, int period) {
  if (period > kMaxPeriod) throw std::invalid_argument("period above the enumeration cap");
  std::vector<PhasePoint> out;
  const std::uint64_t laps = std::uint64_t(1) << period;
  for (std::uint64_t word = 0; word < laps; ++word) {
    double lo = 0.0, hi = 1.0;
    for (int i = period - 1; i >= 0; --i) {
      const int branch = static_cast<int>((word >> i) & 1U);
      lo = intermittent_inverse(branch, lo, sys.alpha);
      hi = intermittent_inverse(branch, hi, sys.alpha);
    }
    // h^p - id goes from <= 0 to >= 0 across the lap
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (intermittent_lap_lift(mid, word, period, sys.alpha) - mid < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double root = 0.5 * (lo + hi);
    out.push_back(CirclePoint{root >= 1.0 ? 0 : turns_from(root), {}});
  }
  return out;
}

std::vector<PhasePoint> shift_periodic(const SystemSpec& sys, int period) {
  const int r = sys.alphabet();
  if (period > sys.window) throw std::invalid_argument("period exceeds the symbol window");
  const double words = std::pow(static_cast<double>(r), period);
  if (words > double(1 << 20)) throw std::invalid_argument("too many words to enumerate");
  std::vector<PhasePoint> out;
  std::vector<int> w(static_cast<std::size_t>(period));
  for (std::uint64_t code = 0; code < static_cast<std::uint64_t>(words); ++code) {
    std::uint64_t c = code;
    for (int i = period - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<int>(c % r);
      c /= r;
    }
    bool ok = true;
    for (int i = 0; i < period && ok; ++i) ok = sys.transition(w[i], w[(i + 1) % period]) != 0;
    if (!ok) continue;
    std::vector<int> window(static_cast<std::size_t>(sys.window));
    for (int i = 0; i < sys.window; ++i) window[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i % period)];
    out.push_back(symbol_point(window, TailRule{0, 0, static_cast<std::uint32_t>(period)}));
  }
  return out;
}

std::vector<PhasePoint> merge_close(std::vector<PhasePoint> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const PhasePoint& a, const PhasePoint& b) {
    return std::get<CirclePoint>(a).turns < std::get<CirclePoint>(b).turns;
  });
  std::vector<PhasePoint> out;
  for (auto& p : pts)
    if (out.empty() || distance(p, out.back()) > tol) out.push_back(std::move(p));
  if (out.size() > 1 && distance(out.front(), out.back()) <= tol) out.pop_back();
  return out;
}

}  // namespace

std::vector<PhasePoint> periodic_points(const SystemSpec& sys, int period, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("periodic point tolerance must be positive");
  if (period < 1) throw std::invalid_argument("period must be at least 1");
  std::vector<PhasePoint> candidates;
  switch (sys.kind) {
    case SystemKind::Identity: return grid_points(sys.space);
    case SystemKind::Rotation: {
      const std::uint64_t shift = sys.theta_turns * static_cast<std::uint64_t>(period);
      if (distance(CirclePoint{shift, {}}, CirclePoint{0, {}}) <= tol) return grid_points(sys.space);
      return {};
    }
    case SystemKind::DyadicPermutation:
      if (period % (1 << sys.rank) == 0) return grid_points(sys.space);
      return {};
    case SystemKind::Doubling: return doubling_periodic(period);
    case SystemKind::Toral: candidates = toral_periodic(sys, period); break;
    case SystemKind::Intermittent: candidates = intermittent_periodic(sys, period); break;
    case SystemKind::Shift: return shift_periodic(sys, period);
  }
  if (sys.kind == SystemKind::Intermittent) candidates = merge_close(std::move(candidates), tol);
  std::vector<PhasePoint> out;
  for (auto& x : candidates)
    if (distance(iterate(sys, x, static_cast<std::size_t>(period)), x) <= tol) out.push_back(std::move(x));
  return out;
}

}  // namespace tracial
