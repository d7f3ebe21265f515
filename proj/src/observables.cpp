#include "tracial/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tracial/random.hpp"

namespace tracial {

std::string to_string(const Regularity& r) {
  std::ostringstream out;
  if (const auto* l = std::get_if<Lipschitz>(&r)) out << "lipschitz(" << l->k << ")";
  else if (const auto* h = std::get_if<Holder>(&r)) out << "holder(" << h->eta << "," << h->c << ")";
  else out << "continuous";
  return out.str();
}

Observable constant_observable(double c) {
  std::ostringstream name;
  name << "const(" << c << ")";
  return {name.str(), [c](const PhasePoint&) { return c; }, Lipschitz{0.0}};
}

Observable coordinate_observable(SpaceKind space) {
  Observable f{"t", [](const PhasePoint& x) { return coordinate(x); }, Lipschitz{1.0}};
  if (space != SpaceKind::Interval) f.regularity = Continuous{};
  return f;
}

Observable cosine_observable(int frequency) {
  const double m = frequency;
  return {"cos(2pi*" + std::to_string(frequency) + "t)",
          [m](const PhasePoint& x) { return std::cos(2.0 * std::numbers::pi * m * coordinate(x)); },
          Lipschitz{2.0 * std::numbers::pi * std::abs(m)}};
}

Observable cylinder_indicator(int symbol, int position) {
  if (position < 0 || position >= static_cast<int>(kMaxWindow))
    throw std::invalid_argument("cylinder position outside the symbol window");
  const auto p = static_cast<std::size_t>(position);
  return {"1[x_" + std::to_string(position) + "=" + std::to_string(symbol) + "]",
          [symbol, p](const PhasePoint& x) {
            const auto& s = std::get<SymbolPoint>(x);
            return s.at(p) == symbol ? 1.0 : 0.0;
          },
          Lipschitz{std::ldexp(1.0, position)}};
}

Observable shifted(const Observable& f, double c) {
  std::ostringstream name;
  name << f.name << "-" << c;
  return {name.str(), [e = f.eval, c](const PhasePoint& x) { return e(x) - c; }, f.regularity};
}

std::optional<double> lipschitz_constant(const SystemSpec& sys) {
  switch (sys.kind) {
    case SystemKind::Identity:
    case SystemKind::Rotation: return 1.0;
    case SystemKind::Doubling:
    case SystemKind::Shift: return 2.0;
    case SystemKind::Intermittent: return 2.0 + sys.alpha;
    case SystemKind::Toral: {
      // operator norm bounds the arc-length product metric distortion
      const Eigen::Matrix2d a = sys.toral.cast<double>();
      return Eigen::JacobiSVD<Eigen::Matrix2d>(a).singularValues()(0);
    }
    case SystemKind::DyadicPermutation: return std::nullopt;
  }
  return std::nullopt;
}

Observable coboundary(const Observable& g, const SystemSpec& sys) {
  Observable f;
  f.name = g.name + "oh-" + g.name;
  f.eval = [e = g.eval, sys](const PhasePoint& x) { return e(step(sys, x)) - e(x); };
  const auto lh = lipschitz_constant(sys);
  if (const auto* l = std::get_if<Lipschitz>(&g.regularity); l && lh) f.regularity = Lipschitz{l->k * (*lh + 1.0)};
  else if (const auto* h = std::get_if<Holder>(&g.regularity); h && lh)
    f.regularity = Holder{h->eta, h->c * (std::pow(*lh, h->eta) + 1.0)};
  else f.regularity = Continuous{};
  return f;
}

namespace {

std::pair<PhasePoint, PhasePoint> random_pair(SpaceKind space, SplitMix64& gen, int alphabet) {
  const double scale = std::ldexp(1.0, -static_cast<int>(gen() % 31));
  auto near = [&](double t) { return t + scale * (2.0 * uniform01(gen) - 1.0); };
  switch (space) {
    case SpaceKind::Interval: {
      const double t = uniform01(gen);
      return {interval_point(t), interval_point(std::clamp(near(t), 0.0, 1.0))};
    }
    case SpaceKind::Circle: {
      const double t = uniform01(gen);
      return {circle_point(t), circle_point(near(t))};
    }
    case SpaceKind::Torus: {
      const double s = uniform01(gen), t = uniform01(gen);
      return {torus_point(s, t), torus_point(near(s), near(t))};
    }
    case SpaceKind::Sequence: {
      std::vector<int> a(kMaxWindow), b(kMaxWindow);
      for (auto& s : a) s = static_cast<int>(gen() % static_cast<std::uint64_t>(alphabet));
      for (auto& s : b) s = static_cast<int>(gen() % static_cast<std::uint64_t>(alphabet));
      const std::size_t common = gen() % kMaxWindow;
      std::copy_n(a.begin(), common, b.begin());
      return {symbol_point(a), symbol_point(b)};
    }
  }
  throw std::logic_error("unknown space");
}

}  // namespace

bool check_regularity(const Observable& f, SpaceKind space, std::size_t pairs, std::uint64_t seed, int alphabet) {
  if (std::holds_alternative<Continuous>(f.regularity)) return true;
  SplitMix64 gen(seed);
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto [x, y] = random_pair(space, gen, alphabet);
    const double d = distance(x, y);
    const double bound = std::holds_alternative<Lipschitz>(f.regularity)
                             ? std::get<Lipschitz>(f.regularity).k * d
                             : std::get<Holder>(f.regularity).c * std::pow(d, std::get<Holder>(f.regularity).eta);
    if (std::abs(f(x) - f(y)) > bound + 1e-12) return false;
  }
  return true;
}

}  // namespace tracial
