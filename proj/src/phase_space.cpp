#include "tracial/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tracial {

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Interval: return "interval";
    case SpaceKind::Circle: return "circle";
    case SpaceKind::Torus: return "torus";
    case SpaceKind::Sequence: return "sequence";
  }
  return "unknown";
}

SpaceKind space_kind_from_string(const std::string& name) {
  if (name == "interval") return SpaceKind::Interval;
  if (name == "circle") return SpaceKind::Circle;
  if (name == "torus") return SpaceKind::Torus;
  if (name == "sequence") return SpaceKind::Sequence;
  throw std::invalid_argument("unknown phase space '" + name + "'");
}

std::vector<int> SymbolPoint::word() const {
  std::vector<int> w(length);
  for (std::size_t i = 0; i < length; ++i) w[i] = at(i);
  return w;
}

bool SymbolPoint::operator==(const SymbolPoint& other) const {
  if (length != other.length || !(tail == other.tail)) return false;
  for (std::size_t i = 0; i < length; ++i)
    if (at(i) != other.at(i)) return false;
  return true;
}

SpaceKind space_of(const PhasePoint& x) noexcept {
  return static_cast<SpaceKind>(x.index());
}

std::uint64_t turns_from(double t) noexcept {
  t -= std::floor(t);
  if (!(t < 1.0)) t = 0.0;
  // exact: scaling by a power of two, result < 2^64
  return static_cast<std::uint64_t>(std::ldexp(t, 64));
}

double turns_to_double(std::uint64_t turns) noexcept {
  return static_cast<double>(turns >> 11) * 0x1.0p-53;
}

PhasePoint interval_point(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("interval coordinate outside [0,1]");
  return IntervalPoint{t};
}

PhasePoint circle_point(double t, TailRule tail) { return CirclePoint{turns_from(t), tail}; }

PhasePoint torus_point(double s, double t) { return TorusPoint{turns_from(s), turns_from(t)}; }

PhasePoint symbol_point(std::span<const int> word, TailRule tail) {
  if (word.empty() || word.size() > kMaxWindow)
    throw std::invalid_argument("symbol window length must be in [1, 64]");
  SymbolPoint p;
  p.length = static_cast<std::uint8_t>(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] < 0 || word[i] > 255) throw std::domain_error("symbol out of range");
    p.ring[i] = static_cast<std::uint8_t>(word[i]);
  }
  p.tail = tail;
  return p;
}

std::vector<double> coordinates(const PhasePoint& x) {
  return std::visit(
      [](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, IntervalPoint>) {
          return {p.t};
        } else if constexpr (std::is_same_v<T, CirclePoint>) {
          return {turns_to_double(p.turns)};
        } else if constexpr (std::is_same_v<T, TorusPoint>) {
          return {turns_to_double(p.s), turns_to_double(p.t)};
        } else {
          std::vector<double> out(p.length);
          for (std::size_t i = 0; i < p.length; ++i) out[i] = p.at(i);
          return out;
        }
      },
      x);
}

double coordinate(const PhasePoint& x) {
  switch (space_of(x)) {
    case SpaceKind::Interval: return std::get<IntervalPoint>(x).t;
    case SpaceKind::Circle: return turns_to_double(std::get<CirclePoint>(x).turns);
    case SpaceKind::Torus: return turns_to_double(std::get<TorusPoint>(x).s);
    case SpaceKind::Sequence: break;
  }
  throw std::domain_error("sequence points have no real coordinate");
}

namespace {

double arc(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t d = a - b;
  return static_cast<double>(std::min(d, std::uint64_t(0) - d)) * 0x1.0p-64;
}

}  // namespace

double distance(const PhasePoint& x, const PhasePoint& y) {
  if (x.index() != y.index()) throw std::invalid_argument("distance between points of different spaces");
  switch (space_of(x)) {
    case SpaceKind::Interval:
      return std::abs(std::get<IntervalPoint>(x).t - std::get<IntervalPoint>(y).t);
    case SpaceKind::Circle:
      return arc(std::get<CirclePoint>(x).turns, std::get<CirclePoint>(y).turns);
    case SpaceKind::Torus: {
      const auto& a = std::get<TorusPoint>(x);
      const auto& b = std::get<TorusPoint>(y);
      return std::hypot(arc(a.s, b.s), arc(a.t, b.t));
    }
    case SpaceKind::Sequence: {
      const auto& a = std::get<SymbolPoint>(x);
      const auto& b = std::get<SymbolPoint>(y);
      const std::size_t n = std::min(a.length, b.length);
      for (std::size_t j = 0; j < n; ++j)
        if (a.at(j) != b.at(j)) return std::ldexp(1.0, -static_cast<int>(j));
      return 0.0;
    }
  }
  return 0.0;
}

std::uint64_t cell_count(SpaceKind space, int depth, int alphabet) {
  if (depth < 0 || depth > 31) throw std::invalid_argument("cell depth must be in [0, 31]");
  switch (space) {
    case SpaceKind::Interval:
    case SpaceKind::Circle: return std::uint64_t(1) << depth;
    case SpaceKind::Torus: return std::uint64_t(1) << (2 * depth);
    case SpaceKind::Sequence: {
      std::uint64_t n = 1;
      for (int i = 0; i < depth; ++i) n *= static_cast<std::uint64_t>(alphabet);
      return n;
    }
  }
  return 0;
}

namespace {

std::uint64_t top_bits(std::uint64_t turns, int depth) {
  return depth == 0 ? 0 : turns >> (64 - depth);
}

}  // namespace

Cell cell_of(const PhasePoint& x, int depth, int alphabet) {
  switch (space_of(x)) {
    case SpaceKind::Interval: {
      const double cells = std::ldexp(1.0, depth);
      const auto i = static_cast<std::uint64_t>(std::min(cells - 1, std::floor(std::get<IntervalPoint>(x).t * cells)));
      return {depth, i};
    }
    case SpaceKind::Circle: return {depth, top_bits(std::get<CirclePoint>(x).turns, depth)};
    case SpaceKind::Torus: {
      const auto& p = std::get<TorusPoint>(x);
      return {depth, (top_bits(p.s, depth) << depth) | top_bits(p.t, depth)};
    }
    case SpaceKind::Sequence: {
      const auto& p = std::get<SymbolPoint>(x);
      if (depth > p.length) throw std::invalid_argument("cylinder deeper than the symbol window");
      std::uint64_t code = 0;
      for (int i = 0; i < depth; ++i) code = code * alphabet + p.at(i);
      return {depth, code};
    }
  }
  return {};
}

bool in_cell(const PhasePoint& x, const Cell& cell, int alphabet) {
  return cell_of(x, cell.depth, alphabet) == cell;
}

int depth_for_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const int depth = static_cast<int>(std::ceil(-std::log2(eps) - 1e-12));
  return std::clamp(depth, 0, 31);
}

PhasePoint cell_point(SpaceKind space, const Cell& cell, double u, double v) {
  const double side = std::ldexp(1.0, -cell.depth);
  switch (space) {
    case SpaceKind::Interval: return IntervalPoint{(static_cast<double>(cell.code) + u) * side};
    case SpaceKind::Circle: return CirclePoint{turns_from((static_cast<double>(cell.code) + u) * side), {}};
    case SpaceKind::Torus: {
      const std::uint64_t mask = (std::uint64_t(1) << cell.depth) - 1;
      const double i = static_cast<double>(cell.code >> cell.depth);
      const double j = static_cast<double>(cell.code & mask);
      return TorusPoint{turns_from((i + u) * side), turns_from((j + v) * side)};
    }
    case SpaceKind::Sequence: break;
  }
  throw std::invalid_argument("cylinder cells need a system to extend the word");
}

std::vector<int> cell_word(const Cell& cell, int alphabet) {
  std::vector<int> w(static_cast<std::size_t>(cell.depth));
  std::uint64_t code = cell.code;
  for (int i = cell.depth - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = static_cast<int>(code % alphabet);
    code /= alphabet;
  }
  return w;
}

}  // namespace tracial
