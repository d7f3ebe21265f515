#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tracial {

enum class SpaceKind { Interval, Circle, Torus, Sequence };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& name);

/// Rule producing the digits that expanding maps shift in from beyond the
/// stored precision. period == 0: hashed from (seed, pos). period > 0: the
/// stored digits repeat with that period, which makes periodic points exact.
struct TailRule {
  std::uint64_t seed = 0;
  std::uint64_t pos = 0;
  std::uint32_t period = 0;
  bool operator==(const TailRule&) const = default;
};

/// t in [0,1] with the Euclidean metric.
struct IntervalPoint {
  double t = 0.0;
  bool operator==(const IntervalPoint&) const = default;
};

/// Angle in turns stored as 64-bit fixed point, so rotations and toral maps
/// are exact modulo 1 and the doubling map does not collapse to 0.
struct CirclePoint {
  std::uint64_t turns = 0;
  TailRule tail{};
  bool operator==(const CirclePoint&) const = default;
};

struct TorusPoint {
  std::uint64_t s = 0;
  std::uint64_t t = 0;
  bool operator==(const TorusPoint&) const = default;
};

inline constexpr std::size_t kMaxWindow = 64;

/// Finite window of a one-sided symbol sequence, stored as a ring buffer.
struct SymbolPoint {
  std::array<std::uint8_t, kMaxWindow> ring{};
  std::uint8_t head = 0;
  std::uint8_t length = 0;
  TailRule tail{};

  std::uint8_t at(std::size_t i) const noexcept { return ring[(head + i) % length]; }
  std::vector<int> word() const;
  bool operator==(const SymbolPoint& other) const;
};

using PhasePoint = std::variant<IntervalPoint, CirclePoint, TorusPoint, SymbolPoint>;

SpaceKind space_of(const PhasePoint& x) noexcept;

std::uint64_t turns_from(double t) noexcept;  // t reduced mod 1 first
double turns_to_double(std::uint64_t turns) noexcept;

PhasePoint interval_point(double t);
PhasePoint circle_point(double t, TailRule tail = {});
PhasePoint torus_point(double s, double t);
PhasePoint symbol_point(std::span<const int> word, TailRule tail = {});

/// Real coordinates (one for interval/circle, two for the torus, the window
/// symbols for sequences).
std::vector<double> coordinates(const PhasePoint& x);

/// First coordinate as a double; throws for sequence points.
double coordinate(const PhasePoint& x);

/// The metric of the point's space: Euclidean on the interval, arc length on
/// the circle (diameter 1/2), the product of arc metrics on the torus, and
/// 2^{-j} for first disagreement at index j on sequences.
double distance(const PhasePoint& x, const PhasePoint& y);

// ---- dyadic grid cells ------------------------------------------------------

/// A half-open dyadic cell of side 2^{-depth} (interval, circle), a product of
/// two such (torus, code = i * 2^depth + j), or a length-`depth` cylinder
/// (sequences, code = word read in base `alphabet`).
struct Cell {
  int depth = 0;
  std::uint64_t code = 0;
  bool operator==(const Cell&) const = default;
};

std::uint64_t cell_count(SpaceKind space, int depth, int alphabet = 2);
Cell cell_of(const PhasePoint& x, int depth, int alphabet = 2);
bool in_cell(const PhasePoint& x, const Cell& cell, int alphabet = 2);

/// Cell side 2^{-depth} matching a resolution eps (eps rounded down to a power of two).
int depth_for_eps(double eps);

/// Geometric centre of a cell, plus `offset` in [0,1)^2 cell units when given.
PhasePoint cell_point(SpaceKind space, const Cell& cell, double u = 0.5, double v = 0.5);

/// Symbols of a cylinder cell.
std::vector<int> cell_word(const Cell& cell, int alphabet);

}  // namespace tracial
