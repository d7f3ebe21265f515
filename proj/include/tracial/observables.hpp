#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "tracial/dynamics.hpp"
#include "tracial/phase_space.hpp"

namespace tracial {

struct Lipschitz {
  double k = 1.0;
};

/// |f(x) - f(y)| <= c d(x,y)^eta
struct Holder {
  double eta = 1.0;
  double c = 1.0;
};

struct Continuous {};

using Regularity = std::variant<Lipschitz, Holder, Continuous>;

std::string to_string(const Regularity& r);

/// Real function on a phase space, tagged with its declared regularity.
struct Observable {
  std::string name;
  std::function<double(const PhasePoint&)> eval;
  Regularity regularity = Continuous{};

  double operator()(const PhasePoint& x) const { return eval(x); }
};

Observable constant_observable(double c);

/// f(t) = t. Lipschitz on the interval; on the circle it jumps at 0 and is
/// tagged Continuous, which only excludes it from the CLT tests.
Observable coordinate_observable(SpaceKind space = SpaceKind::Interval);

/// cos(2 pi m t) on the first coordinate (interval, circle or torus).
Observable cosine_observable(int frequency = 1);

/// Indicator of the cylinder [x_position = symbol].
Observable cylinder_indicator(int symbol, int position = 0);

/// f - c
Observable shifted(const Observable& f, double c);

/// Global Lipschitz constant of sys on its space, if it has one.
std::optional<double> lipschitz_constant(const SystemSpec& sys);

/// g o h - g, with regularity derived from g and h.
Observable coboundary(const Observable& g, const SystemSpec& sys);

/// Samples `pairs` random pairs at scales from 1 down to 2^-30 and checks the
/// declared bound (1e-12 slack). Continuous observables always pass.
bool check_regularity(const Observable& f, SpaceKind space, std::size_t pairs = 1000,
                      std::uint64_t seed = 1, int alphabet = 2);

}  // namespace tracial
