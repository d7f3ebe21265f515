#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tracial/dynamics.hpp"
#include "tracial/empirical_measure.hpp"
#include "tracial/ergodic_stats.hpp"
#include "tracial/measures.hpp"
#include "tracial/observables.hpp"

namespace tracial {

/// A trace, identified with its representing measure on the extreme boundary.
struct Trace {
  EmpiricalMeasure measure;
  std::string label;
};

/// The evaluation function a^ of a self-adjoint element a.
struct TracialObservable {
  Observable hat;
  std::string label;
};

Trace make_trace(EmpiricalMeasure mu, std::string label = "trace");
Trace dirac_trace(const PhasePoint& x, std::string label = "delta");

/// Uniform measure on the points of period `period`; invariant whenever that
/// set is (doubling, shifts, toral maps). For the doubling map it is an
/// exactly invariant finite proxy of Lebesgue measure.
Trace periodic_trace(const SystemSpec& sys, int period);

/// A support of one point: the trace is extreme.
bool is_extreme(const Trace& tau);

TracialObservable tracial_observable(Observable hat, std::string label = "");

/// tau(a) = sum_i w_i a^(x_i), correctly rounded, so it does not depend on
/// the order of the support.
double trace_eval(const TracialObservable& a, const Trace& tau);

/// lambda tau1 + (1 - lambda) tau2 by weight concatenation.
Trace trace_mixture(const Trace& tau1, const Trace& tau2, double lambda);

Trace trace_pushforward(const SystemSpec& h, const Trace& tau);
Trace trace_pushforward(const PointMap& h, const Trace& tau, const std::string& name = "h");

/// a o h, the element whose evaluation is a^ o h.
TracialObservable compose(const TracialObservable& a, const SystemSpec& h);

/// (1/n) sum_{i<n} tau(alpha^i(a)), evaluated as tau pushed forward i times.
double tracial_ergodic_average(const TracialObservable& a, const SystemSpec& h, const Trace& tau, std::size_t n);

enum class BridgeKind { Edc, Clt, Asclt, Deviation };
std::string to_string(BridgeKind k);
BridgeKind bridge_kind_from_string(const std::string& s);

struct BridgeRequest {
  BridgeKind kind = BridgeKind::Clt;
  std::optional<TracialObservable> b;   // second element for edc (default a)
  long lags = 30;                       // edc
  std::optional<LagRange> window;       // edc
  std::size_t n = 1000;                 // clt, asclt
  std::size_t trials = 1000;            // clt, deviation
  Normalization normalization = Normalization::Sqrt;
  std::optional<double> reference_sigma2;
  double eps = 0.1;                     // deviation
  std::vector<std::size_t> n_list{10, 20, 40, 80};
  std::uint64_t seed = 1;
};

struct StatReport {
  BridgeKind kind = BridgeKind::Clt;
  std::optional<CorrelationSeries> series;
  std::optional<EDCFit> edc;
  std::optional<CLTReport> clt;
  std::optional<ASCLTReport> asclt;
  std::optional<DeviationProfile> deviation;
};

/// Runs the ergodic-stats operation with f = a^ and mu the representing
/// measure of tau. asclt follows the orbit of the first support point.
StatReport tracial_statistics_bridge(const TracialObservable& a, const SystemSpec& h, const Trace& tau,
                                     const BridgeRequest& request);

/// Measure CSV with metadata role=trace and label.
void write_trace_csv(std::ostream& out, const Trace& tau);
Trace read_trace_csv(std::istream& in);

}  // namespace tracial
