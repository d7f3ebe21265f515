#include "tracial/tracial.hpp"

#include <map>
#include <stdexcept>

namespace tracial {

Trace make_trace(EmpiricalMeasure mu, std::string label) { return {std::move(mu), std::move(label)}; }

Trace dirac_trace(const PhasePoint& x, std::string label) {
  return {empirical_measure({x}), std::move(label)};
}

Trace periodic_trace(const SystemSpec& sys, int period) {
  auto pts = periodic_points(sys, period, 1e-12);
  if (pts.empty()) throw std::domain_error("no points of period " + std::to_string(period));
  auto mu = empirical_measure(std::move(pts));
  mu.source = "periodic_points";
  return {std::move(mu), sys.name + "-period-" + std::to_string(period)};
}

bool is_extreme(const Trace& tau) {
  std::size_t charged = 0;
  for (double w : tau.measure.weights) charged += w > 0.0 ? 1 : 0;
  if (charged <= 1) return true;
  const PhasePoint* first = nullptr;
  for (std::size_t i = 0; i < tau.measure.size(); ++i) {
    if (tau.measure.weights[i] == 0.0) continue;
    if (!first) first = &tau.measure.points[i];
    else if (!(tau.measure.points[i] == *first)) return false;
  }
  return true;
}

TracialObservable tracial_observable(Observable hat, std::string label) {
  if (label.empty()) label = hat.name;
  return {std::move(hat), std::move(label)};
}

double trace_eval(const TracialObservable& a, const Trace& tau) {
  ExactSum acc;
  for (std::size_t i = 0; i < tau.measure.size(); ++i) acc.add(tau.measure.weights[i] * a.hat(tau.measure.points[i]));
  return acc.value();
}

Trace trace_mixture(const Trace& tau1, const Trace& tau2, double lambda) {
  return {mixture(tau1.measure, tau2.measure, lambda), "mix(" + tau1.label + "," + tau2.label + ")"};
}

Trace trace_pushforward(const SystemSpec& h, const Trace& tau) {
  return {pushforward_measure(h, tau.measure), h.name + "_*" + tau.label};
}

Trace trace_pushforward(const PointMap& h, const Trace& tau, const std::string& name) {
  return {pushforward_measure(h, tau.measure), name + "_*" + tau.label};
}

TracialObservable compose(const TracialObservable& a, const SystemSpec& h) {
  Observable f;
  f.name = a.hat.name + "o" + h.name;
  f.eval = [e = a.hat.eval, h](const PhasePoint& x) { return e(step(h, x)); };
  const auto lh = lipschitz_constant(h);
  if (const auto* l = std::get_if<Lipschitz>(&a.hat.regularity); l && lh) f.regularity = Lipschitz{l->k * *lh};
  else f.regularity = Continuous{};
  return {std::move(f), a.label + "oh"};
}

double tracial_ergodic_average(const TracialObservable& a, const SystemSpec& h, const Trace& tau, std::size_t n) {
  if (n == 0) throw std::invalid_argument("tracial_ergodic_average needs n >= 1");
  if (h.space != tau.measure.space) throw std::invalid_argument("trace and map live on different spaces");
  EmpiricalMeasure mu = tau.measure;
  ExactSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    acc.add(trace_eval(a, Trace{mu, tau.label}));
    if (i + 1 < n)
      for (auto& p : mu.points) advance(h, p);
  }
  return acc.value() / static_cast<double>(n);
}

std::string to_string(BridgeKind k) {
  switch (k) {
    case BridgeKind::Edc: return "edc";
    case BridgeKind::Clt: return "clt";
    case BridgeKind::Asclt: return "asclt";
    case BridgeKind::Deviation: return "deviation";
  }
  return "?";
}

BridgeKind bridge_kind_from_string(const std::string& s) {
  if (s == "edc") return BridgeKind::Edc;
  if (s == "clt") return BridgeKind::Clt;
  if (s == "asclt") return BridgeKind::Asclt;
  if (s == "deviation") return BridgeKind::Deviation;
  throw std::invalid_argument("unknown statistics request '" + s + "'");
}

StatReport tracial_statistics_bridge(const TracialObservable& a, const SystemSpec& h, const Trace& tau,
                                     const BridgeRequest& req) {
  StatReport r;
  r.kind = req.kind;
  const auto& mu = tau.measure;
  switch (req.kind) {
    case BridgeKind::Edc: {
      const auto& b = req.b ? req.b->hat : a.hat;
      r.series = correlation_series(a.hat, b, h, mu, req.lags);
      r.edc = edc_fit(*r.series, req.window);
      break;
    }
    case BridgeKind::Clt:
      r.clt = clt_test(a.hat, h, mu, req.n, req.trials, req.normalization, req.reference_sigma2, req.seed);
      break;
    case BridgeKind::Asclt:
      r.asclt = asclt_test(a.hat, h, mu.points.front(), req.n, 0.0, req.reference_sigma2);
      break;
    case BridgeKind::Deviation:
      r.deviation = deviation_profile(a.hat, h, mu, req.eps, req.n_list, req.trials, req.seed);
      break;
  }
  return r;
}

void write_trace_csv(std::ostream& out, const Trace& tau) {
  write_measure_csv(out, tau.measure, {{"role", "trace"}, {"label", tau.label}});
}

Trace read_trace_csv(std::istream& in) {
  std::map<std::string, std::string> meta;
  auto mu = read_measure_csv(in, &meta);
  const auto role = meta.find("role");
  if (role != meta.end() && role->second != "trace") throw std::invalid_argument("CSV role is '" + role->second + "', not trace");
  const auto label = meta.find("label");
  return {std::move(mu), label == meta.end() ? "trace" : label->second};
}

}  // namespace tracial
