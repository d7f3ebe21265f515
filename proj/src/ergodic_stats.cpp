#include "tracial/ergodic_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tracial/parallel.hpp"
#include "tracial/random.hpp"

namespace tracial {

// ---- exact summation ----------------------------------------------------------

void ExactSum::add(double x) {
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactSum::value() const {
  // round-half-even correction as in Python's math.fsum
  if (partials_.empty()) return 0.0;
  std::size_t n = partials_.size();
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

// ---- ergodic sums -------------------------------------------------------------

double ergodic_sum(const Observable& f, const SystemSpec& sys, const PhasePoint& x, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ergodic_sum needs n >= 1");
  validate_point(sys, x);
  PhasePoint y = x;
  ExactSum acc;
  for (std::size_t k = 0; k < n; ++k) {
    acc.add(f(y));
    if (k + 1 < n) advance(sys, y);
  }
  return acc.value();
}

double birkhoff_average(const Observable& f, const SystemSpec& sys, const PhasePoint& x, std::size_t n) {
  return ergodic_sum(f, sys, x, n) / static_cast<double>(n);
}

std::vector<PhasePoint> draw_initial_points(const EmpiricalMeasure& mu, std::size_t trials, std::uint64_t seed) {
  if (mu.size() == 0) throw std::invalid_argument("cannot draw from an empty measure");
  const bool uniform = std::all_of(mu.weights.begin(), mu.weights.end(),
                                   [&](double w) { return w == mu.weights.front(); });
  if (uniform && trials <= mu.size()) return {mu.points.begin(), mu.points.begin() + static_cast<long>(trials)};
  std::vector<double> cdf(mu.size());
  std::partial_sum(mu.weights.begin(), mu.weights.end(), cdf.begin());
  std::vector<PhasePoint> out;
  out.reserve(trials);
  SplitMix64 gen(derive_seed(seed, 0x5eed));
  for (std::size_t i = 0; i < trials; ++i) {
    const double u = uniform01(gen) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    out.push_back(mu.points[static_cast<std::size_t>(it - cdf.begin())]);
  }
  return out;
}

namespace {

void require_space(const SystemSpec& sys, const EmpiricalMeasure& mu) {
  if (sys.space != mu.space) throw std::invalid_argument("measure and system live on different spaces");
}

// orbit sums S_n for each start
std::vector<double> orbit_sums(const Observable& f, const SystemSpec& sys, const std::vector<PhasePoint>& starts,
                               std::size_t n) {
  std::vector<double> out(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    PhasePoint y = starts[i];
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s += f(y);
      if (k + 1 < n) advance(sys, y);
    }
    out[i] = s;
  });
  return out;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

constexpr std::size_t kBlock = 1024;

// Two passes over the orbits in fixed blocks, so memory stays O(len) and the
// reduction order does not depend on the worker count. gv holds g(x_i).
CorrelationSeries correlation_core(const Observable& f, const std::vector<double>& gv, const SystemSpec& sys,
                                   const std::vector<PhasePoint>& starts, const std::vector<double>& w,
                                   std::size_t len) {
  const std::size_t m = starts.size();
  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  auto run = [&](auto&& per_sample, std::size_t width) {
    std::vector<std::vector<double>> partial(blocks);
    parallel_for(blocks, [&](std::size_t b) {
      auto& acc = partial[b];
      acc.assign(width, 0.0);
      std::vector<double> row(len);
      for (std::size_t i = b * kBlock; i < std::min(m, (b + 1) * kBlock); ++i) {
        PhasePoint y = starts[i];
        for (std::size_t k = 0; k < len; ++k) {
          row[k] = f(y);
          if (k + 1 < len) advance(sys, y);
        }
        per_sample(i, row, acc);
      }
    });
    std::vector<double> total(width, 0.0);
    for (const auto& acc : partial)
      for (std::size_t k = 0; k < width; ++k) total[k] += acc[k];
    return total;
  };

  double gbar = 0.0;
  // pass 1: A_n = sum w x_n g, F_n = sum w x_n
  const auto sums = run(
      [&](std::size_t i, const std::vector<double>& row, std::vector<double>& acc) {
        for (std::size_t k = 0; k < len; ++k) {
          acc[k] += w[i] * row[k] * gv[i];
          acc[len + k] += w[i] * row[k];
        }
      },
      2 * len);
  for (std::size_t i = 0; i < m; ++i) gbar += w[i] * gv[i];

  CorrelationSeries out;
  out.values.resize(len);
  out.se.assign(len, 0.0);
  out.samples = m;
  for (std::size_t k = 0; k < len; ++k) out.values[k] = sums[k] - gbar * sums[len + k];
  if (m < 2) return out;

  // pass 2: delete-one estimates, accumulated relative to the full estimate
  const auto dev = run(
      [&](std::size_t i, const std::vector<double>& row, std::vector<double>& acc) {
        const double r = 1.0 - w[i];
        const double gi = (gbar - w[i] * gv[i]) / r;
        for (std::size_t k = 0; k < len; ++k) {
          const double ai = (sums[k] - w[i] * row[k] * gv[i]) / r;
          const double fi = (sums[len + k] - w[i] * row[k]) / r;
          const double d = (ai - gi * fi) - out.values[k];
          acc[k] += d;
          acc[len + k] += d * d;
        }
      },
      2 * len);
  const double dm = static_cast<double>(m);
  for (std::size_t k = 0; k < len; ++k) {
    const double mean = dev[k] / dm;
    const double ss = std::max(0.0, dev[len + k] - dm * mean * mean);
    out.se[k] = std::sqrt(ss * (dm - 1.0) / dm);
  }
  return out;
}

}  // namespace

CorrelationSeries correlation_series(const Observable& f, const Observable& g, const SystemSpec& sys,
                                     const EmpiricalMeasure& mu, long N) {
  if (N < 0) throw std::invalid_argument("correlation_series needs N >= 0");
  require_space(sys, mu);
  const auto len = static_cast<std::size_t>(N) + 1;
  std::vector<double> gv(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) gv[i] = g(mu.points[i]);
  auto out = correlation_core(f, gv, sys, mu.points, mu.weights, len);
  out.seed = mu.seed;
  return out;
}

// ---- decay fit ----------------------------------------------------------------

std::string to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Ok: return "ok";
    case FitStatus::NonDecaying: return "non-decaying";
    case FitStatus::PoorFit: return "poor-fit";
    case FitStatus::NoSignal: return "no-signal";
  }
  return "?";
}

EDCFit edc_fit(const CorrelationSeries& series, std::optional<LagRange> window) {
  const std::size_t len = series.values.size();
  if (len == 0) throw std::invalid_argument("empty correlation series");
  auto above = [&](std::size_t n) {
    const double se = n < series.se.size() ? series.se[n] : 0.0;
    return std::abs(series.values[n]) > 3.0 * se && series.values[n] != 0.0;
  };
  LagRange w;
  if (window) {
    if (window->first > window->last || window->last >= len) throw std::invalid_argument("fit window outside the series");
    w = *window;
  } else {
    std::size_t last = 0;
    while (last < len && above(last)) ++last;
    if (last == 0) return {FitStatus::NoSignal, 0, 0, 0, 0, 0, 0, 0};
    w = {0, last - 1};
  }
  std::vector<double> xs, ys, noise;
  for (std::size_t n = w.first; n <= w.last; ++n) {
    if (!above(n)) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(std::abs(series.values[n])));
    const double se = n < series.se.size() ? series.se[n] : 0.0;
    noise.push_back(se / std::abs(series.values[n]));
  }
  EDCFit fit;
  fit.first = w.first;
  fit.last = w.last;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double icept = my - slope * mx;
  double rss = 0.0, nss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (icept + slope * xs[i]);
    rss += r * r;
    nss += noise[i] * noise[i];
  }
  fit.C = std::exp(icept);
  fit.gamma = std::exp(slope);
  fit.residual = std::sqrt(rss / k);
  fit.threshold = std::max(kFitResidual, 2.0 * std::sqrt(nss / k));
  if (fit.gamma >= 1.0) fit.status = FitStatus::NonDecaying;
  else if (fit.residual > fit.threshold) fit.status = FitStatus::PoorFit;
  else fit.status = FitStatus::Ok;
  return fit;
}

// ---- variance -----------------------------------------------------------------

VarianceReport variance_estimate(const Observable& f, const SystemSpec& sys, const EmpiricalMeasure& mu,
                                 std::size_t n, std::size_t trials, std::uint64_t seed) {
  require_space(sys, mu);
  if (n == 0 || trials < 2) throw std::invalid_argument("variance_estimate needs n >= 1 and trials >= 2");
  const auto starts = draw_initial_points(mu, trials, seed);
  const auto sums = orbit_sums(f, sys, starts, n);
  const double sbar = mean_of(sums);
  const double dn = static_cast<double>(n), dt = static_cast<double>(trials);

  VarianceReport r;
  r.n = n;
  r.trials = trials;
  std::vector<double> sq(trials);
  for (std::size_t i = 0; i < trials; ++i) sq[i] = (sums[i] - sbar) * (sums[i] - sbar) / dn;
  r.direct = std::accumulate(sq.begin(), sq.end(), 0.0) / (dt - 1.0);
  double ss = 0.0;
  const double msq = mean_of(sq);
  for (double v : sq) ss += (v - msq) * (v - msq);
  r.direct_se = std::sqrt(ss / (dt - 1.0) / dt);

  const std::size_t len = std::min(kMaxGreenKuboLag, n - 1) + 1;
  std::vector<double> f0(trials);
  for (std::size_t i = 0; i < trials; ++i) f0[i] = f(starts[i]);
  const auto cs = correlation_core(f, f0, sys, starts, std::vector<double>(trials, 1.0 / dt), len);
  r.c0 = cs.values[0];
  r.green_kubo = cs.values[0];
  double var = cs.se[0] * cs.se[0];
  for (std::size_t k = 1; k < len; ++k) {
    if (std::abs(cs.values[k]) <= 2.0 * cs.se[k]) break;
    r.green_kubo += 2.0 * cs.values[k];
    var += 4.0 * cs.se[k] * cs.se[k];
    r.lags = k;
  }
  r.green_kubo_se = std::sqrt(var);
  r.agree = std::abs(r.direct - r.green_kubo) <=
            3.0 * std::sqrt(r.direct_se * r.direct_se + r.green_kubo_se * r.green_kubo_se);
  r.coboundary = !(r.c0 > 0.0) || r.direct / r.c0 < kCoboundaryRatio;
  return r;
}

// ---- CLT ----------------------------------------------------------------------

std::string to_string(Normalization n) { return n == Normalization::Sqrt ? "sqrt(n)" : "sqrt(n log n)"; }

Normalization normalization_from_string(const std::string& s) {
  if (s == "sqrt(n)" || s == "sqrt" || s == "sqrt_n") return Normalization::Sqrt;
  if (s == "sqrt(n log n)" || s == "sqrt_log" || s == "sqrt_n_log_n") return Normalization::SqrtLog;
  throw std::invalid_argument("unknown normalization '" + s + "'");
}

double normal_cdf(double z, double sigma2) {
  if (sigma2 <= 0.0) return z >= 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-z / std::sqrt(2.0 * sigma2));
}

double ks_normal(std::vector<double> values, std::vector<double> weights, double sigma2) {
  const std::size_t m = values.size();
  if (m == 0) throw std::invalid_argument("ks_normal needs at least one value");
  if (weights.empty()) weights.assign(m, 1.0);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double below = 0.0, d = 0.0;
  bool zero_seen = false;
  for (std::size_t i = 0; i < m;) {
    const double v = values[order[i]];
    if (sigma2 <= 0.0 && !zero_seen && v > 0.0) {
      d = std::max(d, std::abs(below / total - 1.0));
      zero_seen = true;
    }
    double group = 0.0;
    std::size_t j = i;
    for (; j < m && values[order[j]] == v; ++j) group += weights[order[j]];
    const double lo = below / total, hi = (below + group) / total;
    const double phi_minus = sigma2 <= 0.0 ? (v > 0.0 ? 1.0 : 0.0) : normal_cdf(v, sigma2);
    d = std::max({d, std::abs(lo - phi_minus), std::abs(hi - normal_cdf(v, sigma2))});
    below += group;
    i = j;
  }
  return std::min(1.0, d);
}

CLTReport clt_test(const Observable& f, const SystemSpec& sys, const EmpiricalMeasure& mu, std::size_t n,
                   std::size_t trials, Normalization normalization, std::optional<double> reference_sigma2,
                   std::uint64_t seed) {
  require_space(sys, mu);
  if (trials < 100) throw std::invalid_argument("clt_test needs at least 100 trials");
  if (n < 2) throw std::invalid_argument("clt_test needs n >= 2");
  if (std::holds_alternative<Continuous>(f.regularity))
    throw std::invalid_argument("clt_test needs a Lipschitz or Holder observable");
  const auto starts = draw_initial_points(mu, trials, seed);
  const auto sums = orbit_sums(f, sys, starts, n);
  const double sbar = mean_of(sums);
  const double dn = static_cast<double>(n), dt = static_cast<double>(trials);
  const double norm = normalization == Normalization::Sqrt ? std::sqrt(dn) : std::sqrt(dn * std::log(dn));

  CLTReport r;
  r.n = n;
  r.trials = trials;
  r.normalization = normalization;
  r.mean = sbar / dn;
  r.seed = seed;
  std::vector<double> z(trials);
  double ss = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    z[i] = (sums[i] - sbar) / norm;
    ss += z[i] * z[i];
  }
  r.sigma2 = ss / (dt - 1.0);
  std::vector<double> f0(trials);
  for (std::size_t i = 0; i < trials; ++i) f0[i] = f(starts[i]);
  const double fbar = mean_of(f0);
  double fv = 0.0;
  for (double v : f0) fv += (v - fbar) * (v - fbar);
  r.var_f = fv / (dt - 1.0);
  const double per_step = r.sigma2 * norm * norm / dn;  // Var(S_n) / n
  r.coboundary = !(r.var_f > 0.0) || per_step / r.var_f < kCoboundaryRatio;
  r.heaviside = r.coboundary;
  r.ks = ks_normal(z, {}, r.heaviside ? r.var_f : r.sigma2);
  if (reference_sigma2) {
    r.reference_sigma2 = reference_sigma2;
    r.ks_reference = ks_normal(z, {}, *reference_sigma2);
  }
  return r;
}

// ---- almost-sure CLT ----------------------------------------------------------

double harmonic_number(std::size_t n) {
  ExactSum acc;
  for (std::size_t k = n; k >= 1; --k) acc.add(1.0 / static_cast<double>(k));
  return acc.value();
}

ASCLTReport asclt_test(const Observable& f, const SystemSpec& sys, const PhasePoint& x, std::size_t n, double mean,
                       std::optional<double> reference_sigma2) {
  if (n < 100) throw std::invalid_argument("asclt_test needs n >= 100");
  validate_point(sys, x);
  ASCLTReport r;
  r.n = n;
  r.harmonic = harmonic_number(n);
  std::vector<double> values(n), weights(n);
  PhasePoint y = x;
  double s = 0.0, fm = 0.0, fm2 = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double v = f(y);
    const double delta = v - fm;
    fm += delta / static_cast<double>(k);
    fm2 += delta * (v - fm);
    s += v - mean;
    values[k - 1] = s / std::sqrt(static_cast<double>(k));
    weights[k - 1] = 1.0 / static_cast<double>(k);
    if (k < n) advance(sys, y);
  }
  r.scale = std::sqrt(fm2 / static_cast<double>(n - 1));
  double m2 = 0.0, near = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m2 += weights[i] * values[i] * values[i];
    if (std::abs(values[i]) < 0.1 * r.scale) near += weights[i];
  }
  r.sigma2 = m2 / r.harmonic;
  r.mass_near_zero = near / r.harmonic;
  if (reference_sigma2) r.ks_reference = ks_normal(values, weights, *reference_sigma2);
  r.ks = ks_normal(std::move(values), std::move(weights), r.sigma2);
  return r;
}

// ---- large deviations ---------------------------------------------------------

std::vector<DeviationProfile> deviation_sweep(const Observable& f, const SystemSpec& sys,
                                              const EmpiricalMeasure& mu, const std::vector<double>& eps_list,
                                              const std::vector<std::size_t>& n_list, std::size_t trials,
                                              std::uint64_t seed) {
  require_space(sys, mu);
  if (trials == 0) throw std::invalid_argument("deviation_profile needs trials >= 1");
  if (n_list.empty() || n_list.front() == 0 || !std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
    throw std::invalid_argument("n_list must be strictly increasing positive counts");
  for (double e : eps_list)
    if (!(e > 0.0)) throw std::invalid_argument("deviation eps must be positive");

  double integral = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) integral += mu.weights[i] * f(mu.points[i]);

  const auto starts = draw_initial_points(mu, trials, seed);
  const std::size_t L = n_list.size();
  std::vector<double> dev(trials * L);  // |S_n/n - integral|
  parallel_for(trials, [&](std::size_t i) {
    PhasePoint y = starts[i];
    double s = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 1; next < L; ++k) {
      s += f(y);
      if (k == n_list[next]) {
        dev[i * L + next] = std::abs(s / static_cast<double>(k) - integral);
        ++next;
      }
      if (next < L) advance(sys, y);
    }
  });

  std::vector<DeviationProfile> out;
  const double dt = static_cast<double>(trials);
  for (double eps : eps_list) {
    DeviationProfile p;
    p.eps = eps;
    p.trials = trials;
    p.seed = seed;
    for (std::size_t j = 0; j < L; ++j) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < trials; ++i) hits += dev[i * L + j] > eps ? 1 : 0;
      p.points.push_back({n_list[j], static_cast<double>(hits) / dt, hits == 0});
    }
    p.monotone = true;
    for (std::size_t j = 1; j < L; ++j) {
      const double q = p.points[j - 1].probability;
      if (p.points[j].probability > q + 2.0 * std::sqrt(q * (1.0 - q) / dt) + 1e-15) p.monotone = false;
    }
    std::vector<double> xs, ys;
    for (const auto& pt : p.points)
      if (!pt.censored) {
        xs.push_back(static_cast<double>(pt.n) * eps * eps);
        ys.push_back(std::log(pt.probability));
      }
    if (xs.size() >= 2) {
      const double k = static_cast<double>(xs.size());
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
      double sxx = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
      }
      const double slope = sxy / sxx;
      p.c2 = -slope;
      p.c1 = std::exp(my - slope * mx);
      double rss = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + slope * (xs[i] - mx));
        rss += r * r;
      }
      p.residual = std::sqrt(rss / k);
      p.fitted = true;
      p.decaying = p.c2 > 0.0;
    }
    out.push_back(std::move(p));
  }
  return out;
}

DeviationProfile deviation_profile(const Observable& f, const SystemSpec& sys, const EmpiricalMeasure& mu,
                                   double eps, const std::vector<std::size_t>& n_list, std::size_t trials,
                                   std::uint64_t seed) {
  if (std::holds_alternative<Continuous>(f.regularity))
    throw std::invalid_argument("deviation_profile needs an observable with a declared Lipschitz constant");
  return deviation_sweep(f, sys, mu, {eps}, n_list, trials, seed).front();
}

// ---- mixing -------------------------------------------------------------------

namespace {

struct PairStats {
  double ergodic = 0.0, weak = 0.0, strong = 0.0;
  std::size_t tested = 0;  // pairs * lags
};

// cells[t * len + k]: cell index of h^k x_t; masses from k = 0
PairStats pair_statistics(const std::vector<std::uint32_t>& cells, std::size_t starts, std::size_t len,
                          std::size_t m, const std::vector<bool>& keep) {
  std::vector<double> mass(m, 0.0);
  for (std::size_t t = 0; t < starts; ++t) mass[cells[t * len]] += 1.0;
  const double dt = static_cast<double>(starts);
  for (double& v : mass) v /= dt;
  const std::size_t k0 = (len - 1) / 2 + ((len - 1) % 2);
  const std::size_t lags = len - k0;
  std::vector<std::vector<double>> counts(lags);
  parallel_for(lags, [&](std::size_t j) {
    auto& c = counts[j];
    c.assign(m * m, 0.0);
    for (std::size_t t = 0; t < starts; ++t) c[cells[t * len + k0 + j] * m + cells[t * len]] += 1.0;
  });
  PairStats s;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < m; ++a) {
    if (!keep[a]) continue;
    for (std::size_t b = 0; b < m; ++b) {
      if (!keep[b]) continue;
      ++pairs;
      const double p = mass[a] * mass[b];
      const double se = std::sqrt(p * (1.0 - p) / dt);
      double sum = 0.0, abs_sum = 0.0, mx = 0.0;
      for (std::size_t j = 0; j < lags; ++j) {
        const double d = (counts[j][a * m + b] / dt - p) / se;
        sum += d;
        abs_sum += std::abs(d);
        mx = std::max(mx, std::abs(d));
      }
      s.ergodic = std::max(s.ergodic, std::abs(sum) / static_cast<double>(lags));
      s.weak = std::max(s.weak, abs_sum / static_cast<double>(lags));
      s.strong = std::max(s.strong, mx);
    }
  }
  s.tested = pairs * lags;
  return s;
}

double max_tolerance(std::size_t tested) {
  return 3.0 + std::sqrt(2.0 * std::log(static_cast<double>(std::max<std::size_t>(tested, 2))));
}

}  // namespace

MixingVerdict mixing_classifier(const SystemSpec& sys, const EmpiricalMeasure& mu, int depth, std::size_t N,
                                std::size_t trials, const MixingOptions& options) {
  require_space(sys, mu);
  if (depth < 1) throw std::invalid_argument("mixing partition depth must be >= 1");
  if (N < 2 || trials < 2) throw std::invalid_argument("mixing_classifier needs N >= 2 and trials >= 2");
  const int alphabet = sys.space == SpaceKind::Sequence ? sys.alphabet() : 2;
  const std::uint64_t m64 = cell_count(sys.space, depth, alphabet);
  if (m64 > 4096) throw std::invalid_argument("mixing partition has more than 4096 cells");
  const auto m = static_cast<std::size_t>(m64);
  const std::size_t len = N + 1;
  const std::size_t horizon = std::max<std::size_t>(N, static_cast<std::size_t>(options.max_period));
  const bool product = options.product_check;
  const auto mp = product ? static_cast<std::size_t>(cell_count(sys.space, options.product_depth, alphabet)) : 0;

  const auto starts = draw_initial_points(mu, trials, options.seed);
  std::vector<std::uint32_t> cells(trials * len), coarse(product ? trials * len : 0);
  std::vector<char> periodic(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    PhasePoint y = starts[t];
    for (std::size_t k = 0; k <= horizon; ++k) {
      if (k > 0 && k <= static_cast<std::size_t>(options.max_period) && !periodic[t] &&
          distance(y, starts[t]) < options.periodic_tol)
        periodic[t] = 1;
      if (k < len) {
        cells[t * len + k] = static_cast<std::uint32_t>(cell_of(y, depth, alphabet).code);
        if (product) coarse[t * len + k] = static_cast<std::uint32_t>(cell_of(y, options.product_depth, alphabet).code);
      }
      if (k < horizon) advance(sys, y);
    }
  });

  MixingVerdict v;
  v.depth = depth;
  v.N = N;
  v.trials = trials;
  v.cells = m;
  const double dt = static_cast<double>(trials);
  v.periodic_fraction = static_cast<double>(std::count(periodic.begin(), periodic.end(), 1)) / dt;
  v.antiperiodic.statistic = v.periodic_fraction;
  v.antiperiodic.tolerance = std::max(0.01, 3.0 / std::sqrt(dt));
  v.antiperiodic.raw = v.periodic_fraction <= v.antiperiodic.tolerance;

  std::vector<bool> keep(m, false);
  for (std::size_t t = 0; t < trials; ++t) keep[cells[t * len]] = true;
  v.cells_dropped = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), false));
  if (v.cells_dropped > 0)
    v.warnings.push_back(std::to_string(v.cells_dropped) + " of " + std::to_string(m) +
                         " cells have no sampled mass and were dropped");

  const auto s = pair_statistics(cells, trials, len, m, keep);
  const double tol = max_tolerance(s.tested);
  v.ergodic = {s.ergodic <= tol, false, s.ergodic, tol};
  v.weak = {s.weak <= tol, false, s.weak, tol};
  v.strong = {s.strong <= tol, false, s.strong, tol};
  v.antiperiodic.pass = v.antiperiodic.raw;
  v.ergodic.pass = v.ergodic.raw && v.antiperiodic.pass;
  v.weak.pass = v.weak.raw && v.ergodic.pass;
  v.strong.pass = v.strong.raw && v.weak.pass;

  if (product) {
    // pair start t with start t + T/2 and test ergodicity of h x h on product cells
    const std::size_t half = trials / 2;
    std::vector<std::uint32_t> pc(half * len);
    for (std::size_t t = 0; t < half; ++t)
      for (std::size_t k = 0; k < len; ++k)
        pc[t * len + k] = static_cast<std::uint32_t>(coarse[t * len + k] * mp + coarse[(t + half) * len + k]);
    std::vector<bool> pkeep(mp * mp, false);
    for (std::size_t t = 0; t < half; ++t) pkeep[pc[t * len]] = true;
    const auto ps = pair_statistics(pc, half, len, mp * mp, pkeep);
    const double ptol = max_tolerance(ps.tested);
    v.product_ergodic = MixingLevel{ps.ergodic <= ptol, ps.ergodic <= ptol, ps.ergodic, ptol};
  }
  if (options.observable) {
    const auto& f = *options.observable;
    std::vector<double> f0(trials);
    for (std::size_t t = 0; t < trials; ++t) f0[t] = f(starts[t]);
    const auto cs = correlation_core(f, f0, sys, starts, std::vector<double>(trials, 1.0 / dt), len);
    double acc = 0.0;
    for (std::size_t k = 1; k < len; ++k) acc += std::abs(cs.values[k]);
    v.cesaro_abs_correlation = acc / static_cast<double>(N);
  }
  return v;
}

}  // namespace tracial
