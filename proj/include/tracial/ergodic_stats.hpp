#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracial/dynamics.hpp"
#include "tracial/empirical_measure.hpp"
#include "tracial/observables.hpp"

namespace tracial {

/// Exact floating-point accumulator (Shewchuk expansion); value() is the
/// correctly rounded sum of everything added.
class ExactSum {
 public:
  void add(double x);
  double value() const;

 private:
  std::vector<double> partials_;
};

/// S_n f(x) = f(x) + f(hx) + ... + f(h^{n-1}x), correctly rounded. Additivity
/// S_{n+m}(x) = S_n(x) + S_m(h^n x) is exact whenever the right-hand side is
/// exactly representable (integer- or dyadic-valued f), and within one
/// rounding otherwise.
double ergodic_sum(const Observable& f, const SystemSpec& sys, const PhasePoint& x, std::size_t n);
double birkhoff_average(const Observable& f, const SystemSpec& sys, const PhasePoint& x, std::size_t n);

/// `trials` starting points from mu: its first points when the weights are
/// uniform and there are enough of them, weighted resampling otherwise.
std::vector<PhasePoint> draw_initial_points(const EmpiricalMeasure& mu, std::size_t trials, std::uint64_t seed);

struct CorrelationSeries {
  std::vector<double> values;  // C_0 .. C_N
  std::vector<double> se;      // jackknife standard errors
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// C_n = sum_i w_i (f(h^n x_i) - fbar)(g(x_i) - gbar) over the points of mu,
/// with fbar, gbar the mu-means of f and g.
CorrelationSeries correlation_series(const Observable& f, const Observable& g, const SystemSpec& sys,
                                     const EmpiricalMeasure& mu, long N);

enum class FitStatus { Ok, NonDecaying, PoorFit, NoSignal };
std::string to_string(FitStatus s);

struct EDCFit {
  FitStatus status = FitStatus::NoSignal;
  double C = 0.0;
  double gamma = 0.0;
  double residual = 0.0;       // RMS of log residuals
  double threshold = 0.0;      // residual above this is PoorFit
  std::size_t first = 0, last = 0;
  std::size_t points = 0;
};

struct LagRange {
  std::size_t first = 0, last = 0;
};

inline constexpr double kFitResidual = 0.05;

/// Least squares of log|C_n| against n on the window, using only lags with
/// |C_n| above three standard errors. Without a window, the lags from 0 up
/// to the first one below that floor.
EDCFit edc_fit(const CorrelationSeries& series, std::optional<LagRange> window = std::nullopt);

struct VarianceReport {
  double direct = 0.0;
  double direct_se = 0.0;
  double green_kubo = 0.0;
  double green_kubo_se = 0.0;
  std::size_t lags = 0;         // Green-Kubo sum runs over 1..lags
  double c0 = 0.0;
  bool agree = false;           // within 3 combined standard errors
  bool coboundary = false;      // direct / C_0 below kCoboundaryRatio
  std::size_t n = 0, trials = 0;
};

inline constexpr double kCoboundaryRatio = 0.01;
inline constexpr std::size_t kMaxGreenKuboLag = 200;

VarianceReport variance_estimate(const Observable& f, const SystemSpec& sys, const EmpiricalMeasure& mu,
                                 std::size_t n, std::size_t trials, std::uint64_t seed = 1);

enum class Normalization { Sqrt, SqrtLog };
std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

/// Kolmogorov-Smirnov distance between the weighted empirical law of
/// `values` and Normal(0, sigma2); sigma2 == 0 compares with the unit step at 0.
double ks_normal(std::vector<double> values, std::vector<double> weights, double sigma2);
double normal_cdf(double z, double sigma2);

struct CLTReport {
  std::size_t n = 0, trials = 0;
  Normalization normalization = Normalization::Sqrt;
  double mean = 0.0;            // grand orbit mean of f
  double sigma2 = 0.0;          // fitted variance of the normalized sums
  double var_f = 0.0;           // variance of f over the starting points
  // against Normal(0, sigma2); in Heaviside mode (sigma2 degenerate) against
  // Normal(0, var_f), the law an uncorrelated f would give
  double ks = 0.0;
  std::optional<double> reference_sigma2;
  std::optional<double> ks_reference;
  bool coboundary = false;
  bool heaviside = false;
  std::uint64_t seed = 0;
};

/// Centres the sums by the grand orbit mean; the mu-sample mean has error of
/// order 1/sqrt(|mu|), which the factor n/sqrt(n) would blow up.
CLTReport clt_test(const Observable& f, const SystemSpec& sys, const EmpiricalMeasure& mu, std::size_t n,
                   std::size_t trials, Normalization normalization = Normalization::Sqrt,
                   std::optional<double> reference_sigma2 = std::nullopt, std::uint64_t seed = 1);

struct ASCLTReport {
  std::size_t n = 0;
  double harmonic = 0.0;        // D_n
  double sigma2 = 0.0;          // second moment of the log-averaged law
  double ks = 0.0;
  std::optional<double> ks_reference;
  double scale = 0.0;           // standard deviation of f along the orbit
  double mass_near_zero = 0.0;  // mass within 0.1 * scale of 0
};

double harmonic_number(std::size_t n);

/// (1/D_n) sum_{k=1}^n (1/k) delta at (S_k f(x) - k mean)/sqrt(k).
ASCLTReport asclt_test(const Observable& f, const SystemSpec& sys, const PhasePoint& x, std::size_t n,
                       double mean = 0.0, std::optional<double> reference_sigma2 = std::nullopt);

struct DeviationPoint {
  std::size_t n = 0;
  double probability = 0.0;
  bool censored = false;        // no exceedance: probability < 1/trials
};

struct DeviationProfile {
  double eps = 0.0;
  std::vector<DeviationPoint> points;
  double c1 = 0.0, c2 = 0.0;
  double residual = 0.0;
  bool fitted = false;          // at least two uncensored points
  bool decaying = false;        // fitted and c2 > 0
  bool monotone = false;        // nonincreasing in n within two standard errors
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

DeviationProfile deviation_profile(const Observable& f, const SystemSpec& sys, const EmpiricalMeasure& mu,
                                   double eps, const std::vector<std::size_t>& n_list, std::size_t trials,
                                   std::uint64_t seed = 1);

/// Same trajectories for every eps, so probabilities are nonincreasing in eps.
std::vector<DeviationProfile> deviation_sweep(const Observable& f, const SystemSpec& sys,
                                              const EmpiricalMeasure& mu, const std::vector<double>& eps_list,
                                              const std::vector<std::size_t>& n_list, std::size_t trials,
                                              std::uint64_t seed = 1);

struct MixingLevel {
  bool raw = false;             // statistic within tolerance
  bool pass = false;            // raw and every lower level passes
  double statistic = 0.0;
  double tolerance = 0.0;
};

struct MixingOptions {
  double periodic_tol = 1e-6;
  int max_period = 64;
  bool product_check = false;
  int product_depth = 2;
  std::optional<Observable> observable;  // also report mean_{1<=n<=N} |C_n| for f = g = observable
  std::uint64_t seed = 1;
};

struct MixingVerdict {
  int depth = 0;
  std::size_t N = 0, trials = 0;
  std::size_t cells = 0, cells_dropped = 0;
  double periodic_fraction = 0.0;
  MixingLevel antiperiodic, ergodic, weak, strong;
  std::optional<MixingLevel> product_ergodic;
  std::optional<double> cesaro_abs_correlation;
  std::vector<std::string> warnings;
};

/// Estimates mu(h^{-k}A & B) on the depth-`depth` dyadic partition for lags
/// k in [N/2, N]. Per pair (A,B), with d_k = estimate - mu(A)mu(B) in units
/// of its binomial standard error:
///   ergodic  |mean_k d_k|,  weak  mean_k |d_k|,  strong  max_k |d_k|,
/// each maximised over pairs, so ergodic <= weak <= strong. All three use the
/// strong tolerance 3 + sqrt(2 log M), M = pairs * lags, the typical maximum of
/// M unit normals plus three standard errors.
MixingVerdict mixing_classifier(const SystemSpec& sys, const EmpiricalMeasure& mu, int depth, std::size_t N,
                                std::size_t trials, const MixingOptions& options = {});

}  // namespace tracial
