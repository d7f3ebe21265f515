#include "tracial/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "tracial/transport.hpp"

namespace tracial {

PointMap as_map(const SystemSpec& sys) {
  return [sys](const PhasePoint& x) { return step(sys, x); };
}

PointMap compose(PointMap h, PointMap g) {
  return [h = std::move(h), g = std::move(g)](const PhasePoint& x) { return h(g(x)); };
}

EmpiricalMeasure pushforward_measure(const PointMap& h, const EmpiricalMeasure& mu) {
  EmpiricalMeasure out;
  out.points.reserve(mu.size());
  for (const auto& x : mu.points) out.points.push_back(h(x));
  out.space = out.points.empty() ? mu.space : space_of(out.points.front());
  out.weights = mu.weights;
  out.seed = mu.seed;
  out.source = "pushforward(" + mu.source + ")";
  return out;
}

EmpiricalMeasure pushforward_measure(const SystemSpec& h, const EmpiricalMeasure& mu) {
  if (mu.space != h.space) throw std::invalid_argument("measure and map live on different spaces");
  return pushforward_measure(as_map(h), mu);
}

namespace {

struct Atom {
  double x;
  double w;
};

std::vector<Atom> sorted_atoms(const EmpiricalMeasure& mu) {
  std::vector<Atom> a(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) a[i] = {coordinate(mu.points[i]), mu.weights[i]};
  std::sort(a.begin(), a.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
  return a;
}

// Max weight in a closed window of length `width`; `wrap` treats [0,1) as a circle.
double max_window_mass(const std::vector<Atom>& a, double width, bool wrap) {
  std::vector<Atom> ext = a;
  if (wrap)
    for (const auto& p : a) ext.push_back({p.x + 1.0, p.w});
  double best = 0.0, acc = 0.0;
  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < a.size(); ++lo) {
    if (hi < lo) {
      hi = lo;
      acc = 0.0;
    }
    while (hi < ext.size() && ext[hi].x <= ext[lo].x + width && (!wrap || hi < lo + a.size())) acc += ext[hi++].w;
    best = std::max(best, acc);
    acc -= ext[lo].w;
  }
  return best;
}

std::uint64_t admissible_words(const SystemSpec& sys, int length) {
  const Eigen::MatrixXd a = sys.transition.cast<double>();
  Eigen::VectorXd count = Eigen::VectorXd::Ones(a.rows());
  for (int i = 1; i < length; ++i) count = a * count;
  return static_cast<std::uint64_t>(std::llround(count.sum()));
}

}  // namespace

OUReport ou_diagnostics(const EmpiricalMeasure& mu, double eps, const SystemSpec* sys) {
  if (!(eps > 0.0)) throw std::invalid_argument("ou_diagnostics needs eps > 0");
  OUReport r;
  r.eps = eps;
  const auto cells_per_axis = static_cast<std::uint64_t>(std::ceil(1.0 / eps - 1e-12));
  switch (mu.space) {
    case SpaceKind::Interval:
    case SpaceKind::Circle: {
      const auto atoms = sorted_atoms(mu);
      r.atom_mass = max_window_mass(atoms, 2.0 * eps, mu.space == SpaceKind::Circle);
      std::vector<char> hit(cells_per_axis, 0);
      for (const auto& p : atoms) {
        if (p.w <= 0.0) continue;
        hit[std::min<std::uint64_t>(cells_per_axis - 1, static_cast<std::uint64_t>(p.x * cells_per_axis))] = 1;
      }
      r.cells_total = cells_per_axis;
      r.cells_charged = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
      if (mu.space == SpaceKind::Interval)
        for (const auto& p : atoms)
          if (p.x <= eps || p.x >= 1.0 - eps) r.boundary_mass += p.w;
      break;
    }
    case SpaceKind::Torus: {
      const std::uint64_t k = cells_per_axis;
      std::vector<double> mass(k * k, 0.0);
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto c = coordinates(mu.points[i]);
        const auto a = std::min<std::uint64_t>(k - 1, static_cast<std::uint64_t>(c[0] * k));
        const auto b = std::min<std::uint64_t>(k - 1, static_cast<std::uint64_t>(c[1] * k));
        mass[a * k + b] += mu.weights[i];
      }
      // an eps-ball lies inside some 3x3 block of cells
      for (std::uint64_t a = 0; a < k; ++a)
        for (std::uint64_t b = 0; b < k; ++b) {
          double block = 0.0;
          for (std::uint64_t da = 0; da < std::min<std::uint64_t>(3, k); ++da)
            for (std::uint64_t db = 0; db < std::min<std::uint64_t>(3, k); ++db)
              block += mass[((a + da) % k) * k + (b + db) % k];
          r.atom_mass = std::max(r.atom_mass, block);
        }
      r.cells_total = k * k;
      r.cells_charged = static_cast<std::uint64_t>(std::count_if(mass.begin(), mass.end(), [](double m) { return m > 0.0; }));
      break;
    }
    case SpaceKind::Sequence: {
      int depth = static_cast<int>(std::ceil(std::log2(1.0 / eps) - 1e-12));
      int alphabet = 2;
      int window = static_cast<int>(kMaxWindow);
      for (const auto& p : mu.points) {
        const auto& s = std::get<SymbolPoint>(p);
        window = std::min<int>(window, s.length);
        for (std::size_t i = 0; i < s.length; ++i) alphabet = std::max(alphabet, s.at(i) + 1);
      }
      if (sys) alphabet = sys->alphabet();
      depth = std::clamp(depth, 0, window);
      std::unordered_map<std::uint64_t, double> mass;
      for (std::size_t i = 0; i < mu.size(); ++i) mass[cell_of(mu.points[i], depth, alphabet).code] += mu.weights[i];
      for (const auto& [code, m] : mass) r.atom_mass = std::max(r.atom_mass, m);
      r.cells_total = sys ? admissible_words(*sys, depth) : cell_count(SpaceKind::Sequence, depth, alphabet);
      r.cells_charged = static_cast<std::uint64_t>(
          std::count_if(mass.begin(), mass.end(), [](const auto& kv) { return kv.second > 0.0; }));
      break;
    }
  }
  r.coverage = r.cells_total ? static_cast<double>(r.cells_charged) / static_cast<double>(r.cells_total) : 0.0;
  return r;
}

namespace {

void check_pair(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.space != nu.space) throw std::invalid_argument("wasserstein1: measures live on different spaces");
  if (mu.size() == 0 || nu.size() == 0) throw std::invalid_argument("wasserstein1: empty measure");
}

// Piecewise-constant F - G on the merged support, as (value, length) pieces of [0, 1].
std::vector<std::pair<double, double>> cdf_difference(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  std::vector<std::pair<double, double>> events;  // (x, signed weight)
  events.reserve(mu.size() + nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) events.emplace_back(coordinate(mu.points[i]), mu.weights[i]);
  for (std::size_t i = 0; i < nu.size(); ++i) events.emplace_back(coordinate(nu.points[i]), -nu.weights[i]);
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<double, double>> pieces;
  double level = 0.0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    level += events[k].second;
    const double next = k + 1 < events.size() ? events[k + 1].first : events[k].first;
    if (next > events[k].first) pieces.emplace_back(level, next - events[k].first);
  }
  return pieces;
}

}  // namespace

double wasserstein1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap) {
  check_pair(mu, nu);
  if (mu.space == SpaceKind::Interval) {
    double total = 0.0;
    for (const auto& [value, length] : cdf_difference(mu, nu)) total += std::abs(value) * length;
    return total;
  }
  if (mu.space == SpaceKind::Circle) {
    // W1 on the circle = min_c int |F - G - c|, attained at a weighted median of F - G.
    auto pieces = cdf_difference(mu, nu);
    double covered = 0.0;
    for (const auto& p : pieces) covered += p.second;
    pieces.emplace_back(0.0, 1.0 - covered);  // F - G vanishes before the first and after the last atom
    auto sorted = pieces;
    std::sort(sorted.begin(), sorted.end());
    double acc = 0.0, median = 0.0;
    for (const auto& [value, length] : sorted) {
      acc += length;
      if (acc >= 0.5) {
        median = value;
        break;
      }
    }
    double total = 0.0;
    for (const auto& [value, length] : pieces) total += std::abs(value - median) * length;
    return total;
  }
  return wasserstein1_flow(mu, nu, cap);
}

double wasserstein1_flow(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap) {
  check_pair(mu, nu);
  if (mu.size() > cap || nu.size() > cap)
    throw std::invalid_argument("wasserstein1: support larger than the exact-transport cap (" + std::to_string(cap) +
                                "); subsample the measures first");
  const auto n = static_cast<Eigen::Index>(mu.size()), m = static_cast<Eigen::Index>(nu.size());
  Eigen::MatrixXd cost(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = distance(mu.points[i], nu.points[j]);
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(mu.weights.data(), n);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(nu.weights.data(), m);
  b *= a.sum() / b.sum();
  return min_cost_transport<double>(cost, a, b);
}

// ---- CSV --------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

void write_measure_csv(std::ostream& out, const EmpiricalMeasure& mu, const std::map<std::string, std::string>& metadata) {
  for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << "\n";
  switch (mu.space) {
    case SpaceKind::Interval: out << "t,weight\n"; break;
    case SpaceKind::Circle: out << "angle,weight\n"; break;
    case SpaceKind::Torus: out << "s,t,weight\n"; break;
    case SpaceKind::Sequence: out << "word,weight\n"; break;
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.space == SpaceKind::Sequence) {
      for (int s : std::get<SymbolPoint>(mu.points[i]).word()) {
        if (s > 9) throw std::invalid_argument("measure CSV: word column supports alphabets of at most 10 symbols");
        out << s;
      }
    } else {
      const auto c = coordinates(mu.points[i]);
      for (std::size_t k = 0; k < c.size(); ++k) out << (k ? "," : "") << format_double(c[k]);
    }
    out << "," << format_double(mu.weights[i]) << "\n";
  }
}

EmpiricalMeasure read_measure_csv(std::istream& in, std::map<std::string, std::string>* metadata) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (metadata && eq != std::string::npos) {
        auto key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        (*metadata)[key] = line.substr(eq + 1);
      }
      continue;
    }
    header = split(line, ',');
    break;
  }
  if (header.empty() || header.back() != "weight") throw std::invalid_argument("measure CSV: missing header with weight column");
  std::vector<PhasePoint> points;
  std::vector<double> weights;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != header.size()) throw std::invalid_argument("measure CSV: wrong column count on line " + std::to_string(lineno));
    weights.push_back(std::stod(cols.back()));
    if (header[0] == "t" && header.size() == 2) {
      points.push_back(interval_point(std::stod(cols[0])));
    } else if (header[0] == "angle") {
      points.push_back(circle_point(std::stod(cols[0])));
    } else if (header[0] == "s") {
      points.push_back(torus_point(std::stod(cols[0]), std::stod(cols[1])));
    } else if (header[0] == "word") {
      std::vector<int> word;
      for (char ch : cols[0])
        if (ch >= '0' && ch <= '9') word.push_back(ch - '0');
      points.push_back(symbol_point(word));
    } else {
      throw std::invalid_argument("measure CSV: unknown coordinate columns");
    }
  }
  return empirical_measure(std::move(points), std::move(weights));
}

}  // namespace tracial
