#include "tracial/experiment.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tracial/chaos.hpp"
#include "tracial/cstar_model.hpp"
#include "tracial/ergodic_stats.hpp"
#include "tracial/ktheory.hpp"

namespace tracial {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames = {
    {ExperimentKind::Simulate, "simulate"},         {ExperimentKind::Correlations, "correlations"},
    {ExperimentKind::Clt, "clt"},                   {ExperimentKind::Asclt, "asclt"},
    {ExperimentKind::Deviation, "deviation"},       {ExperimentKind::ChaosCert, "chaos-cert"},
    {ExperimentKind::MixingClass, "mixing-class"},  {ExperimentKind::ModelCheck, "model-check"},
    {ExperimentKind::KTheory, "ktheory"},
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// ---- typed values ---------------------------------------------------------------

enum class PType { Int, Real, IntList, RealList, Choice, Bool, Group, Matrix, Text };

struct Rule {
  std::string key;
  PType type = PType::Real;
  Json def = nullptr;  // null: optional without default
  double lo = -kInf, hi = kInf;
  bool lo_open = false, hi_open = false;
  std::vector<std::string> choices = {};
  bool required = false;
};

std::string range_text(const Rule& r) {
  auto end = [](double v) { return std::isinf(v) ? std::string(v < 0 ? "-inf" : "inf") : fmt(v); };
  return std::string(r.lo_open ? "(" : "[") + end(r.lo) + "," + end(r.hi) + (r.hi_open ? ")" : "]");
}

bool in_range(const Rule& r, double v) {
  if (r.lo_open ? !(v > r.lo) : !(v >= r.lo)) return false;
  if (r.hi_open ? !(v < r.hi) : !(v <= r.hi)) return false;
  return true;
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && p == s.data() + s.size()) return v;
  // 1e6 style
  const auto d = parse_real(s);
  if (d && std::floor(*d) == *d && std::abs(*d) < 9.0e15) return static_cast<long long>(*d);
  return std::nullopt;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

std::optional<Json> parse_typed(const Rule& r, const ConfigValue& v, const std::string& where,
                                std::vector<ConfigError>& errors) {
  auto fail = [&](const std::string& msg) {
    errors.push_back({v.line, where + "." + r.key + ": " + msg});
    return std::nullopt;
  };
  const std::string& t = v.text;
  switch (r.type) {
    case PType::Int: {
      const auto x = parse_integer(t);
      if (!x) return fail("expected an integer, got '" + t + "'");
      if (!in_range(r, static_cast<double>(*x))) return fail(t + " is outside " + range_text(r));
      return Json(*x);
    }
    case PType::Real: {
      const auto x = parse_real(t);
      if (!x) return fail("expected a number, got '" + t + "'");
      if (!in_range(r, *x)) return fail(t + " is outside " + range_text(r));
      return Json(*x);
    }
    case PType::IntList:
    case PType::RealList: {
      Json arr = Json::array();
      if (t.empty() || t == "[]") return arr;
      for (const auto& item : split_list(t)) {
        if (r.type == PType::IntList) {
          const auto x = parse_integer(item);
          if (!x) return fail("expected integers, got '" + item + "'");
          if (!in_range(r, static_cast<double>(*x))) return fail(item + " is outside " + range_text(r));
          arr.push_back(*x);
        } else {
          const auto x = parse_real(item);
          if (!x) return fail("expected numbers, got '" + item + "'");
          if (!in_range(r, *x)) return fail(item + " is outside " + range_text(r));
          arr.push_back(*x);
        }
      }
      return arr;
    }
    case PType::Choice: {
      for (const auto& c : r.choices)
        if (c == t) return Json(t);
      std::string all;
      for (const auto& c : r.choices) all += (all.empty() ? "" : ", ") + c;
      return fail("'" + t + "' is not one of " + all);
    }
    case PType::Bool:
      if (t == "true" || t == "yes" || t == "1") return Json(true);
      if (t == "false" || t == "no" || t == "0") return Json(false);
      return fail("expected true or false, got '" + t + "'");
    case PType::Group:
      try {
        return Json(to_string(parse_group(t)));
      } catch (const std::exception& e) {
        return fail(e.what());
      }
    case PType::Matrix:
      try {
        return Json(to_string(parse_matrix(t)));
      } catch (const std::exception& e) {
        if (trim(t) == "[]") return Json("[]");
        return fail(e.what());
      }
    case PType::Text:
      return Json(t);
  }
  return std::nullopt;
}

/// Values for every rule (defaults filled), errors for unknown keys.
Json parse_block(const ConfigBlock& block, const std::vector<Rule>& rules, const std::string& where, int section_line,
                 std::vector<ConfigError>& errors, const std::string& context = "") {
  Json out = Json::object();
  for (const auto& [key, value] : block) {
    bool known = false;
    for (const auto& r : rules) known = known || r.key == key;
    if (!known) errors.push_back({value.line, "unknown key '" + key + "' in [" + where + "]" + context});
  }
  for (const auto& r : rules) {
    const auto it = block.find(r.key);
    if (it == block.end()) {
      if (r.required) errors.push_back({section_line, "missing key '" + r.key + "' in [" + where + "]" + context});
      out[r.key] = r.def;
      continue;
    }
    if (auto v = parse_typed(r, it->second, where, errors)) out[r.key] = *v;
  }
  return out;
}

int line_of(const ConfigBlock& block, const std::string& key, int fallback) {
  const auto it = block.find(key);
  return it == block.end() ? fallback : it->second.line;
}

std::vector<std::vector<double>> parse_rows(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.size() < 4 || s.substr(0, 2) != "[[" || s.substr(s.size() - 2) != "]]")
    throw std::invalid_argument("matrix must look like [[a,b],[c,d]]");
  std::vector<std::vector<double>> rows;
  std::string body = s.substr(2, s.size() - 4);
  std::size_t pos = 0;
  while (true) {
    const auto end = body.find(']', pos);
    const std::string row = body.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    std::vector<double> values;
    for (const auto& item : split_list(row)) {
      const auto v = parse_real(item);
      if (!v) throw std::invalid_argument("bad matrix entry '" + item + "'");
      values.push_back(*v);
    }
    if (!rows.empty() && values.size() != rows.front().size()) throw std::invalid_argument("ragged matrix rows");
    rows.push_back(std::move(values));
    if (end == std::string::npos) break;
    if (body.compare(end, 3, "],[") != 0) throw std::invalid_argument("malformed matrix");
    pos = end + 3;
  }
  return rows;
}

// ---- schema -------------------------------------------------------------------------

struct KindSchema {
  std::vector<std::string> required, optional;  // sections besides [experiment]
  std::vector<Rule> params;                      // the [params] section
};

Rule int_rule(std::string key, long long def, double lo, double hi = kInf) {
  return {std::move(key), PType::Int, Json(def), lo, hi};
}
Rule real_rule(std::string key, Json def, double lo = -kInf, double hi = kInf, bool lo_open = false, bool hi_open = false) {
  return {std::move(key), PType::Real, std::move(def), lo, hi, lo_open, hi_open};
}
Rule choice_rule(std::string key, std::string def, std::vector<std::string> choices) {
  Rule r{std::move(key), PType::Choice, Json(std::move(def))};
  r.choices = std::move(choices);
  return r;
}

const KindSchema& schema(ExperimentKind k) {
  static const std::map<ExperimentKind, KindSchema> table = [] {
    std::map<ExperimentKind, KindSchema> t;
    const Rule burn = int_rule("burn_in", 1000, 0, 1e9);
    t[ExperimentKind::Simulate] = {{"system"}, {"observable", "output"}, {int_rule("n", 1000, 1, 1e8), burn}};
    t[ExperimentKind::Correlations] = {{"system", "observable"},
                                       {"observable.g", "output"},
                                       {int_rule("samples", 100000, 2, 1e9), int_rule("lags", 30, 0, 10000), burn,
                                        choice_rule("expect", "none", {"none", "vanishing", "decaying"})}};
    t[ExperimentKind::Clt] = {{"system", "observable"},
                              {"output"},
                              {int_rule("n", 1000, 2, 1e9), int_rule("trials", 1000, 100, 1e9), burn,
                               choice_rule("normalization", "sqrt", {"sqrt", "sqrt-log"}),
                               real_rule("reference_sigma2", nullptr, 0.0), real_rule("ks_max", 0.05, 0.0, 1.0, true),
                               real_rule("sigma2_min", nullptr, 0.0), real_rule("sigma2_max", nullptr, 0.0),
                               Rule{"variance", PType::Bool, Json(true)}}};
    t[ExperimentKind::Asclt] = {{"system", "observable"},
                                {"output"},
                                {int_rule("n", 100000, 100, 1e10), burn, real_rule("mean", 0.0),
                                 real_rule("reference_sigma2", nullptr, 0.0), real_rule("ks_max", 0.1, 0.0, 1.0, true)}};
    t[ExperimentKind::Deviation] = {{"system", "observable"},
                                    {"output"},
                                    {Rule{"eps", PType::RealList, Json::array({0.1}), 0.0, kInf, true},
                                     Rule{"n_list", PType::IntList, Json::array({10, 20, 40, 80, 160}), 1, 1e8},
                                     int_rule("trials", 10000, 1, 1e9), burn}};
    t[ExperimentKind::ChaosCert] = {{"system"},
                                    {"output"},
                                    {real_rule("transitivity_eps", 0.0625, 0.0, 1.0, true),
                                     int_rule("horizon", 64, 1, 1e8), real_rule("periodic_eps", 0.015625, 0.0, 1.0, true),
                                     int_rule("max_period", 10, 1, 62), int_rule("sensitivity_trials", 1000, 1, 1e8),
                                     int_rule("sensitivity_horizon", 40, 1, 1e6),
                                     real_rule("probe_eps", 1e-6, 0.0, 0.5, true, true)}};
    t[ExperimentKind::MixingClass] = {{"system"},
                                      {"observable", "output"},
                                      {int_rule("depth", 4, 1, 12), int_rule("N", 60, 2, 1e6),
                                       int_rule("trials", 20000, 10, 1e9), burn,
                                       Rule{"product_check", PType::Bool, Json(false)},
                                       real_rule("periodic_tol", 1e-6, 0.0, 0.5, true),
                                       int_rule("max_period", 64, 1, 4096),
                                       choice_rule("expect", "none", {"none", "strong", "weak", "ergodic", "not-ergodic"})}};
    t[ExperimentKind::ModelCheck] = {{"model"}, {"output"}, {}};
    t[ExperimentKind::KTheory] = {{"ktheory"}, {"output"}, {}};
    return t;
  }();
  return table.at(k);
}

const std::vector<Rule>& model_rules() {
  static const std::vector<Rule> r = {int_rule("stages", 2, 0, 20), int_rule("p1", 2, 1, 1e9), int_rule("q1", 3, 1, 1e9),
                                      Rule{"K", PType::RealList, Json::array(), 1.0, kInf}};
  return r;
}

const std::vector<Rule>& ktheory_rules() {
  static const std::vector<Rule> r = {
      Rule{"K0", PType::Group, nullptr, -kInf, kInf, false, false, {}, true},
      Rule{"K1", PType::Group, nullptr, -kInf, kInf, false, false, {}, true},
      Rule{"a0", PType::Matrix, nullptr, -kInf, kInf, false, false, {}, true},
      Rule{"a1", PType::Matrix, nullptr, -kInf, kInf, false, false, {}, true},
      Rule{"expect", PType::Text, nullptr},
  };
  return r;
}

std::vector<Rule> system_rules(const std::string& name) {
  const Rule window = int_rule("window", 64, 1, 64);
  std::vector<Rule> r = {Rule{"name", PType::Text, nullptr, -kInf, kInf, false, false, {}, true}};
  if (name == "identity") r.push_back(choice_rule("space", "interval", {"interval", "circle", "torus", "sequence"}));
  if (name == "rotation") r.push_back(Rule{"theta", PType::Real, nullptr, -kInf, kInf, false, false, {}, true});
  if (name == "intermittent") r.push_back(Rule{"alpha", PType::Real, nullptr, 0.0, 1.0, true, true, {}, true});
  if (name == "toral") r.push_back(Rule{"matrix", PType::Text, Json("[[2,1],[1,1]]")});
  if (name == "full-shift") {
    r.push_back(int_rule("symbols", 2, 2, 9));
    r.push_back(window);
  }
  if (name == "golden-mean-shift") r.push_back(window);
  if (name == "subshift") {
    r.push_back(Rule{"transition", PType::Text, nullptr, -kInf, kInf, false, false, {}, true});
    r.push_back(Rule{"markov", PType::Text, nullptr, -kInf, kInf, false, false, {}, true});
    r.push_back(window);
  }
  if (name == "dyadic-permutation") r.push_back(Rule{"rank", PType::Int, nullptr, 1, 30, false, false, {}, true});
  return r;
}

std::vector<Rule> observable_rules(const std::string& name) {
  std::vector<Rule> r = {choice_rule("name", "", {"cos", "coordinate", "indicator", "constant"}), real_rule("shift", 0.0)};
  r.front().required = true;
  if (name == "cos") r.push_back(int_rule("frequency", 1, 1, 1e6));
  if (name == "indicator") {
    r.push_back(int_rule("symbol", 0, 0, 8));
    r.push_back(int_rule("position", 0, 0, 63));
  }
  if (name == "constant") r.push_back(real_rule("value", 0.0));
  return r;
}

int section_line(const std::map<std::string, int>& lines, const std::string& name) {
  const auto it = lines.find(name);
  return it == lines.end() ? 0 : it->second;
}

std::optional<Observable> observable_from_block(const ConfigBlock& block, const std::string& where, int line,
                                                const std::optional<SystemSpec>& sys, std::vector<ConfigError>& errors,
                                                Json& record) {
  const auto name_it = block.find("name");
  const std::string name = name_it == block.end() ? "" : name_it->second.text;
  const std::size_t before = errors.size();
  record = parse_block(block, observable_rules(name), where, line, errors);
  if (errors.size() != before) return std::nullopt;
  Observable f;
  if (name == "cos") f = cosine_observable(record["frequency"].get<int>());
  else if (name == "indicator") f = cylinder_indicator(record["symbol"].get<int>(), record["position"].get<int>());
  else if (name == "constant") f = constant_observable(record["value"].get<double>());
  else f = coordinate_observable(sys ? sys->space : SpaceKind::Interval);
  const double shift = record["shift"].get<double>();
  if (shift != 0.0) f = shifted(f, shift);
  if (sys) {
    try {
      (void)f(sample_point(*sys, 1, 0));
    } catch (const std::exception& e) {
      errors.push_back({line_of(block, "name", line), "observable '" + name + "' cannot be evaluated on system '" +
                                                          sys->name + "': " + e.what()});
      return std::nullopt;
    }
  }
  return f;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

std::optional<ExperimentKind> experiment_kind_from_string(const std::string& s) {
  for (const auto& [kind, name] : kKindNames)
    if (name == s) return kind;
  return std::nullopt;
}

std::string format_errors(const std::vector<ConfigError>& errors) {
  std::string out;
  for (const auto& e : errors) out += (e.line > 0 ? "line " + std::to_string(e.line) + ": " : "") + e.message + "\n";
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<SystemSpec> system_from_block(const ConfigBlock& block, std::vector<ConfigError>& errors) {
  const auto name_it = block.find("name");
  if (name_it == block.end()) {
    errors.push_back({0, "missing key 'name' in [system]"});
    return std::nullopt;
  }
  const std::string name = name_it->second.text;
  const int line = name_it->second.line;
  const auto names = system_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    errors.push_back({line, "system.name: unknown system '" + name + "' (known: " + all + ")"});
    return std::nullopt;
  }
  const std::size_t before = errors.size();
  Json v = parse_block(block, system_rules(name), "system", line, errors, " for name = " + name);
  if (errors.size() != before) return std::nullopt;
  try {
    if (name == "identity") return identity_map(space_kind_from_string(v["space"].get<std::string>()));
    if (name == "doubling") return doubling_map();
    if (name == "rotation") return rotation(v["theta"].get<double>());
    if (name == "golden-rotation") return golden_rotation();
    if (name == "intermittent") return intermittent_map(v["alpha"].get<double>());
    if (name == "toral") {
      const auto rows = parse_rows(v["matrix"].get<std::string>());
      if (rows.size() != 2 || rows[0].size() != 2) throw std::invalid_argument("toral matrix must be 2 x 2");
      IntMatrix2 m;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          if (std::floor(rows[i][j]) != rows[i][j]) throw std::invalid_argument("toral matrix must be integer");
          m(i, j) = static_cast<std::int64_t>(rows[i][j]);
        }
      return toral_automorphism(m);
    }
    if (name == "full-shift") return full_shift(v["symbols"].get<int>(), v["window"].get<int>());
    if (name == "golden-mean-shift") {
      const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
      auto s = subshift((Eigen::MatrixXi(2, 2) << 1, 1, 1, 0).finished(),
                        (Eigen::MatrixXd(2, 2) << 1.0 / phi, 1.0 / (phi * phi), 1, 0).finished(), std::nullopt,
                        v["window"].get<int>());
      s.name = "golden-mean-shift";
      return s;
    }
    if (name == "subshift") {
      const auto t = parse_rows(v["transition"].get<std::string>());
      const auto p = parse_rows(v["markov"].get<std::string>());
      Eigen::MatrixXi a(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t[0].size()));
      Eigen::MatrixXd w(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p[0].size()));
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = static_cast<int>(t[i][j]);
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = p[i][j];
      return subshift(a, w, std::nullopt, v["window"].get<int>());
    }
    if (name == "dyadic-permutation") return dyadic_permutation(v["rank"].get<int>());
  } catch (const std::exception& e) {
    errors.push_back({line, "system '" + name + "': " + e.what()});
  }
  return std::nullopt;
}

ConfigParse parse_config(const std::string& text) {
  ConfigParse result;
  auto& errors = result.errors;
  ExperimentConfig cfg;
  cfg.text = text;
  cfg.hash = fnv1a_hex(text);

  std::map<std::string, int> section_lines;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        errors.push_back({line, "unterminated section header"});
        continue;
      }
      current = trim(s.substr(1, s.size() - 2));
      if (section_lines.count(current)) errors.push_back({line, "duplicate section [" + current + "]"});
      section_lines[current] = line;
      cfg.blocks[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      errors.push_back({line, "expected 'key = value'"});
      continue;
    }
    if (current.empty()) {
      errors.push_back({line, "key outside of any section"});
      continue;
    }
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) {
      errors.push_back({line, "empty key"});
      continue;
    }
    auto& block = cfg.blocks[current];
    if (block.count(key)) errors.push_back({line, "duplicate key '" + key + "' in [" + current + "]"});
    block[key] = {value, line};
  }

  // [experiment]
  const auto exp_it = cfg.blocks.find("experiment");
  if (exp_it == cfg.blocks.end()) {
    errors.push_back({0, "missing section [experiment]"});
    return result;
  }
  const auto& exp = exp_it->second;
  const int exp_line = section_line(section_lines, "experiment");
  for (const auto& [key, value] : exp)
    if (key != "kind" && key != "seed" && key != "name")
      errors.push_back({value.line, "unknown key '" + key + "' in [experiment]"});
  std::optional<ExperimentKind> kind;
  if (auto it = exp.find("kind"); it == exp.end()) {
    errors.push_back({exp_line, "missing key 'kind' in [experiment]"});
  } else if (!(kind = experiment_kind_from_string(it->second.text))) {
    std::string all;
    for (const auto& [k, n] : kKindNames) all += (all.empty() ? "" : ", ") + n;
    errors.push_back({it->second.line, "experiment.kind: unknown kind '" + it->second.text + "' (known: " + all + ")"});
  }
  if (auto it = exp.find("seed"); it == exp.end()) {
    errors.push_back({exp_line, "missing key 'seed' in [experiment]; seeds must be explicit"});
  } else {
    std::uint64_t seed = 0;
    const auto& t = it->second.text;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), seed);
    if (ec != std::errc() || p != t.data() + t.size())
      errors.push_back({it->second.line, "experiment.seed: expected a nonnegative integer, got '" + t + "'"});
    cfg.seed = seed;
  }
  if (auto it = exp.find("name"); it != exp.end()) cfg.name = it->second.text;
  if (!kind) return result;
  cfg.kind = *kind;

  const auto& sch = schema(cfg.kind);
  for (const auto& s : sch.required)
    if (!cfg.blocks.count(s)) errors.push_back({0, "missing section [" + s + "] for kind " + to_string(cfg.kind)});
  for (const auto& [name, block] : cfg.blocks) {
    if (name == "experiment" || name == "params") continue;
    const bool used = std::find(sch.required.begin(), sch.required.end(), name) != sch.required.end() ||
                      std::find(sch.optional.begin(), sch.optional.end(), name) != sch.optional.end();
    if (!used)
      errors.push_back({section_line(section_lines, name),
                        "section [" + name + "] is not used by kind " + to_string(cfg.kind)});
  }
  if (cfg.blocks.count("params") && sch.params.empty())
    errors.push_back({section_line(section_lines, "params"), "section [params] is not used by kind " + to_string(cfg.kind)});

  static const ConfigBlock empty;
  auto block = [&](const std::string& n) -> const ConfigBlock& {
    const auto it = cfg.blocks.find(n);
    return it == cfg.blocks.end() ? empty : it->second;
  };

  if (cfg.blocks.count("system")) {
    cfg.system = system_from_block(block("system"), errors);
    cfg.system_params = Json::object();
    for (const auto& [k, v] : block("system")) cfg.system_params[k] = v.text;
  }
  if (cfg.blocks.count("observable")) {
    Json rec;
    cfg.f = observable_from_block(block("observable"), "observable", section_line(section_lines, "observable"),
                                  cfg.system, errors, rec);
    cfg.observable_params["f"] = rec;
  }
  if (cfg.blocks.count("observable.g")) {
    Json rec;
    cfg.g = observable_from_block(block("observable.g"), "observable.g", section_line(section_lines, "observable.g"),
                                  cfg.system, errors, rec);
    cfg.observable_params["g"] = rec;
  }
  if (!sch.params.empty())
    cfg.params = parse_block(block("params"), sch.params, "params", section_line(section_lines, "params"), errors);
  if (cfg.kind == ExperimentKind::ModelCheck)
    cfg.params = parse_block(block("model"), model_rules(), "model", section_line(section_lines, "model"), errors);
  if (cfg.kind == ExperimentKind::KTheory) {
    cfg.params = parse_block(block("ktheory"), ktheory_rules(), "ktheory", section_line(section_lines, "ktheory"), errors);
    const auto& kb = block("ktheory");
    if (errors.empty()) {
      try {
        const auto k0 = parse_group(cfg.params["K0"].get<std::string>());
        make_hom(k0, k0, parse_matrix(cfg.params["a0"].get<std::string>(), k0.generators(), k0.generators()));
      } catch (const std::exception& e) {
        errors.push_back({line_of(kb, "a0", 0), std::string("ktheory.a0: ") + e.what()});
      }
      try {
        const auto k1 = parse_group(cfg.params["K1"].get<std::string>());
        make_hom(k1, k1, parse_matrix(cfg.params["a1"].get<std::string>(), k1.generators(), k1.generators()));
      } catch (const std::exception& e) {
        errors.push_back({line_of(kb, "a1", 0), std::string("ktheory.a1: ") + e.what()});
      }
    }
  }
  if (cfg.kind == ExperimentKind::Asclt && cfg.system && cfg.system->kind == SystemKind::Identity)
    errors.push_back({section_line(section_lines, "system"), "asclt needs a non-trivial system"});
  if (cfg.blocks.count("output")) {
    const auto& ob = block("output");
    for (const auto& [k, v] : ob)
      if (k != "dir") errors.push_back({v.line, "unknown key '" + k + "' in [output]"});
    if (auto it = ob.find("dir"); it != ob.end()) cfg.output_dir = it->second.text;
  }
  if (errors.empty()) result.config = std::move(cfg);
  std::stable_sort(errors.begin(), errors.end(), [](const ConfigError& a, const ConfigError& b) { return a.line < b.line; });
  return result;
}

// ---- running ------------------------------------------------------------------------

namespace {

Json level_json(const MixingLevel& l) {
  return Json{{"raw", l.raw}, {"pass", l.pass}, {"statistic", l.statistic}, {"tolerance", l.tolerance}};
}

std::string csv_header(const ExperimentConfig& cfg) { return "# config_hash=" + cfg.hash + "\n"; }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::size_t as_size(const Json& j) { return static_cast<std::size_t>(j.get<long long>()); }

}  // namespace

RunResult compute_experiment(const ExperimentConfig& cfg, std::map<std::string, std::string>* csv) {
  std::map<std::string, std::string> files;
  RunResult r;
  Json res = Json::object();
  bool pass = true;
  const auto& p = cfg.params;

  switch (cfg.kind) {
    case ExperimentKind::Simulate: {
      const auto& sys = *cfg.system;
      const auto x0 = sample_point(sys, cfg.seed, as_size(p["burn_in"]));
      const auto traj = orbit(sys, x0, as_size(p["n"]));
      std::ostringstream out;
      out.precision(17);
      out << csv_header(cfg);
      const bool torus = sys.space == SpaceKind::Torus;
      out << (torus ? "step,s,t\n" : "step,x\n");
      for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const auto c = coordinates(traj.points[i]);
        out << i << ',' << c[0];
        if (torus) out << ',' << c[1];
        out << '\n';
      }
      files["orbit.csv"] = out.str();
      res["start"] = coordinates(x0);
      res["end"] = coordinates(traj.points.back());
      if (cfg.f) res["birkhoff_average"] = birkhoff_average(*cfg.f, sys, x0, as_size(p["n"]));
      r.summary = "simulated " + std::to_string(as_size(p["n"])) + " steps of " + sys.name;
      break;
    }
    case ExperimentKind::Correlations: {
      const auto& sys = *cfg.system;
      const auto mu = sample_invariant(sys, as_size(p["samples"]), as_size(p["burn_in"]), cfg.seed);
      const auto cs = correlation_series(*cfg.f, cfg.g ? *cfg.g : *cfg.f, sys, mu, p["lags"].get<long>());
      const auto fit = edc_fit(cs);
      double max_z = 0.0;
      for (std::size_t n = 1; n < cs.values.size(); ++n)
        max_z = std::max(max_z, cs.se[n] > 0 ? std::abs(cs.values[n]) / cs.se[n] : (cs.values[n] == 0 ? 0.0 : kInf));
      std::ostringstream out;
      out.precision(17);
      out << csv_header(cfg) << "lag,value,se\n";
      for (std::size_t n = 0; n < cs.values.size(); ++n) out << n << ',' << cs.values[n] << ',' << cs.se[n] << '\n';
      files["correlations.csv"] = out.str();
      res["c0"] = cs.values.front();
      res["max_abs_z"] = max_z;
      res["fit"] = Json{{"status", to_string(fit.status)}, {"C", fit.C}, {"gamma", fit.gamma}, {"residual", fit.residual},
                        {"threshold", fit.threshold}, {"first", fit.first}, {"last", fit.last}, {"points", fit.points}};
      const auto expect = p["expect"].get<std::string>();
      if (expect == "vanishing") pass = max_z <= 3.0;
      if (expect == "decaying") pass = fit.status == FitStatus::Ok;
      r.summary = "C_0 = " + fmt(cs.values.front()) + ", fit " + to_string(fit.status);
      break;
    }
    case ExperimentKind::Clt: {
      const auto& sys = *cfg.system;
      const std::size_t n = as_size(p["n"]), trials = as_size(p["trials"]);
      const auto mu = sample_invariant(sys, trials, as_size(p["burn_in"]), cfg.seed);
      std::optional<double> ref;
      if (!p["reference_sigma2"].is_null()) ref = p["reference_sigma2"].get<double>();
      const auto c = clt_test(*cfg.f, sys, mu, n, trials, normalization_from_string(p["normalization"].get<std::string>()),
                              ref, cfg.seed);
      const double ks_max = p["ks_max"].get<double>();
      res["ks"] = c.ks;
      res["sigma2"] = c.sigma2;
      res["mean"] = c.mean;
      res["var_f"] = c.var_f;
      res["ks_reference"] = optional_json(c.ks_reference);
      res["coboundary"] = c.coboundary;
      res["heaviside"] = c.heaviside;
      pass = c.ks <= ks_max && (!c.ks_reference || *c.ks_reference <= ks_max);
      if (p["variance"].get<bool>()) {
        const auto v = variance_estimate(*cfg.f, sys, mu, n, trials, cfg.seed);
        res["variance"] = Json{{"direct", v.direct},     {"direct_se", v.direct_se},         {"green_kubo", v.green_kubo},
                               {"green_kubo_se", v.green_kubo_se}, {"lags", v.lags}, {"c0", v.c0},
                               {"agree", v.agree},       {"coboundary", v.coboundary}};
        auto within = [&](double s) {
          if (!p["sigma2_min"].is_null() && s < p["sigma2_min"].get<double>()) return false;
          if (!p["sigma2_max"].is_null() && s > p["sigma2_max"].get<double>()) return false;
          return true;
        };
        pass = pass && within(v.direct) && within(v.green_kubo);
      }
      r.summary = "KS = " + fmt(c.ks) + ", sigma2 = " + fmt(c.sigma2);
      break;
    }
    case ExperimentKind::Asclt: {
      const auto& sys = *cfg.system;
      const auto x = sample_point(sys, cfg.seed, as_size(p["burn_in"]));
      std::optional<double> ref;
      if (!p["reference_sigma2"].is_null()) ref = p["reference_sigma2"].get<double>();
      const auto a = asclt_test(*cfg.f, sys, x, as_size(p["n"]), p["mean"].get<double>(), ref);
      res["harmonic"] = a.harmonic;
      res["sigma2"] = a.sigma2;
      res["ks"] = a.ks;
      res["ks_reference"] = optional_json(a.ks_reference);
      res["scale"] = a.scale;
      res["mass_near_zero"] = a.mass_near_zero;
      const double ks_max = p["ks_max"].get<double>();
      pass = a.ks <= ks_max && (!a.ks_reference || *a.ks_reference <= ks_max);
      r.summary = "KS = " + fmt(a.ks) + ", D_n = " + fmt(a.harmonic);
      break;
    }
    case ExperimentKind::Deviation: {
      const auto& sys = *cfg.system;
      const std::size_t trials = as_size(p["trials"]);
      const auto mu = sample_invariant(sys, trials, as_size(p["burn_in"]), cfg.seed);
      std::vector<double> eps;
      for (const auto& e : p["eps"]) eps.push_back(e.get<double>());
      std::vector<std::size_t> ns;
      for (const auto& n : p["n_list"]) ns.push_back(as_size(n));
      const auto profiles = deviation_sweep(*cfg.f, sys, mu, eps, ns, trials, cfg.seed);
      std::ostringstream out;
      out.precision(17);
      out << csv_header(cfg) << "eps,n,probability,censored\n";
      Json arr = Json::array();
      for (const auto& prof : profiles) {
        Json pts = Json::array();
        for (const auto& pt : prof.points) {
          out << prof.eps << ',' << pt.n << ',' << pt.probability << ',' << (pt.censored ? 1 : 0) << '\n';
          pts.push_back(Json{{"n", pt.n}, {"probability", pt.probability}, {"censored", pt.censored}});
        }
        arr.push_back(Json{{"eps", prof.eps}, {"c1", prof.c1}, {"c2", prof.c2}, {"residual", prof.residual},
                           {"fitted", prof.fitted}, {"decaying", prof.decaying}, {"monotone", prof.monotone},
                           {"points", pts}});
        pass = pass && prof.decaying && prof.monotone;
      }
      files["deviation.csv"] = out.str();
      res["profiles"] = arr;
      r.summary = std::to_string(profiles.size()) + " deviation profile(s)";
      break;
    }
    case ExperimentKind::ChaosCert: {
      ChaosOptions o;
      o.transitivity_eps = p["transitivity_eps"].get<double>();
      o.horizon = as_size(p["horizon"]);
      o.periodic_eps = p["periodic_eps"].get<double>();
      o.max_period = p["max_period"].get<int>();
      o.sensitivity_trials = as_size(p["sensitivity_trials"]);
      o.sensitivity_horizon = as_size(p["sensitivity_horizon"]);
      o.probe_eps = p["probe_eps"].get<double>();
      o.seed = cfg.seed;
      const auto c = chaos_certificate(*cfg.system, o);
      res["transitivity"] = Json{{"pass", c.transitivity.pass},        {"symbolic", c.transitivity.symbolic},
                                 {"cells", c.transitivity.cells},      {"empty_cells", c.transitivity.empty_cells},
                                 {"witnesses", c.transitivity.witnesses.size()},
                                 {"missing", c.transitivity.missing.size()}};
      res["periodic"] = Json{{"pass", c.periodic.pass},
                             {"witnesses", c.periodic.witnesses.size()},
                             {"missing", c.periodic.missing.size()}};
      res["sensitivity"] = Json{{"delta_hat", c.sensitivity.delta_hat}, {"sensitive", c.sensitivity.sensitive}};
      res["devaney"] = c.devaney;
      std::ostringstream out;
      out.precision(17);
      out << csv_header(cfg) << "cell,x,period,numerator,denominator\n";
      for (const auto& w : c.periodic.witnesses) {
        out << w.cell.code << ',' << coordinates(w.x)[0] << ',' << w.period << ',';
        if (w.rational) out << w.rational->first << ',' << w.rational->second;
        else out << ',';
        out << '\n';
      }
      files["periodic_witnesses.csv"] = out.str();
      pass = c.devaney;
      r.summary = std::string("devaney ") + (c.devaney ? "yes" : "no");
      break;
    }
    case ExperimentKind::MixingClass: {
      const auto& sys = *cfg.system;
      const std::size_t trials = as_size(p["trials"]);
      const auto mu = sample_invariant(sys, trials, as_size(p["burn_in"]), cfg.seed);
      MixingOptions o;
      o.periodic_tol = p["periodic_tol"].get<double>();
      o.max_period = p["max_period"].get<int>();
      o.product_check = p["product_check"].get<bool>();
      o.observable = cfg.f;
      o.seed = cfg.seed;
      const auto v = mixing_classifier(sys, mu, p["depth"].get<int>(), as_size(p["N"]), trials, o);
      const std::string level = v.strong.pass ? "strong" : v.weak.pass ? "weak" : v.ergodic.pass ? "ergodic" : "not-ergodic";
      res["level"] = level;
      res["periodic_fraction"] = v.periodic_fraction;
      res["cells"] = v.cells;
      res["cells_dropped"] = v.cells_dropped;
      res["antiperiodic"] = level_json(v.antiperiodic);
      res["ergodic"] = level_json(v.ergodic);
      res["weak"] = level_json(v.weak);
      res["strong"] = level_json(v.strong);
      res["product_ergodic"] = v.product_ergodic ? level_json(*v.product_ergodic) : Json(nullptr);
      res["cesaro_abs_correlation"] = optional_json(v.cesaro_abs_correlation);
      res["warnings"] = v.warnings;
      const auto expect = p["expect"].get<std::string>();
      if (expect != "none") pass = expect == level;
      r.summary = "mixing level " + level;
      break;
    }
    case ExperimentKind::ModelCheck: {
      std::vector<double> K;
      for (const auto& k : p["K"]) K.push_back(k.get<double>());
      const auto stages = generate_parameters(p["stages"].get<int>(), BigInt(p["p1"].get<long long>()),
                                              BigInt(p["q1"].get<long long>()), K);
      Json arr = Json::array();
      for (const auto& s : stages) {
        Json st{{"m", s.m}, {"p", s.p.str()}, {"q", s.q.str()}, {"K", s.K}, {"z", s.z}};
        if (s.has_next) {
          const auto bad = validate_stage(s);
          const auto x = xi_schedule(s);
          const auto lip = lipschitz_scaling_check(1.0, x, s.K);
          const auto feas = boundary_feasibility(s);
          st["N"] = s.N.str();
          st["p_next"] = s.p_next.str();
          st["q_next"] = s.q_next.str();
          st["bands"] = Json::array({x.identity.str(), x.constant.str(), x.retraction.str()});
          st["bound"] = s.bound;
          st["ratio"] = s.ratio;
          st["identity_fraction"] = identity_fraction_exact(s);
          st["violations"] = bad;
          st["lipschitz"] = Json{{"factor", lip.factor}, {"budget", lip.budget}, {"pass", lip.pass}};
          st["boundary_feasible"] = Json{{"x0", feas.x0_feasible}, {"x1", feas.x1_feasible}};
          pass = pass && bad.empty() && lip.pass;
        }
        arr.push_back(st);
      }
      res["stages"] = arr;
      std::ostringstream out;
      out << csv_header(cfg);
      write_stage_csv(out, stages);
      files["stages.csv"] = out.str();
      r.summary = std::to_string(stages.size()) + " stage(s)";
      break;
    }
    case ExperimentKind::KTheory: {
      const auto k0 = parse_group(p["K0"].get<std::string>()), k1 = parse_group(p["K1"].get<std::string>());
      const auto a0 = make_hom(k0, k0, parse_matrix(p["a0"].get<std::string>(), k0.generators(), k0.generators()));
      const auto a1 = make_hom(k1, k1, parse_matrix(p["a1"].get<std::string>(), k1.generators(), k1.generators()));
      const auto pv = pv_crossed_kgroups(k0, k1, a0, a1);
      auto degree = [](const PVDegree& d) {
        return Json{{"sub", to_string(d.sub)},
                    {"quotient", to_string(d.quotient)},
                    {"split", d.split},
                    {"group", d.group ? Json(to_string(*d.group)) : Json(nullptr)}};
      };
      res["K0"] = degree(pv.k0);
      res["K1"] = degree(pv.k1);
      res["result"] = to_string(pv);
      res["order_note"] = pv.order_note ? Json(*pv.order_note) : Json(nullptr);
      if (!p["expect"].is_null()) pass = p["expect"].get<std::string>() == to_string(pv);
      r.summary = to_string(pv);
      break;
    }
  }

  r.verdict = pass ? Verdict::Pass : Verdict::Fail;
  Json rep;
  rep["kind"] = to_string(cfg.kind);
  rep["name"] = cfg.name;
  rep["version"] = kVersion;
  rep["config_hash"] = cfg.hash;
  rep["seed"] = cfg.seed;
  if (cfg.system) rep["system"] = cfg.system_params;
  if (!cfg.observable_params.is_null()) rep["observables"] = cfg.observable_params;
  rep["parameters"] = cfg.params;
  rep["results"] = res;
  rep["verdict"] = pass ? "PASS" : "FAIL";
  r.report = rep;
  for (const auto& [name, body] : files) r.files.push_back(name);
  if (csv) *csv = std::move(files);
  return r;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  std::map<std::string, std::string> csv;
  auto r = compute_experiment(cfg, &csv);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& body) {
    const auto path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  };
  write("report.json", r.report.dump(2) + "\n");
  for (const auto& [name, body] : csv) write(name, body);
  Json manifest;
  manifest["config_hash"] = cfg.hash;
  manifest["seed"] = cfg.seed;
  manifest["version"] = kVersion;
  manifest["kind"] = to_string(cfg.kind);
  Json files = Json::array({"report.json"});
  for (const auto& f : r.files) files.push_back(f);
  manifest["files"] = files;
  manifest["config"] = cfg.text;
  write("manifest.json", manifest.dump(2) + "\n");
  r.files.insert(r.files.begin(), "report.json");
  r.files.push_back("manifest.json");
  return r;
}

}  // namespace tracial
