#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "costs.hpp"
#include "dual.hpp"
#include "ineq.hpp"
#include "order.hpp"
#include "primal.hpp"
#include "product.hpp"

namespace weakot {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.3.0";

// Malformed input. The message names the file and either the line/column or the offending field path.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace io_detail {

inline std::string join_path(const std::string& path, const std::string& key) { return path + "/" + key; }

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(join_path(path, key) + ": missing field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw FormatError(path + ": expected a number");
}

inline double number_field(const json& j, const std::string& key, const std::string& path) {
  return number(field(j, key, path), join_path(path, key));
}

inline double number_or(const json& j, const std::string& key, double dflt, const std::string& path) {
  return j.contains(key) ? number(j.at(key), join_path(path, key)) : dflt;
}

inline std::vector<double> vector_of(const json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path + ": expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "/" + std::to_string(i)));
  return v;
}

inline std::vector<std::vector<double>> matrix_of(const json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path + ": expected an array of arrays");
  std::vector<std::vector<double>> m;
  for (std::size_t i = 0; i < j.size(); ++i) m.push_back(vector_of(j[i], path + "/" + std::to_string(i)));
  return m;
}

inline Table table_of(const json& j, const std::string& path, std::size_t n) {
  const auto m = matrix_of(j, path);
  if (m.size() != n) throw FormatError(path + ": expected " + std::to_string(n) + " rows, got " + std::to_string(m.size()));
  Table t(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n)
      throw FormatError(path + "/" + std::to_string(i) + ": expected " + std::to_string(n) + " entries");
    for (std::size_t k = 0; k < n; ++k) t(i, k) = m[i][k];
  }
  return t;
}

template <class F>
auto wrap_domain(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const FormatError&) {
    throw;
  } catch (const std::domain_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

} // namespace io_detail

// Non-finite numbers are written as the strings "inf", "-inf", "nan".
inline json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline json num_array(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline json table_json(const Table& t) {
  json a = json::array();
  for (std::size_t i = 0; i < t.rows; ++i) a.push_back(num_array(t.row(i)));
  return a;
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(source + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::string& path) { return parse_json_text(read_file(path), path); }

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << text;
}

// FNV-1a, 64 bit, hex.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << h;
  return ss.str();
}

// --- core -------------------------------------------------------------------

inline json to_json(const FiniteSpace& X) {
  json j;
  j["labels"] = json::array();
  for (std::size_t i = 0; i < X.size(); ++i) j["labels"].push_back(X.label(i));
  if (X.has_coords()) {
    j["coords"] = json::array();
    for (std::size_t i = 0; i < X.size(); ++i) j["coords"].push_back(X.coord(i));
  }
  Table d(X.size(), X.size());
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t k = 0; k < X.size(); ++k) d(i, k) = X.dist(i, k);
  j["dist"] = table_json(d);
  return j;
}

// "dist" may be omitted when "coords" is present; distances then come from the default norm.
inline FiniteSpace space_from_json(const json& j, const std::string& path = "") {
  using namespace io_detail;
  const json& lj = field(j, "labels", path);
  if (!lj.is_array()) throw FormatError(path + "/labels: expected an array of strings");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < lj.size(); ++i) {
    if (!lj[i].is_string()) throw FormatError(path + "/labels/" + std::to_string(i) + ": expected a string");
    labels.push_back(lj[i].get<std::string>());
  }
  std::optional<std::vector<std::vector<double>>> coords;
  if (j.contains("coords")) coords = matrix_of(j.at("coords"), path + "/coords");
  return wrap_domain(path, [&] {
    if (!j.contains("dist")) {
      if (!coords) throw FormatError(path + "/dist: missing field (needed when coords are absent)");
      return FiniteSpace::from_coords(labels, *coords);
    }
    return FiniteSpace(labels, coords, table_of(j.at("dist"), path + "/dist", labels.size()), true);
  });
}

inline json to_json(const DiscreteMeasure& m, const std::string& space_id = "") {
  json j;
  if (space_id.empty())
    j["space"] = to_json(*m.space());
  else
    j["space"] = space_id;
  j["weights"] = num_array(m.weights());
  return j;
}

// Resolves "space" ids to file paths relative to a base directory, so measures read from the same space
// file share one SpacePtr.
class SpaceRegistry {
public:
  explicit SpaceRegistry(std::filesystem::path base = ".") : base_(std::move(base)) {}

  SpacePtr get(const std::string& id) {
    auto p = std::filesystem::weakly_canonical(base_ / id);
    auto it = cache_.find(p.string());
    if (it != cache_.end()) return it->second;
    auto X = make_space(space_from_json(read_json_file(p.string()), p.string()));
    cache_.emplace(p.string(), X);
    return X;
  }
  void add(const std::string& id, SpacePtr X) { cache_[std::filesystem::weakly_canonical(base_ / id).string()] = std::move(X); }
  void rebase(std::filesystem::path base) { base_ = std::move(base); }

private:
  std::filesystem::path base_;
  std::map<std::string, SpacePtr> cache_;
};

inline DiscreteMeasure measure_from_json(const json& j, SpaceRegistry& reg, const std::string& path = "") {
  using namespace io_detail;
  const json& sj = field(j, "space", path);
  SpacePtr X;
  if (sj.is_string())
    X = reg.get(sj.get<std::string>());
  else if (sj.is_object())
    X = make_space(space_from_json(sj, path + "/space"));
  else
    throw FormatError(path + "/space: expected a space id or an inline space");
  auto w = vector_of(field(j, "weights", path), path + "/weights");
  return wrap_domain(path, [&] { return DiscreteMeasure(X, std::move(w)); });
}

inline DiscreteMeasure load_measure(const std::string& file, SpaceRegistry& reg) {
  reg.rebase(std::filesystem::path(file).parent_path());
  return measure_from_json(read_json_file(file), reg, file);
}

// --- costs ------------------------------------------------------------------

inline const char* scalar_tag_name(ScalarFn::Tag t) {
  switch (t) {
    case ScalarFn::Tag::power: return "power";
    case ScalarFn::Tag::alpha_t: return "alpha_t";
    case ScalarFn::Tag::beta_t: return "beta_t";
    case ScalarFn::Tag::beta_t_star: return "beta_t_star";
    case ScalarFn::Tag::theta_rho_t: return "theta_rho_t";
    case ScalarFn::Tag::theta_rho_t_n: return "theta_rho_t_n";
    case ScalarFn::Tag::c_lambda_t: return "c_lambda_t";
    case ScalarFn::Tag::w: return "w";
    case ScalarFn::Tag::tabulated: return "tabulated";
  }
  return "?";
}

inline json to_json(const ScalarFn& f) {
  json j{{"tag", scalar_tag_name(f.tag)}};
  switch (f.tag) {
    case ScalarFn::Tag::power: j["r"] = f.r; break;
    case ScalarFn::Tag::alpha_t: case ScalarFn::Tag::beta_t: case ScalarFn::Tag::beta_t_star: j["t"] = f.t; break;
    case ScalarFn::Tag::theta_rho_t: j["rho"] = f.rho; j["t"] = static_cast<int>(f.t); break;
    case ScalarFn::Tag::theta_rho_t_n:
      j["rho"] = f.rho;
      j["t"] = static_cast<int>(f.t);
      j["n"] = f.n;
      break;
    case ScalarFn::Tag::c_lambda_t: j["lambda"] = f.lambda; j["t"] = static_cast<int>(f.t); break;
    case ScalarFn::Tag::w: break;
    case ScalarFn::Tag::tabulated:
      j["knots"] = num_array(f.knots);
      j["values"] = num_array(f.values);
      j["convex"] = f.convex_flag;
      break;
  }
  if (f.scale != 1.0) j["scale"] = f.scale;
  return j;
}

inline ScalarFn scalar_from_json(const json& j, const std::string& path = "") {
  using namespace io_detail;
  const json& tj = field(j, "tag", path);
  if (!tj.is_string()) throw FormatError(path + "/tag: expected a string");
  const std::string tag = tj.get<std::string>();
  auto endpoint = [&](const char* key) {
    const double t = number_field(j, key, path);
    if (t != 0.0 && t != 1.0) throw FormatError(join_path(path, key) + ": endpoint must be 0 or 1");
    return static_cast<int>(t);
  };
  ScalarFn f = wrap_domain(path, [&]() -> ScalarFn {
    if (tag == "power") return ScalarFn::power(number_field(j, "r", path));
    if (tag == "alpha_t") return ScalarFn::alpha(number_field(j, "t", path));
    if (tag == "beta_t") return ScalarFn::beta(number_field(j, "t", path));
    if (tag == "beta_t_star") return ScalarFn::beta_star(number_field(j, "t", path));
    if (tag == "theta_rho_t") return ScalarFn::theta(number_field(j, "rho", path), endpoint("t"));
    if (tag == "theta_rho_t_n")
      return ScalarFn::theta_n(number_field(j, "rho", path), endpoint("t"), number_field(j, "n", path));
    if (tag == "c_lambda_t") return ScalarFn::c_lambda(number_field(j, "lambda", path), endpoint("t"));
    if (tag == "w") return ScalarFn::w();
    if (tag == "tabulated") {
      const bool convex = j.contains("convex") ? j.at("convex").get<bool>() : true;
      return ScalarFn::tabulated(vector_of(field(j, "knots", path), path + "/knots"),
                                 vector_of(field(j, "values", path), path + "/values"), convex);
    }
    throw FormatError(path + "/tag: unknown scalar function '" + tag + "'");
  });
  if (j.contains("scale")) f = wrap_domain(path + "/scale", [&] { return f.scaled(number(j.at("scale"), path + "/scale")); });
  return f;
}

inline json to_json(const GammaSpec& g) {
  if (g.tag == GammaSpec::Tag::hamming) return json{{"tag", "hamming"}};
  return json{{"tag", "power"}, {"r", g.r}};
}

inline GammaSpec gamma_from_json(const json& j, const std::string& path = "") {
  using namespace io_detail;
  const std::string tag = field(j, "tag", path).get<std::string>();
  if (tag == "hamming") return GammaSpec::hamming();
  if (tag == "power") return wrap_domain(path, [&] { return GammaSpec::power(number_field(j, "r", path)); });
  throw FormatError(path + "/tag: unknown gamma '" + tag + "'");
}

inline const char* norm_name(Norm n) {
  switch (n) {
    case Norm::abs: return "abs";
    case Norm::euclidean: return "euclidean";
    case Norm::l1: return "l1";
    case Norm::linf: return "linf";
  }
  return "?";
}

inline json to_json(const CostSpec& c) {
  json j{{"family", family_name(c.family)}};
  switch (c.family) {
    case CostSpec::Family::classical: j["omega"] = table_json(c.omega); break;
    case CostSpec::Family::marton:
      j["alpha"] = to_json(c.fn);
      j["gamma"] = to_json(c.gamma);
      break;
    case CostSpec::Family::barycentric:
      j["theta"] = to_json(c.fn);
      if (c.norm) j["norm"] = norm_name(*c.norm);
      break;
    case CostSpec::Family::samson:
      j["beta"] = to_json(c.fn);
      j["gamma"] = to_json(c.gamma);
      if (c.mu0) j["mu0"] = num_array(c.mu0->weights());
      break;
  }
  if (c.scale != 1.0) j["scale"] = c.scale;
  return j;
}

// `X` resolves classical "distance_power" and samson "mu0" weights; a samson cost without "mu0" takes
// `default_mu0` when given.
inline CostSpec cost_from_json(const json& j, const SpacePtr& X, const std::string& path = "",
                               const std::optional<DiscreteMeasure>& default_mu0 = std::nullopt) {
  using namespace io_detail;
  const json& fj = field(j, "family", path);
  if (!fj.is_string()) throw FormatError(path + "/family: expected a string");
  const std::string fam = fj.get<std::string>();
  CostSpec c;
  if (fam == "classical") {
    if (j.contains("omega")) {
      if (!X) throw FormatError(path + "/omega: no space to size the table against");
      c = CostSpec::classical(table_of(j.at("omega"), path + "/omega", X->size()));
    } else if (j.contains("distance_power")) {
      if (!X) throw FormatError(path + "/distance_power: no space given");
      c = CostSpec::classical_distance(*X, number(j.at("distance_power"), path + "/distance_power"));
    } else {
      throw FormatError(path + "/omega: missing field (or give distance_power)");
    }
  } else if (fam == "marton") {
    c = CostSpec::marton(scalar_from_json(field(j, "alpha", path), path + "/alpha"),
                         gamma_from_json(field(j, "gamma", path), path + "/gamma"));
  } else if (fam == "barycentric") {
    std::optional<Norm> nm;
    if (j.contains("norm")) {
      const std::string s = j.at("norm").get<std::string>();
      if (s == "abs") nm = Norm::abs;
      else if (s == "euclidean") nm = Norm::euclidean;
      else if (s == "l1") nm = Norm::l1;
      else if (s == "linf") nm = Norm::linf;
      else throw FormatError(path + "/norm: unknown norm '" + s + "'");
    }
    c = CostSpec::barycentric(scalar_from_json(field(j, "theta", path), path + "/theta"), nm);
  } else if (fam == "samson") {
    std::optional<DiscreteMeasure> mu0 = default_mu0;
    if (j.contains("mu0")) {
      if (!X) throw FormatError(path + "/mu0: no space given");
      auto w = vector_of(j.at("mu0"), path + "/mu0");
      mu0 = wrap_domain(path + "/mu0", [&] { return DiscreteMeasure(X, std::move(w)); });
    }
    if (!mu0) throw FormatError(path + "/mu0: missing field");
    c = CostSpec::samson(scalar_from_json(field(j, "beta", path), path + "/beta"),
                         gamma_from_json(field(j, "gamma", path), path + "/gamma"), *mu0);
  } else {
    throw FormatError(path + "/family: unknown family '" + fam + "'");
  }
  if (j.contains("scale")) c = wrap_domain(path + "/scale", [&] { return c.scaled(number(j.at("scale"), path + "/scale")); });
  return c;
}

// --- reports ----------------------------------------------------------------

inline json to_json(const Tolerances& t) {
  return json{{"weight_sum", t.weight_sum},
              {"kernel_row", t.kernel_row},
              {"coupling_marginal", t.coupling_marginal},
              {"metric", t.metric},
              {"convexity", t.convexity},
              {"fw_gap", t.fw_gap},
              {"fw_max_iter", t.fw_max_iter},
              {"line_search_width", t.line_search_width},
              {"legendre_abs", t.legendre_abs},
              {"vbar", t.vbar},
              {"weak_duality", t.weak_duality},
              {"order_mean", t.order_mean},
              {"strassen_accept", t.strassen_accept},
              {"poisson_tail", t.poisson_tail},
              {"threshold", t.threshold}};
}

inline json to_json(const SolveReport& r) {
  json j{{"primal_value", num(r.primal_value)},
         {"dual_value", num(r.dual_value)},
         {"gap", num(r.gap)},
         {"iterations", r.iterations},
         {"status", status_name(r.status)},
         {"fw_gap", num(r.fw_gap)},
         {"fw_gap_history", num_array(r.fw_gap_history)},
         {"tolerances", to_json(r.tolerances)}};
  if (!std::isnan(r.gap)) j["relative_gap"] = num(relative_gap(r));
  j["coupling"] = r.coupling ? table_json(r.coupling->joint) : json(nullptr);
  return j;
}

inline json to_json(const DualPotential& d) {
  return json{{"phi", num_array(d.phi.values)},
              {"r_c_phi", num_array(d.r_c_phi.values)},
              {"dual_value", num(d.dual_value)},
              {"method", method_name(d.method)}};
}

inline json to_json(const Kernel& k) { return table_json(k.rows); }

inline json to_json(const ConvexWitness& w) {
  return json{{"knots", num_array(w.knots)}, {"values", num_array(w.values)}};
}

inline json to_json(const OrderReport& r) {
  json j{{"ordered", r.ordered},
         {"mean_gap", num(r.mean_gap)},
         {"worst_call_gap", num(r.worst_call_gap)},
         {"t_bar_1", num(r.t_bar_1)},
         {"tolerances", to_json(default_tolerances())}};
  j["witness_a"] = r.witness_a ? num(*r.witness_a) : json(nullptr);
  j["kernel"] = r.kernel ? to_json(*r.kernel) : json(nullptr);
  return j;
}

inline json to_json(const StrassenResult& r) {
  json j{{"success", r.success},
         {"t_bar_1", num(r.t_bar_1)},
         {"residual", num(r.residual)},
         {"witness_gap", num(r.witness_gap)},
         {"certified", r.certified},
         {"tolerances", to_json(default_tolerances())}};
  j["kernel"] = r.kernel ? to_json(*r.kernel) : json(nullptr);
  j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
  return j;
}

inline json to_json(const InequalitySpec& s) {
  json j{{"kind", kind_name(s.kind)}, {"cost", to_json(s.cost)}, {"base", num_array(s.base.weights())}};
  switch (s.kind) {
    case InequalitySpec::Kind::te: j["a1"] = s.a1; j["a2"] = s.a2; break;
    case InequalitySpec::Kind::te_plus: case InequalitySpec::Kind::te_minus: j["b"] = s.b; break;
    case InequalitySpec::Kind::tau_lsi: j["lambda"] = s.lambda; j["C"] = s.C; break;
  }
  return j;
}

inline json to_json(const InequalityReport& r, bool with_values = false) {
  json j{{"label", r.label},
         {"spec", to_json(r.spec)},
         {"worst_violation", num(r.worst_violation)},
         {"worst_abs", num(r.worst_abs)},
         {"trials", r.trials},
         {"method", search_name(r.method)},
         {"tolerance", r.tolerance},
         {"equality", r.equality},
         {"passed", r.passed()},
         {"seed", r.seed},
         {"tolerances", to_json(r.tolerances)}};
  json w = json::object();
  if (r.witness_nu1) w["nu1"] = num_array(r.witness_nu1->weights());
  if (r.witness_nu2) w["nu2"] = num_array(r.witness_nu2->weights());
  if (r.witness_f) w["f"] = num_array(r.witness_f->values);
  j["witness"] = w;
  if (with_values) j["values"] = num_array(r.values);
  return j;
}

inline json to_json(const Certification& c, bool with_values = false) {
  json j{{"name", c.name}, {"passed", c.passed()}, {"worst_violation", num(c.worst_violation())}};
  j["info"] = json::object();
  for (const auto& [k, v] : c.info) j["info"][k] = num(v);
  j["reports"] = json::array();
  for (const auto& r : c.reports) j["reports"].push_back(to_json(r, with_values));
  return j;
}

inline json to_json(const EnlargementReport& e) {
  json A = json::array();
  for (auto a : e.A) A.push_back(a);
  return json{{"A", A},
              {"t_grid", num_array(e.t_grid)},
              {"c_A_values", num_array(e.c_A_values)},
              {"mass_A", num(e.mass_A)},
              {"mass_outside", num_array(e.mass_outside)},
              {"lhs", num_array(e.lhs)},
              {"rhs", num_array(e.rhs)},
              {"K", num(e.K)},
              {"r", num(e.r)},
              {"eps_of_t", num_array(e.eps_of_t)}};
}

// Per-set detail is large; `max_sets` bounds how many EnlargementReports are embedded (worst first).
inline json to_json(const ConcentrationReport& r, std::size_t max_sets = 16) {
  json j{{"n_sets", r.sets.size()},
         {"worst_ratio", num(r.worst_ratio)},
         {"worst_set", r.worst_set},
         {"worst_t", num(r.worst_t)},
         {"empirical_K", num(r.empirical_K)},
         {"exhaustive", r.exhaustive},
         {"passed", r.worst_ratio <= 1.0 + 1e-8},
         {"tolerances", to_json(default_tolerances())}};
  j["sets"] = json::array();
  if (!r.sets.empty() && max_sets > 0) {
    j["sets"].push_back(to_json(r.sets[r.worst_set]));
    for (std::size_t i = 0; i < r.sets.size() && j["sets"].size() < max_sets; ++i)
      if (i != r.worst_set) j["sets"].push_back(to_json(r.sets[i]));
  }
  return j;
}

inline json to_json(const HalfSpaceBounds& h) {
  json vac = json::array();
  for (bool v : h.vacuous) vac.push_back(v);
  return json{{"t_grid", num_array(h.t_grid)},
              {"s", h.s},
              {"exponent_outside", num(h.exponent_outside)},
              {"exponent_A", num(h.exponent_A)},
              {"forward_bound", num_array(h.forward_bound)},
              {"forward_observed", num_array(h.forward_observed)},
              {"converse_numeric", num_array(h.converse_numeric)},
              {"converse_closed", num_array(h.converse_closed)},
              {"eps_of_t", num_array(h.eps_of_t)},
              {"vacuous", vac},
              {"converse_observed", num_array(h.converse_observed)}};
}

inline json to_json(const ChainRuleReport& r) {
  json j{{"direct", num(r.direct)}, {"composed", num(r.composed)}, {"bound", num(r.bound)}, {"eps", num(r.eps)}};
  j["coupling"] = r.coupling ? table_json(r.coupling->joint) : json(nullptr);
  return j;
}

// --- run manifest -----------------------------------------------------------

struct RunManifest {
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  Tolerances tolerances = default_tolerances();
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
  std::string version = kVersion;
  double wall_time = 0.0;  // seconds

  void add_input(const std::string& path) { inputs.emplace_back(path, digest(read_file(path))); }
};

inline json to_json(const RunManifest& m) {
  json in = json::array();
  for (const auto& [p, d] : m.inputs) in.push_back(json{{"path", p}, {"digest", d}});
  return json{{"argv", m.argv},
              {"seed", m.seed},
              {"tolerances", to_json(m.tolerances)},
              {"inputs", in},
              {"version", m.version},
              {"wall_time", m.wall_time}};
}

inline RunManifest manifest_from_json(const json& j, const std::string& path = "/manifest") {
  using namespace io_detail;
  RunManifest m;
  const json& a = field(j, "argv", path);
  if (!a.is_array()) throw FormatError(path + "/argv: expected an array of strings");
  for (const auto& s : a) m.argv.push_back(s.get<std::string>());
  m.seed = field(j, "seed", path).get<std::uint64_t>();
  m.version = field(j, "version", path).get<std::string>();
  m.wall_time = number_or(j, "wall_time", 0.0, path);
  if (j.contains("inputs"))
    for (const auto& e : j.at("inputs"))
      m.inputs.emplace_back(field(e, "path", path + "/inputs").get<std::string>(),
                            field(e, "digest", path + "/inputs").get<std::string>());
  return m;
}

} // namespace weakot
