// weakot: command-line front end. Reports are JSON (stdout or --out), per-trial rows go to --csv.
// Exit codes: 0 success, 2 counterexample found, 1 usage/format/domain error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weakot/weakot.hpp"

using namespace weakot;

namespace {

constexpr int kOk = 0, kUsage = 1, kCounterexample = 2;

struct Common {
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::optional<int> budget;
  std::string out, csv;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "64-bit seed for every random stream")->capture_default_str();
  sub->add_option("--tol", c.tol, "tolerance (solver gap, or pass tolerance for checks)");
  sub->add_option("--budget", c.budget, "iteration or sample budget");
  sub->add_option("--out", c.out, "write the JSON report here instead of stdout");
  sub->add_option("--csv", c.csv, "write per-trial rows here");
}

// Fixed columns: instance_id, family, n_points, primal, dual, gap, violation, seed (+ pass for repro).
struct CsvRow {
  std::string id, family;
  std::size_t n_points = 0;
  double primal = NAN, dual = NAN, gap = NAN, violation = NAN;
  std::uint64_t seed = 0;
  std::optional<bool> pass;
};

CsvRow row(std::string id, std::string family, std::size_t n_points, double primal, double dual, double gap,
           double violation, std::uint64_t seed) {
  CsvRow r;
  r.id = std::move(id);
  r.family = std::move(family);
  r.n_points = n_points;
  r.primal = primal;
  r.dual = dual;
  r.gap = gap;
  r.violation = violation;
  r.seed = seed;
  return r;
}

std::string csv_num(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string csv_text(const std::vector<CsvRow>& rows, bool with_pass) {
  std::ostringstream s;
  s << "instance_id,family,n_points,primal,dual,gap,violation,seed" << (with_pass ? ",pass" : "") << "\n";
  for (const auto& r : rows) {
    s << r.id << ',' << r.family << ',' << r.n_points << ',' << csv_num(r.primal) << ',' << csv_num(r.dual) << ','
      << csv_num(r.gap) << ',' << csv_num(r.violation) << ',' << r.seed;
    if (with_pass) s << ',' << (r.pass.value_or(false) ? "true" : "false");
    s << "\n";
  }
  return s.str();
}

// "a:step:b" or a comma-separated list.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  auto to_d = [&](const std::string& p) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size() || p.empty()) throw CLI::ValidationError("--tgrid", "bad number '" + p + "'");
    return v;
  };
  if (s.find(':') != std::string::npos) {
    const auto a = s.find(':'), b = s.find(':', a + 1);
    if (b == std::string::npos) throw CLI::ValidationError("--tgrid", "expected lo:step:hi");
    const double lo = to_d(s.substr(0, a)), step = to_d(s.substr(a + 1, b - a - 1)), hi = to_d(s.substr(b + 1));
    if (!(step > 0.0) || hi < lo) throw CLI::ValidationError("--tgrid", "need step > 0 and hi >= lo");
    const auto k = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= k; ++i) out.push_back(lo + step * static_cast<double>(i));
  } else {
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ',')) out.push_back(to_d(p));
  }
  if (out.empty()) throw CLI::ValidationError("--tgrid", "empty grid");
  return out;
}

// One invocation: parsed inputs, the report being built, and the manifest that goes with it.
struct Run {
  RunManifest manifest;
  SpaceRegistry registry;
  json report = json::object();
  std::vector<CsvRow> rows;
  bool csv_pass = false;
  int code = kOk;

  DiscreteMeasure measure(const std::string& file) {
    manifest.add_input(file);
    return load_measure(file, registry);
  }
  CostSpec cost(const std::string& file, const DiscreteMeasure& mu) {
    manifest.add_input(file);
    return cost_from_json(read_json_file(file), mu.space(), file, mu);
  }
};

SolveOptions solve_options(const Common& c) {
  SolveOptions o;
  if (c.tol) o.tol = *c.tol;
  if (c.budget) o.max_iter = *c.budget;
  return o;
}

// --- transport ------------------------------------------------------------------------------

struct Instance {
  std::string cost, mu, nu;
};

void add_instance(CLI::App* sub, Instance& in) {
  sub->add_option("--cost", in.cost, "cost JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--mu", in.mu, "source measure JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--nu", in.nu, "target measure JSON")->required()->check(CLI::ExistingFile);
}

void cmd_solve(Run& run, const Common& c, const Instance& in) {
  auto mu = run.measure(in.mu), nu = run.measure(in.nu);
  auto cost = run.cost(in.cost, mu);
  auto rep = solve_weak_ot_certified(cost, mu, nu, solve_options(c));
  run.report = to_json(rep);
  run.rows.push_back(row("0", family_name(cost.family), mu.size(), rep.primal_value, rep.dual_value, rep.gap, NAN, c.seed));
}

void cmd_dual(Run& run, const Common& c, const Instance& in, bool warm) {
  auto mu = run.measure(in.mu), nu = run.measure(in.nu);
  auto cost = run.cost(in.cost, mu);
  DualOptions d;
  d.seed = c.seed;
  if (c.budget) d.budget = *c.budget;
  if (warm) d.warm_start = dual_warm_start(cost, mu, nu, solve_weak_ot_certified(cost, mu, nu, solve_options(c)));
  auto pot = dual_ascent(cost, mu, nu, d);
  run.report = to_json(pot);
  run.report["warm_start"] = warm;
  run.rows.push_back(row("0", family_name(cost.family), mu.size(), NAN, pot.dual_value, NAN, NAN, c.seed));
}

void cmd_gap(Run& run, const Common& c, const Instance& in) {
  auto mu = run.measure(in.mu), nu = run.measure(in.nu);
  auto cost = run.cost(in.cost, mu);
  DualOptions d;
  d.seed = c.seed;
  if (c.budget) d.budget = *c.budget;
  auto rep = duality_gap(cost, mu, nu, solve_options(c), d);
  run.report = json{{"primal", num(rep.primal_value)},
                    {"dual", num(rep.dual_value)},
                    {"gap", num(rep.gap)},
                    {"relative_gap", num(relative_gap(rep))},
                    {"iterations", rep.iterations},
                    {"status", status_name(rep.status)},
                    {"tolerances", to_json(rep.tolerances)}};
  run.rows.push_back(row("0", family_name(cost.family), mu.size(), rep.primal_value, rep.dual_value, rep.gap, NAN, c.seed));
}

// --- order ----------------------------------------------------------------------------------

void cmd_convex_order(Run& run, const Common& c, const std::string& mu_f, const std::string& nu_f) {
  auto mu = run.measure(mu_f), nu = run.measure(nu_f);
  auto r = convex_order_1d(mu, nu);
  run.report = to_json(r);
  run.rows.push_back(row("0", "convex_order", mu.size(), r.t_bar_1, NAN, NAN, r.worst_call_gap, c.seed));
}

void cmd_martingale(Run& run, const Common& c, const std::string& mu_f, const std::string& nu_f, double eps) {
  auto mu = run.measure(mu_f), nu = run.measure(nu_f);
  auto r = strassen_coupling(mu, nu, eps);
  run.report = to_json(r);
  run.report["eps"] = eps;
  run.rows.push_back(row("0", "martingale", mu.size(), r.t_bar_1, NAN, NAN, r.residual, c.seed));
  if (!r.success) run.code = kCounterexample;
}

// --- certify --------------------------------------------------------------------------------

void rows_from_reports(Run& run, const std::vector<InequalityReport>& reports, std::uint64_t seed) {
  for (const auto& r : reports)
    for (std::size_t k = 0; k < r.values.size(); ++k)
      run.rows.push_back(row(r.label + "/" + std::to_string(k), kind_name(r.spec.kind), r.spec.base.size(), NAN, NAN, NAN,
                          r.values[k], seed));
}

void finish_certification(Run& run, const Certification& cert, std::uint64_t seed) {
  run.report = to_json(cert);
  rows_from_reports(run, cert.reports, seed);
  if (!cert.passed()) run.code = kCounterexample;
}

struct CertifyArgs {
  double rho = 0.5, lambda = 1.0, tail_tol = 1e-12, grid_step = 1e-3, scale = 1.0;
  std::size_t n = 4, samples = 0, lifts = 100, trials = 1000, max_points = 5;
  std::optional<double> t;
};

// Random instances on {0, ..., n-1} with n in [2, max_points]; per-trial streams depend only on (seed, k).
json hamming_trials(Run& run, const Common& c, const CertifyArgs& a, bool samson) {
  if (a.trials == 0) throw std::domain_error("certify: --trials must be positive");
  if (a.max_points < 2) throw std::domain_error("certify: --max-points must be at least 2");
  if (a.t && !(*a.t >= 0.0 && *a.t <= 1.0)) throw std::domain_error("certify: --t must be in [0,1]");
  const double tol = c.tol.value_or(samson ? 1e-6 : 1e-8);
  std::vector<double> viol(a.trials), ts(a.trials);
  std::vector<std::size_t> sizes(a.trials);
  parallel_for(a.trials, [&](std::size_t k) {
    auto rng = trial_rng(c.seed, k, samson ? 2 : 1);
    const std::size_t n = 2 + uniform_index(rng, a.max_points - 1);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i);
    auto X = make_space(FiniteSpace::line(xs));
    DiscreteMeasure mu(X, dirichlet(rng, n)), n1(X, dirichlet(rng, n)), n2(X, dirichlet(rng, n));
    const double t = a.t ? *a.t : (samson ? uniform(rng, 0.05, 0.95) : uniform(rng, 0.0, 1.0));
    ts[k] = t;
    sizes[k] = n;
    viol[k] = samson ? samson_check(t, mu, n1, n2) : dembo_check(t, mu, n1, n2);
  });
  const auto worst = std::max_element(viol.begin(), viol.end()) - viol.begin();
  const char* fam = samson ? "samson" : "dembo";
  for (std::size_t k = 0; k < a.trials; ++k)
    run.rows.push_back(row(std::to_string(k), fam, sizes[k], NAN, NAN, NAN, viol[k], c.seed));
  const bool passed = viol[worst] <= tol;
  if (!passed) run.code = kCounterexample;
  return json{{"label", fam},
              {"trials", a.trials},
              {"worst_violation", num(viol[worst])},
              {"worst_trial", worst},
              {"worst_t", ts[worst]},
              {"tolerance", tol},
              {"passed", passed},
              {"seed", c.seed},
              {"tolerances", to_json(default_tolerances())}};
}

void cmd_certify(Run& run, const Common& c, const std::string& which, const CertifyArgs& a) {
  if (which == "bernoulli") {
    TeCheckOptions o;
    o.seed = c.seed;
    if (c.tol) o.tolerance = *c.tol;
    finish_certification(run, certify_bernoulli(a.rho, a.grid_step, a.scale, o), c.seed);
  } else if (which == "binomial") {
    BinomialOptions o;
    o.seed = c.seed;
    o.lifts = a.lifts;
    if (a.samples) o.samples = a.samples;
    if (c.budget) o.samples = static_cast<std::size_t>(*c.budget);
    if (c.tol) o.tolerance = *c.tol;
    finish_certification(run, certify_binomial(a.n, a.rho, o), c.seed);
  } else if (which == "poisson") {
    PoissonOptions o;
    o.seed = c.seed;
    if (a.samples) o.samples = a.samples;
    if (c.budget) o.samples = static_cast<std::size_t>(*c.budget);
    if (c.tol) o.tolerance = *c.tol;
    finish_certification(run, certify_poisson(a.lambda, a.tail_tol, o), c.seed);
  } else {
    CertifyArgs b = a;
    if (c.budget) b.trials = static_cast<std::size_t>(*c.budget);
    run.report = hamming_trials(run, c, b, which == "samson");
  }
}

// --- product --------------------------------------------------------------------------------

struct ConcArgs {
  std::string base, mu, tgrid = "0:0.25:3";
  std::size_t n = 2;
  double a1 = 2.0, a2 = 2.0, K = 1.0;
  std::size_t sampled_sets = 512;
};

void cmd_concentration(Run& run, const Common& c, const ConcArgs& a) {
  auto mu = run.measure(a.mu);
  auto base = run.cost(a.base, mu);
  ConcentrationOptions o;
  o.seed = c.seed;
  o.K = a.K;
  o.sampled_sets = a.sampled_sets;
  if (c.tol) o.solve.tol = *c.tol;
  if (c.budget) o.solve.max_iter = *c.budget;
  const auto grid = parse_grid(a.tgrid);
  auto r = concentration_check(base, mu, a.a1, a.a2, a.n, grid, o);
  run.report = to_json(r);
  run.report["n"] = a.n;
  run.report["a1"] = a.a1;
  run.report["a2"] = a.a2;
  run.report["K"] = a.K;
  for (std::size_t i = 0; i < r.sets.size(); ++i) {
    double v = -kInf;
    for (std::size_t k = 0; k < grid.size(); ++k) v = std::max(v, r.sets[i].lhs[k] - r.sets[i].rhs[k]);
    run.rows.push_back(row(std::to_string(i), family_name(base.family), mu.size(), NAN, NAN, NAN, v, c.seed));
  }
  if (!run.report["passed"].get<bool>()) run.code = kCounterexample;
}

struct TensorArgs {
  std::string cost, mu, kind = "te_plus";
  double a1 = 1.0, a2 = 1.0, b = 1.0;
  std::size_t n = 2, trials = 1000;
  bool no_chain = false;
};

void cmd_tensorize(Run& run, const Common& c, const TensorArgs& a) {
  auto mu = run.measure(a.mu);
  auto cost = run.cost(a.cost, mu);
  std::optional<InequalitySpec> spec;
  if (a.kind == "te") spec = InequalitySpec::te(cost, mu, a.a1, a.a2);
  else if (a.kind == "te_plus") spec = InequalitySpec::te_plus(cost, mu, a.b);
  else spec = InequalitySpec::te_minus(cost, mu, a.b);
  const std::size_t trials = c.budget ? static_cast<std::size_t>(*c.budget) : a.trials;
  auto r = tensorization_check(*spec, a.n, trials, c.seed, !a.no_chain, c.tol.value_or(1e-7));
  run.report = json{{"spec", to_json(*spec)},
                    {"n", r.n},
                    {"trials", r.trials},
                    {"worst_violation", num(r.worst_violation)},
                    {"chain_checked", r.chain_checked},
                    {"worst_chain_excess", num(r.worst_chain_excess)},
                    {"worst_direct_excess", num(r.worst_direct_excess)},
                    {"tolerance", r.tolerance},
                    {"passed", r.passed()},
                    {"seed", r.seed},
                    {"tolerances", to_json(r.tolerances)}};
  json w = json::object();
  if (r.witness_nu1) w["nu1"] = num_array(r.witness_nu1->weights());
  if (r.witness_nu2) w["nu2"] = num_array(r.witness_nu2->weights());
  run.report["witness"] = w;
  const std::size_t np = static_cast<std::size_t>(std::pow(static_cast<double>(mu.size()), static_cast<double>(a.n)));
  for (std::size_t k = 0; k < r.values.size(); ++k)
    run.rows.push_back(row(std::to_string(k), a.kind, np, NAN, NAN, NAN, r.values[k], c.seed));
  if (!r.passed()) run.code = kCounterexample;
}

// --- repro ----------------------------------------------------------------------------------

// Every worked example of the one-dimensional section at desk-scale budgets, one row per parameter.
void repro_section7(Run& run, const Common& c) {
  json items = json::array();
  auto add = [&](const std::string& id, const std::string& fam, std::size_t np, double viol, bool pass, json detail) {
    run.rows.push_back(row(id, fam, np, NAN, NAN, NAN, viol, c.seed));
    run.rows.back().pass = pass;
    detail["id"] = id;
    detail["passed"] = pass;
    items.push_back(std::move(detail));
  };
  TeCheckOptions to;
  to.seed = c.seed;
  for (int i = 1; i <= 9; ++i) {
    const double rho = i / 10.0;
    auto cert = certify_bernoulli(rho, 1e-2, 1.0, to);
    add("bernoulli/rho=" + short_num(rho), "bernoulli", 2, cert.worst_violation(), cert.passed(), to_json(cert));
  }
  BinomialOptions bo;
  bo.seed = c.seed;
  bo.samples = 2000;
  bo.lifts = 20;
  for (std::size_t n : {2, 4}) {
    auto cert = certify_binomial(n, 0.3, bo);
    add("binomial/n=" + std::to_string(n) + ";rho=0.3", "binomial", n + 1, cert.worst_violation(), cert.passed(),
        to_json(cert));
  }
  PoissonOptions po;
  po.seed = c.seed;
  for (double lambda : {0.5, 1.0, 2.0}) {
    auto cert = certify_poisson(lambda, 1e-12, po);
    add("poisson/lambda=" + short_num(lambda), "poisson", cert.reports.front().spec.base.size(), cert.worst_violation(),
        cert.passed(), to_json(cert));
  }
  CertifyArgs ha;
  ha.trials = 200;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    ha.t = t;
    std::vector<CsvRow> scratch;
    std::swap(scratch, run.rows);
    auto d = hamming_trials(run, c, ha, false);
    auto s = hamming_trials(run, c, ha, true);
    std::swap(scratch, run.rows);
    add("dembo/t=" + short_num(t), "dembo", ha.max_points, d["worst_violation"].get<double>(), d["passed"], d);
    add("samson/t=" + short_num(t), "samson", ha.max_points, s["worst_violation"].get<double>(), s["passed"], s);
  }
  run.code = kOk;
  bool all = true;
  for (const auto& r : run.rows) all = all && r.pass.value_or(false);
  if (!all) run.code = kCounterexample;
  run.csv_pass = true;
  run.report = json{{"examples", items}, {"all_passed", all}, {"tolerances", to_json(default_tolerances())}};
}

int run_argv(std::vector<std::string> args);

// Replays the argv recorded in a manifest (or in a report that embeds one) after checking input digests.
int replay(const std::string& file, const std::string& out) {
  json j = read_json_file(file);
  const json& mj = j.contains("manifest") ? j.at("manifest") : j;
  const auto m = manifest_from_json(mj, file + "/manifest");
  if (m.version != kVersion) std::cerr << "weakot: warning: manifest from version " << m.version << "\n";
  for (const auto& [path, dg] : m.inputs)
    if (digest(read_file(path)) != dg) throw std::domain_error("repro: input " + path + " changed since the run");
  auto args = m.argv;
  if (!out.empty()) {
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--out") args[i + 1] = out, replaced = true;
    if (!replaced) args.insert(args.end(), {"--out", out});
  }
  return run_argv(args);
}

int run_argv(std::vector<std::string> args) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"Weak optimal transport costs, duality checks and transport-entropy certificates"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  Instance inst;
  bool warm = false;
  std::string mu_f, nu_f, manifest_f, target;
  double eps = 1e-8;
  CertifyArgs ca;
  ConcArgs conc;
  TensorArgs ten;

  auto* solve = app.add_subcommand("solve", "primal weak transport cost T_c(nu|mu)");
  auto* dual = app.add_subcommand("dual", "dual ascent over potentials");
  auto* gap = app.add_subcommand("gap", "primal, dual and their gap");
  for (auto* s : {solve, dual, gap}) {
    add_instance(s, inst);
    add_common(s, common);
  }
  dual->add_flag("--warm", warm, "warm-start from the primal solve");

  auto* order = app.add_subcommand("convex-order", "decide mu <=_c nu on the line");
  auto* mart = app.add_subcommand("martingale", "Strassen martingale coupling or a convex witness");
  for (auto* s : {order, mart}) {
    s->add_option("--mu", mu_f, "measure JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--nu", nu_f, "measure JSON")->required()->check(CLI::ExistingFile);
    add_common(s, common);
  }
  mart->add_option("--eps", eps, "accept when T_bar_1 <= eps")->capture_default_str();

  auto* cert = app.add_subcommand("certify", "certify a transport-entropy inequality");
  cert->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> certs;
  for (const char* name : {"bernoulli", "binomial", "poisson", "dembo", "samson"}) {
    auto* s = cert->add_subcommand(name);
    add_common(s, common);
    certs.emplace_back(name, s);
  }
  certs[0].second->add_option("--rho", ca.rho)->required()->check(CLI::Range(0.0, 1.0));
  certs[0].second->add_option("--grid-step", ca.grid_step)->capture_default_str();
  certs[0].second->add_option("--scale", ca.scale, "cost multiplier (1 is sharp)")->capture_default_str();
  certs[1].second->add_option("--n", ca.n)->required();
  certs[1].second->add_option("--rho", ca.rho)->required()->check(CLI::Range(0.0, 1.0));
  certs[1].second->add_option("--samples", ca.samples);
  certs[1].second->add_option("--lifts", ca.lifts)->capture_default_str();
  certs[2].second->add_option("--lambda", ca.lambda)->required()->check(CLI::PositiveNumber);
  certs[2].second->add_option("--tail-tol", ca.tail_tol)->capture_default_str();
  certs[2].second->add_option("--samples", ca.samples);
  for (std::size_t i : {3, 4}) {
    certs[i].second->add_option("--trials", ca.trials)->capture_default_str();
    certs[i].second->add_option("--t", ca.t, "fixed t (random per trial otherwise)");
    certs[i].second->add_option("--max-points", ca.max_points)->capture_default_str();
  }

  auto* conc_cmd = app.add_subcommand("concentration", "product concentration over enlargements");
  conc_cmd->add_option("--base", conc.base, "base cost JSON")->required()->check(CLI::ExistingFile);
  conc_cmd->add_option("--mu", conc.mu, "base measure JSON")->required()->check(CLI::ExistingFile);
  conc_cmd->add_option("--n", conc.n)->capture_default_str();
  conc_cmd->add_option("--a1", conc.a1)->capture_default_str();
  conc_cmd->add_option("--a2", conc.a2)->capture_default_str();
  conc_cmd->add_option("--K", conc.K)->capture_default_str();
  conc_cmd->add_option("--tgrid", conc.tgrid, "lo:step:hi or a,b,c")->capture_default_str();
  conc_cmd->add_option("--sampled-sets", conc.sampled_sets)->capture_default_str();
  add_common(conc_cmd, common);

  auto* ten_cmd = app.add_subcommand("tensorize", "lift an inequality to the product space");
  ten_cmd->add_option("--cost", ten.cost)->required()->check(CLI::ExistingFile);
  ten_cmd->add_option("--mu", ten.mu)->required()->check(CLI::ExistingFile);
  ten_cmd->add_option("--kind", ten.kind)->check(CLI::IsMember({"te", "te_plus", "te_minus"}))->capture_default_str();
  ten_cmd->add_option("--a1", ten.a1);
  ten_cmd->add_option("--a2", ten.a2);
  ten_cmd->add_option("--b", ten.b);
  ten_cmd->add_option("--n", ten.n)->capture_default_str();
  ten_cmd->add_option("--trials", ten.trials)->capture_default_str();
  ten_cmd->add_flag("--no-chain", ten.no_chain, "skip the chain-rule coupling");
  add_common(ten_cmd, common);

  auto* repro = app.add_subcommand("repro", "reproduction runs");
  repro->add_option("target", target, "section7")->check(CLI::IsMember({"section7"}));
  repro->add_option("--manifest", manifest_f, "replay a manifest or a report")->check(CLI::ExistingFile);
  add_common(repro, common);

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (repro->parsed() && !manifest_f.empty()) return replay(manifest_f, common.out);

  Run run;
  run.manifest.argv = args;
  run.manifest.seed = common.seed;
  if (common.tol) run.manifest.tolerances.fw_gap = *common.tol;

  if (solve->parsed()) cmd_solve(run, common, inst);
  else if (dual->parsed()) cmd_dual(run, common, inst, warm);
  else if (gap->parsed()) cmd_gap(run, common, inst);
  else if (order->parsed()) cmd_convex_order(run, common, mu_f, nu_f);
  else if (mart->parsed()) cmd_martingale(run, common, mu_f, nu_f, eps);
  else if (cert->parsed()) {
    for (const auto& [name, s] : certs)
      if (s->parsed()) cmd_certify(run, common, name, ca);
  } else if (conc_cmd->parsed()) cmd_concentration(run, common, conc);
  else if (ten_cmd->parsed()) cmd_tensorize(run, common, ten);
  else if (repro->parsed()) {
    if (target.empty()) throw CLI::ValidationError("repro", "give a target or --manifest");
    repro_section7(run, common);
  }

  run.manifest.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.report["manifest"] = to_json(run.manifest);
  const std::string text = run.report.dump(2) + "\n";
  if (common.out.empty())
    std::cout << text;
  else
    write_text_file(common.out, text);
  if (!common.csv.empty()) write_text_file(common.csv, csv_text(run.rows, run.csv_pass));
  return run.code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_argv(std::vector<std::string>(argv, argv + argc));
  } catch (const CLI::Error& e) {
    std::cerr << "weakot: usage error: " << e.what() << "\n";
  } catch (const FormatError& e) {
    std::cerr << "weakot: format error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "weakot: error: " << e.what() << "\n";
  }
  return kUsage;
}
