// geosat: generate, solve and measure geometric random k-SAT instances.
//
// Exit status: 0 success, 1 usage or input error, 2 solver or verification
// failure. Every run prints its resolved configuration as JSON on stderr.

#include <geosat/geosat.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace geosat;
using json = nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kFailure = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON text with every float written at 17 significant digits.
void dump17(std::ostream& os, const json& j, int indent, int level)
{
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
  case json::value_t::object: {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << '{' << nl;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ',' << nl;
      first = false;
      os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
      dump17(os, it.value(), indent, level + 1);
    }
    os << nl << close << '}';
    return;
  }
  case json::value_t::array: {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << '[' << nl;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) os << ',' << nl;
      os << pad;
      dump17(os, j[i], indent, level + 1);
    }
    os << nl << close << ']';
    return;
  }
  case json::value_t::number_float: {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      os << "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
    return;
  }
  default: os << j.dump();
  }
}

std::string dump17(const json& j, int indent = 2)
{
  std::ostringstream os;
  dump17(os, j, indent, 0);
  return os.str();
}

std::string rec_comment(const GeneratorRecord& rec) { return dump17(to_json(rec), 0); }

struct Globals {
  std::uint64_t seed = 1;
  int jobs = 1;
  double budget = 1e12;
  std::optional<std::int64_t> trial_ceiling; // from GEOSAT_BUDGET
};

void check_trials(const Globals& g, std::int64_t trials)
{
  if (g.trial_ceiling && trials > *g.trial_ceiling)
    throw Error("resource guard: " + std::to_string(trials) + " trials exceed GEOSAT_BUDGET=" +
                std::to_string(*g.trial_ceiling));
}

struct ModelFlags {
  std::string model = "mu";
  std::int64_t n = 1000;
  int k = 2;
  int d = 1;
  std::optional<double> gamma, mu, r, param;
  std::optional<double> intensity;
  std::string metric = "linf";
  std::string boundary = "cube";
};

void add_model_flags(CLI::App* sub, ModelFlags& m)
{
  sub->add_option("--model", m.model, "gamma | mu | tilde | rgg | rgg-fixed")
      ->check(CLI::IsMember({"gamma", "mu", "tilde", "rgg", "rgg-fixed"}));
  sub->add_option("--n", m.n, "number of variables (or vertices)")->check(CLI::NonNegativeNumber);
  sub->add_option("--k", m.k, "clause width / hyperedge size")->check(CLI::Range(2, 12));
  sub->add_option("--d", m.d, "dimension")->check(CLI::Range(1, 16));
  sub->add_option("--gamma", m.gamma, "radius scale of the gamma model");
  sub->add_option("--mu", m.mu, "points per literal (mu model) or intensity (rgg)");
  sub->add_option("--r", m.r, "connection radius (tilde, rgg, rgg-fixed)");
  sub->add_option("--param", m.param, "model parameter, whichever the model uses");
  sub->add_option("--intensity", m.intensity, "intensity of the Poisson rgg");
  sub->add_option("--metric", m.metric, "linf | l2")->check(CLI::IsMember({"linf", "l2"}));
  sub->add_option("--boundary", m.boundary, "cube | torus")->check(CLI::IsMember({"cube", "torus"}));
}

// Maps the model-specific flag onto ModelParams::param.
ModelParams resolve(const ModelFlags& m, bool need_param)
{
  ModelParams p;
  p.model = parse_model(m.model);
  p.n = m.n;
  p.k = m.k;
  p.d = m.d;
  p.metric = parse_metric(m.metric);
  p.boundary = parse_boundary(m.boundary);

  std::optional<double> own;
  std::vector<std::string> foreign;
  switch (p.model) {
  case ModelKind::Gamma:
    own = m.gamma;
    if (m.mu) foreign.push_back("--mu");
    if (m.r) foreign.push_back("--r");
    break;
  case ModelKind::Mu:
    own = m.mu;
    if (m.gamma) foreign.push_back("--gamma");
    if (m.r) foreign.push_back("--r");
    break;
  case ModelKind::Tilde:
  case ModelKind::RggFixed:
    own = m.r;
    if (m.gamma) foreign.push_back("--gamma");
    if (m.mu) foreign.push_back("--mu");
    break;
  case ModelKind::RggPoisson:
    own = m.r;
    if (m.gamma) foreign.push_back("--gamma");
    if (m.mu && m.intensity) foreign.push_back("--mu together with --intensity");
    p.intensity = m.intensity ? *m.intensity : (m.mu ? *m.mu : 1.0);
    break;
  }
  if (!foreign.empty()) throw UsageError(foreign.front() + " does not apply to model " + m.model);
  if (own && m.param && *own != *m.param) throw UsageError("conflicting --param and model-specific value");
  if (own)
    p.param = *own;
  else if (m.param)
    p.param = *m.param;
  else if (need_param)
    throw UsageError("model " + m.model + " needs its parameter (--gamma, --mu, --r or --param)");
  else
    p.param = p.model == ModelKind::Mu ? 0.0 : 1.0;
  if (need_param) p.validate();
  return p;
}

bool is_graph_model(ModelKind m) { return m == ModelKind::RggPoisson || m == ModelKind::RggFixed; }

// Every long option of the subcommand with its given or default value.
json option_record(const CLI::App& app, const CLI::App* sub)
{
  json opts = json::object();
  auto collect = [&](const CLI::App* a) {
    for (const CLI::Option* o : a->get_options()) {
      if (o->get_lnames().empty()) continue;
      const std::string& name = o->get_lnames().front();
      if (name == "help") continue;
      if (o->count() > 0) {
        const auto& res = o->results();
        if (o->get_type_size() == 0)
          opts[name] = true;
        else if (res.size() == 1)
          opts[name] = res.front();
        else
          opts[name] = res;
      } else {
        const std::string def = o->get_default_str();
        opts[name] = def.empty() ? json(nullptr) : json(def);
      }
    }
  };
  collect(&app);
  collect(sub);
  return opts;
}

void emit_config(const CLI::App& app, const CLI::App* sub, const Globals& g, const json& resolved)
{
  json rec{{"command", sub->get_name()},
           {"options", option_record(app, sub)},
           {"seed", g.seed},
           {"jobs", g.jobs},
           {"budget", g.budget},
           {"trial_ceiling", g.trial_ceiling ? json(*g.trial_ceiling) : json(nullptr)},
           {"resolved", resolved}};
  std::cerr << dump17(rec, 0) << '\n';
}

std::ifstream open_in(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return in;
}

// Writes to the file at `path`, or stdout for "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn)
{
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  fn(out);
  if (!out) throw Error("write failed: " + path);
}

json formula_to_json(const Formula& f)
{
  json clauses = json::array();
  for (const auto& c : f.clauses) {
    json lits = json::array();
    for (auto l : c.literals) lits.push_back(l.dimacs());
    clauses.push_back(lits);
  }
  json j{{"n_vars", f.n_vars}, {"k", f.k}, {"clauses", clauses}};
  if (f.record) j["record"] = to_json(*f.record);
  return j;
}

Formula formula_from_json(const json& j)
{
  try {
    Formula f;
    f.n_vars = j.at("n_vars").get<std::uint32_t>();
    f.k = j.value("k", 0);
    for (const auto& c : j.at("clauses")) {
      Clause cl;
      for (const auto& v : c) {
        const long long x = v.get<long long>();
        if (x == 0 || static_cast<unsigned long long>(x < 0 ? -x : x) > f.n_vars)
          throw Error("formula json: literal out of range");
        cl.literals.push_back(Literal::from_dimacs(x));
      }
      std::sort(cl.literals.begin(), cl.literals.end());
      f.clauses.push_back(std::move(cl));
    }
    if (j.contains("record")) f.record = record_from_json(j.at("record"));
    return f;
  } catch (const json::exception& e) {
    throw Error(std::string("formula json: ") + e.what());
  }
}

// DIMACS, or the JSON form written by `export --format json`.
Formula load_formula(const std::string& path)
{
  std::ifstream in = open_in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(std::string("formula json: ") + e.what());
    }
    return formula_from_json(j);
  }
  std::istringstream is(text);
  return read_dimacs(is);
}

GeneratorRecord load_sidecar(const std::string& path)
{
  std::ifstream in = open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(std::string("sidecar: ") + e.what());
  }
  return record_from_json(j.contains("record") ? j.at("record") : j);
}

void write_tuples_csv(std::ostream& os, const Hypergraph& g)
{
  const std::size_t k = g.edges.arity();
  for (std::size_t j = 0; j < k; ++j) os << (j ? "," : "") << 'v' << (j + 1);
  os << '\n';
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    auto e = g.edges[i];
    for (std::size_t j = 0; j < k; ++j) os << (j ? "," : "") << e[j];
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  ModelFlags model;
  std::string out;
  std::string points;
};

int cmd_generate(const CLI::App& app, const CLI::App* sub, const Globals& g, const GenerateArgs& a)
{
  const GeneratorRecord rec{resolve(a.model, true), g.seed};
  emit_config(app, sub, g, to_json(rec));
  const std::string sidecar = a.out + ".json";
  json summary{{"out", a.out}, {"sidecar", sidecar}};
  json side{{"record", to_json(rec)}};
  if (is_graph_model(rec.params.model)) {
    const RggSample s = generate_graph(rec);
    with_output(a.out, [&](std::ostream& os) { write_tuples_csv(os, s.graph); });
    if (!a.points.empty()) with_output(a.points, [&](std::ostream& os) { write_points_csv(os, s.points); });
    side["vertices"] = s.graph.vertex_count;
    side["edges"] = s.graph.edges.size();
    summary["edges"] = s.graph.edges.size();
  } else {
    const FormulaSample s = generate_formula(rec);
    with_output(a.out, [&](std::ostream& os) {
      write_dimacs(os, s.formula, "geosat " + rec_comment(rec));
    });
    if (!a.points.empty()) with_output(a.points, [&](std::ostream& os) { write_points_csv(os, s.points); });
    side["n_vars"] = s.formula.n_vars;
    side["clauses"] = s.formula.clauses.size();
    side["points"] = s.points.size();
    summary["clauses"] = s.formula.clauses.size();
  }
  with_output(sidecar, [&](std::ostream& os) { os << dump17(side) << '\n'; });
  std::cout << dump17(summary) << '\n';
  return kOk;
}

struct SolveArgs {
  std::string in;
  std::string engine = "auto";
  std::uint32_t var_limit = kDefaultVarLimit;
  bool quiet = false;
};

int cmd_solve(const CLI::App& app, const CLI::App* sub, const Globals& g, const SolveArgs& a)
{
  emit_config(app, sub, g, {{"in", a.in}, {"engine", a.engine}, {"var_limit", a.var_limit}});
  const Formula f = load_formula(a.in);
  std::string engine = a.engine;
  if (engine == "auto") engine = detail::all_width(f, 2) ? "2sat" : "dpll";
  if (engine == "2sat" && !detail::all_width(f, 2)) throw UsageError("engine 2sat needs every clause of width 2");
  SatResult r;
  try {
    r = engine == "2sat" ? solve_2sat(f) : solve_ksat_components(f, a.var_limit);
  } catch (const Error& e) {
    throw Failure(e.what());
  }
  if (r.sat() && !satisfies(f, r.assignment)) throw Failure("solver returned an assignment that fails a clause");
  std::cout << "c engine " << engine << '\n';
  std::cout << (r.sat() ? "s SATISFIABLE" : "s UNSATISFIABLE") << '\n';
  if (r.sat() && !a.quiet) {
    std::cout << 'v';
    for (std::uint32_t v = 1; v <= f.n_vars; ++v) std::cout << ' ' << (r.assignment[v] ? "" : "-") << v;
    std::cout << " 0\n";
  }
  return kOk;
}

struct AnalyzeArgs {
  ModelFlags model;
  std::string quantity;
  std::string in;
  int order = 1;
  int s = 3;
  int L = 4;
  std::optional<double> rho, u;
};

int cmd_analyze(const CLI::App& app, const CLI::App* sub, const Globals& g, const AnalyzeArgs& a)
{
  if (!a.in.empty()) {
    emit_config(app, sub, g, {{"in", a.in}, {"L", a.L}, {"s", a.s}});
    const Formula f = load_formula(a.in);
    json out{{"n_vars", f.n_vars}, {"clauses", f.clauses.size()}, {"k", f.k}};
    if (detail::all_width(f, 2)) {
      const ImplicationGraph ig(f);
      out["sat"] = solve_2sat(f).sat();
      out["bicycles"] = count_bicycles(f, a.L);
      out["snakes"] = count_snakes(f, a.s);
      out["implication_arcs"] = ig.arc_count();
    }
    std::cout << dump17(out) << '\n';
    return kOk;
  }
  if (a.quantity.empty()) throw UsageError("analyze needs --quantity or --in");
  const bool needs_param = a.quantity != "threshold-2sat" && a.quantity != "ksat-bounds" && a.quantity != "u-k" &&
                           a.quantity != "connectivity-radius" && a.quantity != "clique-prob";
  const ModelParams p = resolve(a.model, needs_param);
  json resolved = to_json(GeneratorRecord{p, g.seed});
  resolved["quantity"] = a.quantity;
  emit_config(app, sub, g, resolved);

  const double n = static_cast<double>(p.n);
  json out{{"quantity", a.quantity}};
  auto pair = [](const char* a1, const AnalyticValue& v1, const char* a2, const AnalyticValue& v2) {
    return json{{a1, to_json(v1)}, {a2, to_json(v2)}};
  };
  const std::string& q = a.quantity;
  if (q == "clique-prob") {
    if (!a.rho) throw UsageError("clique-prob needs --rho");
    out["value"] = to_json(clique_prob(p.k, p.d, *a.rho, p.boundary));
  } else if (q == "expected-clauses") {
    out["value"] = to_json(expected_clauses(p));
  } else if (q == "threshold-2sat") {
    out["value"] = to_json(threshold_2sat(p.model, p.d));
  } else if (q == "ksat-bounds") {
    auto [lo, hi] = ksat_bounds(p.k, p.d, p.model);
    out["value"] = pair("lower", lo, "upper", hi);
  } else if (q == "poisson-moment") {
    out["value"] = to_json(poisson_moment(p.param, a.order));
  } else if (q == "wedge") {
    out["value"] = to_json(wedge_prob(p.param, p.d, n));
  } else if (q == "triples") {
    auto [path, star] = triple_probs(p.param, p.d, n);
    out["value"] = pair("path", path, "star", star);
  } else if (q == "snakes") {
    out["value"] = to_json(expected_snakes(p, a.s));
  } else if (q == "snakes-exact") {
    out["value"] = to_json(expected_snakes_exact(p, a.s));
  } else if (q == "paths") {
    out["value"] = to_json(expected_paths(p, a.L));
  } else if (q == "bicycle-bound") {
    out["value"] = to_json(bicycle_bound(p, a.L));
  } else if (q == "u-k") {
    out["value"] = to_json(u_k_bound(p.k));
  } else if (q == "coarse-radius") {
    out["value"] = to_json(coarse_radius(p.k, p.d, p.param, n, a.u));
  } else if (q == "connectivity-radius") {
    out["value"] = to_json(connectivity_radius(n, p.d, p.metric));
  } else if (q == "coupling-heads") {
    out["value"] = to_json(coupling_heads_mean(static_cast<std::uint32_t>(p.n), p.d, p.param));
  } else {
    throw UsageError("unknown quantity " + q);
  }
  std::cout << dump17(out) << '\n';
  return kOk;
}

struct SweepArgs {
  ModelFlags model;
  std::string event;
  int event_arg = 0;
  std::int64_t trials = 100;
  std::vector<double> grid;
  std::optional<double> from, to;
  int steps = 10;
  std::string csv = "-";
  std::string trials_csv;
};

EventKind default_event(const ModelParams& p) { return is_graph_model(p.model) ? EventKind::Connected : EventKind::Sat; }

int cmd_sweep(const CLI::App& app, const CLI::App* sub, const Globals& g, const SweepArgs& a)
{
  ModelParams p = resolve(a.model, false);
  std::vector<double> grid = a.grid;
  if (grid.empty()) {
    if (!a.from || !a.to) throw UsageError("sweep needs --grid or --from/--to");
    if (a.steps < 1) throw UsageError("--steps must be >= 1");
    for (int i = 0; i <= a.steps; ++i) grid.push_back(*a.from + (*a.to - *a.from) * i / a.steps);
  }
  if (grid.empty()) throw UsageError("empty grid");
  p.param = grid.front();
  ExperimentConfig c{p, a.event.empty() ? default_event(p) : parse_event(a.event), a.event_arg, a.trials, g.seed,
                     g.jobs, g.budget};
  json resolved = to_json(c);
  resolved.erase("param");
  resolved["grid"] = grid;
  emit_config(app, sub, g, resolved);
  check_trials(g, a.trials * static_cast<std::int64_t>(grid.size()));

  const Curve curve = sweep(c, grid);
  with_output(a.csv, [&](std::ostream& os) { write_curve_csv(os, curve); });
  if (!a.trials_csv.empty())
    with_output(a.trials_csv, [&](std::ostream& os) {
      bool header = true;
      for (double x : grid) {
        std::ostringstream part;
        write_trials_csv(part, run_trials(with_param(c, x)));
        std::string text = part.str();
        if (!header) text.erase(0, text.find('\n') + 1);
        header = false;
        os << text;
      }
    });
  const auto flagged = monotonicity_violations(curve, c.event != EventKind::Sat);
  if (a.csv != "-") std::cout << dump17({{"points", curve.points.size()}, {"monotonicity_flags", flagged}}) << '\n';
  return kOk;
}

struct ThresholdArgs {
  ModelFlags model;
  std::string event;
  int event_arg = 0;
  double target = 0.5;
  double rel_tol = 0.02;
  std::optional<double> lo, hi;
  ThresholdOptions opt;
};

int cmd_threshold(const CLI::App& app, const CLI::App* sub, const Globals& g, const ThresholdArgs& a)
{
  ModelParams p = resolve(a.model, false);
  const EventKind ev = a.event.empty() ? (is_graph_model(p.model) ? EventKind::Connected : EventKind::Unsat)
                                       : parse_event(a.event);
  ExperimentConfig c{p, ev, a.event_arg, a.opt.base_trials, g.seed, g.jobs, g.budget};
  if (g.trial_ceiling)
    c.budget = std::min(c.budget, static_cast<double>(std::max<std::int64_t>(p.n, 1)) * static_cast<double>(*g.trial_ceiling));
  if (a.lo.has_value() != a.hi.has_value()) throw UsageError("--lo and --hi go together");
  std::optional<std::pair<double, double>> bracket;
  if (a.lo) bracket = std::make_pair(*a.lo, *a.hi);
  else bracket = default_bracket(c);
  json resolved = to_json(c);
  resolved.erase("param");
  resolved["target"] = a.target;
  resolved["rel_tol"] = a.rel_tol;
  resolved["bracket"] = {bracket->first, bracket->second};
  resolved["base_trials"] = a.opt.base_trials;
  resolved["max_trials"] = a.opt.max_trials;
  resolved["sweep_trials"] = a.opt.sweep_trials;
  emit_config(app, sub, g, resolved);

  const ThresholdEstimate est = find_threshold(c, a.target, a.rel_tol, bracket, a.opt);
  json out = to_json(est);
  out["model"] = to_string(p.model);
  out["event"] = to_string(ev);
  std::cout << dump17(out) << '\n';
  return kOk;
}

struct VerifyArgs {
  ModelFlags model;
  std::string suite;
  std::string formula_id = "wedge";
  std::int64_t trials = 100;
  int s = 3;
  double z_max = 3.0;
  double min_agreement = 0.95;
};

int cmd_verify(const CLI::App& app, const CLI::App* sub, const Globals& g, const VerifyArgs& a)
{
  const ModelParams p = resolve(a.model, true);
  json resolved = to_json(GeneratorRecord{p, g.seed});
  resolved["suite"] = a.suite;
  resolved["trials"] = a.trials;
  if (a.suite == "moment") resolved["formula_id"] = a.formula_id;
  emit_config(app, sub, g, resolved);
  check_trials(g, a.trials);

  json out;
  bool passed;
  if (a.suite == "density") {
    const MomentReport r = verify_clause_density(p, a.trials, g.seed, g.jobs);
    out = to_json(r);
    passed = r.passed(a.z_max);
  } else if (a.suite == "coupling") {
    if (p.model != ModelKind::Mu) throw UsageError("coupling suite runs on the mu model");
    const CouplingReport r =
        verify_coupling(static_cast<std::uint32_t>(p.n), p.k, p.d, p.param, a.trials, g.seed);
    out = to_json(r);
    passed = r.agreement_rate >= a.min_agreement && r.heads.passed(a.z_max);
  } else {
    const MomentReport r = verify_moment(a.formula_id, p, a.trials, g.seed, a.s, g.jobs);
    out = to_json(r);
    passed = r.passed(a.z_max);
  }
  out["suite"] = a.suite;
  out["passed"] = passed;
  std::cout << dump17(out) << '\n';
  return passed ? kOk : kFailure;
}

struct ExportArgs {
  std::string in;
  std::string sidecar;
  std::string format = "dimacs";
  std::string out = "-";
};

int cmd_export(const CLI::App& app, const CLI::App* sub, const Globals& g, const ExportArgs& a)
{
  if (a.in.empty() == a.sidecar.empty()) throw UsageError("export needs exactly one of --in and --sidecar");
  std::optional<GeneratorRecord> rec;
  if (!a.sidecar.empty()) rec = load_sidecar(a.sidecar);
  emit_config(app, sub, g, rec ? to_json(*rec) : json{{"in", a.in}});

  if (a.format == "points") {
    if (!rec) throw UsageError("points export needs --sidecar");
    const PointSet pts = is_graph_model(rec->params.model) ? generate_graph(*rec).points : generate_formula(*rec).points;
    with_output(a.out, [&](std::ostream& os) { write_points_csv(os, pts); });
    return kOk;
  }
  if (rec && is_graph_model(rec->params.model)) {
    if (a.format != "csv") throw UsageError("graph models export as --format csv or points");
    const RggSample s = generate_graph(*rec);
    with_output(a.out, [&](std::ostream& os) { write_tuples_csv(os, s.graph); });
    return kOk;
  }
  Formula f;
  if (rec) {
    f = generate_formula(*rec).formula;
    f.record = rec;
  } else {
    f = load_formula(a.in);
  }
  if (a.format == "dimacs")
    with_output(a.out, [&](std::ostream& os) { write_dimacs(os, f, f.record ? "geosat " + rec_comment(*f.record) : ""); });
  else if (a.format == "json")
    with_output(a.out, [&](std::ostream& os) { os << dump17(formula_to_json(f), 0) << '\n'; });
  else
    throw UsageError("formula export formats: dimacs, json, points");
  return kOk;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"geosat: geometric random k-SAT laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--budget", g.budget, "ceiling on n * trials")->check(CLI::PositiveNumber);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "draw one instance; writes DIMACS (or edge CSV) plus <out>.json");
  add_model_flags(generate, gen.model);
  generate->add_option("--out", gen.out, "output file")->required();
  generate->add_option("--points", gen.points, "also write the point set as CSV");

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "decide a DIMACS or JSON formula");
  solve->add_option("--in", sol.in, "formula file")->required();
  solve->add_option("--engine", sol.engine, "auto | 2sat | dpll")->check(CLI::IsMember({"auto", "2sat", "dpll"}));
  solve->add_option("--var-limit", sol.var_limit, "largest variable component for dpll");
  solve->add_flag("--quiet", sol.quiet, "omit the assignment line");

  AnalyzeArgs ana;
  auto* analyze = app.add_subcommand("analyze", "closed-form quantities, or structure of a formula file");
  add_model_flags(analyze, ana.model);
  analyze->add_option("--quantity", ana.quantity)
      ->check(CLI::IsMember({"clique-prob", "expected-clauses", "threshold-2sat", "ksat-bounds", "poisson-moment", "wedge",
                             "triples", "snakes", "snakes-exact", "paths", "bicycle-bound", "u-k", "coarse-radius",
                             "connectivity-radius", "coupling-heads"}));
  analyze->add_option("--in", ana.in, "formula file to inspect");
  analyze->add_option("--order", ana.order, "moment order");
  analyze->add_option("--s", ana.s, "snake length");
  analyze->add_option("--L", ana.L, "path or bicycle length");
  analyze->add_option("--rho", ana.rho, "ball radius for clique-prob");
  analyze->add_option("--u", ana.u, "override for U(k) in coarse-radius");

  SweepArgs swp;
  auto* sweep_cmd = app.add_subcommand("sweep", "probability curve over a parameter grid (CSV)");
  add_model_flags(sweep_cmd, swp.model);
  sweep_cmd->add_option("--event", swp.event, "sat | unsat | connected | has-bicycle");
  sweep_cmd->add_option("--event-arg", swp.event_arg, "L_max for has-bicycle");
  sweep_cmd->add_option("--trials", swp.trials, "trials per grid point")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--grid", swp.grid, "comma-separated increasing values")->delimiter(',');
  sweep_cmd->add_option("--from", swp.from);
  sweep_cmd->add_option("--to", swp.to);
  sweep_cmd->add_option("--steps", swp.steps);
  sweep_cmd->add_option("--csv", swp.csv, "curve CSV path, - for stdout");
  sweep_cmd->add_option("--trials-csv", swp.trials_csv, "per-trial CSV path");

  ThresholdArgs thr;
  auto* threshold = app.add_subcommand("threshold", "locate the 50% crossing of an event (JSON)");
  add_model_flags(threshold, thr.model);
  threshold->add_option("--event", thr.event, "default unsat for formulas, connected for graphs");
  threshold->add_option("--event-arg", thr.event_arg);
  threshold->add_option("--target", thr.target)->check(CLI::Range(0.0, 1.0));
  threshold->add_option("--rel-tol", thr.rel_tol)->check(CLI::Range(0.01, 1.0));
  threshold->add_option("--lo", thr.lo);
  threshold->add_option("--hi", thr.hi);
  threshold->add_option("--base-trials", thr.opt.base_trials)->check(CLI::PositiveNumber);
  threshold->add_option("--max-trials", thr.opt.max_trials)->check(CLI::PositiveNumber);
  threshold->add_option("--sweep-trials", thr.opt.sweep_trials)->check(CLI::PositiveNumber);

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Monte Carlo check of a formula; exit 2 when it fails");
  add_model_flags(verify, ver.model);
  verify->add_option("--suite", ver.suite)->required()->check(CLI::IsMember({"density", "coupling", "moment"}));
  verify->add_option("--formula-id", ver.formula_id)
      ->check(CLI::IsMember({"wedge", "triple_path", "triple_star", "snakes"}));
  verify->add_option("--trials", ver.trials)->check(CLI::PositiveNumber);
  verify->add_option("--s", ver.s, "snake length");
  verify->add_option("--z-max", ver.z_max);
  verify->add_option("--min-agreement", ver.min_agreement);

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "re-emit a formula from a file or a sidecar");
  export_cmd->add_option("--in", exp.in, "DIMACS or JSON formula");
  export_cmd->add_option("--sidecar", exp.sidecar, "sidecar JSON; regenerates the instance");
  export_cmd->add_option("--format", exp.format, "dimacs | json | points | csv")
      ->check(CLI::IsMember({"dimacs", "json", "points", "csv"}));
  export_cmd->add_option("--out", exp.out, "output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (const char* env = std::getenv("GEOSAT_BUDGET"); env && *env) {
      char* end = nullptr;
      const long long v = std::strtoll(env, &end, 10);
      if (*end != '\0' || v < 1) throw UsageError("GEOSAT_BUDGET must be a positive integer");
      g.trial_ceiling = v;
    }
    if (generate->parsed()) return cmd_generate(app, generate, g, gen);
    if (solve->parsed()) return cmd_solve(app, solve, g, sol);
    if (analyze->parsed()) return cmd_analyze(app, analyze, g, ana);
    if (sweep_cmd->parsed()) return cmd_sweep(app, sweep_cmd, g, swp);
    if (threshold->parsed()) return cmd_threshold(app, threshold, g, thr);
    if (verify->parsed()) return cmd_verify(app, verify, g, ver);
    if (export_cmd->parsed()) return cmd_export(app, export_cmd, g, exp);
  } catch (const Failure& e) {
    std::cerr << "geosat: " << e.what() << '\n';
    return kFailure;
  } catch (const UsageError& e) {
    std::cerr << "geosat: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "geosat: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
