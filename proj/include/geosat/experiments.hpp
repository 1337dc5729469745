#ifndef GEOSAT_EXPERIMENTS_HPP
#define GEOSAT_EXPERIMENTS_HPP

#include <geosat/analytics.hpp>
#include <geosat/common.hpp>
#include <geosat/models.hpp>
#include <geosat/rng.hpp>
#include <geosat/solvers.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace geosat {

enum class EventKind { Sat, Unsat, Connected, HasBicycle, SnakeCount, ClauseCount };

inline std::string_view to_string(EventKind e)
{
  switch (e) {
  case EventKind::Sat: return "sat";
  case EventKind::Unsat: return "unsat";
  case EventKind::Connected: return "connected";
  case EventKind::HasBicycle: return "has-bicycle";
  case EventKind::SnakeCount: return "snake-count";
  case EventKind::ClauseCount: return "clause-count";
  }
  return "?";
}

inline EventKind parse_event(std::string_view s)
{
  if (s == "sat") return EventKind::Sat;
  if (s == "unsat") return EventKind::Unsat;
  if (s == "connected") return EventKind::Connected;
  if (s == "has-bicycle") return EventKind::HasBicycle;
  if (s == "snake-count") return EventKind::SnakeCount;
  if (s == "clause-count") return EventKind::ClauseCount;
  throw Error("unknown event: " + std::string(s));
}

inline bool is_boolean(EventKind e)
{
  return e == EventKind::Sat || e == EventKind::Unsat || e == EventKind::Connected || e == EventKind::HasBicycle;
}

struct ExperimentConfig {
  ModelParams params;
  EventKind event = EventKind::Sat;
  int event_arg = 0; // L_max for HasBicycle, s for SnakeCount
  std::int64_t trials = 100;
  std::uint64_t master_seed = 0;
  int parallelism = 1;
  double budget = 1e12; // ceiling on n * trials

  void validate() const
  {
    params.validate();
    if (trials < 1) throw Error("trials must be >= 1");
    if (parallelism < 1) throw Error("parallelism must be >= 1");
  }
};

inline nlohmann::json to_json(const ExperimentConfig& c)
{
  GeneratorRecord rec{c.params, 0};
  nlohmann::json j = to_json(rec);
  j.erase("seed");
  j["event"] = to_string(c.event);
  j["event_arg"] = c.event_arg;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["parallelism"] = c.parallelism;
  j["budget"] = c.budget;
  return j;
}

struct TrialOutcome {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  double value = 0.0; // 0/1 for boolean events, else a count
  double elapsed_ms = 0.0;

  /// Timing is excluded: batches compare on what they computed.
  friend bool operator==(const TrialOutcome& a, const TrialOutcome& b)
  {
    return a.trial == b.trial && a.seed == b.seed && a.value == b.value;
  }
};

struct TrialBatch {
  ExperimentConfig config;
  std::vector<TrialOutcome> outcomes;

  std::int64_t successes() const
  {
    std::int64_t s = 0;
    for (const auto& o : outcomes) s += o.value != 0.0 ? 1 : 0;
    return s;
  }
};

/// Outcome of one model draw under `seed`.
inline double evaluate_trial(const ExperimentConfig& c, std::uint64_t seed)
{
  const GeneratorRecord rec{c.params, seed};
  const bool graph_model = c.params.model == ModelKind::RggPoisson || c.params.model == ModelKind::RggFixed;
  if (graph_model) {
    RggSample g = generate_graph(rec);
    switch (c.event) {
    case EventKind::Connected: return component_stats(g.graph).is_connected ? 1.0 : 0.0;
    case EventKind::ClauseCount: return static_cast<double>(g.graph.edges.size());
    default: throw Error("event '" + std::string(to_string(c.event)) + "' needs a formula model");
    }
  }
  FormulaSample s = generate_formula(rec);
  const Formula& f = s.formula;
  switch (c.event) {
  case EventKind::Sat:
  case EventKind::Unsat: {
    const bool sat = f.k == 2 ? solve_2sat(f).sat() : solve_ksat_components(f).sat();
    return (sat == (c.event == EventKind::Sat)) ? 1.0 : 0.0;
  }
  case EventKind::HasBicycle: {
    auto counts = count_bicycles(f, c.event_arg > 0 ? c.event_arg : kMaxBicycleLength);
    for (auto v : counts)
      if (v > 0) return 1.0;
    return 0.0;
  }
  case EventKind::SnakeCount: return static_cast<double>(count_snakes(f, c.event_arg > 0 ? c.event_arg : 3));
  case EventKind::ClauseCount: return static_cast<double>(f.clauses.size());
  case EventKind::Connected: throw Error("event 'connected' needs a graph model");
  }
  return 0.0;
}

/// Runs trials [first, last) of the configuration. Trial i always draws from
/// substream (master_seed, i); results are ordered by trial index.
inline std::vector<TrialOutcome> run_trial_range(const ExperimentConfig& c, std::uint64_t first, std::uint64_t last)
{
  std::vector<TrialOutcome> out(last - first);
  std::atomic<std::uint64_t> next{first};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= last) return;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        TrialOutcome o;
        o.trial = i;
        o.seed = substream_seed(c.master_seed, i);
        o.value = evaluate_trial(c, o.seed);
        o.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out[i - first] = o;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(last);
        return;
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::min<std::uint64_t>(static_cast<std::uint64_t>(c.parallelism), last - first));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline void check_budget(const ExperimentConfig& c, std::int64_t trials)
{
  const double cost = static_cast<double>(std::max<std::int64_t>(c.params.n, 1)) * static_cast<double>(trials);
  if (cost > c.budget)
    throw Error("resource guard: n * trials = " + std::to_string(cost) + " exceeds budget " + std::to_string(c.budget));
}

inline TrialBatch run_trials(const ExperimentConfig& c)
{
  c.validate();
  check_budget(c, c.trials);
  return {c, run_trial_range(c, 0, static_cast<std::uint64_t>(c.trials))};
}

struct ProbabilityEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval.
inline ProbabilityEstimate wilson_interval(std::int64_t successes, std::int64_t trials, double z = kZ95)
{
  if (trials <= 0) throw Error("wilson_interval: trials must be > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {p, lo, hi};
}

inline ProbabilityEstimate estimate_probability(const TrialBatch& b)
{
  if (!is_boolean(b.config.event)) throw Error("estimate_probability: event is a count, not a boolean");
  return wilson_interval(b.successes(), static_cast<std::int64_t>(b.outcomes.size()));
}

struct CurvePoint {
  double param = 0.0;
  ProbabilityEstimate estimate;
  std::int64_t trials = 0;
};

struct Curve {
  std::vector<CurvePoint> points;
};

inline ExperimentConfig with_param(ExperimentConfig c, double param)
{
  c.params.param = param;
  return c;
}

/// One probability estimate per grid value, all with the same seeds.
inline Curve sweep(const ExperimentConfig& c, const std::vector<double>& grid)
{
  if (grid.empty()) throw Error("sweep: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error("sweep: grid must be strictly increasing");
  check_budget(c, c.trials * static_cast<std::int64_t>(grid.size()));
  Curve curve;
  for (double x : grid) {
    const TrialBatch b = run_trials(with_param(c, x));
    curve.points.push_back({x, estimate_probability(b), c.trials});
  }
  return curve;
}

/// Indices of adjacent points that decrease (or increase, for a falling
/// curve) with non-overlapping intervals.
inline std::vector<std::size_t> monotonicity_violations(const Curve& curve, bool increasing)
{
  std::vector<std::size_t> bad;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1].estimate;
    const auto& b = curve.points[i].estimate;
    if (increasing ? (b.ci_high < a.ci_low) : (b.ci_low > a.ci_high)) bad.push_back(i);
  }
  return bad;
}

inline void write_curve_csv(std::ostream& os, const Curve& curve)
{
  char buf[160];
  os << "param,p_hat,ci_lo,ci_hi,trials\n";
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%lld\n", p.param, p.estimate.p_hat, p.estimate.ci_low,
                  p.estimate.ci_high, static_cast<long long>(p.trials));
    os << buf;
  }
}

inline void write_trials_csv(std::ostream& os, const TrialBatch& b)
{
  char buf[200];
  os << "trial,seed,param,event,outcome,elapsed_ms\n";
  for (const auto& o : b.outcomes) {
    std::snprintf(buf, sizeof buf, "%llu,%llu,%.17g,%s,%.17g,%.17g\n", static_cast<unsigned long long>(o.trial),
                  static_cast<unsigned long long>(o.seed), b.config.params.param,
                  std::string(to_string(b.config.event)).c_str(), o.value, o.elapsed_ms);
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Threshold location

/// Binomial observation at one parameter value.
struct ProbeRecord {
  double param = 0.0;
  std::int64_t successes = 0;
  std::int64_t trials = 0;
};

/// Logistic curve p(x) = 1 / (1 + exp(-(a + b (x - centre) / scale))).
struct LogisticFit {
  double a = 0.0, b = 0.0, centre = 0.0, scale = 1.0;
  bool converged = false;

  double prob(double x) const { return 1.0 / (1.0 + std::exp(-(a + b * (x - centre) / scale))); }
  /// Parameter value at which the curve equals p.
  double crossing(double p) const { return centre + scale * (std::log(p / (1 - p)) - a) / b; }
  /// Distance between the 10% and 90% crossings.
  double width_10_90() const { return 2.0 * std::log(9.0) * scale / std::fabs(b); }
};

/// Maximum-likelihood logistic fit by Newton iteration. A small ridge on the
/// slope keeps perfectly separated data finite.
inline LogisticFit fit_logistic(const std::vector<ProbeRecord>& data)
{
  LogisticFit fit;
  if (data.empty()) return fit;
  double lo = data.front().param, hi = lo, total = 0.0, wsum = 0.0;
  for (const auto& d : data) {
    lo = std::min(lo, d.param);
    hi = std::max(hi, d.param);
    total += static_cast<double>(d.trials);
    wsum += static_cast<double>(d.trials) * d.param;
  }
  fit.centre = wsum / total;
  fit.scale = hi > lo ? (hi - lo) / 2 : 1.0;
  const double ridge = 1e-6 * total;
  double a = 0.0, b = 0.0;
  for (int it = 0; it < 200; ++it) {
    double ga = 0.0, gb = -ridge * b, haa = 0.0, hab = 0.0, hbb = ridge;
    for (const auto& d : data) {
      const double x = (d.param - fit.centre) / fit.scale;
      const double p = 1.0 / (1.0 + std::exp(-(a + b * x)));
      const double m = static_cast<double>(d.trials);
      const double resid = static_cast<double>(d.successes) - m * p;
      const double w = m * p * (1 - p);
      ga += resid;
      gb += resid * x;
      haa += w;
      hab += w * x;
      hbb += w * x * x;
    }
    const double det = haa * hbb - hab * hab;
    if (!(det > 0.0)) break;
    double da = (hbb * ga - hab * gb) / det;
    double db = (haa * gb - hab * ga) / det;
    const double step = std::max(std::fabs(da), std::fabs(db));
    if (step > 5.0) {
      da *= 5.0 / step;
      db *= 5.0 / step;
    }
    a += da;
    b += db;
    if (std::max(std::fabs(da), std::fabs(db)) < 1e-10) {
      fit.converged = true;
      break;
    }
  }
  fit.a = a;
  fit.b = b;
  return fit;
}

struct ThresholdOptions {
  std::int64_t base_trials = 100;
  std::int64_t max_trials = 10000;
  int sweep_points = 9;
  std::int64_t sweep_trials = 400;
  int sweep_rounds = 3;
};

struct ThresholdEstimate {
  double param_at_half = 0.0; // crossing of the target level
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double width_10_90 = 0.0;
  std::int64_t n = 0;
  double target = 0.5;
  std::int64_t total_trials = 0;
  std::vector<ProbeRecord> probes;
  Curve final_sweep;
};

inline nlohmann::json to_json(const ThresholdEstimate& t)
{
  return {{"param_at_half", t.param_at_half}, {"bracket", {t.bracket_lo, t.bracket_hi}},
          {"width_10_90", t.width_10_90},     {"n", t.n},
          {"target", t.target},               {"total_trials", t.total_trials}};
}

/// Runs trials [first, last) at parameter x and returns the success count.
using ProbeRunner = std::function<std::int64_t(double x, std::int64_t first, std::int64_t last)>;

/// Threshold search against an arbitrary monotone Bernoulli source. Bisection
/// on p-hat, doubling the trial count while the Wilson interval straddles the
/// target; then a logistic fit over a sweep of the transition window.
inline ThresholdEstimate locate_threshold(const ProbeRunner& runner, double lo, double hi, double target = 0.5,
                                          double rel_tol = 0.02, const ThresholdOptions& opt = {})
{
  if (rel_tol < 0.01) throw Error("find_threshold: rel_tol must be >= 0.01");
  if (!(lo > 0.0 && hi > lo)) throw Error("find_threshold: need 0 < lo < hi");
  if (!(target > 0.0 && target < 1.0)) throw Error("find_threshold: target must lie in (0,1)");
  if (opt.base_trials < 1 || opt.max_trials < opt.base_trials || opt.sweep_trials < 1)
    throw Error("find_threshold: bad trial options");

  ThresholdEstimate est;
  est.target = target;
  auto run = [&](double x, std::int64_t first, std::int64_t last) {
    const std::int64_t s = runner(x, first, last);
    est.total_trials += last - first;
    return s;
  };
  auto probe = [&](double x, bool escalate) {
    ProbeRecord rec{x, run(x, 0, opt.base_trials), opt.base_trials};
    while (escalate && rec.trials < opt.max_trials) {
      auto ci = wilson_interval(rec.successes, rec.trials);
      if (ci.ci_high < target || ci.ci_low > target) break;
      const std::int64_t more = std::min(rec.trials, opt.max_trials - rec.trials);
      rec.successes += run(x, rec.trials, rec.trials + more);
      rec.trials += more;
    }
    est.probes.push_back(rec);
    return static_cast<double>(rec.successes) / static_cast<double>(rec.trials);
  };

  const double p_lo = probe(lo, false), p_hi = probe(hi, false);
  if ((p_lo - target) * (p_hi - target) >= 0.0)
    throw Error("find_threshold: interval does not bracket the target (p(lo)=" + std::to_string(p_lo) +
                ", p(hi)=" + std::to_string(p_hi) + ")");
  const bool increasing = p_hi > p_lo;
  while (hi - lo > rel_tol * 0.5 * (lo + hi)) {
    const double mid = 0.5 * (lo + hi);
    const double p = probe(mid, true);
    if ((p > target) == increasing)
      hi = mid;
    else
      lo = mid;
  }
  est.bracket_lo = lo;
  est.bracket_hi = hi;

  // Sweep the transition window, re-centring on the fit until its width settles.
  std::vector<ProbeRecord> data = est.probes;
  LogisticFit fit = fit_logistic(data);
  double centre = 0.5 * (lo + hi);
  double width = std::fabs(fit.b) > 0 && std::isfinite(fit.width_10_90()) ? fit.width_10_90() : hi - lo;
  width = std::clamp(width, 2.0 * (hi - lo), 0.5 * centre);
  for (int round = 0; round < opt.sweep_rounds; ++round) {
    Curve curve;
    const int m = std::max(opt.sweep_points, 2);
    for (int i = 0; i < m; ++i) {
      double x = centre + width * (-1.25 + 2.5 * i / (m - 1));
      if (!(x > 0.0)) continue;
      ProbeRecord rec{x, run(x, 0, opt.sweep_trials), opt.sweep_trials};
      data.push_back(rec);
      curve.points.push_back({x, wilson_interval(rec.successes, rec.trials), rec.trials});
    }
    est.final_sweep = std::move(curve);
    fit = fit_logistic(data);
    const double fitted = fit.width_10_90();
    if (!std::isfinite(fitted) || fitted <= 0.0) break;
    const double ratio = fitted / width;
    centre = std::clamp(fit.crossing(target), lo - width, hi + width);
    width = fitted;
    if (ratio > 0.6 && ratio < 1.6) break;
  }
  est.probes = std::move(data);
  est.width_10_90 = fit.width_10_90();
  if (!std::isfinite(est.width_10_90)) est.width_10_90 = 0.0;
  est.param_at_half = fit.crossing(target);
  if (!std::isfinite(est.param_at_half)) est.param_at_half = 0.5 * (lo + hi);
  est.bracket_lo = std::min(est.bracket_lo, est.param_at_half);
  est.bracket_hi = std::max(est.bracket_hi, est.param_at_half);
  return est;
}

/// Initial bracket around the known or bounded threshold of the model.
inline std::pair<double, double> default_bracket(const ExperimentConfig& c)
{
  const auto& p = c.params;
  switch (p.model) {
  case ModelKind::Gamma:
  case ModelKind::Mu:
    if (p.k == 2) {
      const double t = threshold_2sat(p.model, p.d).value;
      return {0.5 * t, 2.0 * t};
    } else {
      auto [lower, upper] = ksat_bounds(p.k, p.d, p.model);
      return {0.5 * lower.value, 2.0 * upper.value};
    }
  case ModelKind::RggPoisson:
  case ModelKind::RggFixed: {
    const double rc = connectivity_radius(static_cast<double>(std::max<std::int64_t>(p.n, 2)), p.d, p.metric).value;
    return {0.25 * rc, 4.0 * rc};
  }
  case ModelKind::Tilde: break;
  }
  throw Error("find_threshold: no default bracket for this model; pass one explicitly");
}

/// Threshold of the config's event in its model parameter. Without an
/// explicit bracket the search starts from default_bracket(c).
inline ThresholdEstimate find_threshold(const ExperimentConfig& c, double target = 0.5, double rel_tol = 0.02,
                                        std::optional<std::pair<double, double>> bracket = std::nullopt,
                                        const ThresholdOptions& opt = {})
{
  c.validate();
  if (!is_boolean(c.event)) throw Error("find_threshold: event must be boolean");
  std::int64_t spent = 0;
  auto runner = [&](double x, std::int64_t first, std::int64_t last) {
    check_budget(c, spent + (last - first));
    spent += last - first;
    auto outs = run_trial_range(with_param(c, x), static_cast<std::uint64_t>(first), static_cast<std::uint64_t>(last));
    std::int64_t s = 0;
    for (const auto& o : outs) s += o.value != 0.0 ? 1 : 0;
    return s;
  };
  const auto [lo, hi] = bracket ? *bracket : default_bracket(c);
  ThresholdEstimate est = locate_threshold(runner, lo, hi, target, rel_tol, opt);
  est.n = c.params.n;
  return est;
}

// ---------------------------------------------------------------------------
// Verification suites

struct MomentReport {
  std::string formula_id;
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  double analytic = 0.0;
  double z = 0.0;
  std::int64_t trials = 0;

  bool passed(double z_max = 3.0) const { return std::fabs(z) <= z_max; }
};

inline nlohmann::json to_json(const MomentReport& r)
{
  return {{"formula_id", r.formula_id}, {"empirical_mean", r.empirical_mean}, {"standard_error", r.standard_error},
          {"analytic", r.analytic},     {"z", r.z},                           {"trials", r.trials},
          {"passed", r.passed()}};
}

inline MomentReport summarize(std::string id, const std::vector<double>& values, double analytic)
{
  MomentReport r;
  r.formula_id = std::move(id);
  r.analytic = analytic;
  r.trials = static_cast<std::int64_t>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  r.empirical_mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - r.empirical_mean) * (v - r.empirical_mean);
  r.standard_error = values.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  r.z = r.standard_error > 0 ? (r.empirical_mean - analytic) / r.standard_error
                             : (r.empirical_mean == analytic ? 0.0 : INFINITY);
  return r;
}

/// Mean clause count against the linear-density closed form.
inline MomentReport verify_clause_density(const ModelParams& p, std::int64_t trials, std::uint64_t seed = 1,
                                          int parallelism = 1)
{
  const AnalyticValue expected = expected_clauses(p);
  if (expected.value < 30.0) throw Error("verify_clause_density: expected count below 30, outside the CLT regime");
  ExperimentConfig c{p, EventKind::ClauseCount, 0, trials, seed, parallelism};
  const TrialBatch b = run_trials(c);
  std::vector<double> values;
  for (const auto& o : b.outcomes) values.push_back(o.value);
  return summarize("expected_clauses", values, expected.value);
}

struct CouplingReport {
  double agreement_rate = 0.0;
  std::int64_t trials = 0;
  CollisionReport collisions;
  MomentReport heads;
};

inline nlohmann::json to_json(const CouplingReport& r)
{
  return {{"agreement_rate", r.agreement_rate},
          {"trials", r.trials},
          {"extra_heads", r.collisions.extra_heads},
          {"same_cell_duplicates", r.collisions.same_cell_duplicates},
          {"boundary_flip_pairs", r.collisions.boundary_flip_pairs},
          {"heads", to_json(r.heads)}};
}

inline CouplingReport verify_coupling(std::uint32_t n, int k, int d, double mu, std::int64_t trials,
                                      std::uint64_t seed = 1)
{
  if (trials < 1) throw Error("verify_coupling: trials must be >= 1");
  CouplingReport rep;
  rep.trials = trials;
  std::int64_t same = 0;
  std::vector<double> heads;
  for (std::int64_t i = 0; i < trials; ++i) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(i));
    CoupledPair pair = generate_discrete_coupled(n, k, d, mu, rng);
    same += pair.identical ? 1 : 0;
    rep.collisions += pair.collisions;
    heads.push_back(static_cast<double>(pair.collisions.extra_heads));
  }
  rep.agreement_rate = static_cast<double>(same) / static_cast<double>(trials);
  const double mean = coupling_heads_mean(n, d, mu).value;
  rep.heads = summarize("coupling_heads_mean", heads, mean);
  // With (almost) no heads the sample variance vanishes; use the binomial one.
  rep.heads.standard_error = std::sqrt(mean / static_cast<double>(trials));
  rep.heads.z = rep.heads.standard_error > 0 ? (rep.heads.empirical_mean - mean) / rep.heads.standard_error : 0.0;
  return rep;
}

namespace detail {

/// Poisson(mu) points of one literal on the torus.
inline std::vector<double> literal_points(double mu, int d, RngStream& rng)
{
  std::vector<double> pts(static_cast<std::size_t>(rng.poisson(mu) * d));
  for (auto& x : pts) x = rng.uniform();
  return pts;
}

/// Whether some point of `a` lies within r of some point of `b`.
inline bool clause_present(const std::vector<double>& a, const std::vector<double>& b, int d, double r)
{
  const auto D = static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < a.size(); i += D)
    for (std::size_t j = 0; j < b.size(); j += D)
      if (within(std::span(a).subspan(i, D), std::span(b).subspan(j, D), r, Metric::Linf, BoundaryMode::Torus))
        return true;
  return false;
}

} // namespace detail

/// Monte Carlo check of a moment formula. Ids:
///   wedge, triple_path, triple_star: F_2(n, mu) on the torus; only the
///     literals involved are sampled, since clause presence depends on
///     nothing else.
///   snakes: mean count_snakes(s) in F_2(n, gamma) against the exact
///     combinatorial expectation (`s` via event_arg, default 3).
inline MomentReport verify_moment(const std::string& formula_id, const ModelParams& p, std::int64_t trials,
                                  std::uint64_t seed = 1, int s = 3, int parallelism = 1)
{
  if (trials < 1) throw Error("verify_moment: trials must be >= 1");
  if (formula_id == "snakes") {
    ModelParams q = p;
    if (q.model != ModelKind::Gamma || q.k != 2) throw Error("verify_moment snakes: needs the gamma model with k = 2");
    ExperimentConfig c{q, EventKind::SnakeCount, s, trials, seed, parallelism};
    const TrialBatch b = run_trials(c);
    std::vector<double> values;
    for (const auto& o : b.outcomes) values.push_back(o.value);
    return summarize("expected_snakes_exact", values, expected_snakes_exact(q, s).value);
  }

  const double mu = p.param;
  const double n = static_cast<double>(p.n);
  const double r = mu_radius(p.n, p.d);
  double analytic;
  int literals;
  if (formula_id == "wedge") {
    analytic = wedge_prob(mu, p.d, n).value;
    literals = 3;
  } else if (formula_id == "triple_path") {
    analytic = triple_probs(mu, p.d, n).first.value;
    literals = 4;
  } else if (formula_id == "triple_star") {
    analytic = triple_probs(mu, p.d, n).second.value;
    literals = 4;
  } else {
    throw Error("verify_moment: unknown formula id '" + formula_id + "'");
  }
  std::int64_t hits = 0;
  std::vector<std::vector<double>> lit(static_cast<std::size_t>(literals));
  for (std::int64_t i = 0; i < trials; ++i) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(i));
    for (auto& l : lit) l = detail::literal_points(mu, p.d, rng);
    bool present;
    if (formula_id == "wedge")
      present = detail::clause_present(lit[0], lit[1], p.d, r) && detail::clause_present(lit[0], lit[2], p.d, r);
    else if (formula_id == "triple_path")
      present = detail::clause_present(lit[0], lit[1], p.d, r) && detail::clause_present(lit[0], lit[2], p.d, r) &&
                detail::clause_present(lit[3], lit[2], p.d, r);
    else
      present = detail::clause_present(lit[0], lit[1], p.d, r) && detail::clause_present(lit[0], lit[2], p.d, r) &&
                detail::clause_present(lit[0], lit[3], p.d, r);
    hits += present ? 1 : 0;
  }
  MomentReport rep;
  rep.formula_id = formula_id;
  rep.analytic = analytic;
  rep.trials = trials;
  rep.empirical_mean = static_cast<double>(hits) / static_cast<double>(trials);
  rep.standard_error = std::sqrt(analytic * (1 - analytic) / static_cast<double>(trials));
  rep.z = (rep.empirical_mean - analytic) / rep.standard_error;
  return rep;
}

} // namespace geosat

#endif // GEOSAT_EXPERIMENTS_HPP
