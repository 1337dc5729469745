#ifndef GEOSAT_MODELS_HPP
#define GEOSAT_MODELS_HPP

#include <geosat/common.hpp>
#include <geosat/geometry.hpp>
#include <geosat/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace geosat {

/// Literal encoded as 2(var-1) + negated; the point label is code + 1, so
/// x_i carries label 2i-1 and its negation label 2i.
struct Literal {
  std::uint32_t code = 0;

  static constexpr Literal make(std::uint32_t variable, bool negated) { return {2 * (variable - 1) + (negated ? 1u : 0u)}; }
  static constexpr Literal from_label(LabelId label) { return {label - 1}; }
  static Literal from_dimacs(long long v)
  {
    if (v == 0) throw Error("literal 0 is not a literal");
    return make(static_cast<std::uint32_t>(v < 0 ? -v : v), v < 0);
  }

  constexpr std::uint32_t variable() const { return code / 2 + 1; }
  constexpr bool negated() const { return (code & 1u) != 0; }
  constexpr LabelId label() const { return code + 1; }
  constexpr Literal complement() const { return {code ^ 1u}; }
  constexpr long long dimacs() const { return negated() ? -static_cast<long long>(variable()) : variable(); }

  friend constexpr auto operator<=>(Literal, Literal) = default;
};

struct Clause {
  std::vector<Literal> literals;         // sorted by code
  std::vector<std::uint32_t> provenance; // provenance[i] generated literals[i]; empty when imported

  bool is_tautology() const
  {
    for (std::size_t i = 0; i + 1 < literals.size(); ++i)
      for (std::size_t j = i + 1; j < literals.size(); ++j)
        if (literals[i].complement() == literals[j]) return true;
    return false;
  }
};

/// Builds a clause from (literal, point) pairs, sorted by literal.
inline Clause make_clause(std::vector<std::pair<Literal, std::uint32_t>> members)
{
  std::sort(members.begin(), members.end());
  Clause c;
  c.literals.reserve(members.size());
  c.provenance.reserve(members.size());
  for (auto [lit, idx] : members) {
    c.literals.push_back(lit);
    c.provenance.push_back(idx);
  }
  return c;
}

enum class ModelKind { Gamma, Mu, Tilde, RggPoisson, RggFixed };

inline std::string_view to_string(ModelKind m)
{
  switch (m) {
  case ModelKind::Gamma: return "gamma";
  case ModelKind::Mu: return "mu";
  case ModelKind::Tilde: return "tilde";
  case ModelKind::RggPoisson: return "rgg";
  case ModelKind::RggFixed: return "rgg-fixed";
  }
  return "?";
}

inline ModelKind parse_model(std::string_view s)
{
  if (s == "gamma") return ModelKind::Gamma;
  if (s == "mu") return ModelKind::Mu;
  if (s == "tilde") return ModelKind::Tilde;
  if (s == "rgg") return ModelKind::RggPoisson;
  if (s == "rgg-fixed") return ModelKind::RggFixed;
  throw Error("unknown model: " + std::string(s));
}

/// Model identity plus parameters. `param` is gamma, mu or r depending on
/// the model; `intensity` is the per-unit intensity mu of the Poisson RGG.
struct ModelParams {
  ModelKind model = ModelKind::Mu;
  std::int64_t n = 0;
  int k = 2;
  int d = 1;
  double param = 0.0;
  double intensity = 1.0;
  Metric metric = Metric::Linf;
  BoundaryMode boundary = BoundaryMode::Cube;

  void validate() const
  {
    if (k < 2) throw Error("k must be >= 2");
    if (d < 1) throw Error("d must be >= 1");
    if (n < 0) throw Error("n must be >= 0");
    if (model == ModelKind::Mu ? !(param >= 0.0) : !(param > 0.0)) throw Error("model parameter out of range");
    if (model == ModelKind::RggPoisson && !(intensity >= 0.0)) throw Error("intensity must be >= 0");
  }
};

/// Everything needed to regenerate a realization bit-for-bit.
struct GeneratorRecord {
  ModelParams params;
  std::uint64_t seed = 0;
};

inline nlohmann::json to_json(const GeneratorRecord& rec)
{
  nlohmann::json j{{"model", to_string(rec.params.model)},
                   {"n", rec.params.n},
                   {"k", rec.params.k},
                   {"d", rec.params.d},
                   {"param", rec.params.param},
                   {"metric", to_string(rec.params.metric)},
                   {"boundary", to_string(rec.params.boundary)},
                   {"seed", rec.seed}};
  if (rec.params.model == ModelKind::RggPoisson) j["intensity"] = rec.params.intensity;
  return j;
}

inline GeneratorRecord record_from_json(const nlohmann::json& j)
{
  try {
    GeneratorRecord rec;
    rec.params.model = parse_model(j.at("model").get<std::string>());
    rec.params.n = j.at("n").get<std::int64_t>();
    rec.params.k = j.at("k").get<int>();
    rec.params.d = j.at("d").get<int>();
    rec.params.param = j.at("param").get<double>();
    rec.params.metric = parse_metric(j.at("metric").get<std::string>());
    rec.params.boundary = parse_boundary(j.at("boundary").get<std::string>());
    rec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("intensity")) rec.params.intensity = j.at("intensity").get<double>();
    rec.params.validate();
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("generator record: ") + e.what());
  }
}

struct Formula {
  std::uint32_t n_vars = 0;
  int k = 2; // 0 marks an imported formula of mixed clause width
  std::vector<Clause> clauses;
  std::optional<GeneratorRecord> record;
};

/// Clause multiset keyed by literal codes only, for provenance-free comparison.
inline std::vector<std::vector<std::uint32_t>> clause_multiset(const Formula& f)
{
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(f.clauses.size());
  for (const auto& c : f.clauses) {
    std::vector<std::uint32_t> codes;
    for (auto l : c.literals) codes.push_back(l.code);
    out.push_back(std::move(codes));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Hypergraph {
  std::size_t vertex_count = 0;
  IndexTuples edges{2};
};

struct RggSample {
  PointSet points;
  Hypergraph graph;
};

struct FormulaSample {
  PointSet points;
  Formula formula;
};

inline double gamma_radius(std::int64_t n, int d, double gamma)
{
  return static_cast<double>(static_cast<long double>(gamma) *
                             std::pow(static_cast<long double>(n), -1.0L / static_cast<long double>(d)));
}

inline double mu_radius(std::int64_t n, int d)
{
  return static_cast<double>(std::pow(static_cast<long double>(n), -1.0L / static_cast<long double>(d)));
}

inline RggSample rgg_from_points(PointSet ps, double r, int k, Metric metric)
{
  RggSample s{std::move(ps), {}};
  s.graph.vertex_count = s.points.size();
  s.graph.edges = enumerate_ball_subsets(s.points, r, k, metric);
  return s;
}

/// G_d(n, mu, r): Poisson(n mu) points, k-edges on every r-clique.
inline RggSample generate_rgg(double n, double mu, double r, int d, int k, Metric metric, BoundaryMode boundary,
                              RngStream& rng)
{
  if (!(n * mu >= 0.0)) throw Error("generate_rgg: n*mu must be >= 0");
  if (!(r > 0.0)) throw Error("generate_rgg: r must be > 0");
  return rgg_from_points(sample_poisson_process(n * mu, d, rng, boundary), r, k, metric);
}

/// G_d(n, r): exactly n uniform points.
inline RggSample generate_rgg_fixed(std::size_t n, double r, int d, int k, Metric metric, BoundaryMode boundary,
                                    RngStream& rng)
{
  if (!(r > 0.0)) throw Error("generate_rgg_fixed: r must be > 0");
  return rgg_from_points(sample_uniform_points(n, d, rng, boundary), r, k, metric);
}

/// One clause per qualifying k-subset of literal-labelled points.
inline Formula formula_from_literal_points(const PointSet& ps, std::uint32_t n_vars, int k, double r, Metric metric)
{
  Formula f;
  f.n_vars = n_vars;
  f.k = k;
  const IndexTuples subsets = enumerate_ball_subsets(ps, r, k, metric);
  f.clauses.reserve(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    std::vector<std::pair<Literal, std::uint32_t>> members;
    for (auto idx : subsets[s]) members.emplace_back(Literal::from_label(ps.label(idx)), idx);
    f.clauses.push_back(make_clause(std::move(members)));
  }
  return f;
}

/// F_k(n, gamma): one point per literal, radius gamma n^{-1/d}.
inline FormulaSample generate_f_gamma(std::uint32_t n, int k, int d, double gamma, Metric metric,
                                      BoundaryMode boundary, RngStream& rng)
{
  if (!(gamma > 0.0)) throw Error("generate_f_gamma: gamma must be > 0");
  PointSet ps(d, boundary);
  ps.reserve(2 * static_cast<std::size_t>(n));
  for (std::uint32_t code = 0; code < 2 * n; ++code) ps.add_uniform(rng, code + 1);
  Formula f = n == 0 ? Formula{0, k, {}, {}} : formula_from_literal_points(ps, n, k, gamma_radius(n, d, gamma), metric);
  return {std::move(ps), std::move(f)};
}

/// F_k(n, mu): independent Poisson(mu) processes per literal, radius n^{-1/d}.
inline FormulaSample generate_f_mu(std::uint32_t n, int k, int d, double mu, Metric metric, BoundaryMode boundary,
                                   RngStream& rng)
{
  if (!(mu >= 0.0)) throw Error("generate_f_mu: mu must be >= 0");
  PointSet ps(d, boundary);
  for (std::uint32_t code = 0; code < 2 * n; ++code) {
    auto count = rng.poisson(mu);
    for (std::int64_t c = 0; c < count; ++c) ps.add_uniform(rng, code + 1);
  }
  Formula f = n == 0 ? Formula{0, k, {}, {}} : formula_from_literal_points(ps, n, k, mu_radius(n, d), metric);
  return {std::move(ps), std::move(f)};
}

/// Variable-labelled points; each qualifying k-subset gets fresh uniform signs.
inline Formula tilde_formula_from_points(const PointSet& ps, std::uint32_t n_vars, int k, double r, Metric metric,
                                         RngStream& rng)
{
  Formula f;
  f.n_vars = n_vars;
  f.k = k;
  if (ps.size() < static_cast<std::size_t>(k)) return f;
  const IndexTuples subsets = enumerate_ball_subsets(ps, r, k, metric);
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    std::vector<std::pair<Literal, std::uint32_t>> members;
    for (auto idx : subsets[s]) members.emplace_back(Literal::make(ps.label(idx), rng.coin()), idx);
    f.clauses.push_back(make_clause(std::move(members)));
  }
  return f;
}

/// F~(n, r): one point per variable, random clause signs.
inline FormulaSample generate_f_tilde(std::uint32_t n, int k, int d, double r, Metric metric, BoundaryMode boundary,
                                      RngStream& rng)
{
  if (!(r > 0.0)) throw Error("generate_f_tilde: r must be > 0");
  PointSet ps(d, boundary);
  ps.reserve(n);
  for (std::uint32_t v = 1; v <= n; ++v) ps.add_uniform(rng, v);
  Formula f = tilde_formula_from_points(ps, n, k, r, metric, rng);
  return {std::move(ps), std::move(f)};
}

/// Regenerates the realization described by a generator record.
inline FormulaSample generate_formula(const GeneratorRecord& rec)
{
  const auto& p = rec.params;
  p.validate();
  RngStream rng(rec.seed);
  const auto n = static_cast<std::uint32_t>(p.n);
  FormulaSample s;
  switch (p.model) {
  case ModelKind::Gamma: s = generate_f_gamma(n, p.k, p.d, p.param, p.metric, p.boundary, rng); break;
  case ModelKind::Mu: s = generate_f_mu(n, p.k, p.d, p.param, p.metric, p.boundary, rng); break;
  case ModelKind::Tilde: s = generate_f_tilde(n, p.k, p.d, p.param, p.metric, p.boundary, rng); break;
  default: throw Error("generate_formula: not a formula model");
  }
  s.formula.record = rec;
  return s;
}

inline RggSample generate_graph(const GeneratorRecord& rec)
{
  const auto& p = rec.params;
  p.validate();
  RngStream rng(rec.seed);
  switch (p.model) {
  case ModelKind::RggPoisson:
    return generate_rgg(static_cast<double>(p.n), p.intensity, p.param, p.d, p.k, p.metric, p.boundary, rng);
  case ModelKind::RggFixed:
    return generate_rgg_fixed(static_cast<std::size_t>(p.n), p.param, p.d, p.k, p.metric, p.boundary, rng);
  default: throw Error("generate_graph: not a graph model");
  }
}

// ---------------------------------------------------------------------------
// Discrete-grid coupling

struct CollisionReport {
  std::int64_t extra_heads = 0;
  std::int64_t same_cell_duplicates = 0;
  std::int64_t boundary_flip_pairs = 0;

  CollisionReport& operator+=(const CollisionReport& o)
  {
    extra_heads += o.extra_heads;
    same_cell_duplicates += o.same_cell_duplicates;
    boundary_flip_pairs += o.boundary_flip_pairs;
    return *this;
  }
};

struct CoupledPair {
  Formula continuous;
  Formula discrete;
  bool identical = false;
  CollisionReport collisions;
};

/// Grid resolution per axis, 16^d n^3, with overflow checking.
inline std::uint64_t coupling_grid_side(std::uint64_t n, int d)
{
  if (d < 1 || n < 1) throw Error("coupling grid: need n >= 1, d >= 1");
  unsigned __int128 side = 1;
  for (int j = 0; j < d; ++j) side *= 16;
  side *= static_cast<unsigned __int128>(n) * n * n;
  if (side > (static_cast<unsigned __int128>(1) << 62)) throw Error("coupling grid: 16^d n^3 overflows");
  return static_cast<std::uint64_t>(side);
}

/// Number of (label, gridpoint) slots L N^d; throws when it exceeds 2^62.
inline std::uint64_t coupling_slot_count(std::uint64_t n, int d)
{
  const unsigned __int128 limit = static_cast<unsigned __int128>(1) << 62;
  unsigned __int128 slots = 2 * static_cast<unsigned __int128>(n);
  const std::uint64_t side = coupling_grid_side(n, d);
  for (int j = 0; j < d; ++j) {
    slots *= side;
    if (slots > limit) throw Error("coupling grid: L N^d overflows");
  }
  return static_cast<std::uint64_t>(slots);
}

/// Probability of the extra coin on an empty slot, e^q (q - (1 - e^{-q})),
/// where q is the expected count of one label in one cell.
inline long double coupling_heads_probability(long double q)
{
  if (q < 1e-3L) {
    // q - (1 - e^{-q}) = q^2/2 - q^3/6 + q^4/24 - ...
    long double term = q * q / 2.0L, sum = 0.0L;
    for (int m = 2; m < 12; ++m) {
      sum += term;
      term *= -q / static_cast<long double>(m + 1);
    }
    return std::exp(q) * sum;
  }
  return std::exp(q) * (q + std::expm1(-q));
}

/// Couples F_k(n, mu) with its discretization on the 16^d n^3 grid: points
/// snap to their cell centres, and the extra heads are sampled in aggregate.
inline CoupledPair generate_discrete_coupled(std::uint32_t n, int k, int d, double mu, RngStream& rng,
                                             Metric metric = Metric::Linf, BoundaryMode boundary = BoundaryMode::Cube)
{
  if (!(mu > 0.0)) throw Error("generate_discrete_coupled: mu must be > 0");
  const std::uint64_t side = coupling_grid_side(n, d);
  const std::uint64_t slots = coupling_slot_count(n, d);
  const std::uint64_t cells = slots / (2 * static_cast<std::uint64_t>(n));
  const double r = mu_radius(n, d);

  CoupledPair out;
  FormulaSample cont = generate_f_mu(n, k, d, mu, metric, boundary, rng);
  out.continuous = std::move(cont.formula);

  const auto N = static_cast<double>(side);
  auto snap_index = [&](double x) {
    auto i = static_cast<std::int64_t>(std::ceil(x * N));
    return std::clamp<std::int64_t>(i, 1, static_cast<std::int64_t>(side));
  };
  auto centre = [&](std::int64_t i) { return (static_cast<double>(i) - 0.5) / N; };

  // Occupied (label, cell) slots; repeats of one label in one cell collapse.
  std::map<std::pair<LabelId, std::vector<std::int64_t>>, std::size_t> occupied;
  PointSet snapped(d, boundary);
  std::vector<double> p(static_cast<std::size_t>(d));
  std::vector<std::int64_t> cell(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < cont.points.size(); ++i) {
    auto x = cont.points.point(i);
    for (int j = 0; j < d; ++j) {
      cell[static_cast<std::size_t>(j)] = snap_index(x[static_cast<std::size_t>(j)]);
      p[static_cast<std::size_t>(j)] = centre(cell[static_cast<std::size_t>(j)]);
    }
    snapped.add(p, cont.points.label(i));
    occupied.try_emplace({cont.points.label(i), cell}, i);
  }
  out.collisions.same_cell_duplicates =
      static_cast<std::int64_t>(cont.points.size()) - static_cast<std::int64_t>(occupied.size());

  // Pairs whose within-r status changes under snapping.
  if (!cont.points.empty()) {
    const double slack = static_cast<double>(d) / N;
    const NeighbourLists near = forward_neighbours(cont.points, r + slack, metric);
    for (std::size_t i = 0; i < cont.points.size(); ++i)
      for (std::uint32_t j : near.of(i))
        if (within(cont.points.point(i), cont.points.point(j), r, metric, boundary) !=
            within(snapped.point(i), snapped.point(j), r, metric, boundary))
          ++out.collisions.boundary_flip_pairs;
  }

  const long double q = static_cast<long double>(mu) / static_cast<long double>(cells);
  const long double q_heads = coupling_heads_probability(q);
  const std::int64_t heads = rng.binomial(static_cast<std::int64_t>(slots), static_cast<double>(q_heads));
  out.collisions.extra_heads = heads;

  PointSet discrete(d, boundary);
  for (const auto& [slot, idx] : occupied) discrete.add(snapped.point(idx), slot.first);
  for (std::int64_t h = 0; h < heads; ++h) {
    // A heads coin only exists on an empty slot; redraw occupied ones.
    for (;;) {
      auto label = static_cast<LabelId>(rng.below(2 * static_cast<std::uint64_t>(n)) + 1);
      for (int j = 0; j < d; ++j) cell[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rng.below(side)) + 1;
      if (occupied.try_emplace({label, cell}, discrete.size()).second) {
        for (int j = 0; j < d; ++j) p[static_cast<std::size_t>(j)] = centre(cell[static_cast<std::size_t>(j)]);
        discrete.add(p, label);
        break;
      }
    }
  }
  out.discrete = discrete.size() >= static_cast<std::size_t>(k) ? formula_from_literal_points(discrete, n, k, r, metric)
                                                                 : Formula{n, k, {}, {}};
  out.identical = clause_multiset(out.continuous) == clause_multiset(out.discrete);
  return out;
}

// ---------------------------------------------------------------------------
// DIMACS CNF

/// Writes `p cnf n m` and one 0-terminated clause per line, verbatim.
inline void write_dimacs(std::ostream& os, const Formula& f, std::string_view comment = {})
{
  if (!comment.empty()) os << "c " << comment << '\n';
  os << "p cnf " << f.n_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (auto l : c.literals) os << l.dimacs() << ' ';
    os << "0\n";
  }
}

inline Formula read_dimacs(std::istream& is)
{
  Formula f;
  std::string line;
  bool have_header = false;
  long long declared = 0;
  Clause current;
  std::size_t lineno = 0;
  auto finish = [&] {
    std::sort(current.literals.begin(), current.literals.end());
    f.clauses.push_back(std::move(current));
    current = Clause{};
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream in(line);
    std::string tok;
    if (!(in >> tok) || tok[0] == 'c' || tok[0] == '%') continue;
    if (tok == "p") {
      std::string fmt;
      long long nv = -1;
      if (!(in >> fmt >> nv >> declared) || fmt != "cnf" || nv < 0 || declared < 0)
        throw Error("dimacs: malformed header on line " + std::to_string(lineno));
      f.n_vars = static_cast<std::uint32_t>(nv);
      have_header = true;
      continue;
    }
    if (!have_header) throw Error("dimacs: clause before header on line " + std::to_string(lineno));
    do {
      long long v = 0;
      try {
        std::size_t used = 0;
        v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw Error("dimacs: bad token '" + tok + "' on line " + std::to_string(lineno));
      }
      if (v == 0) {
        finish();
      } else {
        if (static_cast<unsigned long long>(v < 0 ? -v : v) > f.n_vars)
          throw Error("dimacs: variable out of range on line " + std::to_string(lineno));
        current.literals.push_back(Literal::from_dimacs(v));
      }
    } while (in >> tok);
  }
  if (!have_header) throw Error("dimacs: missing header");
  if (!current.literals.empty()) finish();
  if (static_cast<long long>(f.clauses.size()) != declared)
    throw Error("dimacs: header declares " + std::to_string(declared) + " clauses, found " +
                std::to_string(f.clauses.size()));
  f.k = 0;
  if (!f.clauses.empty()) {
    auto w = f.clauses.front().literals.size();
    bool uniform = std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) { return c.literals.size() == w; });
    f.k = uniform ? static_cast<int>(w) : 0;
  }
  return f;
}

} // namespace geosat

#endif // GEOSAT_MODELS_HPP
