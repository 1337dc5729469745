#ifndef GEOSAT_SOLVERS_HPP
#define GEOSAT_SOLVERS_HPP

#include <geosat/common.hpp>
#include <geosat/models.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace geosat {

namespace detail {

inline bool all_width(const Formula& f, std::size_t w)
{
  return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) { return c.literals.size() == w; });
}

inline void require_2cnf(const Formula& f, const char* who)
{
  if ((f.k != 2 && f.k != 0) || !all_width(f, 2)) throw Error(std::string(who) + ": formula is not a 2-CNF");
}

} // namespace detail

/// Directed graph on the 2n literal nodes (indexed by literal code). A clause
/// (a or b) contributes the arcs ~a -> b and ~b -> a; arcs are deduplicated.
class ImplicationGraph {
public:
  explicit ImplicationGraph(const Formula& f) : n_vars_(f.n_vars)
  {
    detail::require_2cnf(f, "build_implication_graph");
    const std::size_t nodes = 2 * static_cast<std::size_t>(n_vars_);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
    arcs.reserve(2 * f.clauses.size());
    for (const auto& c : f.clauses) {
      Literal a = c.literals[0], b = c.literals[1];
      arcs.emplace_back(a.complement().code, b.code);
      arcs.emplace_back(b.complement().code, a.code);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    offsets_.assign(nodes + 1, 0);
    for (auto [u, v] : arcs) ++offsets_[u + 1];
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    targets_.reserve(arcs.size());
    for (auto [u, v] : arcs) targets_.push_back(v);
  }

  std::uint32_t n_vars() const noexcept { return n_vars_; }
  std::size_t node_count() const noexcept { return 2 * static_cast<std::size_t>(n_vars_); }
  std::size_t arc_count() const noexcept { return targets_.size(); }

  std::span<const std::uint32_t> successors(std::uint32_t u) const
  {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  bool has_arc(std::uint32_t u, std::uint32_t v) const
  {
    auto s = successors(u);
    return std::binary_search(s.begin(), s.end(), v);
  }

  /// Strongly connected components (Tarjan). Ids are assigned in completion
  /// order, so they form a reverse topological order of the condensation.
  std::vector<std::uint32_t> scc_ids() const
  {
    const std::size_t n = node_count();
    constexpr std::uint32_t unvisited = UINT32_MAX;
    std::vector<std::uint32_t> index(n, unvisited), low(n, 0), comp(n, unvisited), stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::pair<std::uint32_t, std::size_t>> call;
    std::uint32_t next_index = 0, next_comp = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
      if (index[root] != unvisited) continue;
      call.emplace_back(root, 0);
      index[root] = low[root] = next_index++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!call.empty()) {
        auto& [u, pos] = call.back();
        auto succ = successors(u);
        if (pos < succ.size()) {
          std::uint32_t v = succ[pos++];
          if (index[v] == unvisited) {
            index[v] = low[v] = next_index++;
            stack.push_back(v);
            on_stack[v] = true;
            call.emplace_back(v, 0);
          } else if (on_stack[v]) {
            low[u] = std::min(low[u], index[v]);
          }
          continue;
        }
        if (low[u] == index[u]) {
          std::uint32_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = next_comp;
          } while (w != u);
          ++next_comp;
        }
        std::uint32_t done = u;
        call.pop_back();
        if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      }
    }
    return comp;
  }

private:
  std::uint32_t n_vars_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
};

inline ImplicationGraph build_implication_graph(const Formula& f) { return ImplicationGraph(f); }

enum class SatStatus { Sat, Unsat };

struct SatResult {
  SatStatus status = SatStatus::Sat;
  std::vector<bool> assignment;                // index = variable, slot 0 unused; SAT only
  std::optional<std::uint32_t> conflict_variable; // 2-SAT UNSAT certificate
  bool exhausted = false;                      // complete-search UNSAT marker

  bool sat() const noexcept { return status == SatStatus::Sat; }
};

inline bool satisfies(const Formula& f, const std::vector<bool>& assignment)
{
  if (assignment.size() < static_cast<std::size_t>(f.n_vars) + 1) return false;
  for (const auto& c : f.clauses) {
    bool ok = false;
    for (auto l : c.literals)
      if (assignment[l.variable()] != l.negated()) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

namespace detail {

inline void check_witness(const Formula& f, const SatResult& r)
{
  if (r.sat() && !satisfies(f, r.assignment)) throw Error("internal: solver witness does not satisfy the formula");
}

} // namespace detail

/// Linear-time 2-SAT by SCC decomposition of the implication graph.
inline SatResult solve_2sat(const Formula& f)
{
  const ImplicationGraph g(f);
  const auto comp = g.scc_ids();
  SatResult r;
  for (std::uint32_t v = 1; v <= f.n_vars; ++v) {
    auto pos = Literal::make(v, false).code;
    if (comp[pos] == comp[pos ^ 1u]) {
      r.status = SatStatus::Unsat;
      r.conflict_variable = v;
      return r;
    }
  }
  r.assignment.assign(static_cast<std::size_t>(f.n_vars) + 1, false);
  for (std::uint32_t v = 1; v <= f.n_vars; ++v) {
    auto pos = Literal::make(v, false).code;
    r.assignment[v] = comp[pos] < comp[pos ^ 1u];
  }
  detail::check_witness(f, r);
  return r;
}

namespace detail {

/// Backtracking search with unit propagation and pure-literal elimination.
class Dpll {
public:
  Dpll(std::uint32_t n_vars, std::vector<std::vector<std::uint32_t>> clauses)
      : n_(n_vars), clauses_(std::move(clauses)), occ_(2 * static_cast<std::size_t>(n_vars)),
        value_(static_cast<std::size_t>(n_vars) + 1, -1), sat_count_(clauses_.size(), 0),
        false_count_(clauses_.size(), 0)
  {
    for (std::size_t c = 0; c < clauses_.size(); ++c)
      for (auto lit : clauses_[c]) occ_[lit].push_back(static_cast<std::uint32_t>(c));
  }

  bool solve()
  {
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
      if (clauses_[c].empty()) return false;
      if (clauses_[c].size() == 1) units_.push_back(static_cast<std::uint32_t>(c));
    }
    return search();
  }

  std::vector<bool> assignment() const
  {
    std::vector<bool> a(static_cast<std::size_t>(n_) + 1, false);
    for (std::uint32_t v = 1; v <= n_; ++v) a[v] = value_[v] == 1;
    return a;
  }

private:
  bool lit_true(std::uint32_t lit) const { return value_[lit / 2 + 1] == ((lit & 1u) ? 0 : 1); }
  bool assigned(std::uint32_t lit) const { return value_[lit / 2 + 1] != -1; }

  // Returns false on conflict. Every assignment lands on the trail.
  bool assign(std::uint32_t lit)
  {
    value_[lit / 2 + 1] = (lit & 1u) ? 0 : 1;
    trail_.push_back(lit);
    bool ok = true;
    for (auto c : occ_[lit]) ++sat_count_[c];
    for (auto c : occ_[lit ^ 1u]) {
      ++false_count_[c];
      if (sat_count_[c] == 0) {
        if (false_count_[c] == clauses_[c].size())
          ok = false;
        else if (false_count_[c] + 1 == clauses_[c].size())
          units_.push_back(c);
      }
    }
    return ok;
  }

  void undo_to(std::size_t mark)
  {
    while (trail_.size() > mark) {
      auto lit = trail_.back();
      trail_.pop_back();
      for (auto c : occ_[lit]) --sat_count_[c];
      for (auto c : occ_[lit ^ 1u]) --false_count_[c];
      value_[lit / 2 + 1] = -1;
    }
  }

  bool propagate()
  {
    while (!units_.empty()) {
      auto c = units_.back();
      units_.pop_back();
      if (sat_count_[c] != 0) continue;
      std::uint32_t unit = UINT32_MAX;
      for (auto lit : clauses_[c])
        if (!assigned(lit)) {
          unit = lit;
          break;
        }
      if (unit == UINT32_MAX) return false;
      if (!assign(unit)) return false;
    }
    return true;
  }

  bool search()
  {
    if (!propagate()) {
      units_.clear();
      return false;
    }
    // Active occurrence counts over unsatisfied clauses.
    std::vector<std::uint32_t> active(2 * static_cast<std::size_t>(n_), 0);
    bool open = false;
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
      if (sat_count_[c] != 0) continue;
      open = true;
      for (auto lit : clauses_[c])
        if (!assigned(lit)) ++active[lit];
    }
    if (!open) return true;

    const std::size_t mark = trail_.size();
    bool pure_found = false, conflict = false;
    for (std::uint32_t lit = 0; lit < active.size() && !conflict; ++lit)
      if (active[lit] > 0 && active[lit ^ 1u] == 0 && !assigned(lit)) {
        pure_found = true;
        conflict = !assign(lit);
      }
    if (pure_found) {
      if (!conflict && search()) return true;
      units_.clear();
      undo_to(mark);
      return false;
    }

    std::uint32_t best = UINT32_MAX, best_score = 0;
    for (std::uint32_t v = 1; v <= n_; ++v) {
      if (value_[v] != -1) continue;
      auto pos = Literal::make(v, false).code;
      auto score = active[pos] + active[pos ^ 1u];
      if (score > best_score) {
        best_score = score;
        best = pos;
      }
    }
    if (best == UINT32_MAX) return true;
    const std::uint32_t first = active[best] >= active[best ^ 1u] ? best : best ^ 1u;
    for (std::uint32_t lit : {first, first ^ 1u}) {
      if (assign(lit) && search()) return true;
      units_.clear();
      undo_to(mark);
    }
    return false;
  }

  std::uint32_t n_;
  std::vector<std::vector<std::uint32_t>> clauses_;
  std::vector<std::vector<std::uint32_t>> occ_;
  std::vector<int> value_;
  std::vector<std::size_t> sat_count_, false_count_;
  std::vector<std::uint32_t> trail_, units_;
};

/// Literal-deduplicated, tautology-free, duplicate-free clause list.
inline std::vector<std::vector<std::uint32_t>> normalized_clauses(const Formula& f)
{
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& c : f.clauses) {
    if (c.is_tautology()) continue;
    std::vector<std::uint32_t> codes;
    for (auto l : c.literals) codes.push_back(l.code);
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    out.push_back(std::move(codes));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace detail

inline constexpr std::uint32_t kDefaultVarLimit = 40;

/// Exact decision for small formulas of any clause width.
inline SatResult solve_ksat_complete(const Formula& f, std::uint32_t var_limit = kDefaultVarLimit)
{
  if (f.n_vars > var_limit)
    throw Error("solve_ksat_complete: " + std::to_string(f.n_vars) + " variables exceed limit " +
                std::to_string(var_limit));
  detail::Dpll dpll(f.n_vars, detail::normalized_clauses(f));
  SatResult r;
  if (dpll.solve()) {
    r.assignment = dpll.assignment();
    detail::check_witness(f, r);
  } else {
    r.status = SatStatus::Unsat;
    r.exhausted = true;
  }
  return r;
}

/// Splits the formula into variable-disjoint components and decides each with
/// the complete solver; `component_limit` bounds the size of any component.
inline SatResult solve_ksat_components(const Formula& f, std::uint32_t component_limit = kDefaultVarLimit)
{
  std::vector<std::uint32_t> parent(static_cast<std::size_t>(f.n_vars) + 1);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : f.clauses)
    for (std::size_t i = 1; i < c.literals.size(); ++i)
      parent[find(c.literals[i].variable())] = find(c.literals[0].variable());

  std::map<std::uint32_t, std::vector<std::uint32_t>> members;
  std::vector<bool> in_clause(parent.size(), false);
  for (const auto& c : f.clauses)
    for (auto l : c.literals) in_clause[l.variable()] = true;
  for (std::uint32_t v = 1; v <= f.n_vars; ++v)
    if (in_clause[v]) members[find(v)].push_back(v);

  std::map<std::uint32_t, Formula> parts;
  std::vector<std::uint32_t> local(parent.size(), 0);
  for (const auto& [root, vars] : members) {
    for (std::size_t i = 0; i < vars.size(); ++i) local[vars[i]] = static_cast<std::uint32_t>(i + 1);
    Formula& part = parts[root];
    part.n_vars = static_cast<std::uint32_t>(vars.size());
    part.k = 0;
  }
  for (const auto& c : f.clauses) {
    if (c.literals.empty()) {
      SatResult r;
      r.status = SatStatus::Unsat;
      r.exhausted = true;
      return r;
    }
    Clause lc;
    for (auto l : c.literals) lc.literals.push_back(Literal::make(local[l.variable()], l.negated()));
    parts[find(c.literals[0].variable())].clauses.push_back(std::move(lc));
  }

  SatResult r;
  r.assignment.assign(parent.size(), false);
  for (const auto& [root, part] : parts) {
    SatResult pr = solve_ksat_complete(part, component_limit);
    if (!pr.sat()) {
      SatResult u;
      u.status = SatStatus::Unsat;
      u.exhausted = true;
      return u;
    }
    const auto& vars = members.at(root);
    for (std::size_t i = 0; i < vars.size(); ++i) r.assignment[vars[i]] = pr.assignment[i + 1];
  }
  detail::check_witness(f, r);
  return r;
}

/// Replaces every k-clause by all of its 2-subclauses; provenance follows.
inline Formula project_to_2sat(const Formula& f)
{
  if (f.k < 3) throw Error("project_to_2sat: k must be >= 3");
  Formula out;
  out.n_vars = f.n_vars;
  out.k = 2;
  for (const auto& c : f.clauses) {
    const bool has_prov = c.provenance.size() == c.literals.size();
    for (std::size_t i = 0; i < c.literals.size(); ++i)
      for (std::size_t j = i + 1; j < c.literals.size(); ++j) {
        Clause sub;
        sub.literals = {c.literals[i], c.literals[j]};
        if (has_prov) sub.provenance = {c.provenance[i], c.provenance[j]};
        out.clauses.push_back(std::move(sub));
      }
  }
  return out;
}

inline constexpr int kMaxBicycleLength = 12;

/// Number of bicycles (u, w_1..w_L, v) for each L in [1, max_length]: the
/// w_i are literals of distinct variables, u and v are literals over those
/// variables, and (u | w_1), (~w_i | w_{i+1}), (~w_L | v) all occur in f.
/// Index 0 of the result is unused.
inline std::vector<std::uint64_t> count_bicycles(const Formula& f, int max_length)
{
  if (max_length < 1 || max_length > kMaxBicycleLength) throw Error("count_bicycles: max_length must lie in [1,12]");
  const ImplicationGraph g(f);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_length) + 1, 0);
  std::vector<std::uint32_t> path;
  std::vector<bool> used(static_cast<std::size_t>(f.n_vars) + 1, false);

  auto endpoint_count = [&] {
    // u: (u | w_1) is the arc ~u -> w_1.  v: (~w_L | v) is the arc w_L -> v.
    std::uint64_t nu = 0, nv = 0;
    for (auto w : path)
      for (std::uint32_t lit : {w, w ^ 1u}) {
        if (g.has_arc(lit ^ 1u, path.front())) ++nu;
        if (g.has_arc(path.back(), lit)) ++nv;
      }
    return nu * nv;
  };
  auto dfs = [&](auto&& self) -> void {
    counts[path.size()] += endpoint_count();
    if (static_cast<int>(path.size()) == max_length) return;
    for (auto next : g.successors(path.back())) {
      auto var = next / 2 + 1;
      if (used[var]) continue;
      used[var] = true;
      path.push_back(next);
      self(self);
      path.pop_back();
      used[var] = false;
    }
  };
  for (std::uint32_t start = 0; start < g.node_count(); ++start) {
    path.assign(1, start);
    used[start / 2 + 1] = true;
    dfs(dfs);
    used[start / 2 + 1] = false;
  }
  return counts;
}

inline constexpr int kMaxSnakeLength = 9;

/// Number of ordered snakes of odd length s = 2t-1: literals w_1..w_s of
/// distinct variables with (w_t | w_1), (~w_i | w_{i+1}), (~w_s | ~w_t) in f.
inline std::uint64_t count_snakes(const Formula& f, int s)
{
  if (s < 1 || s % 2 == 0) throw Error("count_snakes: s must be odd and positive");
  if (s > kMaxSnakeLength) throw Error("count_snakes: s must be <= 9");
  const ImplicationGraph g(f);
  const std::size_t t = static_cast<std::size_t>(s + 1) / 2;
  std::uint64_t count = 0;
  std::vector<std::uint32_t> path;
  std::vector<bool> used(static_cast<std::size_t>(f.n_vars) + 1, false);
  // Walk the chain w_1 -> ... -> w_s, then close it through ~w_t.
  auto dfs = [&](auto&& self) -> void {
    if (path.size() == static_cast<std::size_t>(s)) {
      const std::uint32_t not_wt = path[t - 1] ^ 1u;
      if (g.has_arc(path.back(), not_wt) && g.has_arc(not_wt, path.front())) ++count;
      return;
    }
    for (auto next : g.successors(path.back())) {
      auto var = next / 2 + 1;
      if (used[var]) continue;
      used[var] = true;
      path.push_back(next);
      self(self);
      path.pop_back();
      used[var] = false;
    }
  };
  for (std::uint32_t start = 0; start < g.node_count(); ++start) {
    path.assign(1, start);
    used[start / 2 + 1] = true;
    dfs(dfs);
    used[start / 2 + 1] = false;
  }
  return count;
}

struct ComponentStats {
  std::size_t component_count = 0;
  std::size_t largest_size = 0;
  bool is_connected = false;
};

inline ComponentStats component_stats(const Hypergraph& g)
{
  std::vector<std::uint32_t> parent(g.vertex_count), size(g.vertex_count, 1);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  ComponentStats st;
  st.component_count = g.vertex_count;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto edge = g.edges[e];
    for (std::size_t i = 1; i < edge.size(); ++i) {
      auto a = find(edge[0]), b = find(edge[i]);
      if (a == b) continue;
      if (size[a] < size[b]) std::swap(a, b);
      parent[b] = a;
      size[a] += size[b];
      --st.component_count;
    }
  }
  for (std::uint32_t v = 0; v < g.vertex_count; ++v)
    if (parent[v] == v) st.largest_size = std::max<std::size_t>(st.largest_size, size[v]);
  st.is_connected = st.component_count <= 1;
  return st;
}

} // namespace geosat

#endif // GEOSAT_SOLVERS_HPP
