#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace geosat;
using oracle::formula_from_dimacs;

namespace {

Formula snake3()
{
  // w1 = x1, w2 = x2, w3 = x3; (w2|w1), (~w1|w2), (~w2|w3), (~w3|~w2).
  return formula_from_dimacs(3, {{2, 1}, {-1, 2}, {-2, 3}, {-3, -2}});
}

Formula with_duplicates(const Formula& f)
{
  Formula g = f;
  g.clauses.insert(g.clauses.end(), f.clauses.begin(), f.clauses.end());
  return g;
}

} // namespace

TEST(ImplicationGraph, EmptyFormulaHasIsolatedVertices)
{
  Formula f;
  f.n_vars = 4;
  const ImplicationGraph g(f);
  EXPECT_EQ(g.node_count(), 8u);
  EXPECT_EQ(g.arc_count(), 0u);
}

TEST(ImplicationGraph, SingleClauseArcs)
{
  const ImplicationGraph g(formula_from_dimacs(2, {{1, 2}}));
  const auto x1 = Literal::make(1, false).code, x2 = Literal::make(2, false).code;
  EXPECT_EQ(g.arc_count(), 2u);
  EXPECT_TRUE(g.has_arc(x1 ^ 1u, x2));
  EXPECT_TRUE(g.has_arc(x2 ^ 1u, x1));
}

TEST(ImplicationGraph, TautologyGivesSelfLoops)
{
  const ImplicationGraph g(formula_from_dimacs(1, {{1, -1}}));
  const auto x = Literal::make(1, false).code;
  EXPECT_EQ(g.arc_count(), 2u);
  EXPECT_TRUE(g.has_arc(x, x));
  EXPECT_TRUE(g.has_arc(x ^ 1u, x ^ 1u));
  EXPECT_TRUE(solve_2sat(formula_from_dimacs(1, {{1, -1}})).sat());
}

TEST(ImplicationGraph, DuplicateClausesDeduplicated)
{
  const ImplicationGraph g(formula_from_dimacs(2, {{1, 2}, {2, 1}, {1, 2}}));
  EXPECT_EQ(g.arc_count(), 2u);
}

TEST(ImplicationGraph, ContrapositiveSymmetry)
{
  RngStream rng(1);
  for (int t = 0; t < 200; ++t) {
    const Formula f = oracle::random_2cnf(10, 15, rng);
    const ImplicationGraph g(f);
    for (std::uint32_t u = 0; u < g.node_count(); ++u)
      for (auto v : g.successors(u)) ASSERT_TRUE(g.has_arc(v ^ 1u, u ^ 1u));
  }
}

TEST(ImplicationGraph, RejectsNon2Cnf)
{
  EXPECT_THROW(ImplicationGraph(formula_from_dimacs(3, {{1, 2, 3}})), Error);
  EXPECT_THROW(solve_2sat(formula_from_dimacs(3, {{1, 2, 3}})), Error);
}

TEST(Solve2Sat, Examples)
{
  Formula empty;
  empty.n_vars = 3;
  EXPECT_TRUE(solve_2sat(empty).sat());
  const SatResult all = solve_2sat(formula_from_dimacs(2, {{1, 2}, {-1, 2}, {1, -2}, {-1, -2}}));
  EXPECT_FALSE(all.sat());
  ASSERT_TRUE(all.conflict_variable.has_value());
  EXPECT_FALSE(solve_2sat(snake3()).sat());
}

TEST(Solve2Sat, CertificateNamesContradictoryScc)
{
  RngStream rng(2);
  int unsat = 0;
  for (int t = 0; t < 2000; ++t) {
    const Formula f = oracle::random_2cnf(8, 12, rng);
    const SatResult r = solve_2sat(f);
    if (r.sat()) {
      ASSERT_TRUE(satisfies(f, r.assignment));
      continue;
    }
    ++unsat;
    ASSERT_TRUE(r.conflict_variable.has_value());
    const auto comp = ImplicationGraph(f).scc_ids();
    const auto v = Literal::make(*r.conflict_variable, false).code;
    ASSERT_EQ(comp[v], comp[v ^ 1u]);
  }
  EXPECT_GT(unsat, 100);
}

TEST(Solve2Sat, AgreesWithTruthTableAndDpll)
{
  RngStream rng(3);
  int sat = 0;
  for (int t = 0; t < 5000; ++t) {
    const auto n = static_cast<std::uint32_t>(1 + rng.below(12));
    const std::size_t m = rng.below(3 * n + 1);
    const Formula f = oracle::random_2cnf(n, m, rng);
    const bool expected = oracle::brute_force_sat(f);
    const SatResult a = solve_2sat(f), b = solve_ksat_complete(f);
    ASSERT_EQ(a.sat(), expected);
    ASSERT_EQ(b.sat(), expected);
    if (expected) {
      ASSERT_TRUE(satisfies(f, a.assignment));
      ASSERT_TRUE(satisfies(f, b.assignment));
    }
    sat += expected;
  }
  EXPECT_GT(sat, 1000);
  EXPECT_LT(sat, 4900);
}

TEST(SolveKsat, Examples)
{
  Formula empty;
  EXPECT_TRUE(solve_ksat_complete(empty).sat());
  std::vector<std::vector<int>> all;
  for (int mask = 0; mask < 8; ++mask)
    all.push_back({mask & 1 ? -1 : 1, mask & 2 ? -2 : 2, mask & 4 ? -3 : 3});
  const SatResult r = solve_ksat_complete(formula_from_dimacs(3, all));
  EXPECT_FALSE(r.sat());
  EXPECT_TRUE(r.exhausted);
  all.pop_back();
  EXPECT_TRUE(solve_ksat_complete(formula_from_dimacs(3, all)).sat());
}

TEST(SolveKsat, UnitAndEmptyClauses)
{
  EXPECT_FALSE(solve_ksat_complete(formula_from_dimacs(2, {{1}, {-1}})).sat());
  const SatResult r = solve_ksat_complete(formula_from_dimacs(3, {{1}, {-1, 2}, {-2, 3, -1}}));
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.assignment[3]);
}

TEST(SolveKsat, VarLimitEnforced)
{
  Formula f;
  f.n_vars = 41;
  f.k = 3;
  EXPECT_THROW(solve_ksat_complete(f), Error);
  EXPECT_NO_THROW(solve_ksat_complete(f, 41));
}

TEST(SolveKsat, RandomKCnfAgreesWithTruthTable)
{
  RngStream rng(4);
  for (int t = 0; t < 2000; ++t) {
    const auto n = static_cast<std::uint32_t>(3 + rng.below(10));
    const int k = 3 + static_cast<int>(rng.below(2));
    const std::size_t m = rng.below(6 * n);
    std::vector<std::vector<int>> cl;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<int> c;
      for (int j = 0; j < k; ++j) {
        const int v = static_cast<int>(rng.below(n)) + 1;
        c.push_back(rng.coin() ? -v : v);
      }
      cl.push_back(c);
    }
    const Formula f = formula_from_dimacs(n, cl);
    const bool expected = oracle::brute_force_sat(f);
    ASSERT_EQ(solve_ksat_complete(f).sat(), expected);
    ASSERT_EQ(solve_ksat_components(f).sat(), expected);
  }
}

TEST(SolveKsat, GeometricTwoSatCrossCheck)
{
  for (std::uint64_t i = 0; i < 1000; ++i) {
    RngStream rng = RngStream::substream(5, i);
    const Formula f = generate_f_gamma(10, 2, 1, 0.25, Metric::Linf, BoundaryMode::Cube, rng).formula;
    ASSERT_EQ(solve_ksat_complete(f).sat(), solve_2sat(f).sat());
  }
}

TEST(SolveKsat, ComponentsHandleLargeSparseFormulas)
{
  RngStream rng(6);
  const Formula f = generate_f_gamma(5000, 3, 2, 0.3, Metric::Linf, BoundaryMode::Cube, rng).formula;
  ASSERT_FALSE(f.clauses.empty());
  const SatResult r = solve_ksat_components(f);
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(satisfies(f, r.assignment));
}

TEST(SolveKsat, WitnessCheckRejectsBadAssignment)
{
  const Formula f = formula_from_dimacs(2, {{1, 2}});
  SatResult r;
  r.assignment = {false, false, false};
  EXPECT_THROW(detail::check_witness(f, r), Error);
}

TEST(ProjectTo2Sat, Examples)
{
  const Formula f = formula_from_dimacs(3, {{1, 2, 3}});
  const Formula p = project_to_2sat(f);
  EXPECT_EQ(p.k, 2);
  const std::vector<std::vector<std::uint32_t>> expected{{0, 2}, {0, 4}, {2, 4}};
  EXPECT_EQ(clause_multiset(p), expected);

  Formula empty;
  empty.k = 3;
  EXPECT_TRUE(project_to_2sat(empty).clauses.empty());
  EXPECT_THROW(project_to_2sat(formula_from_dimacs(2, {{1, 2}})), Error);
}

TEST(ProjectTo2Sat, ProvenanceInherited)
{
  RngStream rng(7);
  const FormulaSample s = generate_f_gamma(30, 3, 1, 1.0, Metric::Linf, BoundaryMode::Cube, rng);
  const Formula p = project_to_2sat(s.formula);
  ASSERT_EQ(p.clauses.size(), 3 * s.formula.clauses.size());
  for (const auto& c : p.clauses)
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(Literal::from_label(s.points.label(c.provenance[i])), c.literals[i]);
}

TEST(ProjectTo2Sat, ProjectionSatImpliesOriginalSat)
{
  int projected_sat = 0, original_sat = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    RngStream rng = RngStream::substream(8, i);
    const double gamma = 0.5 + 0.25 * static_cast<double>(i % 4);
    const Formula f = generate_f_gamma(12, 3, 1, gamma, Metric::Linf, BoundaryMode::Cube, rng).formula;
    const SatResult p = solve_2sat(project_to_2sat(f));
    const bool orig = solve_ksat_complete(f).sat();
    if (p.sat()) {
      ASSERT_TRUE(orig);
      ASSERT_TRUE(satisfies(f, p.assignment));
    }
    projected_sat += p.sat();
    original_sat += orig;
  }
  EXPECT_GT(projected_sat, 50);
  EXPECT_LT(projected_sat, original_sat);
}

TEST(Bicycles, EmptyFormulaHasNone)
{
  Formula f;
  f.n_vars = 4;
  for (auto c : count_bicycles(f, 6)) EXPECT_EQ(c, 0u);
}

TEST(Bicycles, HandExample)
{
  const Formula f = formula_from_dimacs(2, {{2, 1}, {-1, 2}, {-2, 1}});
  const auto counts = count_bicycles(f, 2);
  EXPECT_GE(counts[2], 1u);
  EXPECT_EQ(counts[2], oracle::brute_force_bicycles(f, 2));
  EXPECT_EQ(counts[1], oracle::brute_force_bicycles(f, 1));
}

TEST(Bicycles, MatchBruteForceOnRandomFormulas)
{
  RngStream rng(9);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::uint32_t>(2 + rng.below(4));
    const Formula f = oracle::random_2cnf(n, rng.below(3 * n), rng);
    const auto counts = count_bicycles(f, static_cast<int>(n));
    for (int L = 1; L <= static_cast<int>(n); ++L)
      ASSERT_EQ(counts[static_cast<std::size_t>(L)], oracle::brute_force_bicycles(f, L)) << "L=" << L;
  }
}

TEST(Bicycles, UnsatImpliesBicycleAndSccCriterion)
{
  RngStream rng(10);
  int unsat = 0;
  while (unsat < 300) {
    const auto n = static_cast<std::uint32_t>(2 + rng.below(7));
    const Formula f = oracle::random_2cnf(n, n + rng.below(2 * n), rng);
    const bool sat = oracle::brute_force_sat(f);
    const auto comp = ImplicationGraph(f).scc_ids();
    bool contradictory = false;
    for (std::uint32_t v = 0; v < n; ++v) contradictory = contradictory || comp[2 * v] == comp[2 * v + 1];
    ASSERT_EQ(contradictory, !sat);
    if (sat) continue;
    ++unsat;
    const auto counts = count_bicycles(f, static_cast<int>(n));
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    ASSERT_GE(total, 1u);
  }
}

TEST(Bicycles, LengthGuard)
{
  const Formula f = snake3();
  EXPECT_THROW(count_bicycles(f, 0), Error);
  EXPECT_THROW(count_bicycles(f, 13), Error);
}

TEST(Snakes, EmptyFormulaHasNone)
{
  Formula f;
  f.n_vars = 3;
  EXPECT_EQ(count_snakes(f, 3), 0u);
}

TEST(Snakes, CanonicalSnakeCountMatchesBruteForce)
{
  const Formula f = snake3();
  const auto expected = oracle::brute_force_snakes(f, 3);
  EXPECT_GE(expected, 1u);
  EXPECT_EQ(count_snakes(f, 3), expected);
  EXPECT_FALSE(solve_ksat_complete(f).sat());
}

TEST(Snakes, MatchBruteForceOnRandomFormulas)
{
  RngStream rng(11);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::uint32_t>(3 + rng.below(3));
    const Formula f = oracle::random_2cnf(n, n + rng.below(3 * n), rng);
    for (int s : {1, 3, 5}) {
      if (static_cast<std::uint32_t>(s) > n) continue;
      ASSERT_EQ(count_snakes(f, s), oracle::brute_force_snakes(f, s)) << "s=" << s;
    }
  }
}

TEST(Snakes, InvariantUnderClauseDuplication)
{
  RngStream rng(12);
  for (int t = 0; t < 100; ++t) {
    const Formula f = oracle::random_2cnf(6, 10, rng);
    for (int s : {3, 5}) ASSERT_EQ(count_snakes(f, s), count_snakes(with_duplicates(f), s));
  }
}

TEST(Snakes, EveryCountedSnakeIsUnsat)
{
  // Any formula containing a snake is unsatisfiable.
  RngStream rng(13);
  for (int t = 0; t < 500; ++t) {
    const Formula f = oracle::random_2cnf(7, 10, rng);
    if (count_snakes(f, 3) > 0 || count_snakes(f, 5) > 0) {
      ASSERT_FALSE(solve_2sat(f).sat());
    }
  }
}

TEST(Snakes, Guards)
{
  const Formula f = snake3();
  EXPECT_THROW(count_snakes(f, 2), Error);
  EXPECT_THROW(count_snakes(f, 11), Error);
}

TEST(ComponentStats, Examples)
{
  Hypergraph empty;
  empty.vertex_count = 5;
  const ComponentStats a = component_stats(empty);
  EXPECT_EQ(a.component_count, 5u);
  EXPECT_EQ(a.largest_size, 1u);
  EXPECT_FALSE(a.is_connected);

  Hypergraph path;
  path.vertex_count = 4;
  for (std::uint32_t i = 0; i + 1 < 4; ++i) path.edges.push_back(std::vector<std::uint32_t>{i, i + 1});
  const ComponentStats b = component_stats(path);
  EXPECT_EQ(b.component_count, 1u);
  EXPECT_EQ(b.largest_size, 4u);
  EXPECT_TRUE(b.is_connected);
}
