#ifndef GEOSAT_ANALYTICS_HPP
#define GEOSAT_ANALYTICS_HPP

#include <geosat/common.hpp>
#include <geosat/models.hpp>

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

namespace geosat {

/// How a closed form relates to the quantity it describes. Tests pick tight
/// tolerances for `exact`, statistical ones for `leading_order`, and one-sided
/// checks for `upper_bound`.
enum class ValueKind { Exact, LeadingOrder, UpperBound };

inline std::string_view to_string(ValueKind k)
{
  switch (k) {
  case ValueKind::Exact: return "exact";
  case ValueKind::LeadingOrder: return "leading_order";
  case ValueKind::UpperBound: return "upper_bound";
  }
  return "?";
}

struct AnalyticValue {
  double value = 0.0;
  ValueKind kind = ValueKind::Exact;
  std::string formula_id;
};

inline nlohmann::json to_json(const AnalyticValue& v)
{
  return {{"value", v.value}, {"kind", to_string(v.kind)}, {"formula_id", v.formula_id}};
}

namespace detail {

/// n (n-1) ... (n-s+1) as a double.
inline double falling_factorial(double n, int s)
{
  double out = 1.0;
  for (int i = 0; i < s; ++i) out *= n - i;
  return out;
}

inline double factorial(int k)
{
  double out = 1.0;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

inline void require_sat_model(const ModelParams& p, const char* who)
{
  if (p.model != ModelKind::Gamma && p.model != ModelKind::Mu)
    throw Error(std::string(who) + ": model must be gamma or mu");
}

} // namespace detail

/// Probability that k uniform points have all pairwise l_inf distances <= rho,
/// i.e. the d-th power of P[max - min <= rho] for k uniforms on one axis.
inline AnalyticValue clique_prob(int k, int d, double rho, BoundaryMode boundary = BoundaryMode::Cube)
{
  if (k < 2 || d < 1) throw Error("clique_prob: need k >= 2, d >= 1");
  if (!(rho >= 0.0)) throw Error("clique_prob: rho must be >= 0");
  double q;
  ValueKind kind = ValueKind::Exact;
  if (boundary == BoundaryMode::Cube) {
    q = rho >= 1.0 ? 1.0 : std::min(1.0, k * std::pow(rho, k - 1) - (k - 1) * std::pow(rho, k));
  } else if (k == 2) {
    q = std::min(1.0, 2.0 * rho);
  } else {
    q = std::min(1.0, k * std::pow(rho, k - 1));
    kind = ValueKind::LeadingOrder;
  }
  return {std::pow(q, d), kind, boundary == BoundaryMode::Cube ? "clique_prob" : "clique_prob_torus"};
}

/// Expected clause count, linear in n.
inline AnalyticValue expected_clauses(const ModelParams& p)
{
  detail::require_sat_model(p, "expected_clauses");
  const double n = static_cast<double>(p.n);
  const double kd = std::pow(static_cast<double>(p.k), p.d);
  double v;
  if (p.model == ModelKind::Gamma)
    v = std::pow(2.0, p.k) * std::pow(p.param, p.d * (p.k - 1)) * kd / detail::factorial(p.k) * n;
  else
    v = std::pow(2.0 * p.param, p.k) * kd / detail::factorial(p.k) * n;
  return {v, ValueKind::LeadingOrder, "expected_clauses"};
}

/// Location of the 2-SAT satisfiability threshold.
inline AnalyticValue threshold_2sat(ModelKind model, int d)
{
  if (d < 1) throw Error("threshold_2sat: d must be >= 1");
  if (model == ModelKind::Gamma) return {std::pow(2.0, -(1.0 + 1.0 / d)), ValueKind::Exact, "threshold_2sat_gamma"};
  if (model == ModelKind::Mu) return {std::pow(2.0, -(d + 1.0) / 2.0), ValueKind::Exact, "threshold_2sat_mu"};
  throw Error("threshold_2sat: model must be gamma or mu");
}

/// Constant bounds bracketing the k-SAT threshold for k >= 3.
inline std::pair<AnalyticValue, AnalyticValue> ksat_bounds(int k, int d, ModelKind model)
{
  if (k < 3) throw Error("ksat_bounds: k must be >= 3");
  AnalyticValue lower = threshold_2sat(model, d);
  lower.kind = ValueKind::Exact;
  lower.formula_id = "ksat_lower";
  AnalyticValue upper{0.0, ValueKind::Exact, "ksat_upper"};
  upper.value = model == ModelKind::Gamma ? std::pow(k - 1.0, 1.0 / d) : k + std::numbers::ln2;
  return {lower, upper};
}

/// Raw moments E[X^r] of X ~ Poisson(mu), r <= 4.
inline AnalyticValue poisson_moment(double mu, int order)
{
  if (!(mu >= 0.0)) throw Error("poisson_moment: mu must be >= 0");
  double v;
  switch (order) {
  case 1: v = mu; break;
  case 2: v = mu * mu + mu; break;
  case 3: v = mu * mu * mu + 3 * mu * mu + mu; break;
  case 4: v = mu * mu * mu * mu + 6 * mu * mu * mu + 7 * mu * mu + mu; break;
  default: throw Error("poisson_moment: order must lie in [1,4]");
  }
  return {v, ValueKind::Exact, "poisson_moment_" + std::to_string(order)};
}

/// P[(l1,l2) and (l1,l3) both present] in F_2(n, mu): conditioning on the
/// count of l1 brings in its second moment.
inline AnalyticValue wedge_prob(double mu, int d, double n)
{
  if (!(mu > 0.0) || !(n >= 1.0)) throw Error("wedge_prob: need mu > 0, n >= 1");
  return {std::pow(2.0, 2 * d) * mu * mu / (n * n) * (mu + mu * mu), ValueKind::LeadingOrder, "wedge"};
}

/// Path triple (l1,l2),(l1,l3),(l4,l3) and star triple (l1,l2),(l1,l3),(l1,l4).
inline std::pair<AnalyticValue, AnalyticValue> triple_probs(double mu, int d, double n)
{
  if (!(mu > 0.0) || !(n >= 1.0)) throw Error("triple_probs: need mu > 0, n >= 1");
  const double base = std::pow(2.0, 3 * d) * std::pow(mu, 4) / (n * n * n);
  return {{base * (mu + 1) * (mu + 1), ValueKind::LeadingOrder, "triple_path"},
          {base * (mu * mu + 3 * mu + 1), ValueKind::LeadingOrder, "triple_star"}};
}

/// Leading-order expected number of s-snakes.
inline AnalyticValue expected_snakes(const ModelParams& p, int s)
{
  detail::require_sat_model(p, "expected_snakes");
  if (s < 1 || s % 2 == 0) throw Error("expected_snakes: s must be odd");
  const double n = static_cast<double>(p.n);
  double v;
  if (p.model == ModelKind::Gamma) {
    v = std::pow(2.0 * n, s) * std::pow(std::pow(2.0 * p.param, p.d) / n, s + 1);
  } else {
    const double mu = p.param;
    v = std::pow(2.0, 2 * p.d + 1) * std::pow(mu + mu * mu, 2) / n * std::pow(std::pow(2.0, p.d + 1) * mu * mu, s - 1);
  }
  return {v, ValueKind::LeadingOrder, "expected_snakes"};
}

/// C(n,s) s! 2^s p^{s+1} with the exact pair probability p. A snake's clauses
/// form a forest on literal points, so on the torus this is exact for F_2(n, gamma).
inline AnalyticValue expected_snakes_exact(const ModelParams& p, int s)
{
  if (p.model != ModelKind::Gamma) throw Error("expected_snakes_exact: model must be gamma");
  if (s < 1 || s % 2 == 0) throw Error("expected_snakes_exact: s must be odd");
  const double rho = gamma_radius(p.n, p.d, p.param);
  const double pair = clique_prob(2, p.d, rho, p.boundary).value;
  const double v = detail::falling_factorial(static_cast<double>(p.n), s) * std::pow(2.0, s) * std::pow(pair, s + 1);
  return {v, p.boundary == BoundaryMode::Torus ? ValueKind::Exact : ValueKind::LeadingOrder, "expected_snakes_exact"};
}

/// Bound on the expected number of implication paths of length L with
/// distinct variables.
inline AnalyticValue expected_paths(const ModelParams& p, int L)
{
  detail::require_sat_model(p, "expected_paths");
  if (L < 1) throw Error("expected_paths: L must be >= 1");
  const double n = static_cast<double>(p.n);
  const double base = p.model == ModelKind::Gamma ? 2.0 * std::pow(2.0 * p.param, p.d)
                                                  : std::pow(2.0, p.d + 1) * p.param * p.param;
  return {2.0 * n * std::pow(base, L - 1), ValueKind::UpperBound, "expected_paths"};
}

/// Bound on the expected number of bicycles of length L.
inline AnalyticValue bicycle_bound(const ModelParams& p, int L)
{
  detail::require_sat_model(p, "bicycle_bound");
  if (L < 1) throw Error("bicycle_bound: L must be >= 1");
  const double n = static_cast<double>(p.n);
  const double prefix = std::pow(n, L) * std::pow(2.0, L) * (2.0 * L) * (2.0 * L);
  double v;
  if (p.model == ModelKind::Gamma) {
    v = prefix * std::pow(std::pow(2.0 * p.param, p.d) / n, L + 1);
  } else {
    const double mu = p.param;
    v = prefix * (mu * mu + 3 * mu + 1) / (mu * mu) * std::pow(std::pow(2.0, p.d) * mu * mu / n, L + 1);
  }
  return {v, ValueKind::UpperBound, "bicycle_bound"};
}

/// Upper bound on U(k), the fewest variables admitting an unsatisfiable k-CNF
/// whose clauses have pairwise distinct variable sets.
inline AnalyticValue u_k_bound(int k)
{
  if (k < 2) throw Error("u_k_bound: k must be >= 2");
  const double e = 1.0 / (k - 1.0);
  return {std::pow(std::numbers::ln2, e) * std::pow(2.0 * k, k * e), ValueKind::UpperBound, "u_k_bound"};
}

/// Radius gamma n^{-U/(d(U-1))} of the coarse-threshold regime for F~. U
/// defaults to the ceiling of the U(k) bound.
inline AnalyticValue coarse_radius(int k, int d, double gamma, double n, std::optional<double> u = std::nullopt)
{
  if (d < 1 || !(gamma > 0.0) || !(n >= 1.0)) throw Error("coarse_radius: bad parameters");
  const double U = u.value_or(std::ceil(u_k_bound(k).value));
  if (!(U > 1.0)) throw Error("coarse_radius: U must be > 1");
  return {gamma * std::pow(n, -U / (d * (U - 1.0))), ValueKind::Exact, "coarse_radius"};
}

/// Volume of the unit ball: 2^d for l_inf, pi^{d/2} / Gamma(d/2 + 1) for l_2.
inline double unit_ball_volume(int d, Metric metric)
{
  if (metric == Metric::Linf) return std::pow(2.0, d);
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

/// (ln n / (n V_d))^{1/d}, the RGG connectivity radius.
inline AnalyticValue connectivity_radius(double n, int d, Metric metric)
{
  if (!(n >= 2.0) || d < 1) throw Error("connectivity_radius: need n >= 2, d >= 1");
  return {std::pow(std::log(n) / (n * unit_ball_volume(d, metric)), 1.0 / d), ValueKind::LeadingOrder,
          "connectivity_radius"};
}

/// Mean number of extra heads in the discrete coupling, L N^d q_heads.
inline AnalyticValue coupling_heads_mean(std::uint32_t n, int d, double mu)
{
  const std::uint64_t slots = coupling_slot_count(n, d);
  const long double cells = static_cast<long double>(slots) / (2.0L * n);
  const long double qh = coupling_heads_probability(static_cast<long double>(mu) / cells);
  return {static_cast<double>(static_cast<long double>(slots) * qh), ValueKind::Exact, "coupling_heads_mean"};
}

} // namespace geosat

#endif // GEOSAT_ANALYTICS_HPP
