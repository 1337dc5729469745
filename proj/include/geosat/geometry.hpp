#ifndef GEOSAT_GEOMETRY_HPP
#define GEOSAT_GEOMETRY_HPP

#include <geosat/common.hpp>
#include <geosat/rng.hpp>

#include <algorithm>
#include <array>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace geosat {

using LabelId = std::uint32_t;

/// Labeled points in [0,1]^d, stored row-major in one flat buffer.
class PointSet {
public:
  PointSet() = default;
  explicit PointSet(int dimension, BoundaryMode boundary = BoundaryMode::Cube)
      : dimension_(dimension), boundary_(boundary)
  {
    if (dimension < 1) throw Error("dimension must be >= 1");
  }

  int dimension() const noexcept { return dimension_; }
  BoundaryMode boundary() const noexcept { return boundary_; }
  void set_boundary(BoundaryMode b) noexcept { boundary_ = b; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  std::span<const double> point(std::size_t i) const
  {
    return {coords_.data() + i * static_cast<std::size_t>(dimension_), static_cast<std::size_t>(dimension_)};
  }
  LabelId label(std::size_t i) const { return labels_[i]; }
  const std::vector<LabelId>& labels() const noexcept { return labels_; }
  const std::vector<double>& coords() const noexcept { return coords_; }

  void reserve(std::size_t n)
  {
    coords_.reserve(n * static_cast<std::size_t>(dimension_));
    labels_.reserve(n);
  }

  void add(std::span<const double> p, LabelId label)
  {
    if (static_cast<int>(p.size()) != dimension_) throw Error("point dimension mismatch");
    for (double c : p)
      if (!(c >= 0.0 && c <= 1.0)) throw Error("coordinate outside [0,1]");
    coords_.insert(coords_.end(), p.begin(), p.end());
    labels_.push_back(label);
  }

  /// Appends a point with i.i.d. uniform coordinates.
  void add_uniform(RngStream& rng, LabelId label)
  {
    for (int j = 0; j < dimension_; ++j) coords_.push_back(rng.uniform());
    labels_.push_back(label);
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

private:
  int dimension_ = 1;
  BoundaryMode boundary_ = BoundaryMode::Cube;
  std::vector<double> coords_;
  std::vector<LabelId> labels_;
};

/// Per-coordinate gap, wrapped on the torus.
inline double coordinate_gap(double a, double b, BoundaryMode boundary) noexcept
{
  double g = std::fabs(a - b);
  if (boundary == BoundaryMode::Torus) g = std::min(g, 1.0 - g);
  return g;
}

inline double distance(std::span<const double> p, std::span<const double> q, Metric metric,
                       BoundaryMode boundary)
{
  if (p.size() != q.size()) throw Error("distance: dimension mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double g = coordinate_gap(p[j], q[j], boundary);
    if (metric == Metric::Linf)
      acc = std::max(acc, g);
    else
      acc += g * g;
  }
  return metric == Metric::Linf ? acc : std::sqrt(acc);
}

/// Closed-ball membership test: distance <= r. L2 compares squared values.
inline bool within(std::span<const double> p, std::span<const double> q, double r, Metric metric,
                   BoundaryMode boundary) noexcept
{
  if (metric == Metric::Linf) {
    for (std::size_t j = 0; j < p.size(); ++j)
      if (coordinate_gap(p[j], q[j], boundary) > r) return false;
    return true;
  }
  double acc = 0.0;
  const double r2 = r * r;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double g = coordinate_gap(p[j], q[j], boundary);
    acc += g * g;
    if (acc > r2) return false;
  }
  return true;
}

inline PointSet sample_uniform_points(std::size_t count, int d, RngStream& rng,
                                      BoundaryMode boundary = BoundaryMode::Cube, LabelId label = 1)
{
  PointSet ps(d, boundary);
  ps.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ps.add_uniform(rng, label);
  return ps;
}

/// Homogeneous Poisson process of the given total intensity on [0,1]^d.
inline PointSet sample_poisson_process(double intensity, int d, RngStream& rng,
                                       BoundaryMode boundary = BoundaryMode::Cube, LabelId label = 1)
{
  if (!(intensity >= 0.0)) throw Error("intensity must be >= 0");
  auto count = static_cast<std::size_t>(rng.poisson(intensity));
  return sample_uniform_points(count, d, rng, boundary, label);
}

/// Uniform grid over [0,1]^d with side >= r, so any two points within r lie in
/// neighbouring cells (wrapping on the torus).
class GridIndex {
public:
  GridIndex(const PointSet& ps, double r) : ps_(&ps), d_(ps.dimension())
  {
    if (!(r > 0.0)) throw Error("grid radius must be > 0");
    // Relative margin keeps the side strictly above r despite rounding.
    double per_dim = std::floor((1.0 / r) * (1.0 - 1e-9));
    double cap = std::floor(std::pow(2.0, 62.0 / d_));
    per_dim = std::clamp(per_dim, 1.0, cap);
    cells_per_dim_ = static_cast<std::int64_t>(per_dim);
    cell_size_ = 1.0 / per_dim;

    const std::size_t n = ps.size();
    std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
    for (std::size_t i = 0; i < n; ++i) keyed[i] = {point_key(ps.point(i)), static_cast<std::uint32_t>(i)};
    std::sort(keyed.begin(), keyed.end());
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = keyed[i].second;
    for (std::size_t s = 0; s < n;) {
      std::size_t e = s;
      while (e < n && keyed[e].first == keyed[s].first) ++e;
      keys_.push_back(keyed[s].first);
      starts_.push_back(static_cast<std::uint32_t>(s));
      s = e;
    }
    starts_.push_back(static_cast<std::uint32_t>(n));

    // Direct lookup table when the grid is not much larger than the data.
    const double total = std::pow(per_dim, d_);
    if (total <= std::max(4.0 * static_cast<double>(n), 4096.0)) {
      dense_.assign(static_cast<std::size_t>(total), kNone);
      for (std::size_t c = 0; c < keys_.size(); ++c) dense_[keys_[c]] = static_cast<std::uint32_t>(c);
    }
  }

  double cell_size() const noexcept { return cell_size_; }
  std::int64_t cells_per_dim() const noexcept { return cells_per_dim_; }
  std::size_t occupied_cells() const noexcept { return keys_.size(); }

  std::vector<std::int64_t> cell_of(std::span<const double> p) const
  {
    std::vector<std::int64_t> c(static_cast<std::size_t>(d_));
    for (int j = 0; j < d_; ++j) c[static_cast<std::size_t>(j)] = coordinate_cell(p[static_cast<std::size_t>(j)]);
    return c;
  }

  /// Points stored in the cell with the given coordinates.
  std::span<const std::uint32_t> points_in(const std::vector<std::int64_t>& cell) const
  {
    return points_in_key(key_of(cell));
  }

  std::span<const std::uint32_t> points_in_key(std::uint64_t key) const
  {
    std::uint32_t c = kNone;
    if (!dense_.empty()) {
      c = dense_[key];
    } else {
      auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
      if (it != keys_.end() && *it == key) c = static_cast<std::uint32_t>(it - keys_.begin());
    }
    if (c == kNone) return {};
    return {order_.data() + starts_[c], starts_[c + 1] - starts_[c]};
  }

  /// Distinct cells of the 3^d neighbourhood of `cell`, itself included.
  std::vector<std::vector<std::int64_t>> neighbourhood(const std::vector<std::int64_t>& cell) const
  {
    std::vector<std::uint64_t> keys;
    neighbour_keys(cell, keys);
    std::vector<std::vector<std::int64_t>> out;
    for (auto key : keys) out.push_back(cell_of_key(key));
    return out;
  }

  /// Keys of the distinct neighbourhood cells, written into `out`.
  void neighbour_keys(std::span<const std::int64_t> cell, std::vector<std::uint64_t>& out) const
  {
    if (cell.size() > 64) throw Error("grid dimension too large");
    std::array<std::int64_t, 64> buf{};
    std::copy(cell.begin(), cell.end(), buf.begin());
    neighbour_keys_into(buf, out);
  }

  void neighbour_keys(std::uint64_t key, std::vector<std::uint64_t>& out) const
  {
    std::array<std::int64_t, 64> buf{};
    for (int j = 0; j < d_ && j < 64; ++j) {
      buf[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(cells_per_dim_));
      key /= static_cast<std::uint64_t>(cells_per_dim_);
    }
    neighbour_keys_into(buf, out);
  }

private:
  void neighbour_keys_into(const std::array<std::int64_t, 64>& cell, std::vector<std::uint64_t>& out) const
  {
    out.clear();
    const bool torus = ps_->boundary() == BoundaryMode::Torus;
    std::uint64_t combos = 1;
    for (int j = 0; j < d_; ++j) combos *= 3;
    for (std::uint64_t code = 0; code < combos; ++code) {
      std::uint64_t key = 0, rest = code, scale = 1;
      bool ok = true;
      for (int j = 0; j < d_ && ok; ++j) {
        std::int64_t v = cell[static_cast<std::size_t>(j)] + static_cast<std::int64_t>(rest % 3) - 1;
        rest /= 3;
        if (v < 0 || v >= cells_per_dim_) {
          if (torus)
            v = (v + cells_per_dim_) % cells_per_dim_;
          else
            ok = false;
        }
        key += scale * static_cast<std::uint64_t>(v);
        scale *= static_cast<std::uint64_t>(cells_per_dim_);
      }
      if (ok && std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
    }
  }

public:

  /// Point indices grouped by cell; consecutive `cell_ranges` entries delimit a group.
  const std::vector<std::uint32_t>& order() const noexcept { return order_; }
  const std::vector<std::uint32_t>& cell_ranges() const noexcept { return starts_; }
  std::uint64_t cell_key(std::size_t c) const { return keys_[c]; }

  std::vector<std::int64_t> cell_of_key(std::uint64_t key) const
  {
    std::vector<std::int64_t> c(static_cast<std::size_t>(d_));
    for (int j = 0; j < d_; ++j) {
      c[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(cells_per_dim_));
      key /= static_cast<std::uint64_t>(cells_per_dim_);
    }
    return c;
  }

private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  std::int64_t coordinate_cell(double x) const noexcept
  {
    auto v = static_cast<std::int64_t>(std::floor(x * static_cast<double>(cells_per_dim_)));
    return std::clamp<std::int64_t>(v, 0, cells_per_dim_ - 1);
  }

  std::uint64_t point_key(std::span<const double> p) const noexcept
  {
    std::uint64_t key = 0;
    for (int j = d_ - 1; j >= 0; --j)
      key = key * static_cast<std::uint64_t>(cells_per_dim_) +
            static_cast<std::uint64_t>(coordinate_cell(p[static_cast<std::size_t>(j)]));
    return key;
  }

  std::uint64_t key_of(const std::vector<std::int64_t>& c) const noexcept
  {
    std::uint64_t key = 0;
    for (int j = d_ - 1; j >= 0; --j)
      key = key * static_cast<std::uint64_t>(cells_per_dim_) + static_cast<std::uint64_t>(c[static_cast<std::size_t>(j)]);
    return key;
  }

  const PointSet* ps_;
  int d_;
  std::int64_t cells_per_dim_ = 1;
  double cell_size_ = 1.0;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> starts_;
  std::vector<std::uint32_t> dense_;
};

/// Fixed-arity list of index tuples in one flat buffer.
class IndexTuples {
public:
  explicit IndexTuples(std::size_t arity = 2) : arity_(arity) {}

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return arity_ == 0 ? 0 : data_.size() / arity_; }
  bool empty() const noexcept { return data_.empty(); }
  std::span<const std::uint32_t> operator[](std::size_t i) const { return {data_.data() + i * arity_, arity_}; }
  void push_back(std::span<const std::uint32_t> t) { data_.insert(data_.end(), t.begin(), t.end()); }
  const std::vector<std::uint32_t>& data() const noexcept { return data_; }

  friend bool operator==(const IndexTuples&, const IndexTuples&) = default;

private:
  std::size_t arity_;
  std::vector<std::uint32_t> data_;
};

/// For each point, the indices j > i within distance r, ascending (CSR layout).
struct NeighbourLists {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;

  std::span<const std::uint32_t> of(std::size_t i) const
  {
    return {targets.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

inline NeighbourLists forward_neighbours(const PointSet& ps, double r, Metric metric)
{
  NeighbourLists out;
  const std::size_t n = ps.size();
  out.offsets.assign(n + 1, 0);
  if (n == 0) return out;
  const GridIndex grid(ps, r);
  const auto& order = grid.order();
  const auto& starts = grid.cell_ranges();

  // One neighbourhood lookup per occupied cell, then all pairs against it.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<std::uint64_t> keys;
  std::vector<std::span<const std::uint32_t>> near;
  for (std::size_t c = 0; c + 1 < starts.size(); ++c) {
    grid.neighbour_keys(grid.cell_key(c), keys);
    near.clear();
    for (auto key : keys) near.push_back(grid.points_in_key(key));
    for (std::uint32_t a = starts[c]; a < starts[c + 1]; ++a) {
      const std::uint32_t i = order[a];
      const auto p = ps.point(i);
      for (const auto& block : near)
        for (std::uint32_t j : block)
          if (j > i && within(p, ps.point(j), r, metric, ps.boundary())) pairs.emplace_back(i, j);
    }
  }
  for (auto [i, j] : pairs) ++out.offsets[i + 1];
  std::partial_sum(out.offsets.begin(), out.offsets.end(), out.offsets.begin());
  out.targets.resize(pairs.size());
  std::vector<std::size_t> fill(out.offsets.begin(), out.offsets.end() - 1);
  for (auto [i, j] : pairs) out.targets[fill[i]++] = j;
  for (std::size_t i = 0; i < n; ++i)
    std::sort(out.targets.begin() + static_cast<std::ptrdiff_t>(out.offsets[i]),
              out.targets.begin() + static_cast<std::ptrdiff_t>(out.offsets[i + 1]));
  return out;
}

inline constexpr int kMaxSubsetArity = 12;

/// All k-subsets of points whose pairwise distances are all <= r, as sorted
/// index tuples in lexicographic order.
inline IndexTuples enumerate_ball_subsets(const PointSet& ps, double r, int k, Metric metric)
{
  if (!(r > 0.0)) throw Error("enumerate_ball_subsets: r must be > 0");
  if (k < 2 || k > kMaxSubsetArity) throw Error("enumerate_ball_subsets: k must lie in [2,12]");
  IndexTuples out(static_cast<std::size_t>(k));
  if (ps.size() < static_cast<std::size_t>(k)) return out;
  const NeighbourLists nb = forward_neighbours(ps, r, metric);

  std::vector<std::uint32_t> tuple(static_cast<std::size_t>(k));
  if (k == 2) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      tuple[0] = static_cast<std::uint32_t>(i);
      for (std::uint32_t j : nb.of(i)) {
        tuple[1] = j;
        out.push_back(tuple);
      }
    }
    return out;
  }

  // Grow cliques: candidates at depth t are common forward neighbours of the
  // chosen prefix, kept ascending so output stays lexicographic.
  std::vector<std::vector<std::uint32_t>> cand(static_cast<std::size_t>(k));
  auto extend = [&](auto&& self, int depth) -> void {
    const auto& here = cand[static_cast<std::size_t>(depth)];
    for (std::uint32_t v : here) {
      tuple[static_cast<std::size_t>(depth)] = v;
      if (depth + 1 == k) {
        out.push_back(tuple);
        continue;
      }
      auto& next = cand[static_cast<std::size_t>(depth + 1)];
      next.clear();
      auto nv = nb.of(v);
      std::set_intersection(here.begin(), here.end(), nv.begin(), nv.end(), std::back_inserter(next));
      if (next.size() + static_cast<std::size_t>(depth + 1) >= static_cast<std::size_t>(k)) self(self, depth + 1);
    }
  };
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto ni = nb.of(i);
    if (ni.size() + 1 < static_cast<std::size_t>(k)) continue;
    tuple[0] = static_cast<std::uint32_t>(i);
    cand[1].assign(ni.begin(), ni.end());
    extend(extend, 1);
  }
  return out;
}

// Point-set CSV: header `label,x1,...,xd`, 17 significant digits.

inline void write_points_csv(std::ostream& os, const PointSet& ps)
{
  os << "label";
  for (int j = 1; j <= ps.dimension(); ++j) os << ",x" << j;
  os << '\n';
  char buf[40];
  for (std::size_t i = 0; i < ps.size(); ++i) {
    os << ps.label(i);
    for (double c : ps.point(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", c);
      os << ',' << buf;
    }
    os << '\n';
  }
}

inline PointSet read_points_csv(std::istream& is, BoundaryMode boundary = BoundaryMode::Cube)
{
  std::string line;
  if (!std::getline(is, line)) throw Error("points csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int d = static_cast<int>(std::count(line.begin(), line.end(), ','));
  if (line.rfind("label", 0) != 0 || d < 1) throw Error("points csv: bad header '" + line + "'");
  PointSet ps(d, boundary);
  std::vector<double> p(static_cast<std::size_t>(d));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != d + 1)
      throw Error("points csv: wrong field count on line " + std::to_string(lineno));
    try {
      auto label = std::stoul(cells[0]);
      for (int j = 0; j < d; ++j) p[static_cast<std::size_t>(j)] = std::stod(cells[static_cast<std::size_t>(j + 1)]);
      ps.add(p, static_cast<LabelId>(label));
    } catch (const std::logic_error&) {
      throw Error("points csv: malformed value on line " + std::to_string(lineno));
    }
  }
  return ps;
}

} // namespace geosat

#endif // GEOSAT_GEOMETRY_HPP
