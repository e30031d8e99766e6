#include "potts/wedgelet.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <unordered_set>

#include "potts/errors.hpp"
#include "potts/rng.hpp"

namespace potts {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

int log2_exact(int n) {
  if (!is_power_of_two(n)) throw DomainError("side " + std::to_string(n) + " is not a power of two");
  int level = 0;
  while ((1 << level) < n) ++level;
  return level;
}

std::vector<Pixel> fragment_pixels(const Fragment2D& fragment) {
  if (const auto* sq = std::get_if<DyadicSquare>(&fragment)) return sq->pixels();
  const Wedge& w = std::get<Wedge>(fragment);
  std::vector<Pixel> out;
  for (const Pixel& p : w.square.pixels())
    if (w.contains(p)) out.push_back(p);
  return out;
}

GridSignal WedgeletSegmentation::reconstruct() const {
  GridSignal out = GridSignal::zeros(2, side);
  for (const Leaf2D& leaf : leaves)
    for (const Pixel& p : fragment_pixels(leaf.fragment)) out.at(p.x, p.y) = leaf.fit.evaluate(p.x, p.y);
  return out;
}

namespace {

enum class Choice : std::uint8_t { leaf, wedge, quad };

struct Decision {
  Choice choice = Choice::leaf;
  int direction = -1;
  std::int64_t r = 0;
};

struct Level {
  int size = 1;
  int per_row = 0;
  std::vector<double> cost;
  std::vector<Decision> decision;
};

std::int64_t corner_min(const SlopeDirection& d, const DyadicSquare& sq, bool want_max) {
  const int x1 = sq.x0 + sq.size() - 1, y1 = sq.y0 + sq.size() - 1;
  const std::array<std::int64_t, 4> r = {d.line_index(sq.x0, sq.y0), d.line_index(x1, sq.y0),
                                         d.line_index(sq.x0, y1), d.line_index(x1, y1)};
  return want_max ? *std::max_element(r.begin(), r.end()) : *std::min_element(r.begin(), r.end());
}

// Fills buckets[k] with the moments of line rmin + k inside the square, in
// coordinates relative to the square corner. Returns rmin.
std::int64_t bucket_lines(const GridSignal& y, const DyadicSquare& sq, const SlopeDirection& d,
                          std::vector<Moments2D>& buckets) {
  const std::int64_t rmin = corner_min(d, sq, false);
  const std::int64_t rmax = corner_min(d, sq, true);
  buckets.assign(static_cast<std::size_t>(rmax - rmin + 1), Moments2D{});
  const int j = sq.size();
  for (int dy = 0; dy < j; ++dy) {
    for (int dx = 0; dx < j; ++dx) {
      const std::int64_t r = d.line_index(sq.x0 + dx, sq.y0 + dy);
      buckets[static_cast<std::size_t>(r - rmin)].add(dx, dy, y.at(sq.x0 + dx, sq.y0 + dy));
    }
  }
  return rmin;
}

double solve_square(const GridSignal& y, const MomentTable2D& table, const DyadicSquare& sq,
                    const std::vector<SlopeDirection>& dirs, double children, double gamma,
                    int degree, double cutoff, Decision& decision,
                    std::vector<Moments2D>& buckets) {
  const int j = sq.size();
  const Moments2D whole = table.rect(sq.x0, sq.y0, j, j);
  double best = gamma + rss_moments_2d(whole, degree, cutoff);
  decision = Decision{};
  if (j >= 2) {
    for (std::size_t di = 0; di < dirs.size(); ++di) {
      const std::int64_t rmin = bucket_lines(y, sq, dirs[di], buckets);
      Moments2D lower;
      for (std::size_t k = 0; k + 1 < buckets.size(); ++k) {
        lower += buckets[k];
        if (buckets[k].count < 0.5 || buckets[k + 1].count < 0.5) continue;
        const double c = 2.0 * gamma + rss_moments_2d(lower, degree, cutoff) +
                         rss_moments_2d(whole - lower, degree, cutoff);
        if (c < best) {
          best = c;
          decision = Decision{Choice::wedge, static_cast<int>(di), rmin + static_cast<std::int64_t>(k)};
        }
      }
    }
    if (children < best) {
      best = children;
      decision = Decision{Choice::quad, -1, 0};
    }
  }
  return best;
}

void collect(const GridSignal& y, const std::vector<Level>& levels,
             const std::vector<std::vector<SlopeDirection>>& dirs, int level, int x0, int y0,
             const WedgeletOptions& options, std::vector<Leaf2D>& leaves) {
  const Level& lv = levels[level];
  const std::size_t idx = static_cast<std::size_t>(y0 / lv.size) * lv.per_row + x0 / lv.size;
  const Decision& d = lv.decision[idx];
  const DyadicSquare sq{level, x0, y0};
  const PolySpace space = make_poly_space(2, options.degree);
  switch (d.choice) {
    case Choice::leaf: {
      const auto px = sq.pixels();
      leaves.push_back({sq, fit_pixels(px, y, space, options.fit)});
      break;
    }
    case Choice::wedge: {
      for (WedgeSide side : {WedgeSide::lower, WedgeSide::upper}) {
        const Wedge w{sq, dirs[level][d.direction], d.r, side};
        const auto px = fragment_pixels(w);
        leaves.push_back({w, fit_pixels(px, y, space, options.fit)});
      }
      break;
    }
    case Choice::quad: {
      const int h = lv.size / 2;
      collect(y, levels, dirs, level - 1, x0, y0, options, leaves);
      collect(y, levels, dirs, level - 1, x0 + h, y0, options, leaves);
      collect(y, levels, dirs, level - 1, x0, y0 + h, options, leaves);
      collect(y, levels, dirs, level - 1, x0 + h, y0 + h, options, leaves);
      break;
    }
  }
}

}  // namespace

WedgeletSegmentation solve_wedgelet(const GridSignal& y, double gamma,
                                    const WedgeletOptions& options) {
  if (y.dim() != 2) throw DimensionError("wedgelet solver needs a 2D image");
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  make_poly_space(2, options.degree);
  const int n = y.side();
  const int top = log2_exact(n);
  const MomentTable2D table(y);

  std::vector<std::vector<SlopeDirection>> dirs(top + 1);
  std::vector<Level> levels(top + 1);
  for (int level = 0; level <= top; ++level) {
    Level& lv = levels[level];
    lv.size = 1 << level;
    lv.per_row = n / lv.size;
    lv.cost.assign(static_cast<std::size_t>(lv.per_row) * lv.per_row, 0.0);
    lv.decision.assign(lv.cost.size(), Decision{});
    if (level > 0) dirs[level] = slope_directions(max_slope_component(lv.size, options.angle_budget));
  }
  std::fill(levels[0].cost.begin(), levels[0].cost.end(), gamma);

  for (int level = 1; level <= top; ++level) {
    Level& lv = levels[level];
    const Level& child = levels[level - 1];
    const auto count = static_cast<long long>(lv.cost.size());
    auto kernel = [&](long long idx, std::vector<Moments2D>& buckets) {
      const int cx = static_cast<int>(idx % lv.per_row), cy = static_cast<int>(idx / lv.per_row);
      const DyadicSquare sq{level, cx * lv.size, cy * lv.size};
      const auto at = [&](int ix, int iy) {
        return child.cost[static_cast<std::size_t>(iy) * child.per_row + ix];
      };
      const double children = at(2 * cx, 2 * cy) + at(2 * cx + 1, 2 * cy) +
                               at(2 * cx, 2 * cy + 1) + at(2 * cx + 1, 2 * cy + 1);
      lv.cost[idx] = solve_square(y, table, sq, dirs[level], children, gamma, options.degree,
                                  options.fit.rank_cutoff, lv.decision[idx], buckets);
    };
    if (options.execution == Execution::parallel) {
#pragma omp parallel
      {
        std::vector<Moments2D> buckets;
#pragma omp for schedule(dynamic, 1)
        for (long long idx = 0; idx < count; ++idx) kernel(idx, buckets);
      }
    } else {
      std::vector<Moments2D> buckets;
      for (long long idx = 0; idx < count; ++idx) kernel(idx, buckets);
    }
  }

  WedgeletSegmentation seg;
  seg.side = n;
  seg.degree = options.degree;
  seg.gamma = gamma;
  seg.energy = levels[top].cost[0];
  collect(y, levels, dirs, top, 0, 0, options, seg.leaves);
  return seg;
}

namespace {

struct Hash128 {
  std::uint64_t a = 0, b = 0;
  friend bool operator==(const Hash128&, const Hash128&) = default;
  Hash128& operator+=(const Hash128& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  friend Hash128 operator-(Hash128 x, const Hash128& y) {
    x.a -= y.a;
    x.b -= y.b;
    return x;
  }
};

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const { return static_cast<std::size_t>(h.a ^ (h.b * 0x9e3779b97f4a7c15ULL)); }
};

// Additive (Zobrist-style) key of a pixel; a set's key is the sum of its
// pixels' keys, so complements and unions are O(1).
Hash128 pixel_key(int x, int y) {
  const std::uint64_t id = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) << 32) |
                           static_cast<std::uint32_t>(x);
  return {mix64(id * 2 + 1), mix64(id * 2 + 0x51afd7ed558ccd2ULL)};
}

Hash128 square_key(const DyadicSquare& sq) {
  Hash128 h;
  for (const Pixel& p : sq.pixels()) h += pixel_key(p.x, p.y);
  return h;
}

// Calls visit(direction, r, lower_key, upper_key) for every admissible
// split of the square.
template <typename Visit>
void for_each_split_key(const DyadicSquare& sq, int angle_budget, Visit&& visit) {
  if (sq.size() < 2) return;
  const Hash128 whole = square_key(sq);
  std::vector<Hash128> line_keys;
  std::vector<int> line_counts;
  for (const SlopeDirection& d : slope_directions(max_slope_component(sq.size(), angle_budget))) {
    const std::int64_t rmin = corner_min(d, sq, false);
    const std::int64_t rmax = corner_min(d, sq, true);
    line_keys.assign(static_cast<std::size_t>(rmax - rmin + 1), Hash128{});
    line_counts.assign(line_keys.size(), 0);
    for (const Pixel& p : sq.pixels()) {
      const auto k = static_cast<std::size_t>(d.line_index(p.x, p.y) - rmin);
      line_keys[k] += pixel_key(p.x, p.y);
      ++line_counts[k];
    }
    Hash128 lower;
    for (std::size_t k = 0; k + 1 < line_keys.size(); ++k) {
      lower += line_keys[k];
      if (line_counts[k] == 0 || line_counts[k + 1] == 0) continue;
      visit(d, rmin + static_cast<std::int64_t>(k), lower, whole - lower);
    }
  }
}

}  // namespace

std::vector<WedgeSplit> enumerate_wedge_splits(const DyadicSquare& square, int angle_budget) {
  std::vector<WedgeSplit> out;
  std::unordered_set<Hash128, Hash128Hasher> seen;
  for_each_split_key(square, angle_budget,
                     [&](const SlopeDirection& d, std::int64_t r, const Hash128& lo, const Hash128& up) {
                       if (seen.contains(lo) || seen.contains(up)) return;
                       seen.insert(lo);
                       seen.insert(up);
                       WedgeSplit split{d, r, {}, {}};
                       for (const Pixel& p : square.pixels()) {
                         (d.line_index(p.x, p.y) <= r ? split.lower : split.upper).push_back(p);
                       }
                       out.push_back(std::move(split));
                     });
  return out;
}

std::int64_t count_fragments_2d(int n, int angle_budget) {
  const int top = log2_exact(n);
  std::vector<Hash128> keys;
  for (int level = 0; level <= top; ++level) {
    const int j = 1 << level;
    for (int y0 = 0; y0 < n; y0 += j) {
      for (int x0 = 0; x0 < n; x0 += j) {
        const DyadicSquare sq{level, x0, y0};
        keys.push_back(square_key(sq));
        for_each_split_key(sq, angle_budget,
                           [&](const SlopeDirection&, std::int64_t, const Hash128& lo, const Hash128& up) {
                             keys.push_back(lo);
                             keys.push_back(up);
                           });
      }
    }
  }
  const auto less = [](const Hash128& a, const Hash128& b) { return a.a != b.a ? a.a < b.a : a.b < b.b; };
  std::sort(keys.begin(), keys.end(), less);
  return std::unique(keys.begin(), keys.end()) - keys.begin();
}

WedgeletSegmentation segmentation_from_fragments(const GridSignal& y,
                                                 const std::vector<Fragment2D>& fragments,
                                                 double gamma, int degree) {
  if (y.dim() != 2) throw DimensionError("wedgelet segmentation needs a 2D image");
  const PolySpace space = make_poly_space(2, degree);
  std::vector<int> cover(y.size(), 0);
  WedgeletSegmentation seg;
  seg.side = y.side();
  seg.degree = degree;
  seg.gamma = gamma;
  for (const Fragment2D& f : fragments) {
    const auto px = fragment_pixels(f);
    if (px.empty()) throw DomainError("empty fragment in segmentation");
    for (const Pixel& p : px) {
      if (p.x < 0 || p.y < 0 || p.x >= y.side() || p.y >= y.side()) {
        throw DomainError("fragment leaves the grid");
      }
      ++cover[y.index(p.x, p.y)];
    }
    seg.leaves.push_back({f, fit_pixels(px, y, space)});
  }
  for (int c : cover)
    if (c != 1) throw DomainError("fragments do not partition the grid");
  seg.energy = recompute_energy(y, seg);
  return seg;
}

double recompute_energy(const GridSignal& y, const WedgeletSegmentation& seg) {
  double total = seg.gamma * static_cast<double>(seg.leaves.size());
  for (const Leaf2D& leaf : seg.leaves) {
    for (const Pixel& p : fragment_pixels(leaf.fragment)) {
      const double r = y.at(p.x, p.y) - leaf.fit.evaluate(p.x, p.y);
      total += r * r;
    }
  }
  return total;
}

}  // namespace potts
