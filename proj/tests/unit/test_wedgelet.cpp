#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "potts/digital_line.hpp"
#include "potts/errors.hpp"
#include "potts/oracle.hpp"
#include "potts/rng.hpp"
#include "potts/signals.hpp"
#include "potts/wedgelet.hpp"

using namespace potts;

namespace {

constexpr double kPi = std::numbers::pi;

GridSignal random_image(int n, std::uint64_t seed, int levels = 0) {
  Rng rng(seed);
  GridSignal s = GridSignal::zeros(2, n);
  for (double& v : s.values()) v = levels > 0 ? static_cast<double>(rng.below(levels)) : rng.uniform();
  return s;
}

using PixelSet = std::set<std::pair<int, int>>;

PixelSet as_set(const std::vector<Pixel>& px) {
  PixelSet s;
  for (const Pixel& p : px) s.insert({p.x, p.y});
  return s;
}

// Bipartitions of a square realized by digital lines at densely sampled real
// angles, via the rounding parametrization. Each split is keyed by its
// lower wedge.
std::set<PixelSet> sampled_splits(const DyadicSquare& sq, int samples) {
  std::set<PixelSet> out;
  for (int k = 1; k <= samples; ++k) {
    const double theta = -kPi / 4 + kPi * k / samples;
    const DigitalLineSpec probe{theta, 0};
    std::map<std::int64_t, std::vector<Pixel>> lines;
    const double slope = probe.flat() ? std::tan(theta) : 1.0 / std::tan(theta);
    for (const Pixel& p : sq.pixels()) {
      const std::int64_t r = probe.flat() ? p.y - round_half_up(p.x * slope) : p.x - round_half_up(p.y * slope);
      lines[r].push_back(p);
    }
    PixelSet lower;
    for (auto it = lines.begin(); std::next(it) != lines.end(); ++it) {
      for (const Pixel& p : it->second) lower.insert({p.x, p.y});
      out.insert(lower);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("rounding convention") {
  CHECK(round_half_up(0.5) == 1);
  CHECK(round_half_up(-0.5) == 0);
  CHECK(round_half_up(1.49) == 1);
  CHECK(round_half_up(-1.5) == -1);
}

TEST_CASE("horizontal and diagonal lines") {
  const DyadicSquare sq{3, 0, 0};
  const auto row = digital_line_pixels({0.0, 3}, sq);
  REQUIRE(row.size() == 8);
  for (int x = 0; x < 8; ++x) CHECK(row[x] == Pixel{x, 3});
  const auto diag = digital_line_pixels({kPi / 4, 0}, sq);
  REQUIRE(diag.size() == 8);
  for (int x = 0; x < 8; ++x) CHECK(diag[x] == Pixel{x, x});
}

TEST_CASE("parametrized lines match the strip definition") {
  Rng rng(5);
  const DyadicSquare sq{5, 0, 0};
  for (int k = 0; k < 50; ++k) {
    const double theta = rng.uniform(-kPi / 4, 3 * kPi / 4);
    const auto r = static_cast<std::int64_t>(rng.below(40)) - 10;
    const DigitalLineSpec line{theta, r};
    const PixelSet param = as_set(digital_line_pixels(line, sq));
    PixelSet strip;
    for (const Pixel& p : sq.pixels())
      if (line.strip_contains(p)) strip.insert({p.x, p.y});
    CHECK(param == strip);
  }
}

TEST_CASE("parallel lines tile the window") {
  Rng rng(6);
  const DyadicSquare window{6, 0, 0};
  for (int k = 0; k < 50; ++k) {
    const double theta = rng.uniform(-kPi / 4, 3 * kPi / 4);
    std::vector<int> hits(64 * 64, 0);
    for (std::int64_t r = -200; r <= 200; ++r)
      for (const Pixel& p : digital_line_pixels({theta, r}, window)) ++hits[p.y * 64 + p.x];
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}

TEST_CASE("integer line index agrees with rounding and with the real angle") {
  for (const SlopeDirection& d : slope_directions(9)) {
    CHECK(std::gcd(d.p, d.q) == 1);
    CHECK(d.theta() > -kPi / 4);
    CHECK(d.theta() <= 3 * kPi / 4 + 1e-15);
    CHECK(d.flat() == DigitalLineSpec{d.theta(), 0}.flat());
    for (int y = -5; y < 20; ++y) {
      for (int x = -5; x < 20; ++x) {
        const std::int64_t expected = d.flat() ? y - round_half_up(static_cast<double>(x * d.q) / d.p)
                                               : x - round_half_up(static_cast<double>(y * d.p) / d.q);
        CHECK(d.line_index(x, y) == expected);
      }
    }
  }
}

TEST_CASE("direction set") {
  const auto dirs = slope_directions(1);
  // Angles 0, pi/4, pi/2, 3pi/4.
  REQUIRE(dirs.size() == 4);
  CHECK(dirs[0] == SlopeDirection{1, 0});
  CHECK(dirs[1] == SlopeDirection{1, 1});
  CHECK(dirs[2] == SlopeDirection{0, 1});
  CHECK(dirs[3] == SlopeDirection{-1, 1});
  CHECK(max_slope_component(8, 0) == 8);
  CHECK(max_slope_component(8, 3) == 3);
  CHECK(max_slope_component(2, 5) == 2);
}

TEST_CASE("wedge splits of small squares") {
  CHECK(enumerate_wedge_splits({0, 3, 3}, 0).empty());
  const DyadicSquare sq{1, 0, 0};
  const auto splits = enumerate_wedge_splits(sq, 0);
  std::set<PixelSet> lowers;
  for (const WedgeSplit& s : splits) {
    CHECK(!s.lower.empty());
    CHECK(!s.upper.empty());
    PixelSet all = as_set(s.lower);
    const PixelSet up = as_set(s.upper);
    CHECK(all.size() + up.size() == 4);
    all.insert(up.begin(), up.end());
    CHECK(all.size() == 4);
    lowers.insert(as_set(s.lower));
  }
  // No bipartition appears twice, in either orientation.
  std::set<PixelSet> seen;
  for (const WedgeSplit& s : splits) {
    CHECK(seen.insert(as_set(s.lower)).second);
    CHECK(seen.insert(as_set(s.upper)).second);
  }
  // Same bipartitions as dense real-angle sampling.
  std::set<std::set<PixelSet>> ours, sampled;
  for (const WedgeSplit& s : splits) ours.insert({as_set(s.lower), as_set(s.upper)});
  const PixelSet full = as_set(sq.pixels());
  for (const PixelSet& lower : sampled_splits(sq, 20000)) {
    PixelSet upper;
    std::set_difference(full.begin(), full.end(), lower.begin(), lower.end(), std::inserter(upper, upper.end()));
    sampled.insert({lower, upper});
  }
  CHECK(ours == sampled);
}

TEST_CASE("wedge splits of larger squares match an independent enumeration") {
  // Angles atan2(q, p) over coprime pairs with components up to the cap,
  // filtered by the real angle; lines by the rounding parametrization.
  for (int level : {2, 3}) {
    for (int budget : {0, 2}) {
      const DyadicSquare sq{level, 8, 0};
      const int cap = max_slope_component(sq.size(), budget);
      const PixelSet full = as_set(sq.pixels());
      std::set<std::set<PixelSet>> ours, independent;
      for (const WedgeSplit& s : enumerate_wedge_splits(sq, budget)) ours.insert({as_set(s.lower), as_set(s.upper)});
      for (int p = -cap; p <= cap; ++p) {
        for (int q = -cap; q <= cap; ++q) {
          if (std::gcd(p, q) != 1) continue;
          const double theta = std::atan2(q, p);
          if (!(theta > -kPi / 4 + 1e-12 && theta <= 3 * kPi / 4 + 1e-12)) continue;
          const bool flat = std::cos(theta) >= std::sin(theta) - 1e-12;
          std::map<std::int64_t, PixelSet> lines;
          for (const Pixel& px : sq.pixels()) {
            const std::int64_t r = flat ? px.y - round_half_up(static_cast<double>(px.x * q) / p)
                                        : px.x - round_half_up(static_cast<double>(px.y * p) / q);
            lines[r].insert({px.x, px.y});
          }
          PixelSet lower;
          for (auto it = lines.begin(); std::next(it) != lines.end(); ++it) {
            lower.insert(it->second.begin(), it->second.end());
            PixelSet upper;
            std::set_difference(full.begin(), full.end(), lower.begin(), lower.end(),
                                std::inserter(upper, upper.end()));
            independent.insert({lower, upper});
          }
        }
      }
      CHECK(ours == independent);
    }
  }
}

TEST_CASE("fragment counts") {
  CHECK(count_fragments_2d(1, 0) == 1);
  // Distinct pixel sets among the five squares and all wedges of the root.
  std::set<PixelSet> sets;
  for (const DyadicSquare& sq : {DyadicSquare{1, 0, 0}, DyadicSquare{0, 0, 0}, DyadicSquare{0, 1, 0},
                                 DyadicSquare{0, 0, 1}, DyadicSquare{0, 1, 1}})
    sets.insert(as_set(sq.pixels()));
  for (const PixelSet& lower : sampled_splits({1, 0, 0}, 20000)) {
    const PixelSet full = as_set(DyadicSquare{1, 0, 0}.pixels());
    PixelSet upper;
    std::set_difference(full.begin(), full.end(), lower.begin(), lower.end(), std::inserter(upper, upper.end()));
    sets.insert(lower);
    sets.insert(upper);
  }
  CHECK(count_fragments_2d(2, 0) == static_cast<std::int64_t>(sets.size()));
  std::int64_t last = count_fragments_2d(4, 0);
  for (int n : {8, 16, 32}) {
    const std::int64_t c = count_fragments_2d(n, 0);
    CHECK(static_cast<double>(c) / last <= 16.0);
    last = c;
  }
  CHECK_THROWS_AS(count_fragments_2d(6, 0), DomainError);
}

TEST_CASE("constant image is one leaf") {
  const auto seg = solve_wedgelet(GridSignal::filled(2, 8, 0.3), 0.25);
  REQUIRE(seg.size() == 1);
  CHECK(std::holds_alternative<DyadicSquare>(seg.leaves[0].fragment));
  CHECK(seg.energy == doctest::Approx(0.25));
}

TEST_CASE("half-plane image splits at the root") {
  GridSignal y = GridSignal::zeros(2, 4);
  for (int yy = 0; yy < 4; ++yy)
    for (int x = 2; x < 4; ++x) y.at(x, yy) = 1.0;
  const auto seg = solve_wedgelet(y, 0.1);
  REQUIRE(seg.size() == 2);
  CHECK(std::holds_alternative<Wedge>(seg.leaves[0].fragment));
  CHECK(seg.energy == doctest::Approx(0.2));
  CHECK(brute_force_wedgelet(y, 0.1, 0).energy == doctest::Approx(0.2));
}

TEST_CASE("quadtree dynamic program matches exhaustive recursion") {
  for (int k = 0; k < 40; ++k) {
    const int n = k % 4 == 0 ? 2 : 4;
    const int degree = k % 2;
    const int budget = k % 3 == 0 ? 1 : 0;
    const double gamma = 0.02 * (1 + k % 7);
    const GridSignal y = random_image(n, 300 + k, k % 5 == 0 ? 2 : 0);
    WedgeletOptions opts;
    opts.degree = degree;
    opts.angle_budget = budget;
    const auto dp = solve_wedgelet(y, gamma, opts);
    const auto bf = brute_force_wedgelet(y, gamma, degree, budget);
    CHECK(std::abs(dp.energy - bf.energy) <= 1e-9);
  }
  CHECK(brute_force_wedgelet(GridSignal::filled(2, 2, 0.4), 0.3, 0).energy == doctest::Approx(0.3));
  const auto big = brute_force_wedgelet(random_image(4, 9), 1e6, 1);
  CHECK(big.size() == 1);
  CHECK_THROWS_AS(brute_force_wedgelet(GridSignal::zeros(2, 8), 1.0, 0), RefusalError);
}

TEST_CASE("solver beats random admissible segmentations") {
  const int n = 16;
  const GridSignal y = random_image(n, 44);
  const double gamma = 0.05;
  for (int degree = 0; degree <= 1; ++degree) {
    WedgeletOptions opts;
    opts.degree = degree;
    const auto best = solve_wedgelet(y, gamma, opts);
    CHECK(std::abs(recompute_energy(y, best) - best.energy) < 1e-9);

    std::map<std::tuple<int, int, int>, std::vector<WedgeSplit>> cache;
    Rng rng(45 + degree);
    int worse = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<Fragment2D> leaves;
      std::vector<DyadicSquare> stack = {{4, 0, 0}};
      while (!stack.empty()) {
        const DyadicSquare sq = stack.back();
        stack.pop_back();
        const auto choice = sq.level == 0 ? 0 : rng.below(3);
        if (choice == 0) {
          leaves.push_back(sq);
        } else if (choice == 1) {
          auto& splits = cache[{sq.level, sq.x0, sq.y0}];
          if (splits.empty()) splits = enumerate_wedge_splits(sq, 0);
          const WedgeSplit& s = splits[rng.below(splits.size())];
          leaves.push_back(Wedge{sq, s.direction, s.r, WedgeSide::lower});
          leaves.push_back(Wedge{sq, s.direction, s.r, WedgeSide::upper});
        } else {
          const int h = sq.size() / 2;
          for (auto [dx, dy] : {std::pair{0, 0}, {h, 0}, {0, h}, {h, h}})
            stack.push_back({sq.level - 1, sq.x0 + dx, sq.y0 + dy});
        }
      }
      const auto seg = segmentation_from_fragments(y, leaves, gamma, degree);
      if (best.energy <= seg.energy + 1e-9) ++worse;
    }
    CHECK(worse == 1000);
  }
}

TEST_CASE("horizon image: solver beats hand-built segmentations") {
  const auto f = make_horizon(1.5, 0.0, 1.0, 3);
  const GridSignal y = discretize(f, 64);
  const double gamma = 0.01;
  const auto seg = solve_wedgelet(y, gamma);
  for (int level = 0; level <= 6; ++level) {
    std::vector<Fragment2D> uniform;
    const int j = 1 << level;
    for (int y0 = 0; y0 < 64; y0 += j)
      for (int x0 = 0; x0 < 64; x0 += j) uniform.push_back(DyadicSquare{level, x0, y0});
    CHECK(seg.energy <= segmentation_from_fragments(y, uniform, gamma, 0).energy + 1e-9);
  }
}

TEST_CASE("serial and parallel solves agree; leaves partition the grid") {
  const GridSignal y = random_image(32, 12);
  WedgeletOptions s, p;
  s.execution = Execution::serial;
  s.degree = p.degree = 1;
  s.angle_budget = p.angle_budget = 4;
  const auto a = solve_wedgelet(y, 0.03, s);
  const auto b = solve_wedgelet(y, 0.03, p);
  CHECK(a.energy == b.energy);
  CHECK(a.size() == b.size());
  std::vector<int> cover(32 * 32, 0);
  for (const Leaf2D& leaf : a.leaves)
    for (const Pixel& px : fragment_pixels(leaf.fragment)) ++cover[px.y * 32 + px.x];
  CHECK(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
  CHECK(std::abs(recompute_energy(y, a) - a.energy) < 1e-9);
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(solve_wedgelet(GridSignal::zeros(2, 6), 1.0), DomainError);
  CHECK_THROWS_AS(solve_wedgelet(GridSignal::zeros(1, 8), 1.0), DimensionError);
  CHECK_THROWS_AS(solve_wedgelet(GridSignal::zeros(2, 8), -1.0), DomainError);
  WedgeletOptions o;
  o.degree = 2;
  CHECK_THROWS_AS(solve_wedgelet(GridSignal::zeros(2, 8), 1.0, o), DomainError);
}
