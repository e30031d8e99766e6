#include "potts/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "potts/errors.hpp"

namespace potts {

Segmentation1D brute_force_potts_1d(const GridSignal& y, double gamma, int degree) {
  if (y.dim() != 1) throw DimensionError("1D oracle needs a 1D signal");
  const int n = y.side();
  if (n > kMaxBruteForce1D) {
    throw RefusalError("brute force over " + std::to_string(n) + " samples refused (max " +
                       std::to_string(kMaxBruteForce1D) + ")");
  }
  if (n < 1) throw DomainError("empty signal");
  const PolySpace space = make_poly_space(1, degree);

  // rss of every interval, computed once by the direct solve.
  std::vector<std::vector<double>> rss(n + 1, std::vector<double>(n + 1, 0.0));
  for (int lo = 1; lo <= n; ++lo) {
    for (int hi = lo; hi <= n; ++hi) {
      std::vector<Pixel> px;
      for (int x = lo; x <= hi; ++x) px.push_back({x - 1, 0});
      rss[lo][hi] = fit_pixels(px, y, space).rss;
    }
  }

  // Bit b of the mask set means a break after position b + 1. Masks are
  // visited in an order where, at equal popcount, earlier breakpoints come
  // first: ascending reversed-bit value.
  const std::uint32_t masks = 1u << (n - 1);
  std::vector<std::uint32_t> order(masks);
  std::iota(order.begin(), order.end(), 0u);
  const auto key = [n](std::uint32_t m) {
    std::uint32_t rev = 0;
    for (int b = 0; b < n - 1; ++b)
      if (m & (1u << b)) rev |= 1u << (n - 2 - b);
    return std::pair{std::popcount(m), ~rev};
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask : order) {
    double e = 0.0;
    int lo = 1;
    for (int b = 0; b < n; ++b) {
      if (b == n - 1 || (mask & (1u << b))) {
        e += gamma + rss[lo][b + 1];
        lo = b + 2;
      }
    }
    // Energies within rounding of the incumbent count as ties, so the visit
    // order decides.
    if (!std::isfinite(best) || e < best - 1e-12 * (1.0 + std::abs(best))) {
      best = e;
      best_mask = mask;
    }
  }

  std::vector<Interval> intervals;
  int lo = 1;
  for (int b = 0; b < n; ++b) {
    if (b == n - 1 || (best_mask & (1u << b))) {
      intervals.push_back({lo, b + 1});
      lo = b + 2;
    }
  }
  Segmentation1D seg = segmentation_from_intervals(y, intervals, gamma, degree);
  seg.energy = best;
  return seg;
}

namespace {

struct Candidate {
  double energy = 0.0;
  std::vector<Fragment2D> leaves;
};

std::vector<SlopeDirection> oracle_directions(int cap) {
  constexpr double pi = std::numbers::pi;
  std::vector<SlopeDirection> out;
  for (int p = -cap; p <= cap; ++p) {
    for (int q = -cap; q <= cap; ++q) {
      if (std::gcd(p, q) != 1) continue;
      const double theta = std::atan2(static_cast<double>(q), static_cast<double>(p));
      if (theta > -pi / 4 + 1e-12 && theta <= 3 * pi / 4 + 1e-12) out.push_back({p, q});
    }
  }
  return out;
}

// Line number of pixel (x, y) from the parametrization
// L^r = (0, r) + {(x, round(x tan))} or (r, 0) + {(round(y cot), y)}.
std::int64_t rounded_line(const SlopeDirection& d, int x, int y) {
  if (d.p >= d.q) return y - round_half_up(static_cast<double>(x * d.q) / d.p);
  return x - round_half_up(static_cast<double>(y * d.p) / d.q);
}

double fragment_rss(const GridSignal& y, const std::vector<Pixel>& px, const PolySpace& space) {
  return fit_pixels(px, y, space).rss;
}

Candidate best_for(const GridSignal& y, const DyadicSquare& sq, double gamma, const PolySpace& space,
                   int angle_budget) {
  Candidate best{gamma + fragment_rss(y, sq.pixels(), space), {sq}};
  if (sq.size() < 2) return best;

  const int cap = max_slope_component(sq.size(), angle_budget);
  for (const SlopeDirection& d : oracle_directions(cap)) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (const Pixel& p : sq.pixels()) {
      lo = std::min(lo, rounded_line(d, p.x, p.y));
      hi = std::max(hi, rounded_line(d, p.x, p.y));
    }
    for (std::int64_t r = lo; r < hi; ++r) {
      std::vector<Pixel> lower, upper;
      for (const Pixel& p : sq.pixels()) (rounded_line(d, p.x, p.y) <= r ? lower : upper).push_back(p);
      if (lower.empty() || upper.empty()) continue;
      const double e = 2 * gamma + fragment_rss(y, lower, space) + fragment_rss(y, upper, space);
      if (e < best.energy) {
        best = {e, {Wedge{sq, d, r, WedgeSide::lower}, Wedge{sq, d, r, WedgeSide::upper}}};
      }
    }
  }

  const int h = sq.size() / 2;
  Candidate quad;
  for (auto [dx, dy] : {std::pair{0, 0}, {h, 0}, {0, h}, {h, h}}) {
    Candidate c = best_for(y, DyadicSquare{sq.level - 1, sq.x0 + dx, sq.y0 + dy}, gamma, space, angle_budget);
    quad.energy += c.energy;
    quad.leaves.insert(quad.leaves.end(), c.leaves.begin(), c.leaves.end());
  }
  if (quad.energy < best.energy) best = std::move(quad);
  return best;
}

}  // namespace

WedgeletSegmentation brute_force_wedgelet(const GridSignal& y, double gamma, int degree,
                                          int angle_budget) {
  if (y.dim() != 2) throw DimensionError("wedgelet oracle needs a 2D image");
  const int n = y.side();
  if (n != 1 && n != 2 && n != 4) {
    throw RefusalError("wedgelet brute force refused for side " + std::to_string(n));
  }
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  const PolySpace space = make_poly_space(2, degree);
  Candidate best = best_for(y, DyadicSquare{log2_exact(n), 0, 0}, gamma, space, angle_budget);
  WedgeletSegmentation seg = segmentation_from_fragments(y, best.leaves, gamma, degree);
  seg.energy = best.energy;
  return seg;
}

}  // namespace potts
