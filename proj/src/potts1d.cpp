#include "potts/potts1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "potts/errors.hpp"

namespace potts {

GridSignal Segmentation1D::reconstruct() const {
  GridSignal out = GridSignal::zeros(1, side);
  for (const Segment1D& s : segments) {
    for (int x = s.interval.lo; x <= s.interval.hi; ++x) out.at(x - 1) = s.fit.evaluate(x - 1);
  }
  return out;
}

std::vector<Interval> Segmentation1D::intervals() const {
  std::vector<Interval> out;
  out.reserve(segments.size());
  for (const Segment1D& s : segments) out.push_back(s.interval);
  return out;
}

namespace {

void check_inputs(const GridSignal& y, double gamma) {
  if (y.dim() != 1) throw DimensionError("1D Potts needs a 1D signal");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
}

Segmentation1D backtrack(const MomentTable1D& table, const std::vector<int>& best_start,
                         double gamma, double energy, const FitOptions& fit) {
  Segmentation1D seg;
  seg.side = table.side();
  seg.gamma = gamma;
  seg.energy = energy;
  for (int j = table.side(); j >= 1;) {
    const int i = best_start[j];
    seg.segments.push_back({Interval{i, j}, table.fit(i, j, fit)});
    j = i - 1;
  }
  std::reverse(seg.segments.begin(), seg.segments.end());
  return seg;
}

}  // namespace

Segmentation1D solve_potts_1d(const GridSignal& y, double gamma, int degree,
                              const Potts1DOptions& options) {
  check_inputs(y, gamma);
  const MomentTable1D table(y, degree);
  const int n = y.side();
  // best[j]: optimal energy of y_1..y_j; best[0] = 0.
  std::vector<double> best(n + 1, 0.0);
  std::vector<int> best_start(n + 1, 1);
  std::vector<int> active;
  std::vector<double> cost;
  active.reserve(n);
  cost.reserve(n);

  for (int j = 1; j <= n; ++j) {
    active.push_back(j);
    cost.resize(active.size());
    const auto count = static_cast<long long>(active.size());
    auto eval = [&](long long k) {
      const int i = active[k];
      cost[k] = best[i - 1] + table.rss(i, j, options.fit);
    };
    if (options.execution == Execution::parallel && count >= 256) {
#pragma omp parallel for schedule(static)
      for (long long k = 0; k < count; ++k) eval(k);
    } else {
      for (long long k = 0; k < count; ++k) eval(k);
    }
    // Ascending i with <= keeps the largest minimizing start.
    double min_cost = std::numeric_limits<double>::infinity();
    int arg = j;
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (cost[k] <= min_cost) {
        min_cost = cost[k];
        arg = active[k];
      }
    }
    best[j] = gamma + min_cost;
    best_start[j] = arg;

    if (options.prune) {
      // Any later segment starting at i costs at least cost_i + rss(j+1, j'),
      // which the split at j beats strictly; the slack absorbs rounding.
      const double bound = best[j] + 1e-12 * (std::abs(best[j]) + 1.0);
      std::size_t kept = 0;
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (cost[k] <= bound) active[kept++] = active[k];
      }
      active.resize(kept);
    }
  }
  return backtrack(table, best_start, gamma, best[n], options.fit);
}

Segmentation1D solve_potts_1d_reference(const GridSignal& y, double gamma, int degree) {
  check_inputs(y, gamma);
  const MomentTable1D table(y, degree);
  const int n = y.side();
  std::vector<double> best(n + 1, 0.0);
  std::vector<int> best_start(n + 1, 1);
  for (int j = 1; j <= n; ++j) {
    double min_cost = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= j; ++i) {
      const double c = best[i - 1] + table.rss(i, j);
      if (c <= min_cost) {
        min_cost = c;
        best_start[j] = i;
      }
    }
    best[j] = gamma + min_cost;
  }
  return backtrack(table, best_start, gamma, best[n], FitOptions{});
}

Segmentation1D segmentation_from_intervals(const GridSignal& y, std::vector<Interval> intervals,
                                           double gamma, int degree) {
  if (y.dim() != 1) throw DimensionError("1D segmentation needs a 1D signal");
  const PolySpace space = make_poly_space(1, degree);
  Segmentation1D seg;
  seg.side = y.side();
  seg.gamma = gamma;
  int expected = 1;
  for (const Interval& iv : intervals) {
    if (iv.lo != expected || iv.hi < iv.lo || iv.hi > y.side()) {
      throw DomainError("intervals must be contiguous and cover 1..n");
    }
    expected = iv.hi + 1;
    std::vector<Pixel> pixels;
    for (int x = iv.lo; x <= iv.hi; ++x) pixels.push_back({x - 1, 0});
    seg.segments.push_back({iv, fit_pixels(pixels, y, space)});
  }
  if (expected != y.side() + 1) throw DomainError("intervals must cover 1..n");
  seg.energy = recompute_energy(y, seg);
  return seg;
}

double recompute_energy(const GridSignal& y, const Segmentation1D& seg) {
  double total = seg.gamma * static_cast<double>(seg.segments.size());
  for (const Segment1D& s : seg.segments) {
    for (int x = s.interval.lo; x <= s.interval.hi; ++x) {
      const double r = y.at(x - 1) - s.fit.evaluate(x - 1);
      total += r * r;
    }
  }
  return total;
}

std::int64_t count_fragments_1d(std::int64_t n) {
  if (n < 1) throw DomainError("count_fragments_1d needs n >= 1");
  return n * (n + 1) / 2;
}

}  // namespace potts
