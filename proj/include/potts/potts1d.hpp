#pragma once

#include <cstdint>
#include <vector>

#include "potts/execution.hpp"
#include "potts/grid.hpp"
#include "potts/polyfit.hpp"

namespace potts {

/// Discrete interval [lo, hi] of 1-based positions.
struct Interval {
  int lo = 1;
  int hi = 1;
  int length() const { return hi - lo + 1; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Segment1D {
  Interval interval;
  FitResult fit;
};

/// A partition of {1, ..., n} into intervals with a fitted polynomial on
/// each. `energy` is gamma * #segments + sum of residuals, in the
/// un-normalized scale (gamma is an absolute per-segment penalty).
struct Segmentation1D {
  int side = 0;
  double gamma = 0.0;
  double energy = 0.0;
  std::vector<Segment1D> segments;

  std::size_t size() const { return segments.size(); }
  GridSignal reconstruct() const;
  std::vector<Interval> intervals() const;
};

struct Potts1DOptions {
  /// Candidate evaluation for each right end runs on OpenMP threads when
  /// parallel.
  Execution execution = Execution::parallel;
  /// Discard left ends that can no longer start an optimal last segment.
  /// Exact: relies on superadditivity of least-squares residuals.
  bool prune = true;
  FitOptions fit;
};

/// Exact minimizer of gamma * |P| + ||f_P - y||^2 over all interval
/// partitions with degree-p pieces. Ties prefer the shorter last segment.
Segmentation1D solve_potts_1d(const GridSignal& y, double gamma, int degree,
                              const Potts1DOptions& options = {});

/// Serial O(n^2) dynamic program with no pruning. Kept as the reference the
/// optimized kernel is tested against.
Segmentation1D solve_potts_1d_reference(const GridSignal& y, double gamma, int degree);

/// Builds a segmentation from explicit intervals, fitting each piece by
/// least squares on y.
Segmentation1D segmentation_from_intervals(const GridSignal& y, std::vector<Interval> intervals,
                                           double gamma, int degree);

/// gamma * #segments + sum of residuals, recomputed pixel by pixel from the
/// stored coefficients.
double recompute_energy(const GridSignal& y, const Segmentation1D& seg);

/// |R^n| = n (n + 1) / 2 discrete intervals.
std::int64_t count_fragments_1d(std::int64_t n);

}  // namespace potts
