#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "potts/digital_line.hpp"
#include "potts/execution.hpp"
#include "potts/grid.hpp"
#include "potts/polyfit.hpp"

namespace potts {

enum class WedgeSide { lower, upper };

/// One side of a wedge split: the lower wedge is the union of lines
/// L^k with k <= r inside the square, the upper wedge those with k > r.
struct Wedge {
  DyadicSquare square;
  SlopeDirection direction;
  std::int64_t r = 0;
  WedgeSide side = WedgeSide::lower;

  bool contains(Pixel s) const {
    if (!square.contains(s)) return false;
    const bool below = direction.line_index(s.x, s.y) <= r;
    return side == WedgeSide::lower ? below : !below;
  }
};

using Fragment2D = std::variant<DyadicSquare, Wedge>;

std::vector<Pixel> fragment_pixels(const Fragment2D& fragment);

struct Leaf2D {
  Fragment2D fragment;
  FitResult fit;
};

/// Dyadic wedgelet (degree 0) or platelet (degree 1) segmentation of an
/// n x n grid. Energy is gamma * #leaves + sum of residuals.
struct WedgeletSegmentation {
  int side = 0;
  int degree = 0;
  double gamma = 0.0;
  double energy = 0.0;
  std::vector<Leaf2D> leaves;

  std::size_t size() const { return leaves.size(); }
  GridSignal reconstruct() const;
};

struct WedgeletOptions {
  int degree = 0;
  /// Cap on the slope components |p|, |q| of admissible directions; the
  /// square side also caps them. Non-positive means no extra cap.
  int angle_budget = 0;
  /// Squares of one quadtree level are solved on OpenMP threads.
  Execution execution = Execution::parallel;
  FitOptions fit;
};

/// Exact minimizer of the Potts energy over all dyadic wedge partitions
/// by bottom-up quadtree dynamic programming. Ties prefer a leaf, then a
/// wedge split, then the four children. Throws DomainError when the side
/// is not a power of two.
WedgeletSegmentation solve_wedgelet(const GridSignal& y, double gamma,
                                    const WedgeletOptions& options = {});

struct WedgeSplit {
  SlopeDirection direction;
  std::int64_t r = 0;
  std::vector<Pixel> lower;
  std::vector<Pixel> upper;
};

/// Distinct bipartitions of the square realizable by admissible digital
/// lines, first (direction, r) kept. Empty for 1x1 squares.
std::vector<WedgeSplit> enumerate_wedge_splits(const DyadicSquare& square, int angle_budget);

/// Number of distinct fragments (as pixel sets) over all dyadic squares of
/// an n x n grid and their wedges.
std::int64_t count_fragments_2d(int n, int angle_budget);

/// Validates that the fragments partition the grid and fits each by least
/// squares on y.
WedgeletSegmentation segmentation_from_fragments(const GridSignal& y,
                                                 const std::vector<Fragment2D>& fragments,
                                                 double gamma, int degree);

double recompute_energy(const GridSignal& y, const WedgeletSegmentation& seg);

bool is_power_of_two(int n);
int log2_exact(int n);

}  // namespace potts
