#pragma once

#include "potts/potts1d.hpp"
#include "potts/wedgelet.hpp"

namespace potts {

inline constexpr int kMaxBruteForce1D = 16;

/// Exhaustive search over all 2^(n-1) interval partitions, each piece fitted
/// by the direct design-matrix solve. Ties go to fewer segments, then to the
/// lexicographically earliest breakpoints. Throws RefusalError for n > 16.
Segmentation1D brute_force_potts_1d(const GridSignal& y, double gamma, int degree);

/// Exhaustive recursion over the quadtree: every square is tried as a leaf,
/// under every (angle, offset) split and as four children. Angles and line
/// membership are enumerated from the rounding parametrization, not from
/// the integer line index used by the solver. Accepts n in {1, 2, 4}.
WedgeletSegmentation brute_force_wedgelet(const GridSignal& y, double gamma, int degree,
                                          int angle_budget = 0);

}  // namespace potts
