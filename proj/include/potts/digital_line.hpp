#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "potts/grid.hpp"

namespace potts {

/// Dyadic square of side 2^level with lower-left pixel (x0, y0); covers
/// [x0, x0 + 2^level) x [y0, y0 + 2^level).
struct DyadicSquare {
  int level = 0;
  int x0 = 0;
  int y0 = 0;

  int size() const { return 1 << level; }
  bool contains(Pixel p) const {
    return p.x >= x0 && p.x < x0 + size() && p.y >= y0 && p.y < y0 + size();
  }
  std::vector<Pixel> pixels() const;
  friend bool operator==(const DyadicSquare&, const DyadicSquare&) = default;
};

/// max{i in Z : i <= x + 1/2}.
std::int64_t round_half_up(double x);

/// Digital line L^r_theta for a real angle theta in (-pi/4, 3pi/4].
///
/// L^r_theta = { s in Z^2 : (r - 1/2) d < <s, v> <= (r + 1/2) d } with
/// d = max(|cos|, |sin|). A line is flat when cos(theta) >= sin(theta);
/// then v = (-sin, cos), otherwise v = (sin, -cos).
struct DigitalLineSpec {
  double theta = 0.0;
  std::int64_t r = 0;

  bool flat() const;
  double d() const;
  std::array<double, 2> v() const;

  /// Membership by the strip inequality, evaluated in long double.
  bool strip_contains(Pixel s) const;
};

/// Pixels of L^r_theta inside the square via the explicit parametrization:
/// flat lines {(x, r + round(x tan theta))}, steep lines
/// {(r + round(y cot theta), y)}. Returned in scan order; may be empty.
std::vector<Pixel> digital_line_pixels(const DigitalLineSpec& line, const DyadicSquare& square);

/// Rational direction theta = atan2(q, p) with gcd(|p|, |q|) = 1 and theta in
/// (-pi/4, 3pi/4]. Line membership is evaluated exactly in integers.
struct SlopeDirection {
  int p = 1;
  int q = 0;

  double theta() const;
  bool flat() const { return p >= q; }

  /// The unique r with pixel (x, y) in L^r_theta.
  std::int64_t line_index(std::int64_t x, std::int64_t y) const {
    // flat:  (2r-1) p < 2 (p y - q x) <= (2r+1) p
    // steep: (2r-1) q < 2 (q x - p y) <= (2r+1) q
    const std::int64_t m = flat() ? p : q;
    const std::int64_t w = flat() ? 2 * (p * y - q * x) : 2 * (q * x - p * y);
    // ceil((w - m) / (2 m)) for m > 0
    const std::int64_t num = w - m;
    const std::int64_t den = 2 * m;
    return num >= 0 ? (num + den - 1) / den : -((-num) / den);
  }

  friend bool operator==(const SlopeDirection&, const SlopeDirection&) = default;
};

/// All directions with max(|p|, |q|) <= max_component, ordered by angle.
std::vector<SlopeDirection> slope_directions(int max_component);

/// Largest slope component admitted in a square of the given side:
/// min(angle_budget, side), where a non-positive budget means unbounded.
int max_slope_component(int square_side, int angle_budget);

}  // namespace potts
