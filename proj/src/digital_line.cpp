#include "potts/digital_line.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace potts {

std::vector<Pixel> DyadicSquare::pixels() const {
  std::vector<Pixel> out;
  out.reserve(static_cast<std::size_t>(size()) * size());
  for (int y = y0; y < y0 + size(); ++y)
    for (int x = x0; x < x0 + size(); ++x) out.push_back({x, y});
  return out;
}

std::int64_t round_half_up(double x) { return static_cast<std::int64_t>(std::floor(x + 0.5)); }

bool DigitalLineSpec::flat() const { return std::cos(theta) >= std::sin(theta); }

double DigitalLineSpec::d() const { return std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta))); }

std::array<double, 2> DigitalLineSpec::v() const {
  const double c = std::cos(theta), s = std::sin(theta);
  if (flat()) return {-s, c};
  return {s, -c};
}

bool DigitalLineSpec::strip_contains(Pixel s) const {
  const long double c = std::cos(static_cast<long double>(theta));
  const long double sn = std::sin(static_cast<long double>(theta));
  const bool is_flat = c >= sn;
  const long double dd = std::max(std::abs(c), std::abs(sn));
  const long double proj = is_flat ? -sn * s.x + c * s.y : sn * s.x - c * s.y;
  return (r - 0.5L) * dd < proj && proj <= (r + 0.5L) * dd;
}

std::vector<Pixel> digital_line_pixels(const DigitalLineSpec& line, const DyadicSquare& square) {
  std::vector<Pixel> out;
  const int lo = line.flat() ? square.x0 : square.y0;
  const int hi = lo + square.size();
  const double slope = line.flat() ? std::tan(line.theta) : 1.0 / std::tan(line.theta);
  for (int t = lo; t < hi; ++t) {
    const std::int64_t other = line.r + round_half_up(t * slope);
    const Pixel p = line.flat() ? Pixel{t, static_cast<int>(other)} : Pixel{static_cast<int>(other), t};
    if (square.contains(p)) out.push_back(p);
  }
  return out;
}

double SlopeDirection::theta() const { return std::atan2(static_cast<double>(q), static_cast<double>(p)); }

std::vector<SlopeDirection> slope_directions(int max_component) {
  std::vector<SlopeDirection> out;
  for (int p = -max_component; p <= max_component; ++p) {
    for (int q = -max_component; q <= max_component; ++q) {
      if (std::gcd(p, q) != 1) continue;
      const bool flat_range = p > 0 && -p < q && q <= p;
      const bool steep_range = q > 0 && -q <= p && p < q;
      if (flat_range || steep_range) out.push_back({p, q});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SlopeDirection& a, const SlopeDirection& b) { return a.theta() < b.theta(); });
  return out;
}

int max_slope_component(int square_side, int angle_budget) {
  return angle_budget > 0 ? std::min(angle_budget, square_side) : square_side;
}

}  // namespace potts
