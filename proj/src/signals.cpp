#include "potts/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "potts/errors.hpp"
#include "potts/rng.hpp"

namespace potts {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> draw_phases(Rng& rng, std::size_t count) {
  std::vector<double> out(count);
  for (double& p : out) p = rng.uniform(0.0, 2 * kPi);
  return out;
}

}  // namespace

double HoelderFunction1D::operator()(double x) const {
  double s = 0.0;
  for (std::size_t k = 1; k <= phases.size(); ++k) {
    const double freq = std::ldexp(kPi, static_cast<int>(k));
    s += std::exp2(-alpha * k) * std::cos(freq * x + phases[k - 1]);
  }
  return offset + scale * s;
}

double HoelderFunction1D::derivative(double x) const {
  double s = 0.0;
  for (std::size_t k = 1; k <= phases.size(); ++k) {
    const double freq = std::ldexp(kPi, static_cast<int>(k));
    s -= std::exp2(-alpha * k) * freq * std::sin(freq * x + phases[k - 1]);
  }
  return scale * s;
}

double HoelderFunction1D::amplitude() const {
  double s = 0.0;
  for (std::size_t k = 1; k <= phases.size(); ++k) s += std::exp2(-alpha * k);
  return s;
}

double HoelderFunction1D::lipschitz_bound() const {
  double s = 0.0;
  for (std::size_t k = 1; k <= phases.size(); ++k) s += std::exp2((1.0 - alpha) * k) * kPi;
  return std::abs(scale) * s;
}

HoelderFunction1D make_hoelder(double alpha, std::uint64_t seed, int terms) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("Hoelder exponent must lie in (0, 2], got " + std::to_string(alpha));
  }
  if (terms < 1) throw DomainError("a lacunary series needs at least one term");
  Rng rng(derive_seed(seed, 0x401de7));
  HoelderFunction1D f;
  f.alpha = alpha;
  f.phases = draw_phases(rng, static_cast<std::size_t>(terms));
  return f;
}

HoelderFunction1D as_boundary(HoelderFunction1D f) {
  const double a = f.amplitude();
  f.offset = 0.5;
  f.scale = a > 0.0 ? 0.3 / a : 0.0;
  return f;
}

double empirical_hoelder_quotient(const HoelderFunction1D& f, double exponent, int order,
                                  int pairs, std::uint64_t seed) {
  if (order != 0 && order != 1) throw DomainError("quotient order must be 0 or 1");
  Rng rng(seed);
  const auto g = [&](double x) { return order == 0 ? f(x) : f.derivative(x); };
  double sup = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const double x = rng.uniform();
    double y;
    if (i % 2 == 0) {
      y = rng.uniform();
    } else {
      const double gap = std::pow(10.0, rng.uniform(-6.0, -0.3));
      y = x + (rng.sign() > 0 ? gap : -gap);
      y = std::clamp(y, 0.0, 1.0);
    }
    const double dist = std::abs(x - y);
    if (dist == 0.0) continue;
    sup = std::max(sup, std::abs(g(x) - g(y)) / std::pow(dist, exponent));
  }
  return sup;
}

ContinuousField make_horizon_field(std::function<double(double)> boundary, double lipschitz,
                                   double c1, double c2) {
  auto eval = [boundary, c1, c2](double x, double y) { return y <= boundary(x) ? c1 : c2; };
  auto hook = [boundary, lipschitz, c1, c2](const Box& box) {
    const double w = box.x1 - box.x0, h = box.y1 - box.y0;
    const double mid = boundary(0.5 * (box.x0 + box.x1));
    const double reach = lipschitz * 0.5 * w;
    double below;
    if (mid - reach >= box.y1) {
      below = 1.0;
    } else if (mid + reach < box.y0) {
      below = 0.0;
    } else {
      const auto height = [&](double x) { return std::clamp(boundary(x), box.y0, box.y1) - box.y0; };
      below = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(height, box.x0, box.x1,
                                                                           12, 1e-12) /
              (w * h);
      below = std::clamp(below, 0.0, 1.0);
    }
    return CellStatistics{c1 * below + c2 * (1.0 - below),
                          below * (1.0 - below) * (c1 - c2) * (c1 - c2)};
  };
  return ContinuousField(2, eval, hook);
}

ContinuousField make_horizon(double alpha, double c1, double c2, std::uint64_t seed) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw DomainError("horizon exponent must lie in (1, 2], got " + std::to_string(alpha));
  }
  const HoelderFunction1D h = as_boundary(make_hoelder(alpha, seed));
  return make_horizon_field([h](double x) { return h(x); }, h.lipschitz_bound(), c1, c2);
}

double PiecewiseSobolevSignal::operator()(double x) const {
  double v = smooth(x);
  for (std::size_t i = 0; i < jump_locations.size() && jump_locations[i] <= x; ++i) v += jump_sizes[i];
  return v;
}

ContinuousField PiecewiseSobolevSignal::field() const {
  return ContinuousField(1, [s = *this](double x, double) { return s(x); });
}

PiecewiseSobolevSignal make_piecewise_sobolev(double alpha, int jumps, std::uint64_t seed) {
  if (!(alpha > 0.5)) throw DomainError("Sobolev exponent must exceed 1/2");
  if (jumps < 0) throw DomainError("jump count must be nonnegative");
  PiecewiseSobolevSignal s;
  s.smooth = make_hoelder(std::min(alpha, 2.0), seed);
  Rng rng(derive_seed(seed, 0x5e9a11));
  const double bin = 1.0 / (jumps + 1);
  for (int i = 1; i <= jumps; ++i) {
    s.jump_locations.push_back((i - 0.3 + 0.6 * rng.uniform()) * bin);
    s.jump_sizes.push_back(rng.sign() * rng.uniform(0.5, 1.0));
  }
  return s;
}

namespace {

double smooth_2d(const std::vector<double>& phases, double alpha, double x, double y) {
  double s = 0.0;
  for (std::size_t k = 1; 2 * k <= phases.size(); ++k) {
    const double freq = std::ldexp(kPi, static_cast<int>(k));
    s += std::exp2(-alpha * k) * std::cos(freq * x + phases[2 * k - 2]) *
         std::cos(freq * y + phases[2 * k - 1]);
  }
  return s;
}

}  // namespace

double GeneralizedHorizon::g_minus(double x, double y) const {
  return base_minus + amplitude * smooth_2d(phases_minus, alpha, x, y);
}

double GeneralizedHorizon::g_plus(double x, double y) const {
  return base_plus + amplitude * smooth_2d(phases_plus, alpha, x, y);
}

double GeneralizedHorizon::operator()(double x, double y) const {
  return y <= boundary(x) ? g_minus(x, y) : g_plus(x, y);
}

ContinuousField GeneralizedHorizon::field() const {
  return ContinuousField(2, [g = *this](double x, double y) { return g(x, y); });
}

GeneralizedHorizon make_generalized_horizon(double alpha, std::uint64_t seed, double amplitude) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw DomainError("generalized horizon exponent must lie in (1, 2), got " + std::to_string(alpha));
  }
  GeneralizedHorizon g;
  g.alpha = alpha;
  g.amplitude = amplitude;
  g.boundary = as_boundary(make_hoelder(alpha, seed));
  Rng rng(derive_seed(seed, 0x9e4e7a));
  g.phases_minus = draw_phases(rng, 2 * HoelderFunction1D::kTerms);
  g.phases_plus = draw_phases(rng, 2 * HoelderFunction1D::kTerms);
  return g;
}

}  // namespace potts
