#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "potts/grid.hpp"

namespace potts {

/// offset + scale * sum_{k=1}^{K} 2^(-alpha k) cos(2^k pi x + phase_k).
///
/// Lacunary (Weierstrass-type) series. For alpha < 1 it is alpha-Hoelder;
/// for 1 < alpha < 2 its derivative is (alpha - 1)-Hoelder.
struct HoelderFunction1D {
  static constexpr int kTerms = 16;

  double alpha = 1.5;
  std::vector<double> phases;  // one per term
  double offset = 0.0;
  double scale = 1.0;

  double operator()(double x) const;
  double derivative(double x) const;

  /// sum_k 2^(-alpha k), the sup of the unscaled series.
  double amplitude() const;
  /// Upper bound on |f'| over the real line.
  double lipschitz_bound() const;
  double min_value() const { return offset - scale * amplitude(); }
  double max_value() const { return offset + scale * amplitude(); }
};

/// Seeded phases uniform on [0, 2 pi). Throws DomainError unless
/// 0 < alpha <= 2.
HoelderFunction1D make_hoelder(double alpha, std::uint64_t seed, int terms = HoelderFunction1D::kTerms);

/// Rescaled copy whose range lies in [0.2, 0.8].
HoelderFunction1D as_boundary(HoelderFunction1D f);

/// sup over sampled pairs of |f^(order)(x) - f^(order)(y)| / |x - y|^exponent,
/// order in {0, 1}. Half the pairs are uniform, half have log-uniform
/// separations down to 1e-6.
double empirical_hoelder_quotient(const HoelderFunction1D& f, double exponent, int order,
                                  int pairs, std::uint64_t seed);

/// f(x, y) = c1 if y <= h(x) else c2. The field carries an exact cell hook:
/// the mass below the graph is integrated in x by adaptive Gauss-Kronrod,
/// and cells the graph cannot reach (by the Lipschitz bound) skip it.
ContinuousField make_horizon_field(std::function<double(double)> boundary, double lipschitz,
                                   double c1, double c2);

/// Horizon function whose boundary is a seeded alpha-Hoelder series kept in
/// [0.2, 0.8]. Throws DomainError unless 1 < alpha <= 2.
ContinuousField make_horizon(double alpha, double c1, double c2, std::uint64_t seed);

/// smooth(x) + sum of the jumps at locations <= x.
struct PiecewiseSobolevSignal {
  HoelderFunction1D smooth;
  std::vector<double> jump_locations;  // strictly increasing, inside (0, 1)
  std::vector<double> jump_sizes;      // |size| in [0.5, 1]

  double operator()(double x) const;
  int jumps() const { return static_cast<int>(jump_locations.size()); }
  ContinuousField field() const;
};

/// The smooth part is make_hoelder(min(alpha, 2), seed). Jump i is placed
/// uniformly in the middle 60% of the i-th of J + 1 equal bins, so jumps are
/// at least 0.4 / (J + 1) apart. Throws DomainError unless alpha > 1/2 and
/// J >= 0.
PiecewiseSobolevSignal make_piecewise_sobolev(double alpha, int jumps, std::uint64_t seed);

/// f = g_minus below the graph of h (inclusive), g_plus above it, with
/// g_pm(x, y) = base_pm + amplitude * sum_k 2^(-alpha k)
///   cos(2^k pi x + a_k) cos(2^k pi y + b_k).
struct GeneralizedHorizon {
  HoelderFunction1D boundary;
  double alpha = 1.5;
  double base_minus = 0.25;
  double base_plus = 0.75;
  double amplitude = 0.1;
  std::vector<double> phases_minus;  // 2 per term
  std::vector<double> phases_plus;

  double g_minus(double x, double y) const;
  double g_plus(double x, double y) const;
  double operator()(double x, double y) const;
  ContinuousField field() const;
};

/// Throws DomainError unless 1 < alpha < 2.
GeneralizedHorizon make_generalized_horizon(double alpha, std::uint64_t seed,
                                            double amplitude = 0.1);

}  // namespace potts
