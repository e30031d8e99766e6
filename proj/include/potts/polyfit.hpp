#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "potts/grid.hpp"

namespace potts {

/// Polynomial regression space on a fragment. One-dimensional spaces use
/// the monomials 1, u, ..., u^p (p <= 4); two-dimensional spaces are
/// constants (p = 0, wedgelets) or affine functions 1, u, w (p = 1,
/// platelets).
struct PolySpace {
  int dim = 1;
  int degree = 0;

  /// Number of basis functions D.
  int dimension() const { return dim == 1 ? degree + 1 : (degree == 0 ? 1 : 3); }
};

inline constexpr int kMaxDegree1D = 4;
inline constexpr int kMaxDegree2D = 1;

/// Throws DomainError when the degree exceeds the cap for the dimension.
PolySpace make_poly_space(int dim, int degree);

/// Affine chart u = (x - cx) / hx, w = (y - cy) / hy. Fits are solved and
/// stored in these local coordinates, which map the fragment (or its
/// bounding square) into [-1, 1].
struct LocalFrame {
  double cx = 0.0;
  double cy = 0.0;
  double hx = 1.0;
  double hy = 1.0;
};

struct FitOptions {
  /// Eigenvalues below cutoff * largest eigenvalue are treated as zero.
  double rank_cutoff = 1e-10;
};

struct FitResult {
  PolySpace space;
  LocalFrame frame;
  std::vector<double> coefficients;  // in the local frame
  double rss = 0.0;
  std::size_t pixel_count = 0;
  int rank = 0;

  double evaluate(double x, double y = 0.0) const;
};

/// Least squares by explicit design matrix over a pixel list. This is the
/// direct route: O(|P| D^2) and independent of any moment table.
/// Throws DomainError for an empty fragment.
FitResult fit_pixels(std::span<const Pixel> pixels, std::span<const double> values,
                     const PolySpace& space, const FitOptions& options = {});

FitResult fit_pixels(std::span<const Pixel> pixels, const GridSignal& y,
                     const PolySpace& space, const FitOptions& options = {});

/// Same as fit_pixels but in an explicitly chosen frame (identity frame
/// gives the uncentered solve).
FitResult fit_pixels_in_frame(std::span<const Pixel> pixels, std::span<const double> values,
                              const PolySpace& space, const LocalFrame& frame,
                              const FitOptions& options = {});

/// Sufficient statistics of a two-dimensional fragment for degree <= 1.
/// Coordinates are whatever origin the producer chose; the frame passed
/// to fit_moments_2d must use the same origin.
struct Moments2D {
  double count = 0.0;
  double sx = 0.0, sy = 0.0;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  double sv = 0.0, sxv = 0.0, syv = 0.0, svv = 0.0;

  void add(double x, double y, double v) {
    count += 1.0;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    sv += v;
    sxv += x * v;
    syv += y * v;
    svv += v * v;
  }
  Moments2D& operator+=(const Moments2D& o);
  Moments2D& operator-=(const Moments2D& o);
  friend Moments2D operator-(Moments2D a, const Moments2D& b) { return a -= b; }
};

/// Degree-0 or degree-1 fit from moments. Solves the centered 2x2 normal
/// equations with an eigen-decomposition pseudo-inverse.
FitResult fit_moments_2d(const Moments2D& m, int degree, const LocalFrame& frame,
                         const FitOptions& options = {});

/// Residual sum of squares only; the hot path of the wedgelet search.
double rss_moments_2d(const Moments2D& m, int degree, double rank_cutoff = 1e-10);

/// Prefix sums over a 1D signal giving O(1) interval fits. Positions in the
/// query interface are 1-based and inclusive.
class MomentTable1D {
 public:
  MomentTable1D(const GridSignal& y, int degree);

  int side() const { return side_; }
  int degree() const { return degree_; }

  /// sum_{x=lo}^{hi} y_x * x^power, power <= degree.
  double weighted_sum(int lo, int hi, int power) const;
  double square_sum(int lo, int hi) const;

  double rss(int lo, int hi, const FitOptions& options = {}) const;
  FitResult fit(int lo, int hi, const FitOptions& options = {}) const;

 private:
  FitResult solve(int lo, int hi, const FitOptions& options, bool want_coefficients) const;

  int side_;
  int degree_;
  // prefix_[b][i] = sum_{x=1}^{i} y_x x^b, for b <= degree.
  std::vector<std::vector<long double>> prefix_;
  std::vector<long double> prefix_sq_;
  // power_sums_[L][k] = sum over L equispaced points u in [-1,1] of u^(2k);
  // only built for degree >= 2.
  std::vector<std::vector<double>> power_sums_;
};

/// Summed-area tables for degree <= 1 fits over axis-aligned rectangles.
class MomentTable2D {
 public:
  explicit MomentTable2D(const GridSignal& y);

  int side() const { return side_; }

  /// Moments of the w x h rectangle with corner (x0, y0), in coordinates
  /// relative to that corner.
  Moments2D rect(int x0, int y0, int w, int h) const;

  double sum(int x0, int y0, int w, int h) const;
  double square_sum(int x0, int y0, int w, int h) const;

 private:
  long double area(const std::vector<long double>& t, int x0, int y0, int w, int h) const;

  int side_;
  std::vector<long double> v_, vv_, xv_, yv_;
};

}  // namespace potts
