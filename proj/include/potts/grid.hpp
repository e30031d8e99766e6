#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "potts/execution.hpp"

namespace potts {

/// Integer pixel position. Coordinates are 0-based; `x` runs horizontally,
/// `y` vertically. One-dimensional signals use y == 0.
struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Real-valued data on the grid {0, ..., n-1}^dim, stored row-major:
/// pixel (x, y) lives at index y * n + x.
class GridSignal {
 public:
  GridSignal() = default;
  /// Throws DimensionError on a size mismatch and DomainError on
  /// non-finite entries.
  GridSignal(int dim, int side, std::vector<double> values);

  static GridSignal zeros(int dim, int side);
  static GridSignal filled(int dim, int side, double value);

  int dim() const { return dim_; }
  int side() const { return side_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double at(int x, int y = 0) const { return values_[index(x, y)]; }
  double& at(int x, int y = 0) { return values_[index(x, y)]; }
  double at(Pixel p) const { return at(p.x, p.y); }

  std::size_t index(int x, int y = 0) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(side_) +
           static_cast<std::size_t>(x);
  }

  /// Number of cells |S^n| = side^dim.
  double cell_count() const { return static_cast<double>(values_.size()); }

  GridSignal& operator+=(const GridSignal& other);
  GridSignal& operator-=(const GridSignal& other);
  friend GridSignal operator+(GridSignal a, const GridSignal& b) { return a += b; }
  friend GridSignal operator-(GridSignal a, const GridSignal& b) { return a -= b; }

 private:
  int dim_ = 1;
  int side_ = 0;
  std::vector<double> values_;
};

void require_same_shape(const GridSignal& a, const GridSignal& b);

/// Axis-aligned box [x0, x1) x [y0, y1) in the continuous domain [0,1)^d.
/// One-dimensional boxes use y0 = 0, y1 = 1.
struct Box {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Mean of f and variance of f around that mean, both with respect to the
/// normalized Lebesgue measure on a cell.
struct CellStatistics {
  double mean = 0.0;
  double variance = 0.0;
};

/// A point-evaluable function on [0,1)^dim, optionally carrying an exact
/// per-cell integration hook. When the hook is present, discretization and
/// error evaluation use it instead of quadrature.
class ContinuousField {
 public:
  using Eval = std::function<double(double, double)>;
  using CellHook = std::function<CellStatistics(const Box&)>;

  ContinuousField(int dim, Eval eval, CellHook hook = {});

  int dim() const { return dim_; }
  double operator()(double x, double y = 0.0) const { return eval_(x, y); }
  bool has_cell_hook() const { return static_cast<bool>(hook_); }
  CellStatistics cell(const Box& box) const { return hook_(box); }

 private:
  int dim_;
  Eval eval_;
  CellHook hook_;
};

/// The discretized truth: cell means (delta^n f) plus the within-cell
/// variance of f. The latter is ||f - iota^n delta^n f||^2 restricted to
/// the cell, divided by the cell volume.
struct DiscretizedField {
  GridSignal mean;
  std::vector<double> variance;

  /// ||f - iota^n delta^n f||^2 in L^2([0,1)^d).
  double projection_residual() const;
};

inline constexpr int kDefaultQuadPoints = 8;

Box cell_box(int dim, int n, int x, int y = 0);

DiscretizedField cell_statistics(const ContinuousField& f, int n,
                                 int quad_pts = kDefaultQuadPoints,
                                 Execution execution = Execution::parallel);

/// Local means delta^n f, by midpoint quadrature on a quad_pts^dim subgrid
/// of each cell (or the exact hook when the field has one).
GridSignal discretize(const ContinuousField& f, int n,
                      int quad_pts = kDefaultQuadPoints,
                      Execution execution = Execution::parallel);

/// <iota^n x, iota^n y> in L^2, i.e. the Euclidean product divided by n^d.
double embed_inner(const GridSignal& x, const GridSignal& y);

double embed_norm_sq(const GridSignal& x);

/// ||f - iota^n z||^2 using the per-cell decomposition
/// (z_s - mean_s)^2 + variance_s.
double l2_error_vs_truth(const DiscretizedField& truth, const GridSignal& z);

double l2_error_vs_truth(const ContinuousField& f, const GridSignal& z,
                         int quad_pts = kDefaultQuadPoints);

/// Averages non-overlapping factor^dim blocks. Used to compare delta^{2n}
/// against delta^n.
GridSignal block_average(const GridSignal& z, int factor);

}  // namespace potts
