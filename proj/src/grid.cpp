#include "potts/grid.hpp"

#include <atomic>
#include <cmath>
#include <string>
#include <utility>

#include "potts/errors.hpp"

namespace potts {

GridSignal::GridSignal(int dim, int side, std::vector<double> values)
    : dim_(dim), side_(side), values_(std::move(values)) {
  if (dim != 1 && dim != 2) throw DimensionError("grid dimension must be 1 or 2");
  if (side < 1) throw DimensionError("grid side must be positive");
  const std::size_t expected = dim == 1 ? static_cast<std::size_t>(side)
                                        : static_cast<std::size_t>(side) * side;
  if (values_.size() != expected) {
    throw DimensionError("grid expects " + std::to_string(expected) +
                         " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("non-finite grid value at index " + std::to_string(i));
    }
  }
}

GridSignal GridSignal::zeros(int dim, int side) { return filled(dim, side, 0.0); }

GridSignal GridSignal::filled(int dim, int side, double value) {
  const std::size_t count = dim == 1 ? static_cast<std::size_t>(side)
                                     : static_cast<std::size_t>(side) * side;
  return GridSignal(dim, side, std::vector<double>(count, value));
}

void require_same_shape(const GridSignal& a, const GridSignal& b) {
  if (a.dim() != b.dim() || a.side() != b.side()) {
    throw DimensionError("grid shapes differ: " + std::to_string(a.dim()) + "D/" +
                         std::to_string(a.side()) + " vs " + std::to_string(b.dim()) +
                         "D/" + std::to_string(b.side()));
  }
}

GridSignal& GridSignal::operator+=(const GridSignal& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridSignal& GridSignal::operator-=(const GridSignal& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ContinuousField::ContinuousField(int dim, Eval eval, CellHook hook)
    : dim_(dim), eval_(std::move(eval)), hook_(std::move(hook)) {
  if (dim != 1 && dim != 2) throw DimensionError("field dimension must be 1 or 2");
}

double DiscretizedField::projection_residual() const {
  double total = 0.0;
  for (double v : variance) total += v;
  return total / mean.cell_count();
}

Box cell_box(int dim, int n, int x, int y) {
  const double h = 1.0 / n;
  if (dim == 1) return Box{x * h, (x + 1) * h, 0.0, 1.0};
  return Box{x * h, (x + 1) * h, y * h, (y + 1) * h};
}

namespace {

std::string cell_name(int dim, int x, int y) {
  return dim == 1 ? "cell " + std::to_string(x)
                  : "cell (" + std::to_string(x) + ", " + std::to_string(y) + ")";
}

CellStatistics quadrature_cell(const ContinuousField& f, const Box& box, int q,
                               bool& finite) {
  const int dim = f.dim();
  const int count_y = dim == 1 ? 1 : q;
  const double hx = (box.x1 - box.x0) / q;
  const double hy = (box.y1 - box.y0) / q;
  thread_local std::vector<double> samples;
  samples.clear();
  for (int j = 0; j < count_y; ++j) {
    const double yy = dim == 1 ? 0.0 : box.y0 + (j + 0.5) * hy;
    for (int i = 0; i < q; ++i) {
      const double v = f(box.x0 + (i + 0.5) * hx, yy);
      if (!std::isfinite(v)) finite = false;
      samples.push_back(v);
    }
  }
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double variance = 0.0;
  for (double v : samples) variance += (v - mean) * (v - mean);
  variance /= static_cast<double>(samples.size());
  return {mean, variance};
}

}  // namespace

DiscretizedField cell_statistics(const ContinuousField& f, int n, int quad_pts,
                                 Execution execution) {
  if (n < 1) throw DomainError("discretization needs n >= 1");
  if (quad_pts < 1) throw DomainError("quadrature needs at least one point per axis");
  const int dim = f.dim();
  const std::size_t cells = dim == 1 ? static_cast<std::size_t>(n)
                                     : static_cast<std::size_t>(n) * n;
  std::vector<double> mean(cells), variance(cells);
  std::atomic<long long> bad_cell{-1};

  auto kernel = [&](long long idx) {
    const int x = static_cast<int>(idx % n);
    const int y = dim == 1 ? 0 : static_cast<int>(idx / n);
    const Box box = cell_box(dim, n, x, y);
    CellStatistics stats;
    bool finite = true;
    if (f.has_cell_hook()) {
      stats = f.cell(box);
      finite = std::isfinite(stats.mean) && std::isfinite(stats.variance);
    } else {
      stats = quadrature_cell(f, box, quad_pts, finite);
    }
    if (!finite) {
      long long expected = -1;
      bad_cell.compare_exchange_strong(expected, idx);
      return;
    }
    mean[idx] = stats.mean;
    variance[idx] = stats.variance < 0.0 ? 0.0 : stats.variance;
  };

  const auto total = static_cast<long long>(cells);
  if (execution == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long long idx = 0; idx < total; ++idx) kernel(idx);
  } else {
    for (long long idx = 0; idx < total; ++idx) kernel(idx);
  }

  if (bad_cell.load() >= 0) {
    const long long idx = bad_cell.load();
    throw EvaluationError("field evaluation is not finite in " +
                          cell_name(dim, static_cast<int>(idx % n),
                                    dim == 1 ? 0 : static_cast<int>(idx / n)));
  }
  return DiscretizedField{GridSignal(dim, n, std::move(mean)), std::move(variance)};
}

GridSignal discretize(const ContinuousField& f, int n, int quad_pts, Execution execution) {
  return cell_statistics(f, n, quad_pts, execution).mean;
}

double embed_inner(const GridSignal& x, const GridSignal& y) {
  require_same_shape(x, y);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += x[i] * y[i];
  return total / x.cell_count();
}

double embed_norm_sq(const GridSignal& x) { return embed_inner(x, x); }

double l2_error_vs_truth(const DiscretizedField& truth, const GridSignal& z) {
  require_same_shape(truth.mean, z);
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = z[i] - truth.mean[i];
    total += d * d + truth.variance[i];
  }
  return total / z.cell_count();
}

double l2_error_vs_truth(const ContinuousField& f, const GridSignal& z, int quad_pts) {
  if (f.dim() != z.dim()) throw DimensionError("field and grid dimensions differ");
  return l2_error_vs_truth(cell_statistics(f, z.side(), quad_pts), z);
}

GridSignal block_average(const GridSignal& z, int factor) {
  if (factor < 1 || z.side() % factor != 0) {
    throw DimensionError("block factor must divide the grid side");
  }
  const int m = z.side() / factor;
  GridSignal out = GridSignal::zeros(z.dim(), m);
  if (z.dim() == 1) {
    for (int x = 0; x < z.side(); ++x) out.at(x / factor) += z.at(x);
    for (double& v : out.values()) v /= factor;
  } else {
    for (int y = 0; y < z.side(); ++y)
      for (int x = 0; x < z.side(); ++x) out.at(x / factor, y / factor) += z.at(x, y);
    for (double& v : out.values()) v /= static_cast<double>(factor) * factor;
  }
  return out;
}

}  // namespace potts
