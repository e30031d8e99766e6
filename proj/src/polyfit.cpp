#include "potts/polyfit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "potts/errors.hpp"

namespace potts {

PolySpace make_poly_space(int dim, int degree) {
  if (dim != 1 && dim != 2) throw DimensionError("polynomial space dimension must be 1 or 2");
  const int cap = dim == 1 ? kMaxDegree1D : kMaxDegree2D;
  if (degree < 0 || degree > cap) {
    throw DomainError("degree " + std::to_string(degree) + " unsupported in " +
                      std::to_string(dim) + "D (max " + std::to_string(cap) + ")");
  }
  return PolySpace{dim, degree};
}

double FitResult::evaluate(double x, double y) const {
  const double u = (x - frame.cx) / frame.hx;
  if (space.dim == 1) {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * u + *it;
    return acc;
  }
  if (space.degree == 0) return coefficients[0];
  const double w = (y - frame.cy) / frame.hy;
  return coefficients[0] + coefficients[1] * u + coefficients[2] * w;
}

namespace {

// Minimum-norm solution of G c = b for symmetric positive semidefinite G.
Eigen::VectorXd pseudo_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                             double cutoff, int& rank) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double largest = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(rhs.size());
  rank = 0;
  if (largest <= 0.0) return coef;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > cutoff * largest) {
      const Eigen::VectorXd v = eig.eigenvectors().col(i);
      coef += v * (v.dot(rhs) / lambda[i]);
      ++rank;
    }
  }
  return coef;
}

void basis_row(const PolySpace& space, double u, double w, Eigen::Ref<Eigen::VectorXd> row) {
  if (space.dim == 1) {
    double p = 1.0;
    for (int k = 0; k <= space.degree; ++k) {
      row[k] = p;
      p *= u;
    }
  } else {
    row[0] = 1.0;
    if (space.degree == 1) {
      row[1] = u;
      row[2] = w;
    }
  }
}

LocalFrame bounding_frame(std::span<const Pixel> pixels) {
  int xmin = pixels[0].x, xmax = pixels[0].x, ymin = pixels[0].y, ymax = pixels[0].y;
  for (const Pixel& p : pixels) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  LocalFrame f;
  f.cx = 0.5 * (xmin + xmax);
  f.cy = 0.5 * (ymin + ymax);
  f.hx = xmax > xmin ? 0.5 * (xmax - xmin) : 1.0;
  f.hy = ymax > ymin ? 0.5 * (ymax - ymin) : 1.0;
  return f;
}

}  // namespace

FitResult fit_pixels_in_frame(std::span<const Pixel> pixels, std::span<const double> values,
                              const PolySpace& space, const LocalFrame& frame,
                              const FitOptions& options) {
  if (pixels.empty()) throw DomainError("cannot fit an empty fragment");
  if (pixels.size() != values.size()) throw DimensionError("pixel and value counts differ");
  const int dimension = space.dimension();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dimension, dimension);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dimension);
  Eigen::VectorXd row(dimension);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    basis_row(space, (pixels[i].x - frame.cx) / frame.hx, (pixels[i].y - frame.cy) / frame.hy,
              row);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(row);
    rhs += values[i] * row;
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

  FitResult out;
  out.space = space;
  out.frame = frame;
  out.pixel_count = pixels.size();
  const Eigen::VectorXd coef = pseudo_solve(gram, rhs, options.rank_cutoff, out.rank);
  out.coefficients.assign(coef.data(), coef.data() + coef.size());

  double rss = 0.0;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double r = values[i] - out.evaluate(pixels[i].x, pixels[i].y);
    rss += r * r;
  }
  out.rss = out.pixel_count <= static_cast<std::size_t>(out.rank) ? 0.0 : rss;
  return out;
}

FitResult fit_pixels(std::span<const Pixel> pixels, std::span<const double> values,
                     const PolySpace& space, const FitOptions& options) {
  if (pixels.empty()) throw DomainError("cannot fit an empty fragment");
  return fit_pixels_in_frame(pixels, values, space, bounding_frame(pixels), options);
}

FitResult fit_pixels(std::span<const Pixel> pixels, const GridSignal& y, const PolySpace& space,
                     const FitOptions& options) {
  std::vector<double> values;
  values.reserve(pixels.size());
  for (const Pixel& p : pixels) values.push_back(y.at(p));
  return fit_pixels(pixels, values, space, options);
}

// ---------------------------------------------------------------------------
// Two-dimensional moments

Moments2D& Moments2D::operator+=(const Moments2D& o) {
  count += o.count;
  sx += o.sx;
  sy += o.sy;
  sxx += o.sxx;
  sxy += o.sxy;
  syy += o.syy;
  sv += o.sv;
  sxv += o.sxv;
  syv += o.syv;
  svv += o.svv;
  return *this;
}

Moments2D& Moments2D::operator-=(const Moments2D& o) {
  count -= o.count;
  sx -= o.sx;
  sy -= o.sy;
  sxx -= o.sxx;
  sxy -= o.sxy;
  syy -= o.syy;
  sv -= o.sv;
  sxv -= o.sxv;
  syv -= o.syv;
  svv -= o.svv;
  return *this;
}

namespace {

struct CenteredFit2D {
  double rss = 0.0;
  double slope_x = 0.0;  // per unit of the moment coordinates
  double slope_y = 0.0;
  int rank = 1;
};

// Degree-1 fit after removing the means: the 2x2 covariance of the
// coordinates is diagonalized in closed form and inverted on the
// eigenvalues above the relative cutoff.
CenteredFit2D centered_affine(const Moments2D& m, double cutoff) {
  CenteredFit2D out;
  const double n = m.count;
  const double cvv = m.svv - m.sv * m.sv / n;
  out.rss = cvv;
  if (n < 1.5) {
    out.rss = 0.0;
    return out;
  }
  const double a = m.sxx - m.sx * m.sx / n;
  const double b = m.sxy - m.sx * m.sy / n;
  const double c = m.syy - m.sy * m.sy / n;
  const double gx = m.sxv - m.sx * m.sv / n;
  const double gy = m.syv - m.sy * m.sv / n;

  const double half_trace = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double l1 = half_trace + radius;
  const double l2 = half_trace - radius;
  if (!(l1 > 0.0)) return out;

  // Unit eigenvector for l1; the second one is its rotation by 90 degrees.
  double e1x, e1y;
  if (radius == 0.0) {
    e1x = 1.0;
    e1y = 0.0;
  } else if (a >= c) {
    e1x = l1 - c;
    e1y = b;
  } else {
    e1x = b;
    e1y = l1 - a;
  }
  const double norm = std::hypot(e1x, e1y);
  e1x /= norm;
  e1y /= norm;
  const double e2x = -e1y, e2y = e1x;

  const double p1 = e1x * gx + e1y * gy;
  out.slope_x = e1x * p1 / l1;
  out.slope_y = e1y * p1 / l1;
  out.rss -= p1 * p1 / l1;
  out.rank = 2;
  if (radius == 0.0 || l2 > cutoff * l1) {
    const double p2 = e2x * gx + e2y * gy;
    out.slope_x += e2x * p2 / l2;
    out.slope_y += e2y * p2 / l2;
    out.rss -= p2 * p2 / l2;
    out.rank = 3;
  }
  return out;
}

}  // namespace

double rss_moments_2d(const Moments2D& m, int degree, double rank_cutoff) {
  if (m.count < 0.5) return 0.0;
  if (degree == 0) {
    if (m.count < 1.5) return 0.0;
    return std::max(0.0, m.svv - m.sv * m.sv / m.count);
  }
  const CenteredFit2D fit = centered_affine(m, rank_cutoff);
  if (m.count <= fit.rank) return 0.0;
  return std::max(0.0, fit.rss);
}

FitResult fit_moments_2d(const Moments2D& m, int degree, const LocalFrame& frame,
                         const FitOptions& options) {
  if (m.count < 0.5) throw DomainError("cannot fit an empty fragment");
  FitResult out;
  out.space = make_poly_space(2, degree);
  out.frame = frame;
  out.pixel_count = static_cast<std::size_t>(std::llround(m.count));
  const double mean_v = m.sv / m.count;
  if (degree == 0) {
    out.coefficients = {mean_v};
    out.rank = 1;
    out.rss = out.pixel_count <= 1 ? 0.0 : std::max(0.0, m.svv - m.sv * mean_v);
    return out;
  }
  const CenteredFit2D fit = centered_affine(m, options.rank_cutoff);
  const double mean_x = m.sx / m.count, mean_y = m.sy / m.count;
  // v = mean_v + sx * (x - mean_x) + sy * (y - mean_y), rewritten in the frame.
  const double c0 = mean_v + fit.slope_x * (frame.cx - mean_x) + fit.slope_y * (frame.cy - mean_y);
  out.coefficients = {c0, fit.slope_x * frame.hx, fit.slope_y * frame.hy};
  out.rank = fit.rank;
  out.rss = out.pixel_count <= static_cast<std::size_t>(fit.rank) ? 0.0 : std::max(0.0, fit.rss);
  return out;
}

// ---------------------------------------------------------------------------
// MomentTable1D

MomentTable1D::MomentTable1D(const GridSignal& y, int degree)
    : side_(y.side()), degree_(make_poly_space(1, degree).degree) {
  if (y.dim() != 1) throw DimensionError("MomentTable1D needs a 1D signal");
  prefix_.assign(degree_ + 1, std::vector<long double>(side_ + 1, 0.0L));
  prefix_sq_.assign(side_ + 1, 0.0L);
  for (int x = 1; x <= side_; ++x) {
    const long double v = y[x - 1];
    long double p = 1.0L;
    for (int b = 0; b <= degree_; ++b) {
      prefix_[b][x] = prefix_[b][x - 1] + v * p;
      p *= x;
    }
    prefix_sq_[x] = prefix_sq_[x - 1] + v * v;
  }
  if (degree_ >= 2) {
    power_sums_.assign(side_ + 1, std::vector<double>(degree_ + 1, 0.0));
    for (int len = 1; len <= side_; ++len) {
      const double h = len > 1 ? 0.5 * (len - 1) : 1.0;
      std::vector<double>& sums = power_sums_[len];
      for (int i = 0; i < len; ++i) {
        const double u = len > 1 ? (i - 0.5 * (len - 1)) / h : 0.0;
        const double u2 = u * u;
        double p = 1.0;
        for (int k = 0; k <= degree_; ++k) {
          sums[k] += p;
          p *= u2;
        }
      }
    }
  }
}

double MomentTable1D::weighted_sum(int lo, int hi, int power) const {
  if (lo < 1 || hi > side_ || lo > hi) throw DomainError("interval out of range");
  if (power < 0 || power > degree_) throw DomainError("moment power exceeds table degree");
  return static_cast<double>(prefix_[power][hi] - prefix_[power][lo - 1]);
}

double MomentTable1D::square_sum(int lo, int hi) const {
  if (lo < 1 || hi > side_ || lo > hi) throw DomainError("interval out of range");
  return static_cast<double>(prefix_sq_[hi] - prefix_sq_[lo - 1]);
}

double MomentTable1D::rss(int lo, int hi, const FitOptions& options) const {
  return solve(lo, hi, options, false).rss;
}

FitResult MomentTable1D::fit(int lo, int hi, const FitOptions& options) const {
  return solve(lo, hi, options, true);
}

FitResult MomentTable1D::solve(int lo, int hi, const FitOptions& options,
                               bool want_coefficients) const {
  if (lo < 1 || hi > side_ || lo > hi) throw DomainError("interval out of range");
  const int len = hi - lo + 1;
  FitResult out;
  out.space = PolySpace{1, degree_};
  out.pixel_count = static_cast<std::size_t>(len);
  // Positions are 1-based in the table; the frame is in 0-based pixel units.
  const long double center = 0.5L * (lo + hi);
  const long double half = len > 1 ? 0.5L * (len - 1) : 1.0L;
  out.frame = LocalFrame{static_cast<double>(center - 1), 0.0, static_cast<double>(half), 1.0};

  const long double s0 = prefix_[0][hi] - prefix_[0][lo - 1];
  const long double svv = prefix_sq_[hi] - prefix_sq_[lo - 1];
  const long double mean = s0 / len;
  const long double centered_ss = svv - s0 * mean;

  if (len == 1 || degree_ == 0) {
    out.rank = 1;
    out.rss = len == 1 ? 0.0 : std::max(0.0, static_cast<double>(centered_ss));
    if (want_coefficients) {
      out.coefficients.assign(degree_ + 1, 0.0);
      out.coefficients[0] = static_cast<double>(mean);
    }
    return out;
  }

  if (degree_ == 1) {
    const long double s1 = prefix_[1][hi] - prefix_[1][lo - 1];
    const long double suu = static_cast<long double>(len) * (len + 1) / (3.0L * (len - 1));
    const long double svu = (s1 - center * s0) / half;
    out.rank = 2;
    out.rss = len <= 2 ? 0.0 : std::max(0.0, static_cast<double>(centered_ss - svu * svu / suu));
    if (want_coefficients) {
      out.coefficients = {static_cast<double>(mean), static_cast<double>(svu / suu)};
    }
    return out;
  }

  // General degree: recenter the raw data moments into the local frame and
  // solve the (p+1)x(p+1) normal equations.
  const int dim = degree_ + 1;
  std::vector<long double> raw(dim), local(dim);
  for (int b = 0; b < dim; ++b) raw[b] = prefix_[b][hi] - prefix_[b][lo - 1];
  // raw_b = sum_a C(b,a) c^(b-a) h^a local_a
  for (int b = 0; b < dim; ++b) {
    long double acc = raw[b];
    long double binom = 1.0L;
    for (int a = 0; a < b; ++a) {
      acc -= binom * std::pow(center, static_cast<long double>(b - a)) *
             std::pow(half, static_cast<long double>(a)) * local[a];
      binom = binom * (b - a) / (a + 1);
    }
    local[b] = acc / std::pow(half, static_cast<long double>(b));
  }
  Eigen::MatrixXd gram(dim, dim);
  Eigen::VectorXd rhs(dim);
  const std::vector<double>& sums = power_sums_[len];
  for (int a = 0; a < dim; ++a) {
    rhs[a] = static_cast<double>(local[a]);
    for (int b = 0; b < dim; ++b) gram(a, b) = (a + b) % 2 == 0 ? sums[(a + b) / 2] : 0.0;
  }
  const Eigen::VectorXd coef = pseudo_solve(gram, rhs, options.rank_cutoff, out.rank);
  long double explained = 0.0L;
  for (int a = 0; a < dim; ++a) explained += static_cast<long double>(coef[a]) * local[a];
  out.rss = len <= out.rank ? 0.0 : std::max(0.0, static_cast<double>(svv - explained));
  if (want_coefficients) out.coefficients.assign(coef.data(), coef.data() + dim);
  return out;
}

// ---------------------------------------------------------------------------
// MomentTable2D

MomentTable2D::MomentTable2D(const GridSignal& y) : side_(y.side()) {
  if (y.dim() != 2) throw DimensionError("MomentTable2D needs a 2D signal");
  const std::size_t stride = static_cast<std::size_t>(side_) + 1;
  v_.assign(stride * stride, 0.0L);
  vv_ = xv_ = yv_ = v_;
  for (int yy = 0; yy < side_; ++yy) {
    long double rv = 0, rvv = 0, rxv = 0, ryv = 0;
    for (int xx = 0; xx < side_; ++xx) {
      const long double v = y.at(xx, yy);
      rv += v;
      rvv += v * v;
      rxv += v * xx;
      ryv += v * yy;
      const std::size_t here = (yy + 1) * stride + (xx + 1);
      const std::size_t above = yy * stride + (xx + 1);
      v_[here] = v_[above] + rv;
      vv_[here] = vv_[above] + rvv;
      xv_[here] = xv_[above] + rxv;
      yv_[here] = yv_[above] + ryv;
    }
  }
}

long double MomentTable2D::area(const std::vector<long double>& t, int x0, int y0, int w,
                                int h) const {
  const std::size_t stride = static_cast<std::size_t>(side_) + 1;
  const std::size_t x1 = x0 + w, y1 = y0 + h;
  return t[y1 * stride + x1] - t[y0 * stride + x1] - t[y1 * stride + x0] + t[y0 * stride + x0];
}

Moments2D MomentTable2D::rect(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > side_ || y0 + h > side_) {
    throw DomainError("rectangle out of range");
  }
  Moments2D m;
  const double wd = w, hd = h;
  m.count = wd * hd;
  m.sx = hd * wd * (wd - 1) / 2;
  m.sy = wd * hd * (hd - 1) / 2;
  m.sxx = hd * (wd - 1) * wd * (2 * wd - 1) / 6;
  m.syy = wd * (hd - 1) * hd * (2 * hd - 1) / 6;
  m.sxy = (wd * (wd - 1) / 2) * (hd * (hd - 1) / 2);
  const long double sv = area(v_, x0, y0, w, h);
  m.sv = static_cast<double>(sv);
  m.svv = static_cast<double>(area(vv_, x0, y0, w, h));
  m.sxv = static_cast<double>(area(xv_, x0, y0, w, h) - x0 * sv);
  m.syv = static_cast<double>(area(yv_, x0, y0, w, h) - y0 * sv);
  return m;
}

double MomentTable2D::sum(int x0, int y0, int w, int h) const { return rect(x0, y0, w, h).sv; }

double MomentTable2D::square_sum(int x0, int y0, int w, int h) const {
  return rect(x0, y0, w, h).svv;
}

}  // namespace potts
