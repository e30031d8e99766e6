#include <doctest.h>

#include <cmath>
#include <limits>

#include "potts/errors.hpp"
#include "potts/grid.hpp"
#include "potts/rng.hpp"
#include "potts/signals.hpp"

using namespace potts;

namespace {

GridSignal random_signal(int dim, int n, std::uint64_t seed) {
  Rng rng(seed);
  GridSignal s = GridSignal::zeros(dim, n);
  for (double& v : s.values()) v = rng.normal();
  return s;
}

}  // namespace

TEST_CASE("grid signal validates shape and finiteness") {
  CHECK_THROWS_AS(GridSignal(1, 3, {1.0, 2.0}), DimensionError);
  CHECK_THROWS_AS(GridSignal(2, 2, {1.0, 2.0, 3.0}), DimensionError);
  CHECK_THROWS_AS(GridSignal(3, 2, {}), DimensionError);
  CHECK_THROWS_AS(GridSignal(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), DomainError);
  const GridSignal g(2, 2, {1, 2, 3, 4});
  CHECK(g.at(1, 0) == 2);
  CHECK(g.at(0, 1) == 3);
  CHECK(g.index(1, 1) == 3);
}

TEST_CASE("discretize a linear function") {
  const ContinuousField f(1, [](double x, double) { return x; });
  const GridSignal d = discretize(f, 2, 64);
  CHECK(d[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("discretize a constant") {
  const ContinuousField f(2, [](double, double) { return 3.5; });
  const GridSignal d = discretize(f, 5);
  for (double v : d.values()) CHECK(v == doctest::Approx(3.5));
}

TEST_CASE("discretize a flat horizon") {
  const ContinuousField f = make_horizon_field([](double) { return 0.5; }, 0.0, 0.0, 1.0);
  const GridSignal d = discretize(f, 2);
  CHECK(d.at(0, 0) == 0.0);
  CHECK(d.at(1, 0) == 0.0);
  CHECK(d.at(0, 1) == 1.0);
  CHECK(d.at(1, 1) == 1.0);
}

TEST_CASE("quadrature is exact for cell-constant truth at one point per cell") {
  const ContinuousField f(1, [](double x, double) { return std::floor(x * 4) * 0.5; });
  const GridSignal d = discretize(f, 4, 1);
  for (int i = 0; i < 4; ++i) CHECK(d[i] == 0.5 * i);
}

TEST_CASE("non-finite field names the cell") {
  const ContinuousField f(2, [](double x, double y) { return x > 0.5 && y > 0.5 ? INFINITY : 0.0; });
  try {
    discretize(f, 2, 2);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("(1, 1)") != std::string::npos);
  }
}

TEST_CASE("embedded inner product") {
  CHECK(embed_inner(GridSignal::filled(2, 4, 1.0), GridSignal::filled(2, 4, 1.0)) == 1.0);
  GridSignal e = GridSignal::zeros(1, 4);
  e[2] = 1.0;
  CHECK(embed_inner(e, e) == 0.25);
  CHECK(embed_inner(GridSignal(1, 2, {1, 2}), GridSignal(1, 2, {3, 4})) == 5.5);
  CHECK_THROWS_AS(embed_inner(GridSignal::zeros(1, 4), GridSignal::zeros(2, 2)), DimensionError);
  CHECK_THROWS_AS(embed_inner(GridSignal::zeros(1, 4), GridSignal::zeros(1, 5)), DimensionError);
}

TEST_CASE("isometry") {
  for (int dim : {1, 2}) {
    const GridSignal x = random_signal(dim, 16, 40 + dim);
    double euclid = 0.0;
    for (double v : x.values()) euclid += v * v;
    CHECK(embed_norm_sq(x) * x.cell_count() == doctest::Approx(euclid).epsilon(1e-12));
  }
}

TEST_CASE("L2 error against the truth") {
  const ContinuousField lin(1, [](double x, double) { return x; });
  CHECK(l2_error_vs_truth(lin, GridSignal(1, 2, {0.25, 0.75}), 512) ==
        doctest::Approx(1.0 / 48).epsilon(1e-5));
  const ContinuousField one(2, [](double, double) { return 1.0; });
  CHECK(l2_error_vs_truth(one, GridSignal::zeros(2, 4)) == doctest::Approx(1.0));
  const ContinuousField step(1, [](double x, double) { return x < 0.5 ? 1.0 : 2.0; });
  CHECK(l2_error_vs_truth(step, discretize(step, 8)) == doctest::Approx(0.0));
}

TEST_CASE("Pythagoras: projection onto cell-constant functions") {
  const ContinuousField f(2, [](double x, double y) { return std::sin(5 * x) * std::cos(3 * y) + x * y; });
  const int n = 8;
  const DiscretizedField stats = cell_statistics(f, n, 32);
  const GridSignal z = random_signal(2, n, 5);
  const GridSignal diff = stats.mean - z;
  const double lhs = stats.projection_residual() + embed_norm_sq(diff);
  // Direct midpoint evaluation of ||f - iota z||^2 on the same subgrid.
  const int m = 256;
  double direct = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double x = (i + 0.5) / m, y = (j + 0.5) / m;
      const double d = f(x, y) - z.at(i * n / m, j * n / m);
      direct += d * d;
    }
  }
  direct /= static_cast<double>(m) * m;
  CHECK(std::abs(lhs - direct) < 1e-6);
}

TEST_CASE("refinement consistency") {
  const ContinuousField f(2, [](double x, double y) { return std::exp(x - y) + std::sin(7 * x * y); });
  const GridSignal fine = discretize(f, 32, 4);
  const GridSignal coarse = discretize(f, 16, 8);
  const GridSignal avg = block_average(fine, 2);
  for (std::size_t i = 0; i < avg.size(); ++i) CHECK(std::abs(avg[i] - coarse[i]) < 1e-9);
}

TEST_CASE("serial and parallel discretization agree") {
  const ContinuousField f(2, [](double x, double y) { return x * x + y; });
  const GridSignal a = discretize(f, 16, 4, Execution::serial);
  const GridSignal b = discretize(f, 16, 4, Execution::parallel);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
