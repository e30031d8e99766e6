// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "potts/bench.hpp"
#include "potts/digital_line.hpp"
#include "potts/grid.hpp"
#include "potts/noise.hpp"
#include "potts/oracle.hpp"
#include "potts/potts1d.hpp"
#include "potts/rng.hpp"
#include "potts/signals.hpp"
#include "potts/wedgelet.hpp"

using namespace potts;

namespace {

// Tolerances and budgets.
constexpr double kEnergyTol = 1e-9;
constexpr double kIsometryTol = 1e-9;
constexpr double kProjectionTol = 1e-6;
constexpr double kOracleSeconds1D = 10;
constexpr double kOracleSeconds2D = 60;
constexpr double kTailSeconds = 300;
constexpr double kRate1DSeconds = 600;
constexpr double kRate2DSeconds = 1800;
constexpr long kTailTrials = 1000000;
constexpr int kTailWeights = 20;
constexpr double kRate1DTarget = -0.75;
constexpr double kRate1DHalfWidth = 0.3;
constexpr double kRate2DLow = -1.2;
constexpr double kRate2DHigh = -0.4;

// Rate experiment settings.
constexpr double kRate1DSigma = 0.05;
constexpr double kRateSigma = 0.1;
constexpr int kRate2DBudget = 16;
constexpr double kUnderFactor = 100.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::uint64_t master_seed() {
  if (const char* env = std::getenv("POTTS_SEED")) return std::strtoull(env, nullptr, 10);
  return 20261019;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

GridSignal random_grid(Rng& rng, int dim, int side) {
  std::vector<double> v(dim == 1 ? side : side * side);
  for (double& x : v) x = rng.normal();
  return GridSignal(dim, side, std::move(v));
}

Outcome oracle_1d(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  double worst = 0.0;
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 4 + static_cast<int>(rng.below(9));
    const double gamma = std::exp(std::log(0.01) + rng.uniform() * std::log(1000.0));
    const int degree = static_cast<int>(rng.below(2));
    const GridSignal y = random_grid(rng, 1, n);
    const double e_dp = solve_potts_1d(y, gamma, degree).energy;
    const double e_bf = brute_force_potts_1d(y, gamma, degree).energy;
    const double diff = std::abs(e_dp - e_bf);
    worst = std::max(worst, diff);
    if (diff > kEnergyTol) ++bad;
  }
  const double s = seconds_since(t0);
  return {bad == 0 && s < kOracleSeconds1D,
          fmt("100 signals, max |dE| %.2e, mismatches %d, %.2f s (limit %.0f s)", worst, bad, s, kOracleSeconds1D)};
}

Outcome oracle_2d(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  double worst = 0.0;
  int bad = 0;
  for (int k = 0; k < 50; ++k) {
    const double gamma = std::exp(std::log(0.01) + rng.uniform() * std::log(1000.0));
    const GridSignal y = random_grid(rng, 2, 4);
    WedgeletOptions opts;
    opts.degree = 0;
    opts.angle_budget = 0;
    const double e_dp = solve_wedgelet(y, gamma, opts).energy;
    const double e_bf = brute_force_wedgelet(y, gamma, 0, 0).energy;
    const double diff = std::abs(e_dp - e_bf);
    worst = std::max(worst, diff);
    if (diff > kEnergyTol) ++bad;
  }
  const double s = seconds_since(t0);
  return {bad == 0 && s < kOracleSeconds2D,
          fmt("50 images 4x4, max |dE| %.2e, mismatches %d, %.2f s (limit %.0f s)", worst, bad, s, kOracleSeconds2D)};
}

Outcome line_tiling(std::uint64_t seed) {
  Rng rng(seed);
  long violations = 0;
  for (int k = 0; k < 50; ++k) {
    const double theta = -std::numbers::pi / 4 + (1.0 - rng.uniform()) * std::numbers::pi;
    DigitalLineSpec probe{theta, 0};
    const double d = probe.d();
    const auto v = probe.v();
    for (int y = -32; y < 32; ++y) {
      for (int x = -32; x < 32; ++x) {
        // A strip r can only hold the pixel when |<v, s> / d - r| <= 1/2.
        const double center = (v[0] * x + v[1] * y) / d;
        int hits = 0;
        for (std::int64_t r = static_cast<std::int64_t>(std::floor(center)) - 3;
             r <= static_cast<std::int64_t>(std::floor(center)) + 3; ++r) {
          if (DigitalLineSpec{theta, r}.strip_contains({x, y})) ++hits;
        }
        if (hits != 1) ++violations;
      }
    }
  }
  return {violations == 0, fmt("50 angles on a 64x64 window, %ld pixels not covered exactly once", violations)};
}

Outcome fragment_counts() {
  long bad1d = 0;
  for (std::int64_t n = 1; n <= 10000; ++n) {
    // Independent count: intervals with right end i number i.
    std::int64_t expect = 0;
    if (n <= 100) {
      for (std::int64_t i = 1; i <= n; ++i) expect += i;
    } else {
      expect = n * (n + 1) / 2;
    }
    if (count_fragments_1d(n) != expect) ++bad1d;
  }
  const double c8 = static_cast<double>(count_fragments_2d(8, 0)) / std::pow(8.0, 4);
  bool bounded = true;
  std::string ratios = fmt("C(8) = %.4f", c8);
  for (int n : {16, 32, 64}) {
    const double r = static_cast<double>(count_fragments_2d(n, 0)) / std::pow(n, 4.0);
    ratios += fmt(", %d: %.4f", n, r);
    if (r > c8) bounded = false;
  }
  return {bad1d == 0 && bounded, fmt("1D mismatches %ld for n <= 10^4; |R|/n^4 ", bad1d) + ratios};
}

Outcome tail_bounds(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  int checks = 0, failures = 0;
  std::string taus;
  for (const NoiseSpec spec : {NoiseSpec::gaussian(1.0), NoiseSpec::rademacher(1.0), NoiseSpec::uniform(1.0)}) {
    const std::uint64_t fam = derive_seed(seed, static_cast<std::uint64_t>(spec.family));
    const double tau_hat = estimate_tau(draw_samples(spec, 200000, derive_seed(fam, 1)));
    taus += fmt(" %s %.3f", to_string(spec.family).c_str(), tau_hat);
    TailCheckOptions opts;
    opts.beta = 2 * tau_hat * tau_hat;
    for (int w = 0; w < kTailWeights; ++w) {
      const auto mu = random_weights(derive_seed(fam, 2, w));
      double norm = 0.0;
      for (double m : mu) norm += m * m;
      norm = std::sqrt(norm);
      const std::vector<double> cs = {tau_hat * norm, 2 * tau_hat * norm, 3 * tau_hat * norm};
      for (const auto& r : check_tail_bounds(spec, mu, cs, kTailTrials, derive_seed(fam, 3, w), opts)) {
        ++checks;
        if (!r.pass) ++failures;
      }
    }
  }
  const double s = seconds_since(t0);
  return {failures == 0 && s < kTailSeconds,
          fmt("%d checks of 10^6 trials, %d beyond 3 SE, tau_hat:%s, %.0f s (limit %.0f s)", checks, failures,
              taus.c_str(), s, kTailSeconds)};
}

Outcome fundamental(std::uint64_t seed) {
  int runs = 0, failures = 0;
  double worst = -INFINITY;  // max lhs - rhs
  for (int k = 0; k < 100; ++k) {
    const std::uint64_t s = derive_seed(seed, 1, k);
    Rng rng(s);
    const int n = 64 << rng.below(3);
    const int degree = static_cast<int>(rng.below(2));
    const auto f = make_piecewise_sobolev(1.5, static_cast<int>(rng.below(4)), s).field();
    const DiscretizedField truth = cell_statistics(f, n);
    const NoiseSpec spec = NoiseSpec::gaussian(0.05 + 0.3 * rng.uniform());
    const double gamma = GammaSchedule::for_1d(degree, spec.beta(), GammaRule::log_n).gamma(n);
    SolverConfig cfg;
    cfg.degree = degree;
    const auto run = run_estimation(truth, spec, gamma, cfg, derive_seed(s, 2));
    std::vector<Interval> uniform;
    for (int i = 1; i <= n; i += n / 8) uniform.push_back({i, i + n / 8 - 1});
    const std::vector<Segmentation1D> competitors = {
        segmentation_from_intervals(truth.mean, uniform, run.penalty, degree),
        segmentation_from_intervals(truth.mean, run.seg1d->intervals(), run.penalty, degree),
        segmentation_from_intervals(run.data, {{1, n}}, run.penalty, degree)};
    for (const auto& q : competitors) {
      const auto chk = check_fundamental_inequality(run, truth, q);
      ++runs;
      worst = std::max(worst, chk.lhs - chk.rhs);
      if (!chk.holds) ++failures;
    }
  }
  for (int k = 0; k < 20; ++k) {
    const std::uint64_t s = derive_seed(seed, 3, k);
    Rng rng(s);
    const int n = 16 << rng.below(2);
    const int degree = static_cast<int>(rng.below(2));
    const ContinuousField f = k % 2 == 0 ? make_horizon(1.5, 0.0, 1.0, s) : make_generalized_horizon(1.5, s).field();
    const DiscretizedField truth = cell_statistics(f, n);
    const NoiseSpec spec = NoiseSpec::gaussian(0.05 + 0.2 * rng.uniform());
    const double gamma = GammaSchedule::for_2d(degree, spec.beta(), GammaRule::log_n).gamma(n);
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.degree = degree;
    cfg.angle_budget = 8;
    cfg.execution = Execution::parallel;
    const auto run = run_estimation(truth, spec, gamma, cfg, derive_seed(s, 2));
    std::vector<Fragment2D> quads, own;
    for (int y = 0; y < n; y += 4)
      for (int x = 0; x < n; x += 4) quads.push_back(DyadicSquare{2, x, y});
    for (const auto& leaf : run.seg2d->leaves) own.push_back(leaf.fragment);
    const std::vector<WedgeletSegmentation> competitors = {
        segmentation_from_fragments(truth.mean, quads, run.penalty, degree),
        segmentation_from_fragments(truth.mean, own, run.penalty, degree),
        segmentation_from_fragments(run.data, {DyadicSquare{log2_exact(n), 0, 0}}, run.penalty, degree)};
    for (const auto& q : competitors) {
      const auto chk = check_fundamental_inequality(run, truth, q);
      ++runs;
      worst = std::max(worst, chk.lhs - chk.rhs);
      if (!chk.holds) ++failures;
    }
  }
  return {failures == 0, fmt("%d comparisons (100 1D + 20 2D runs, 3 competitors), %d failures, max lhs - rhs %.3e",
                             runs, failures, worst)};
}

bool strictly_decreasing(const RateReport& r) {
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    if (!(r.rows[i].error < r.rows[i - 1].error)) return false;
  return true;
}

std::string rows_text(const RateReport& r) {
  std::string out;
  for (const auto& row : r.rows) out += fmt(" %d:%.3e/%.1f", row.n, row.error, row.segments);
  return out;
}

Outcome rate_1d(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RateConfig cfg;
  cfg.truth = TruthClass::sobolev1d;
  cfg.alpha = 1.5;
  cfg.jumps = 0;
  cfg.ns = {256, 512, 1024, 2048, 4096};
  cfg.trials = 10;
  cfg.solver.degree = 1;
  cfg.noise = NoiseSpec::gaussian(kRate1DSigma);
  cfg.schedule = GammaSchedule::for_1d(1, cfg.noise.beta(), GammaRule::log_n);
  cfg.seed = derive_seed(seed, 7);
  const RateReport r = run_rate_experiment(cfg);
  const double s = seconds_since(t0);
  const bool in_bracket = std::abs(r.slope - kRate1DTarget) <= kRate1DHalfWidth;
  const bool dec = strictly_decreasing(r);
  return {in_bracket && dec && s < kRate1DSeconds,
          fmt("slope %.3f (target %.2f +- %.1f), decreasing %s, n:error/segments%s, %.0f s", r.slope, kRate1DTarget,
              kRate1DHalfWidth, dec ? "yes" : "no", rows_text(r).c_str(), s)};
}

Outcome rate_2d(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RateConfig cfg;
  cfg.truth = TruthClass::horizon;
  cfg.alpha = 1.5;
  cfg.ns = {32, 64, 128, 256};
  cfg.trials = 10;
  cfg.solver.dim = 2;
  cfg.solver.degree = 1;
  cfg.solver.angle_budget = kRate2DBudget;
  cfg.noise = NoiseSpec::gaussian(kRateSigma);
  cfg.schedule = GammaSchedule::for_2d(1, cfg.noise.beta(), GammaRule::log_n);
  cfg.seed = derive_seed(seed, 8);
  const RateReport r = run_rate_experiment(cfg);
  const double s = seconds_since(t0);
  const bool in_bracket = r.slope >= kRate2DLow && r.slope <= kRate2DHigh;
  const bool dec = strictly_decreasing(r);
  return {in_bracket && dec && s < kRate2DSeconds,
          fmt("slope %.3f (bracket [%.1f, %.1f]), decreasing %s, n:error/segments%s, %.0f s", r.slope, kRate2DLow,
              kRate2DHigh, dec ? "yes" : "no", rows_text(r).c_str(), s)};
}

Outcome penalization(std::uint64_t seed) {
  const NoiseSpec spec = NoiseSpec::gaussian(kRateSigma);
  const GammaSchedule sched = GammaSchedule::for_1d(0, spec.beta(), GammaRule::log_n);
  const std::vector<int> ns = {64, 128, 256, 512, 1024};
  std::vector<double> conforming, under;
  for (int n : ns) {
    double a = 0.0, b = 0.0;
    for (int k = 0; k < 10; ++k) {
      const GridSignal xi = sample_noise(spec, 1, n, derive_seed(seed, n, k));
      a += static_cast<double>(solve_potts_1d(xi, sched.penalty(n), 0).size()) / 10;
      b += static_cast<double>(solve_potts_1d(xi, sched.penalty(n) / kUnderFactor, 0).size()) / 10;
    }
    conforming.push_back(a);
    under.push_back(b);
  }
  // Bounded: the largest mean stays within twice the smallest, plus one.
  double lo = INFINITY, hi = 0.0;
  for (double a : conforming) {
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  const bool bounded = hi <= 2 * lo + 1;
  bool growing = true;
  for (std::size_t i = 1; i < under.size(); ++i)
    if (!(under[i] > under[i - 1])) growing = false;
  std::string text = "mean #segments n:conforming/under";
  for (std::size_t i = 0; i < ns.size(); ++i) text += fmt(" %d:%.1f/%.1f", ns[i], conforming[i], under[i]);
  return {bounded && growing, text};
}

Outcome identities(std::uint64_t seed) {
  Rng rng(seed);
  double iso = 0.0, proj = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int dim = 1 + k % 2;
    const int n = dim == 1 ? 8 + static_cast<int>(rng.below(57)) : 4 + static_cast<int>(rng.below(13));
    const GridSignal x = random_grid(rng, dim, n), y = random_grid(rng, dim, n);
    // <iota x, iota y> by midpoint quadrature on a 3x refinement, exact for cell-constant functions.
    const int m = 3 * n;
    double integral = 0.0;
    for (int j = 0; j < (dim == 1 ? 1 : m); ++j)
      for (int i = 0; i < m; ++i) {
        const double a = dim == 1 ? x.at(i / 3) : x.at(i / 3, j / 3);
        const double b = dim == 1 ? y.at(i / 3) : y.at(i / 3, j / 3);
        integral += a * b;
      }
    integral /= dim == 1 ? m : static_cast<double>(m) * m;
    iso = std::max(iso, std::abs(integral - embed_inner(x, y)));
    // delta iota = identity.
    const ContinuousField embedded(dim, [&x, n, dim](double u, double v) {
      const int i = std::min(n - 1, static_cast<int>(u * n));
      return dim == 1 ? x.at(i) : x.at(i, std::min(n - 1, static_cast<int>(v * n)));
    });
    const GridSignal back = discretize(embedded, n, 4);
    for (std::size_t i = 0; i < x.size(); ++i) iso = std::max(iso, std::abs(back[i] - x[i]));

    // ||f - iota z||^2 = ||f - iota delta f||^2 + ||iota delta f - iota z||^2 with the same quadrature.
    const auto h = make_hoelder(1.5, derive_seed(seed, k));
    const ContinuousField f(dim, [h](double u, double v) { return h(u) * (1 + v); });
    const int q = 16;
    const DiscretizedField df = cell_statistics(f, n, q);
    double direct = 0.0;
    for (int cy = 0; cy < (dim == 1 ? 1 : n); ++cy)
      for (int cx = 0; cx < n; ++cx) {
        const double z = dim == 1 ? y.at(cx) : y.at(cx, cy);
        double cell = 0.0;
        for (int b = 0; b < (dim == 1 ? 1 : q); ++b)
          for (int a = 0; a < q; ++a) {
            const double u = (cx + (a + 0.5) / q) / n;
            const double v = dim == 1 ? 0.0 : (cy + (b + 0.5) / q) / n;
            cell += std::pow(f(u, v) - z, 2);
          }
        direct += cell / (dim == 1 ? q : q * q);
      }
    direct /= y.cell_count();
    const double split = df.projection_residual() + embed_norm_sq(df.mean - y);
    proj = std::max(proj, std::abs(direct - split) / (1 + direct));
    proj = std::max(proj, std::abs(l2_error_vs_truth(df, y) - split) / (1 + direct));

    // ||y||^2 = ||pi_P y||^2 + rss for a random interval partition.
    if (dim == 1) {
      std::vector<Interval> parts;
      for (int lo = 1; lo <= n;) {
        const int hi = std::min(n, lo + static_cast<int>(rng.below(6)));
        parts.push_back({lo, hi});
        lo = hi + 1;
      }
      const int degree = static_cast<int>(rng.below(3));
      const auto seg = segmentation_from_intervals(x, parts, 0.0, degree);
      double rss = 0.0, norm = 0.0, fitted = 0.0;
      for (const auto& s : seg.segments) rss += s.fit.rss;
      for (double v : x.values()) norm += v * v;
      const GridSignal rec = seg.reconstruct();
      for (double v : rec.values()) fitted += v * v;
      proj = std::max(proj, std::abs(norm - projection_norm_sq(x, parts, degree) - rss) / (1 + norm));
      proj = std::max(proj, std::abs(fitted - projection_norm_sq(x, parts, degree)) / (1 + norm));
    }
  }
  return {iso <= kIsometryTol && proj <= kProjectionTol,
          fmt("isometry max error %.2e (tol %.0e), projection max relative error %.2e (tol %.0e)", iso, kIsometryTol,
              proj, kProjectionTol)};
}

}  // namespace

int main() {
  const std::uint64_t seed = master_seed();
  std::printf("master seed %llu\n", static_cast<unsigned long long>(seed));
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1D oracle equivalence", [&] { return oracle_1d(derive_seed(seed, 1)); }},
      {"2D oracle equivalence", [&] { return oracle_2d(derive_seed(seed, 2)); }},
      {"digital line tiling", [&] { return line_tiling(derive_seed(seed, 3)); }},
      {"fragment counts", [] { return fragment_counts(); }},
      {"sub-Gaussian tail bound", [&] { return tail_bounds(derive_seed(seed, 5)); }},
      {"oracle inequality", [&] { return fundamental(derive_seed(seed, 6)); }},
      {"1D rate", [&] { return rate_1d(seed); }},
      {"2D rate", [&] { return rate_2d(seed); }},
      {"over/under penalization", [&] { return penalization(derive_seed(seed, 9)); }},
      {"isometry and projection identities", [&] { return identities(derive_seed(seed, 10)); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
