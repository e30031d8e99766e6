#include "potts/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "potts/errors.hpp"

namespace potts {

NoiseFamily parse_noise_family(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::gaussian;
  if (name == "uniform") return NoiseFamily::uniform;
  if (name == "rademacher") return NoiseFamily::rademacher;
  throw DomainError("unknown noise family '" + name + "'");
}

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::uniform: return "uniform";
    case NoiseFamily::rademacher: return "rademacher";
  }
  return "?";
}

double NoiseSpec::tau() const {
  switch (family) {
    case NoiseFamily::gaussian: return scale;
    case NoiseFamily::uniform: return scale / std::sqrt(3.0);
    case NoiseFamily::rademacher: return scale;
  }
  return scale;
}

double NoiseSpec::beta() const { return 2.0 * tau() * tau(); }

double NoiseSpec::draw(Rng& rng) const {
  switch (family) {
    case NoiseFamily::gaussian: return scale * rng.normal();
    case NoiseFamily::uniform: return rng.uniform(-scale, scale);
    case NoiseFamily::rademacher: return scale * rng.sign();
  }
  return 0.0;
}

GridSignal sample_noise(const NoiseSpec& spec, int dim, int side, std::uint64_t seed) {
  if (!(spec.scale >= 0.0)) throw DomainError("noise scale must be nonnegative");
  GridSignal out = GridSignal::zeros(dim, side);
  Rng rng(seed);
  for (double& v : out.values()) v = spec.draw(rng);
  return out;
}

std::vector<double> draw_samples(const NoiseSpec& spec, std::size_t count, std::uint64_t seed) {
  std::vector<double> out(count);
  Rng rng(seed);
  for (double& v : out) v = spec.draw(rng);
  return out;
}

std::vector<double> random_weights(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> mu(1 + rng.below(64));
  for (double& w : mu) w = rng.normal();
  return mu;
}

namespace {

constexpr long kTailBlock = 8192;

}  // namespace

std::vector<TailCheckReport> check_tail_bounds(const NoiseSpec& spec, std::span<const double> mu,
                                               std::span<const double> thresholds, long trials,
                                               std::uint64_t seed, const TailCheckOptions& options) {
  if (trials < kMinTailTrials) {
    throw DomainError("tail check needs at least " + std::to_string(kMinTailTrials) + " trials");
  }
  if (mu.empty()) throw DomainError("empty weight vector");
  for (double c : thresholds)
    if (!(c > 0.0)) throw DomainError("tail threshold must be positive");
  const double beta = options.beta > 0.0 ? options.beta : spec.beta();
  const double norm_sq = std::inner_product(mu.begin(), mu.end(), mu.begin(), 0.0);

  const std::size_t m = thresholds.size();
  std::vector<long> hits(m, 0);
  const long blocks = (trials + kTailBlock - 1) / kTailBlock;
  const auto run_block = [&](long b, std::vector<long>& local) {
    Rng rng(derive_seed(seed, 0x7a11, static_cast<std::uint64_t>(b)));
    const long end = std::min(trials, (b + 1) * kTailBlock);
    for (long t = b * kTailBlock; t < end; ++t) {
      double s = 0.0;
      for (double w : mu) s += w * spec.draw(rng);
      const double a = std::abs(s);
      for (std::size_t k = 0; k < m; ++k)
        if (a >= thresholds[k]) ++local[k];
    }
  };
  if (options.execution == Execution::parallel) {
#pragma omp parallel
    {
      std::vector<long> local(m, 0);
#pragma omp for schedule(dynamic, 1)
      for (long b = 0; b < blocks; ++b) run_block(b, local);
#pragma omp critical
      for (std::size_t k = 0; k < m; ++k) hits[k] += local[k];
    }
  } else {
    for (long b = 0; b < blocks; ++b) run_block(b, hits);
  }

  std::vector<TailCheckReport> out;
  for (std::size_t k = 0; k < m; ++k) {
    TailCheckReport r;
    r.threshold = thresholds[k];
    r.beta = beta;
    r.weight_norm_sq = norm_sq;
    r.trials = trials;
    r.empirical = static_cast<double>(hits[k]) / static_cast<double>(trials);
    r.bound = norm_sq > 0.0 ? 2.0 * std::exp(-thresholds[k] * thresholds[k] / (beta * norm_sq)) : 0.0;
    // Binomial standard error at the bound, floored at one event so that
    // a bound near zero is not judged on a single unlucky hit.
    const double p = std::clamp(std::max(r.bound, 1.0 / trials), 0.0, 1.0);
    r.standard_error = std::sqrt(p * (1.0 - p) / trials);
    r.pass = r.empirical <= r.bound + 3.0 * r.standard_error;
    out.push_back(r);
  }
  return out;
}

TailCheckReport check_tail_bound(const NoiseSpec& spec, std::span<const double> mu, double c,
                                 long trials, std::uint64_t seed, const TailCheckOptions& options) {
  const double cs[] = {c};
  return check_tail_bounds(spec, mu, cs, trials, seed, options).front();
}

double estimate_tau(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < kMinTauSamples) {
    throw DomainError("tau estimate needs at least " + std::to_string(kMinTauSamples) + " samples");
  }
  double mean = 0.0;
  for (double v : samples) {
    if (!std::isfinite(v)) throw NotSubGaussianError("non-finite sample; mgf diverges");
    mean += v;
  }
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = samples[i] - mean;
    var += c[i] * c[i];
  }
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  if (sd == 0.0) return 0.0;

  std::vector<double> abs_dev(n);
  for (std::size_t i = 0; i < n; ++i) abs_dev[i] = std::abs(c[i]);
  std::nth_element(abs_dev.begin(), abs_dev.begin() + n / 2, abs_dev.end());
  const double robust = abs_dev[n / 2] > 0.0 ? abs_dev[n / 2] / 0.6744897501960817 : sd;
  const double peak = *std::max_element(abs_dev.begin(), abs_dev.end());
  if (peak > 3.0 * std::sqrt(2.0 * std::log(2.0 * n)) * robust) {
    throw NotSubGaussianError("sample maximum " + std::to_string(peak) +
                              " is outside the sub-Gaussian range; mgf diverges");
  }

  constexpr int kGrid = 40;
  double tau = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    const double u = 0.1 * std::pow(50.0, static_cast<double>(g) / (kGrid - 1));
    for (double sign : {1.0, -1.0}) {
      const double t = sign * u / sd;
      double top = -INFINITY;
      for (double v : c) top = std::max(top, t * v);
      double acc = 0.0;
      for (double v : c) acc += std::exp(t * v - top);
      const double log_m = top + std::log(acc) - std::log(static_cast<double>(n));
      if (!std::isfinite(log_m)) throw NotSubGaussianError("empirical mgf diverges");
      if (log_m > 0.0) tau = std::max(tau, std::sqrt(2.0 * log_m) / std::abs(t));
    }
  }
  return tau;
}

double projection_norm_sq(const GridSignal& xi, const std::vector<Interval>& partition, int degree) {
  const MomentTable1D table(xi, degree);
  double total = 0.0;
  for (const Interval& iv : partition) total += table.square_sum(iv.lo, iv.hi) - table.rss(iv.lo, iv.hi);
  return total;
}

PartitionSampler random_interval_sampler(double density) {
  return [density](int n, Rng& rng) {
    std::vector<Interval> out;
    int lo = 1;
    for (int b = 1; b < n; ++b) {
      if (rng.uniform() < density) {
        out.push_back({lo, b});
        lo = b + 1;
      }
    }
    out.push_back({lo, n});
    return out;
  };
}

namespace {

ProjectionCheckReport projection_header(const NoiseSpec& spec, int n, int degree, double C, long trials) {
  if (n < 2) throw DomainError("projection check needs n >= 2");
  if (trials < 1) throw DomainError("projection check needs at least one trial");
  ProjectionCheckReport r;
  r.n = n;
  r.degree = degree;
  r.C = C;
  r.kappa = 2.0;
  r.threshold = (1.0 / r.kappa + 1.0) * spec.beta() * make_poly_space(1, degree).dimension();
  r.below_threshold = C <= r.threshold;
  r.trials = trials;
  return r;
}

}  // namespace

ProjectionCheckReport check_projection_bound(const NoiseSpec& spec, int n, int degree,
                                             const PartitionSampler& sampler, double C, long trials,
                                             std::uint64_t seed) {
  ProjectionCheckReport r = projection_header(spec, n, degree, C, trials);
  const double log_r = std::log(static_cast<double>(count_fragments_1d(n)));
  for (long t = 0; t < trials; ++t) {
    const GridSignal xi = sample_noise(spec, 1, n, derive_seed(seed, 0x9a17, t));
    Rng rng(derive_seed(seed, 0x9a18, t));
    const auto partition = sampler(n, rng);
    const double proj = projection_norm_sq(xi, partition, degree);
    const double bound = C * static_cast<double>(partition.size()) * log_r;
    if (proj > bound) ++r.violations;
    r.max_ratio = std::max(r.max_ratio, proj / bound);
  }
  r.frequency = static_cast<double>(r.violations) / trials;
  return r;
}

ProjectionCheckReport check_projection_bound_worst_case(const NoiseSpec& spec, int n, int degree,
                                                        double C, long trials, std::uint64_t seed) {
  ProjectionCheckReport r = projection_header(spec, n, degree, C, trials);
  r.worst_case = true;
  if (!(C > 0.0)) throw DomainError("projection constant must be positive");
  const double penalty = C * std::log(static_cast<double>(count_fragments_1d(n)));
  Potts1DOptions opts;
  opts.execution = Execution::serial;
  for (long t = 0; t < trials; ++t) {
    const GridSignal xi = sample_noise(spec, 1, n, derive_seed(seed, 0x9a17, t));
    double norm_sq = 0.0;
    for (double v : xi.values()) norm_sq += v * v;
    const Segmentation1D seg = solve_potts_1d(xi, penalty, degree, opts);
    const double excess = norm_sq - seg.energy;
    if (excess > 1e-9 * (1.0 + norm_sq)) ++r.violations;
    const double proj = projection_norm_sq(xi, seg.intervals(), degree);
    r.max_ratio = std::max(r.max_ratio, proj / (penalty * static_cast<double>(seg.size())));
  }
  r.frequency = static_cast<double>(r.violations) / trials;
  return r;
}

SquareMgfCheck check_square_mgf(const NoiseSpec& spec, double t, double C, std::size_t samples,
                                std::uint64_t seed) {
  const double inv_beta = 1.0 / spec.beta();
  if (!(t > 0.0 && t < inv_beta)) throw DomainError("t must lie in (0, 1/beta)");
  Rng rng(seed);
  double acc = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = spec.draw(rng);
    acc += std::exp(t * v * v);
  }
  SquareMgfCheck r;
  r.t = t;
  r.empirical = acc / static_cast<double>(samples);
  r.bound = 1.0 + C * t / (inv_beta - t);
  r.pass = r.empirical <= r.bound;
  return r;
}

}  // namespace potts
