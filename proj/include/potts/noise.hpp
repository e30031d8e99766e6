#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "potts/execution.hpp"
#include "potts/grid.hpp"
#include "potts/potts1d.hpp"
#include "potts/rng.hpp"

namespace potts {

enum class NoiseFamily { gaussian, uniform, rademacher };

NoiseFamily parse_noise_family(const std::string& name);
std::string to_string(NoiseFamily family);

/// i.i.d. centered noise. `scale` is sigma for gaussian, the half-width a
/// for uniform on [-a, a], and the magnitude of the two atoms for
/// rademacher.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::gaussian;
  double scale = 1.0;

  static NoiseSpec gaussian(double sigma) { return {NoiseFamily::gaussian, sigma}; }
  static NoiseSpec uniform(double a) { return {NoiseFamily::uniform, a}; }
  static NoiseSpec rademacher(double scale = 1.0) { return {NoiseFamily::rademacher, scale}; }

  /// Sub-Gaussian standard: sigma, a / sqrt(3), scale.
  double tau() const;
  /// 2 tau^2.
  double beta() const;
  double draw(Rng& rng) const;
};

/// Throws DomainError on a negative scale.
GridSignal sample_noise(const NoiseSpec& spec, int dim, int side, std::uint64_t seed);

inline constexpr long kMinTailTrials = 100000;

struct TailCheckReport {
  double threshold = 0.0;   // c
  double beta = 0.0;
  double weight_norm_sq = 0.0;
  long trials = 0;
  double empirical = 0.0;   // fraction with |sum mu_s xi_s| >= c
  double bound = 0.0;       // 2 exp(-c^2 / (beta |mu|^2))
  double standard_error = 0.0;
  bool pass = false;        // empirical <= bound + 3 standard errors
};

struct TailCheckOptions {
  /// Non-positive means spec.beta().
  double beta = 0.0;
  Execution execution = Execution::parallel;
};

/// Monte Carlo check of P(|sum mu_s xi_s| >= c) <= 2 exp(-c^2 / (beta |mu|^2)).
/// All thresholds share one set of trials. Trials are drawn in blocks with
/// seeds derived from `seed`, so the result does not depend on the thread
/// count. Throws DomainError for fewer than kMinTailTrials trials or c <= 0.
std::vector<TailCheckReport> check_tail_bounds(const NoiseSpec& spec, std::span<const double> mu,
                                               std::span<const double> thresholds, long trials,
                                               std::uint64_t seed, const TailCheckOptions& options = {});

TailCheckReport check_tail_bound(const NoiseSpec& spec, std::span<const double> mu, double c,
                                 long trials, std::uint64_t seed, const TailCheckOptions& options = {});

inline constexpr std::size_t kMinTauSamples = 10000;

/// Grid proxy for the sub-Gaussian standard: max over t of
/// sqrt(2 ln M(t)) / |t| with M the empirical mgf of the centered samples.
/// The grid has 40 log-spaced points per sign on [0.1, 5] in units of the
/// sample standard deviation; ln M is evaluated by log-sum-exp.
/// Throws NotSubGaussianError on non-finite samples or when the sample
/// maximum is far beyond the sub-Gaussian range (more than 3 sqrt(2 ln 2N)
/// robust scales), and DomainError for fewer than 10^4 samples.
double estimate_tau(std::span<const double> samples);

std::vector<double> draw_samples(const NoiseSpec& spec, std::size_t count, std::uint64_t seed);

/// Seeded weight vector of length 1..64 with standard normal entries.
std::vector<double> random_weights(std::uint64_t seed);

/// ||pi_P xi||^2 = sum over pieces of ||xi_P||^2 - rss_P(xi).
double projection_norm_sq(const GridSignal& xi, const std::vector<Interval>& partition, int degree);

using PartitionSampler = std::function<std::vector<Interval>(int n, Rng& rng)>;

/// Each break point is present independently with probability `density`.
PartitionSampler random_interval_sampler(double density);

struct ProjectionCheckReport {
  int n = 0;
  int degree = 0;
  double C = 0.0;
  double kappa = 2.0;
  double threshold = 0.0;        // (1 / kappa + 1) beta D
  bool below_threshold = false;  // C <= threshold: bound not guaranteed
  bool worst_case = false;
  long trials = 0;
  long violations = 0;
  double frequency = 0.0;
  double max_ratio = 0.0;  // max ||pi_P xi||^2 / (C |P| ln |R|)
};

/// 1D projection bound ||pi_P xi||^2 <= C |P| ln(n (n + 1) / 2) for P drawn
/// by the sampler.
ProjectionCheckReport check_projection_bound(const NoiseSpec& spec, int n, int degree,
                                             const PartitionSampler& sampler, double C, long trials,
                                             std::uint64_t seed);

/// Same bound, taken over every interval partition at once: the largest
/// ||pi_P xi||^2 - C ln|R| |P| equals ||xi||^2 minus the minimal Potts energy
/// with penalty C ln|R|, so one exact solve per trial decides it.
ProjectionCheckReport check_projection_bound_worst_case(const NoiseSpec& spec, int n, int degree,
                                                        double C, long trials, std::uint64_t seed);

struct SquareMgfCheck {
  double t = 0.0;
  double empirical = 0.0;  // mean of exp(t xi^2)
  double bound = 0.0;      // 1 + C t / (1 / beta - t)
  bool pass = false;
};

/// Spot check of E exp(t xi^2) <= 1 + C t / (1/beta - t) for t < 1/beta.
SquareMgfCheck check_square_mgf(const NoiseSpec& spec, double t, double C, std::size_t samples,
                                std::uint64_t seed);

}  // namespace potts
