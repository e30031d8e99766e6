#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potts/execution.hpp"
#include "potts/grid.hpp"
#include "potts/noise.hpp"
#include "potts/potts1d.hpp"
#include "potts/wedgelet.hpp"

namespace potts {

enum class GammaRule {
  explicit_list,  // gamma_n read from `values`
  log_fragments,  // c ln|R^n| / |S^n|
  log_n,          // c ln n / |S^n|
};

/// Normalized penalty sequence gamma_n. The solvers take the absolute
/// penalty gamma_n |S^n|.
struct GammaSchedule {
  GammaRule rule = GammaRule::log_n;
  double c = 0.0;
  std::vector<std::pair<int, double>> values;
  int dim = 1;
  double kappa = 2.0;
  int D = 1;
  double beta = 2.0;

  /// beta D (kappa + 1) / kappa.
  double threshold_constant() const;
  /// ln|R^n|: exact n (n + 1) / 2 in 1D, kappa ln n in 2D.
  double log_fragments(int n) const;
  double cells(int n) const;
  double gamma(int n) const;
  double penalty(int n) const { return gamma(n) * cells(n); }
  /// gamma_n <= threshold_constant ln|R^n| / |S^n|.
  bool below_threshold(int n) const;
  std::string describe() const;

  /// c = 0 selects the default 2 beta D (kappa + 1) / kappa.
  static GammaSchedule for_1d(int degree, double beta, GammaRule rule, double c = 0.0);
  static GammaSchedule for_2d(int degree, double beta, GammaRule rule, double c = 0.0);
};

struct SolverConfig {
  int dim = 1;
  int degree = 0;
  int angle_budget = 0;  // 2D only
  Execution execution = Execution::serial;
};

struct EstimationResult {
  int n = 0;
  double gamma = 0.0;    // normalized
  double penalty = 0.0;  // gamma |S^n|
  std::uint64_t seed = 0;
  GridSignal noise;
  GridSignal data;
  GridSignal estimate;
  std::optional<Segmentation1D> seg1d;
  std::optional<WedgeletSegmentation> seg2d;
  double error = 0.0;  // ||iota f_hat - f||^2
  std::size_t segments = 0;
  double wall_ms = 0.0;
};

/// y = delta f + xi with xi drawn from `seed`; f_hat the exact minimizer of
/// the normalized functional with penalty gamma.
EstimationResult run_estimation(const DiscretizedField& truth, const NoiseSpec& spec, double gamma,
                                const SolverConfig& solver, std::uint64_t seed);

EstimationResult run_estimation(const ContinuousField& truth, int n, const NoiseSpec& spec,
                                double gamma, const SolverConfig& solver, std::uint64_t seed,
                                int quad_pts = kDefaultQuadPoints);

/// Norm of the projection of xi onto the segmentation's piecewise space.
double projection_norm_sq(const GridSignal& xi, const Segmentation1D& seg, int degree);
double projection_norm_sq(const GridSignal& xi, const WedgeletSegmentation& seg);

struct FundamentalCheck {
  double lhs = 0.0;               // ||iota f_hat - f||^2
  double penalty_term = 0.0;      // 2 gamma (|Q| - |P_hat|)
  double approximation = 0.0;     // 3 ||iota h - f||^2
  double noise_term = 0.0;        // 16 / n^d (||pi_P_hat xi||^2 + ||pi_Q xi||^2)
  double rhs = 0.0;
  bool holds = false;             // lhs <= rhs + 1e-8
};

inline constexpr double kFundamentalTolerance = 1e-8;

/// Checks the oracle inequality of the estimator against a competitor
/// segmentation (Q, h), h being the competitor's stored fit.
FundamentalCheck check_fundamental_inequality(const EstimationResult& run,
                                              const DiscretizedField& truth,
                                              const Segmentation1D& competitor);
FundamentalCheck check_fundamental_inequality(const EstimationResult& run,
                                              const DiscretizedField& truth,
                                              const WedgeletSegmentation& competitor);

enum class TruthClass { sobolev1d, horizon, genhorizon };

TruthClass parse_truth_class(const std::string& name);
std::string to_string(TruthClass cls);

struct RateConfig {
  TruthClass truth = TruthClass::sobolev1d;
  double alpha = 1.5;
  int jumps = 0;  // sobolev1d only
  std::vector<int> ns;
  int trials = 10;
  GammaSchedule schedule;
  SolverConfig solver;
  NoiseSpec noise = NoiseSpec::gaussian(0.1);
  std::uint64_t seed = 1;
  int quad_pts = kDefaultQuadPoints;
  /// Trials of one n run on OpenMP threads.
  Execution execution = Execution::parallel;
};

struct RateRow {
  int n = 0;
  double gamma = 0.0;
  double error = 0.0;  // mean over trials
  double error_sd = 0.0;
  double segments = 0.0;  // mean over trials
  double wall_ms = 0.0;   // total for the n
  std::uint64_t seed = 0; // seed of trial 0; trial t uses derive_seed(seed, n, t)
  bool below_threshold = false;
  std::vector<double> trial_errors;
  std::vector<std::size_t> trial_segments;
};

struct RateReport {
  TruthClass truth = TruthClass::sobolev1d;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  int trials = 0;
  int quad_pts = 0;
  int degree = 0;
  int angle_budget = 0;
  std::string schedule;
  NoiseSpec noise;
  std::vector<RateRow> rows;
  double slope = 0.0;
  /// Theoretical exponent and the bracket it is compared in.
  double target = 0.0;
  double target_low = 0.0;
  double target_high = 0.0;

  bool errors_decreasing() const;
};

/// The ground truth of an experiment, fixed by (class, alpha, seed).
ContinuousField make_truth(TruthClass cls, double alpha, int jumps, std::uint64_t seed);

/// Throws RefusalError for fewer than four sizes.
RateReport run_rate_experiment(const RateConfig& config);

/// Least-squares slope of ln(error) on ln(n). Throws DomainError on a
/// non-positive entry and on fewer than two rows.
double fit_loglog_slope(std::span<const double> ns, std::span<const double> errors);

}  // namespace potts
