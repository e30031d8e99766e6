#include "potts/bench.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "potts/errors.hpp"
#include "potts/rng.hpp"
#include "potts/signals.hpp"

namespace potts {

double GammaSchedule::threshold_constant() const { return beta * D * (kappa + 1.0) / kappa; }

double GammaSchedule::log_fragments(int n) const {
  if (dim == 1) return std::log(static_cast<double>(count_fragments_1d(n)));
  return kappa * std::log(static_cast<double>(n));
}

double GammaSchedule::cells(int n) const {
  return dim == 1 ? static_cast<double>(n) : static_cast<double>(n) * n;
}

double GammaSchedule::gamma(int n) const {
  switch (rule) {
    case GammaRule::explicit_list:
      for (const auto& [m, g] : values)
        if (m == n) return g;
      throw DomainError("no explicit gamma for n = " + std::to_string(n));
    case GammaRule::log_fragments: return c * log_fragments(n) / cells(n);
    case GammaRule::log_n: return c * std::log(static_cast<double>(n)) / cells(n);
  }
  return 0.0;
}

bool GammaSchedule::below_threshold(int n) const {
  return gamma(n) <= threshold_constant() * log_fragments(n) / cells(n);
}

std::string GammaSchedule::describe() const {
  std::ostringstream os;
  switch (rule) {
    case GammaRule::explicit_list: os << "explicit"; break;
    case GammaRule::log_fragments: os << c << " ln|R^n| / |S^n|"; break;
    case GammaRule::log_n: os << c << " ln n / |S^n|"; break;
  }
  os << " (threshold constant " << threshold_constant() << ", kappa " << kappa << ", D " << D
     << ", beta " << beta << ")";
  return os.str();
}

GammaSchedule GammaSchedule::for_1d(int degree, double beta, GammaRule rule, double c) {
  GammaSchedule s;
  s.rule = rule;
  s.dim = 1;
  s.kappa = 2.0;
  s.D = make_poly_space(1, degree).dimension();
  s.beta = beta;
  s.c = c > 0.0 ? c : 2.0 * s.threshold_constant();
  return s;
}

GammaSchedule GammaSchedule::for_2d(int degree, double beta, GammaRule rule, double c) {
  GammaSchedule s;
  s.rule = rule;
  s.dim = 2;
  s.kappa = 4.0;
  s.D = make_poly_space(2, degree).dimension();
  s.beta = beta;
  s.c = c > 0.0 ? c : 2.0 * s.threshold_constant();
  return s;
}

EstimationResult run_estimation(const DiscretizedField& truth, const NoiseSpec& spec, double gamma,
                                const SolverConfig& solver, std::uint64_t seed) {
  const int n = truth.mean.side();
  if (truth.mean.dim() != solver.dim) throw DimensionError("solver and truth dimensions differ");
  const auto start = std::chrono::steady_clock::now();
  EstimationResult r;
  r.n = n;
  r.gamma = gamma;
  r.penalty = gamma * truth.mean.cell_count();
  r.seed = seed;
  r.noise = sample_noise(spec, solver.dim, n, seed);
  r.data = truth.mean + r.noise;
  if (solver.dim == 1) {
    Potts1DOptions opts;
    opts.execution = solver.execution;
    r.seg1d = solve_potts_1d(r.data, r.penalty, solver.degree, opts);
    r.estimate = r.seg1d->reconstruct();
    r.segments = r.seg1d->size();
  } else {
    WedgeletOptions opts;
    opts.degree = solver.degree;
    opts.angle_budget = solver.angle_budget;
    opts.execution = solver.execution;
    r.seg2d = solve_wedgelet(r.data, r.penalty, opts);
    r.estimate = r.seg2d->reconstruct();
    r.segments = r.seg2d->size();
  }
  r.error = l2_error_vs_truth(truth, r.estimate);
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

EstimationResult run_estimation(const ContinuousField& truth, int n, const NoiseSpec& spec,
                                double gamma, const SolverConfig& solver, std::uint64_t seed,
                                int quad_pts) {
  return run_estimation(cell_statistics(truth, n, quad_pts), spec, gamma, solver, seed);
}

double projection_norm_sq(const GridSignal& xi, const Segmentation1D& seg, int degree) {
  return projection_norm_sq(xi, seg.intervals(), degree);
}

double projection_norm_sq(const GridSignal& xi, const WedgeletSegmentation& seg) {
  const PolySpace space = make_poly_space(2, seg.degree);
  double total = 0.0;
  for (const Leaf2D& leaf : seg.leaves) {
    const auto px = fragment_pixels(leaf.fragment);
    double sq = 0.0;
    for (const Pixel& p : px) sq += xi.at(p.x, p.y) * xi.at(p.x, p.y);
    total += sq - fit_pixels(px, xi, space).rss;
  }
  return total;
}

namespace {

FundamentalCheck assemble(const EstimationResult& run, const DiscretizedField& truth,
                          std::size_t estimate_size, double estimate_proj, std::size_t competitor_size,
                          const GridSignal& competitor_h, double competitor_proj) {
  FundamentalCheck c;
  c.lhs = run.error;
  c.penalty_term = 2.0 * run.gamma *
                   (static_cast<double>(competitor_size) - static_cast<double>(estimate_size));
  c.approximation = 3.0 * l2_error_vs_truth(truth, competitor_h);
  c.noise_term = 16.0 / truth.mean.cell_count() * (estimate_proj + competitor_proj);
  c.rhs = c.penalty_term + c.approximation + c.noise_term;
  c.holds = c.lhs <= c.rhs + kFundamentalTolerance;
  return c;
}

}  // namespace

FundamentalCheck check_fundamental_inequality(const EstimationResult& run,
                                              const DiscretizedField& truth,
                                              const Segmentation1D& competitor) {
  if (!run.seg1d) throw DimensionError("run holds no 1D segmentation");
  const int degree = run.seg1d->segments.front().fit.space.degree;
  return assemble(run, truth, run.seg1d->size(), projection_norm_sq(run.noise, *run.seg1d, degree),
                  competitor.size(), competitor.reconstruct(),
                  projection_norm_sq(run.noise, competitor, degree));
}

FundamentalCheck check_fundamental_inequality(const EstimationResult& run,
                                              const DiscretizedField& truth,
                                              const WedgeletSegmentation& competitor) {
  if (!run.seg2d) throw DimensionError("run holds no 2D segmentation");
  return assemble(run, truth, run.seg2d->size(), projection_norm_sq(run.noise, *run.seg2d),
                  competitor.size(), competitor.reconstruct(),
                  projection_norm_sq(run.noise, competitor));
}

TruthClass parse_truth_class(const std::string& name) {
  if (name == "sobolev1d") return TruthClass::sobolev1d;
  if (name == "horizon") return TruthClass::horizon;
  if (name == "genhorizon") return TruthClass::genhorizon;
  throw DomainError("unknown truth class '" + name + "'");
}

std::string to_string(TruthClass cls) {
  switch (cls) {
    case TruthClass::sobolev1d: return "sobolev1d";
    case TruthClass::horizon: return "horizon";
    case TruthClass::genhorizon: return "genhorizon";
  }
  return "?";
}

bool RateReport::errors_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].error < rows[i - 1].error)) return false;
  return !rows.empty();
}

ContinuousField make_truth(TruthClass cls, double alpha, int jumps, std::uint64_t seed) {
  switch (cls) {
    case TruthClass::sobolev1d: return make_piecewise_sobolev(alpha, jumps, seed).field();
    case TruthClass::horizon: return make_horizon(alpha, 0.0, 1.0, seed);
    case TruthClass::genhorizon: return make_generalized_horizon(alpha, seed).field();
  }
  throw DomainError("unknown truth class");
}

RateReport run_rate_experiment(const RateConfig& config) {
  if (config.ns.size() < 4) throw RefusalError("rate fit needs at least four sizes");
  if (config.trials < 1) throw DomainError("rate experiment needs at least one trial");
  const int dim = config.truth == TruthClass::sobolev1d ? 1 : 2;
  if (config.solver.dim != dim) throw DimensionError("solver dimension does not match the truth class");

  RateReport report;
  report.truth = config.truth;
  report.alpha = config.alpha;
  report.seed = config.seed;
  report.trials = config.trials;
  report.quad_pts = config.quad_pts;
  report.degree = config.solver.degree;
  report.angle_budget = config.solver.angle_budget;
  report.schedule = config.schedule.describe();
  report.noise = config.noise;
  const double a = config.alpha;
  if (dim == 1) {
    report.target = -2.0 * a / (2.0 * a + 1.0);
    report.target_low = report.target - 0.3;
    report.target_high = report.target + 0.3;
  } else {
    report.target = -a / (a + 1.0);
    report.target_low = -2.0 * a / (a + 1.0);
    report.target_high = report.target;
  }

  const ContinuousField truth = make_truth(config.truth, config.alpha, config.jumps, config.seed);
  SolverConfig solver = config.solver;
  solver.execution = Execution::serial;
  for (int n : config.ns) {
    const auto start = std::chrono::steady_clock::now();
    const DiscretizedField stats = cell_statistics(truth, n, config.quad_pts, config.execution);
    const double gamma = config.schedule.gamma(n);
    RateRow row;
    row.n = n;
    row.gamma = gamma;
    row.seed = derive_seed(config.seed, static_cast<std::uint64_t>(n), 0);
    row.below_threshold = config.schedule.below_threshold(n);
    row.trial_errors.assign(config.trials, 0.0);
    row.trial_segments.assign(config.trials, 0);
    const auto trial = [&](int t) {
      const EstimationResult r = run_estimation(
          stats, config.noise, gamma, solver,
          derive_seed(config.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)));
      row.trial_errors[t] = r.error;
      row.trial_segments[t] = r.segments;
    };
    if (config.execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
      for (int t = 0; t < config.trials; ++t) trial(t);
    } else {
      for (int t = 0; t < config.trials; ++t) trial(t);
    }
    const double k = config.trials;
    row.error = std::accumulate(row.trial_errors.begin(), row.trial_errors.end(), 0.0) / k;
    double var = 0.0;
    for (double e : row.trial_errors) var += (e - row.error) * (e - row.error);
    row.error_sd = config.trials > 1 ? std::sqrt(var / (k - 1.0)) : 0.0;
    row.segments = std::accumulate(row.trial_segments.begin(), row.trial_segments.end(), 0.0) / k;
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.rows.push_back(std::move(row));
  }

  std::vector<double> ns, errors;
  for (const RateRow& r : report.rows) {
    ns.push_back(r.n);
    errors.push_back(r.error);
  }
  report.slope = fit_loglog_slope(ns, errors);
  return report;
}

double fit_loglog_slope(std::span<const double> ns, std::span<const double> errors) {
  if (ns.size() != errors.size()) throw DimensionError("slope fit needs matching rows");
  if (ns.size() < 2) throw DomainError("slope fit needs at least two rows");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0) || !(errors[i] > 0.0)) {
      throw DomainError("log-log fit needs positive entries, row " + std::to_string(i));
    }
    mx += std::log(ns[i]);
    my += std::log(errors[i]);
  }
  mx /= ns.size();
  my /= ns.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = std::log(ns[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("slope fit needs at least two distinct sizes");
  return sxy / sxx;
}

}  // namespace potts
