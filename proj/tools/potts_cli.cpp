// Command-line front end: denoise1d, wedgelet, rates, noise-check.
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "potts/bench.hpp"
#include "potts/errors.hpp"
#include "potts/io.hpp"
#include "potts/noise.hpp"
#include "potts/potts1d.hpp"
#include "potts/rng.hpp"
#include "potts/wedgelet.hpp"

namespace {

using nlohmann::json;

// POTTS_SEED, when set, replaces the master seed.
std::uint64_t master_seed(std::uint64_t flag_value) {
  if (const char* env = std::getenv("POTTS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw potts::DomainError(std::string("POTTS_SEED is not an unsigned integer: ") + env);
    }
  }
  return flag_value;
}

std::string csv_path_for(const std::string& json_path) {
  const auto dot = json_path.rfind('.');
  const auto slash = json_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return json_path + ".csv";
  return json_path.substr(0, dot) + ".csv";
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Potts estimation on interval and wedgelet partitions"};
  app.require_subcommand(1);

  // denoise1d
  auto* d1 = app.add_subcommand("denoise1d", "Exact 1D Potts estimate of a CSV signal");
  std::string d1_in, d1_out, d1_seg;
  double d1_gamma = 0.0;
  int d1_degree = 0;
  d1->add_option("--input", d1_in, "single-column CSV")->required();
  d1->add_option("--gamma", d1_gamma, "penalty per segment (absolute)")->required();
  d1->add_option("--degree", d1_degree, "polynomial degree, 0..4")->default_val(0);
  d1->add_option("--output", d1_out, "reconstruction CSV")->required();
  d1->add_option("--segments-out", d1_seg, "segmentation JSON");

  // wedgelet
  auto* w2 = app.add_subcommand("wedgelet", "Exact wedgelet/platelet Potts estimate of a PGM image");
  std::string w_in, w_out, w_leaves;
  double w_gamma = 0.0;
  int w_degree = 0, w_budget = 0;
  w2->add_option("--input", w_in, "square P5 PGM with power-of-two side")->required();
  w2->add_option("--gamma", w_gamma, "penalty per fragment (absolute, gray values in [0,1])")->required();
  w2->add_option("--degree", w_degree, "0 wedgelets, 1 platelets")->default_val(0)->check(CLI::Range(0, 1));
  w2->add_option("--angle-budget", w_budget, "max slope component; 0 = full")->default_val(0);
  w2->add_option("--output", w_out, "reconstruction PGM")->required();
  w2->add_option("--leaves-out", w_leaves, "fragment dump JSON");

  // rates
  auto* rt = app.add_subcommand("rates", "Convergence-rate experiment");
  std::string r_class = "sobolev1d", r_ns, r_report, r_csv, r_rule = "log_n", r_family = "gaussian";
  double r_alpha = 1.5, r_c = 0.0, r_sigma = 0.1;
  int r_trials = 10, r_degree = 1, r_budget = 16, r_jumps = 0, r_quad = potts::kDefaultQuadPoints;
  std::uint64_t r_seed = 1;
  rt->add_option("--class", r_class)->check(CLI::IsMember({"sobolev1d", "horizon", "genhorizon"}));
  rt->add_option("--alpha", r_alpha)->default_val(1.5);
  rt->add_option("--n", r_ns, "comma-separated sizes")->required();
  rt->add_option("--trials", r_trials)->default_val(10);
  rt->add_option("--gamma-c", r_c, "schedule constant; 0 = 2 beta D (kappa+1)/kappa")->default_val(0.0);
  rt->add_option("--gamma-rule", r_rule)->check(CLI::IsMember({"log_n", "log_fragments"}))->default_val("log_n");
  rt->add_option("--seed", r_seed)->default_val(1);
  rt->add_option("--report", r_report, "JSON report")->required();
  rt->add_option("--csv", r_csv, "CSV mirror (default: report path with .csv)");
  rt->add_option("--sigma", r_sigma, "noise scale")->default_val(0.1);
  rt->add_option("--family", r_family)->check(CLI::IsMember({"gaussian", "uniform", "rademacher"}));
  rt->add_option("--degree", r_degree)->default_val(1);
  rt->add_option("--angle-budget", r_budget)->default_val(16);
  rt->add_option("--jumps", r_jumps, "jumps of the 1D truth")->default_val(0);
  rt->add_option("--quad-pts", r_quad)->default_val(potts::kDefaultQuadPoints);

  // noise-check
  auto* nc = app.add_subcommand("noise-check", "Monte Carlo check of the sub-Gaussian tail bound");
  std::string n_family = "gaussian", n_report, n_csv;
  double n_sigma = 1.0;
  long n_trials = potts::kMinTailTrials;
  int n_weights = 20;
  std::uint64_t n_seed = 1;
  nc->add_option("--family", n_family)->check(CLI::IsMember({"gaussian", "uniform", "rademacher"}));
  nc->add_option("--sigma", n_sigma, "scale: sigma, half-width or atom size")->default_val(1.0);
  nc->add_option("--trials", n_trials)->default_val(potts::kMinTailTrials);
  nc->add_option("--weights", n_weights, "number of random weight vectors")->default_val(20);
  nc->add_option("--seed", n_seed)->default_val(1);
  nc->add_option("--report", n_report, "JSON report")->required();
  nc->add_option("--csv", n_csv, "CSV mirror (default: report path with .csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*d1) {
      const potts::GridSignal y = potts::read_csv_signal(d1_in);
      const auto seg = potts::solve_potts_1d(y, d1_gamma, d1_degree);
      potts::write_csv_signal(d1_out, seg.reconstruct());
      if (!d1_seg.empty()) potts::write_text(d1_seg, potts::segmentation_json(seg));
      std::cout << "segments " << seg.size() << " energy " << seg.energy << '\n';
    } else if (*w2) {
      const potts::GridSignal y = potts::read_pgm(w_in);
      potts::WedgeletOptions opts;
      opts.degree = w_degree;
      opts.angle_budget = w_budget;
      const auto seg = potts::solve_wedgelet(y, w_gamma, opts);
      potts::write_pgm(w_out, seg.reconstruct());
      if (!w_leaves.empty()) potts::write_text(w_leaves, potts::segmentation_json(seg));
      std::cout << "fragments " << seg.size() << " energy " << seg.energy << '\n';
    } else if (*rt) {
      potts::RateConfig cfg;
      cfg.truth = potts::parse_truth_class(r_class);
      cfg.alpha = r_alpha;
      cfg.jumps = r_jumps;
      cfg.ns = parse_sizes(r_ns);
      cfg.trials = r_trials;
      cfg.seed = master_seed(r_seed);
      cfg.quad_pts = r_quad;
      cfg.noise = {potts::parse_noise_family(r_family), r_sigma};
      const auto rule = r_rule == "log_n" ? potts::GammaRule::log_n : potts::GammaRule::log_fragments;
      const int dim = cfg.truth == potts::TruthClass::sobolev1d ? 1 : 2;
      cfg.solver = {dim, r_degree, r_budget, potts::Execution::serial};
      cfg.schedule = dim == 1 ? potts::GammaSchedule::for_1d(r_degree, cfg.noise.beta(), rule, r_c)
                              : potts::GammaSchedule::for_2d(r_degree, cfg.noise.beta(), rule, r_c);
      const auto report = potts::run_rate_experiment(cfg);
      potts::write_text(r_report, potts::rate_report_json(report));
      potts::write_text(r_csv.empty() ? csv_path_for(r_report) : r_csv, potts::rate_report_csv(report));
      for (const auto& row : report.rows) {
        std::cout << "n " << row.n << " gamma " << row.gamma << " error " << row.error << " segments "
                  << row.segments << (row.below_threshold ? " (gamma below threshold)" : "") << '\n';
      }
      std::cout << "slope " << report.slope << " target " << report.target << '\n';
    } else if (*nc) {
      const potts::NoiseSpec spec{potts::parse_noise_family(n_family), n_sigma};
      const std::uint64_t seed = master_seed(n_seed);
      const auto samples = potts::draw_samples(spec, 200000, potts::derive_seed(seed, 0x7a0));
      const double tau_hat = potts::estimate_tau(samples);
      potts::TailCheckOptions opts;
      opts.beta = 2.0 * tau_hat * tau_hat;
      json checks = json::array();
      std::ostringstream csv;
      csv << "weights,length,c,empirical,bound,standard_error,pass\n";
      int failures = 0;
      for (int w = 0; w < n_weights; ++w) {
        const auto mu = potts::random_weights(potts::derive_seed(seed, 0x3e1, w));
        double norm = 0.0;
        for (double m : mu) norm += m * m;
        norm = std::sqrt(norm);
        const std::vector<double> cs = {tau_hat * norm, 2 * tau_hat * norm, 3 * tau_hat * norm};
        const auto reps = potts::check_tail_bounds(spec, mu, cs, n_trials, potts::derive_seed(seed, 0x3e2, w), opts);
        for (const auto& r : reps) {
          failures += r.pass ? 0 : 1;
          checks.push_back({{"weights", w}, {"length", mu.size()}, {"c", r.threshold},
                            {"empirical", r.empirical}, {"bound", r.bound},
                            {"standard_error", r.standard_error}, {"pass", r.pass}});
          csv << w << ',' << mu.size() << ',' << r.threshold << ',' << r.empirical << ',' << r.bound
              << ',' << r.standard_error << ',' << (r.pass ? 1 : 0) << '\n';
        }
      }
      const json report = {{"family", n_family}, {"scale", n_sigma}, {"tau", spec.tau()},
                           {"tau_hat", tau_hat}, {"beta", opts.beta}, {"trials", n_trials},
                           {"seed", seed}, {"failures", failures}, {"checks", checks}};
      potts::write_text(n_report, report.dump(2));
      potts::write_text(n_csv.empty() ? csv_path_for(n_report) : n_csv, csv.str());
      std::cout << "tau_hat " << tau_hat << " failures " << failures << " of " << checks.size() << '\n';
      return failures == 0 ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
