#include "potts/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "potts/errors.hpp"

namespace potts {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
      if (!tok.empty()) break;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
    } else {
      tok += ch;
    }
  }
  return tok;
}

json fit_json(const FitResult& fit) {
  return json{{"coefficients", fit.coefficients},
              {"frame", {{"cx", fit.frame.cx}, {"cy", fit.frame.cy}, {"hx", fit.frame.hx}, {"hy", fit.frame.hy}}},
              {"rss", fit.rss},
              {"pixels", fit.pixel_count}};
}

}  // namespace

GridSignal read_pgm(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  if (pgm_token(in) != "P5") throw DomainError("'" + path + "' is not a binary PGM (P5)");
  const int w = std::stoi(pgm_token(in));
  const int h = std::stoi(pgm_token(in));
  const int maxval = std::stoi(pgm_token(in));
  if (maxval != 255) throw DomainError("PGM maxval must be 255, got " + std::to_string(maxval));
  if (w != h) throw DimensionError("image must be square, got " + std::to_string(w) + "x" + std::to_string(h));
  std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw DomainError("truncated PGM '" + path + "'");
  std::vector<double> values(bytes.size());
  std::transform(bytes.begin(), bytes.end(), values.begin(), [](unsigned char b) { return b / 255.0; });
  return GridSignal(2, w, std::move(values));
}

void write_pgm(const std::string& path, const GridSignal& image) {
  if (image.dim() != 2) throw DimensionError("PGM output needs a 2D image");
  std::ofstream out = open_out(path, std::ios::binary);
  out << "P5\n" << image.side() << ' ' << image.side() << "\n255\n";
  std::vector<unsigned char> bytes(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    bytes[i] = static_cast<unsigned char>(std::lround(std::clamp(image[i], 0.0, 1.0) * 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

GridSignal read_csv_signal(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r,") + 1);
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line, &used);
      if (used != line.size()) throw std::invalid_argument("trailing text");
      values.push_back(v);
    } catch (const std::exception&) {
      if (!first) throw DomainError("bad CSV value '" + line + "' in '" + path + "'");
    }
    first = false;
  }
  if (values.empty()) throw DomainError("no values in '" + path + "'");
  const int n = static_cast<int>(values.size());
  return GridSignal(1, n, std::move(values));
}

void write_csv_signal(const std::string& path, const GridSignal& signal) {
  std::ofstream out = open_out(path);
  out.precision(17);
  for (double v : signal.values()) out << v << '\n';
}

std::string segmentation_json(const Segmentation1D& seg) {
  json leaves = json::array();
  for (const Segment1D& s : seg.segments) {
    json j = fit_json(s.fit);
    j["type"] = "interval";
    j["lo"] = s.interval.lo;
    j["hi"] = s.interval.hi;
    leaves.push_back(std::move(j));
  }
  return json{{"n", seg.side}, {"gamma", seg.gamma}, {"energy", seg.energy},
              {"segments", seg.size()}, {"fragments", std::move(leaves)}}
      .dump(2);
}

std::string segmentation_json(const WedgeletSegmentation& seg) {
  json leaves = json::array();
  for (const Leaf2D& leaf : seg.leaves) {
    json j = fit_json(leaf.fit);
    const DyadicSquare& sq = std::holds_alternative<DyadicSquare>(leaf.fragment)
                                 ? std::get<DyadicSquare>(leaf.fragment)
                                 : std::get<Wedge>(leaf.fragment).square;
    j["square"] = {{"x0", sq.x0}, {"y0", sq.y0}, {"size", sq.size()}, {"level", sq.level}};
    if (const auto* w = std::get_if<Wedge>(&leaf.fragment)) {
      j["type"] = "wedge";
      j["theta"] = {w->direction.p, w->direction.q};
      j["r"] = w->r;
      j["side"] = w->side == WedgeSide::lower ? "lower" : "upper";
    } else {
      j["type"] = "square";
    }
    leaves.push_back(std::move(j));
  }
  return json{{"n", seg.side}, {"degree", seg.degree}, {"gamma", seg.gamma}, {"energy", seg.energy},
              {"segments", seg.size()}, {"fragments", std::move(leaves)}}
      .dump(2);
}

std::string rate_report_json(const RateReport& report) {
  json rows = json::array();
  for (const RateRow& r : report.rows) {
    rows.push_back({{"n", r.n}, {"gamma", r.gamma}, {"error", r.error}, {"error_sd", r.error_sd},
                    {"segments", r.segments}, {"seed", r.seed}, {"wall_ms", r.wall_ms},
                    {"below_threshold", r.below_threshold}, {"trial_errors", r.trial_errors},
                    {"trial_segments", r.trial_segments}});
  }
  return json{{"class", to_string(report.truth)},
              {"alpha", report.alpha},
              {"seed", report.seed},
              {"trials", report.trials},
              {"quad_pts", report.quad_pts},
              {"degree", report.degree},
              {"angle_budget", report.angle_budget},
              {"schedule", report.schedule},
              {"noise", {{"family", to_string(report.noise.family)}, {"scale", report.noise.scale},
                         {"tau", report.noise.tau()}, {"beta", report.noise.beta()}}},
              {"slope", report.slope},
              {"target", report.target},
              {"target_low", report.target_low},
              {"target_high", report.target_high},
              {"errors_decreasing", report.errors_decreasing()},
              {"rows", std::move(rows)}}
      .dump(2);
}

std::string rate_report_csv(const RateReport& report) {
  std::ostringstream os;
  os.precision(10);
  os << "n,gamma,error,segments,seed,wall_ms\n";
  for (const RateRow& r : report.rows) {
    os << r.n << ',' << r.gamma << ',' << r.error << ',' << r.segments << ',' << r.seed << ','
       << r.wall_ms << '\n';
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace potts
