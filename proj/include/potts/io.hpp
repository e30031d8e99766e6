#pragma once

#include <string>

#include "potts/bench.hpp"
#include "potts/grid.hpp"
#include "potts/potts1d.hpp"
#include "potts/wedgelet.hpp"

namespace potts {

/// Binary P5 with maxval 255; gray g maps to g / 255. The image must be
/// square. Row 0 of the file is stored as y = 0.
GridSignal read_pgm(const std::string& path);

/// Values are clamped to [0, 1] and rounded to the nearest gray level.
void write_pgm(const std::string& path, const GridSignal& image);

/// One value per line; a non-numeric first line is taken as a header.
GridSignal read_csv_signal(const std::string& path);
void write_csv_signal(const std::string& path, const GridSignal& signal);

std::string segmentation_json(const Segmentation1D& seg);
std::string segmentation_json(const WedgeletSegmentation& seg);

std::string rate_report_json(const RateReport& report);
/// Columns n, gamma, error, segments, seed, wall_ms.
std::string rate_report_csv(const RateReport& report);

void write_text(const std::string& path, const std::string& text);

}  // namespace potts
