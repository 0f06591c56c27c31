#pragma once

// CSV and SVG writers. Floats use 12 significant digits, LF line endings.

#include <string>
#include <vector>

#include "adhesim/bifurcation.hpp"
#include "adhesim/solver.hpp"

namespace adhesim {

/// "%#.12g" with the trailing-zero padding that implies.
std::string fmt(double v);

void write_text(const std::string& path, const std::string& text);

std::string profile_csv(const Grid& grid, const Field& u);
std::string kymograph_csv(const Grid& grid, const Kymograph& ky);
std::string trace_csv(const Kymograph& ky);
std::string bifpoints_csv(const std::vector<BifurcationRecord>& recs);
std::string branch_csv(const BranchResult& br);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line plot.
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series);

/// Space–time heatmap: x horizontal, t increasing downwards.
std::string svg_kymograph(const Grid& grid, const Kymograph& ky);

}  // namespace adhesim
