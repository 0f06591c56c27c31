#include "adhesim/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace adhesim {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

std::string profile_csv(const Grid& grid, const Field& u) {
  grid.check(u);
  std::string s = "x,u\n";
  for (int i = 0; i < grid.cells(); ++i)
    s += fmt(grid.x(i)) + "," + fmt(u[static_cast<std::size_t>(i)]) + "\n";
  return s;
}

std::string kymograph_csv(const Grid& grid, const Kymograph& ky) {
  std::string s = "t";
  for (int i = 0; i < grid.cells(); ++i) s += ",x_" + std::to_string(i);
  s += "\n";
  for (std::size_t k = 0; k < ky.times.size(); ++k) {
    s += fmt(ky.times[k]);
    for (double v : ky.fields[k]) s += "," + fmt(v);
    s += "\n";
  }
  return s;
}

std::string trace_csv(const Kymograph& ky) {
  std::string s = "t,mass,peaks,energy\n";
  for (std::size_t k = 0; k < ky.times.size(); ++k)
    s += fmt(ky.times[k]) + "," + fmt(ky.mass[k]) + "," + std::to_string(ky.peaks[k]) + "," +
         fmt(ky.energy[k]) + "\n";
  return s;
}

std::string bifpoints_csv(const std::vector<BifurcationRecord>& recs) {
  std::string s = "n,Mn,alpha_n,delta_Mn,alpha_3n,b_2n1,criticality\n";
  for (const auto& r : recs)
    s += std::to_string(r.n) + "," + fmt(r.Mn) + "," + fmt(r.alpha_n) + "," + fmt(r.delta_Mn) + "," +
         fmt(r.alpha_3n) + "," + fmt(r.b_2n1) + "," + to_string(r.criticality) + "\n";
  return s;
}

std::string branch_csv(const BranchResult& br) {
  std::string s = "alpha,l2_amplitude,u_max,u_min,peaks\n";
  for (const auto& r : br.rows)
    s += fmt(r.alpha) + "," + fmt(r.l2_amplitude) + "," + fmt(r.u_max) + "," + fmt(r.u_min) + "," +
         std::to_string(r.peaks) + "\n";
  return s;
}

namespace {

constexpr double kW = 720, kH = 440, kLeft = 80, kRight = 30, kTop = 40, kBottom = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<double> ticks(double lo, double hi) {
  std::vector<double> t;
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
    t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return t;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
  double py(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

void axes(std::ostringstream& o, const Frame& f, const std::string& title, const std::string& xl,
          const std::string& yl, bool y_down = false) {
  o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kW - kLeft - kRight
    << "\" height=\"" << kH - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(f.x0, f.x1)) {
    const double x = f.px(t);
    o << "<line x1=\"" << x << "\" y1=\"" << kH - kBottom << "\" x2=\"" << x << "\" y2=\""
      << kH - kBottom + 5 << "\" stroke=\"black\"/>"
      << "<text x=\"" << x << "\" y=\"" << kH - kBottom + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << short_num(t) << "</text>\n";
  }
  for (double t : ticks(f.y0, f.y1)) {
    const double y = y_down ? kTop + (t - f.y0) / (f.y1 - f.y0) * (kH - kTop - kBottom) : f.py(t);
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
      << "\" stroke=\"black\"/>"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << short_num(t) << "</text>\n";
  }
  o << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 15
    << "\" text-anchor=\"middle\" font-size=\"13\">" << esc(xl) << "</text>\n";
  o << "<text x=\"18\" y=\"" << (kTop + kH - kBottom) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
    << "transform=\"rotate(-90 18 " << (kTop + kH - kBottom) / 2 << ")\">" << esc(yl) << "</text>\n";
}

std::string header() {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << " " << kH << "\" font-family=\"sans-serif\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return o.str();
}

// blue → teal → yellow ramp
std::string color(double s) {
  static const double stops[][3] = {{48, 18, 59}, {40, 120, 190}, {40, 190, 150}, {200, 220, 60}, {250, 250, 190}};
  s = std::clamp(s, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(s));
  const double t = s - k;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(stops[k][0] + t * (stops[k + 1][0] - stops[k][0])),
                static_cast<int>(stops[k][1] + t * (stops[k + 1][1] - stops[k][1])),
                static_cast<int>(stops[k][2] + t * (stops[k + 1][2] - stops[k][2])));
  return buf;
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5 * std::max(1e-12, std::abs(y0));
    y1 += 0.5 * std::max(1e-12, std::abs(y1));
  }
  const double pad = 0.05 * (y1 - y0);
  Frame f{x0, x1, y0 - pad, y1 + pad};
  std::ostringstream o;
  o << header();
  axes(o, f, title, xlabel, ylabel);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    o << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kColors[k % 6] << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) o << f.px(s.x[i]) << "," << f.py(s.y[i]) << " ";
    o << "\"/>\n";
    if (!s.label.empty())
      o << "<text x=\"" << kW - kRight - 8 << "\" y=\"" << kTop + 16 + 16 * k
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << kColors[k % 6] << "\">" << esc(s.label)
        << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_kymograph(const Grid& grid, const Kymograph& ky) {
  std::ostringstream o;
  o << header();
  if (ky.times.empty()) {
    o << "</svg>\n";
    return o.str();
  }
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& f : ky.fields)
    for (double v : f) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(hi > lo)) hi = lo + 1.0;
  const double t0 = ky.times.front();
  const double t1 = ky.times.size() > 1 ? ky.times.back() : t0 + 1.0;
  Frame f{0.0, grid.length(), t0, t1};
  const int M = grid.cells();
  const int cols = std::min(M, 360);
  const int rows = static_cast<int>(ky.times.size());
  const double cw = (kW - kLeft - kRight) / cols;
  const double rh = (kH - kTop - kBottom) / rows;
  for (int r = 0; r < rows; ++r) {
    const Field& u = ky.fields[static_cast<std::size_t>(r)];
    for (int c = 0; c < cols; ++c) {
      const int a = c * M / cols, b = std::max(a + 1, (c + 1) * M / cols);
      double s = 0.0;
      for (int i = a; i < b; ++i) s += u[static_cast<std::size_t>(i)];
      s /= (b - a);
      o << "<rect x=\"" << kLeft + c * cw << "\" y=\"" << kTop + r * rh << "\" width=\"" << cw + 0.3
        << "\" height=\"" << rh + 0.3 << "\" fill=\"" << color((s - lo) / (hi - lo)) << "\"/>\n";
    }
  }
  axes(o, f, "kymograph (u from " + short_num(lo) + " to " + short_num(hi) + ")", "x", "t", true);
  o << "</svg>\n";
  return o.str();
}

}  // namespace adhesim
