#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "adhesim/error.hpp"

namespace adhesim {

/// Cell-averaged density values on a Grid.
using Field = std::vector<double>;

/// Uniform cell-centred mesh on [0, L] with N cells per unit length.
class Grid {
 public:
  Grid(double L, int cells_per_unit) : L_(L), N_(cells_per_unit) {
    if (!(L > 0.0) || cells_per_unit <= 0)
      throw Error(ErrorKind::InvalidParameter, "grid needs L > 0 and N > 0");
    const double count = L * cells_per_unit;
    M_ = static_cast<int>(std::lround(count));
    if (std::abs(count - M_) > 1e-9 * std::max(1.0, count))
      throw Error(ErrorKind::RangeError, "grid.N * grid.L must be an integer (got " +
                                             std::to_string(count) + ")");
  }

  double length() const { return L_; }
  int cells_per_unit() const { return N_; }
  int cells() const { return M_; }
  double dx() const { return 1.0 / N_; }
  double x(int i) const { return (i + 0.5) * dx(); }

  std::vector<double> centers() const {
    std::vector<double> xs(static_cast<std::size_t>(M_));
    for (int i = 0; i < M_; ++i) xs[static_cast<std::size_t>(i)] = x(i);
    return xs;
  }

  void check(const Field& u) const {
    if (static_cast<int>(u.size()) != M_)
      throw Error(ErrorKind::GridMismatch, "field has " + std::to_string(u.size()) +
                                               " cells, grid has " + std::to_string(M_));
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.M_ == b.M_ && a.N_ == b.N_;
  }

 private:
  double L_;
  int N_;
  int M_ = 0;
};

inline double mean(const Field& u) {
  double s = 0.0;
  for (double v : u) s += v;
  return u.empty() ? 0.0 : s / static_cast<double>(u.size());
}

/// Δx·Σu_i.
inline double mass(const Grid& g, const Field& u) {
  double s = 0.0;
  for (double v : u) s += v;
  return s * g.dx();
}

inline double max_abs(const Field& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace adhesim
