#pragma once

#include <cstddef>

namespace adhesim {

inline constexpr int kSimpsonPanels = 10000;

/// Composite Simpson rule on [a, b] with `panels` subintervals (rounded up to even).
template <class F>
double simpson(F&& f, double a, double b, int panels = kSimpsonPanels) {
  if (panels % 2 != 0) ++panels;
  if (b == a) return 0.0;
  const double h = (b - a) / panels;
  double odd = 0.0, even = 0.0;
  for (int k = 1; k < panels; ++k) {
    const double v = f(a + k * h);
    if (k % 2 != 0)
      odd += v;
    else
      even += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

}  // namespace adhesim
