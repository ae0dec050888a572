#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace iddlab::detail {

struct SupResult {
  double x = 0.0;
  double value = 0.0;
};

/// Maximum of g over an increasing grid, polished by golden-section search on
/// the two cells adjacent to an interior grid maximum. Ties keep the first
/// (smallest x) grid point.
template <class G>
SupResult grid_sup(std::span<const double> xs, G&& g) {
  SupResult best{xs.empty() ? 0.0 : xs[0], -1.0};
  std::size_t arg = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = g(xs[i]);
    if (v > best.value) {
      best = {xs[i], v};
      arg = i;
    }
  }
  if (arg == 0 || arg + 1 >= xs.size()) return best;

  constexpr double inv_phi = 0.6180339887498949;
  double a = xs[arg - 1], b = xs[arg + 1];
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 80 && (b - a) > 1e-14 * std::abs(b); ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  if (gc > best.value) best = {c, gc};
  if (gd > best.value) best = {d, gd};
  return best;
}

}  // namespace iddlab::detail
