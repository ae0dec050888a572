#include "iddlab/grid.hpp"

#include <cmath>

#include "iddlab/errors.hpp"

namespace iddlab {

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (n < 2) throw InputError("log grid needs at least 2 points");
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) throw InputError("log grid needs 0 < lo < hi < inf");
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw InputError("linear grid needs at least 2 points");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) throw InputError("linear grid needs finite lo < hi");
  std::vector<double> g(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

std::vector<double> mirrored(const std::vector<double>& positive) {
  std::vector<double> g;
  g.reserve(2 * positive.size());
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) g.push_back(-*it);
  g.insert(g.end(), positive.begin(), positive.end());
  return g;
}

std::vector<double> default_evaluation_grid(double t_max, std::size_t n) { return mirrored(log_spaced(1e-3, t_max, n)); }

std::vector<double> default_schedule() {
  std::vector<double> s;
  for (int k = 2; k <= 8; ++k) s.push_back(std::pow(10.0, 0.5 * k));
  s[0] = 10.0;
  s[2] = 100.0;
  s[4] = 1000.0;
  s[6] = 10000.0;
  return s;
}

}  // namespace iddlab
