#pragma once

#include <cstddef>
#include <vector>

namespace iddlab {

/// n points, lo and hi included. n >= 2, 0 < lo < hi.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// n points, lo and hi included. n >= 2.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// -g reversed followed by g; g must be positive and increasing.
std::vector<double> mirrored(const std::vector<double>& positive);

/// Default evaluation grid: 2048 log-spaced points on [1e-3, t_max], mirrored.
std::vector<double> default_evaluation_grid(double t_max = 50.0, std::size_t n = 2048);

/// {10, 31.6, 100, 316, 1000, 3162, 1e4}: half-decade steps.
std::vector<double> default_schedule();

}  // namespace iddlab
