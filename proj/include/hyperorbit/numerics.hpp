#pragma once

// Deterministic summation and ordinary least squares.

#include <cstddef>
#include <span>
#include <vector>

namespace hyperorbit {

// Pairwise (tree) summation in a fixed order: results depend only on the
// input sequence, never on thread count.
template <typename T>
T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double r_squared = 0;
  std::vector<double> residuals;
};

// y = intercept + slope * x. Needs at least two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace hyperorbit
