#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ipslab {

double total_variation(std::span<const double> p, std::span<const double> q);
std::vector<double> normalize_counts(std::span<const std::size_t> counts);

struct ChiSquaredResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Goodness of fit of counts against probabilities. Cells with expected count
/// below 5 are pooled into one cell.
ChiSquaredResult chi_squared_gof(std::span<const std::size_t> counts, std::span<const double> probs);
/// Homogeneity test of two count vectors over the same cells (2 x k table).
/// Cells with small expected counts are pooled the same way.
ChiSquaredResult chi_squared_two_sample(std::span<const std::size_t> a, std::span<const std::size_t> b);

/// Kolmogorov-Smirnov distance between the empirical law of samples and a
/// continuous cdf.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanStderr mean_stderr(std::span<const double> values);

}  // namespace ipslab
