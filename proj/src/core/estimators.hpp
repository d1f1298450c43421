#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "basis.hpp"
#include "rules.hpp"
#include "sim.hpp"
#include "stats.hpp"

namespace ipslab {

/// Function of the symbols on a finite set of sites. values has q^|sites|
/// entries ordered with the first site most significant; sites are reduced
/// modulo the ring size when evaluated.
struct LocalFunction {
  std::vector<long long> sites;
  int alphabet_size = 2;
  std::vector<double> values;

  double operator()(const Config& c) const;
  double sup_norm() const;
  /// Table over all ring states (little-endian state index).
  std::vector<double> lift(std::size_t n) const;
  /// chi_{j,a} for a product basis.
  static LocalFunction chi(long long site, int letter, const ProductBasis& basis);
};

/// Sample covariances of (f(zeta_0), g(zeta_t)) at each grid time; one
/// simulation per replica is read at every grid time. Replica r uses RNG
/// stream r of the seed.
std::vector<MeanStderr> mc_covariance_series(const PeriodicRule& rule, std::size_t n, const LocalFunction& f,
                                             const LocalFunction& g, std::span<const double> t_grid,
                                             std::size_t replicas, const InitLaw& init, std::uint64_t seed);
MeanStderr mc_covariance(const PeriodicRule& rule, std::size_t n, const LocalFunction& f, const LocalFunction& g,
                         double t, std::size_t replicas, const InitLaw& init, std::uint64_t seed);

/// Unbiased sample covariance with a leave-one-out jackknife standard error.
MeanStderr covariance_jackknife(std::span<const double> a, std::span<const double> b);

struct DecayEstimate {
  std::vector<double> t_grid;
  std::vector<MeanStderr> cov;
  std::vector<double> bound;  // 2 |f|_inf |g|_Pi exp(-(1-alpha) t), empty without a certificate
  double fitted_rate = 0.0;
  bool rate_is_lower_bound = false;  // fewer than two points above the noise floor
  std::size_t significant_points = 0;
  std::optional<double> bound_rate;  // 1 - alpha when the criterion passes
  bool bound_ok = true;              // |mean| <= bound + 3 stderr at every grid point
};

/// Log-linear least squares on points with |mean| > 3 stderr.
DecayEstimate fit_decay_from(std::span<const double> t_grid, std::span<const MeanStderr> cov);

DecayEstimate fit_decay(const PeriodicRule& rule, std::size_t n, const LocalFunction& f, const LocalFunction& g,
                        std::span<const double> t_grid, std::size_t replicas, const InitLaw& init, std::uint64_t seed,
                        const std::optional<ProductBasis>& basis);

struct DensityPoint {
  double t;
  double density;
  double std_error;
};

/// Fraction of sites where quantile-coupled runs from all-0 and all-1 differ.
std::vector<DensityPoint> disagreement_density(const PeriodicRule& rule, std::size_t n, std::span<const double> t_grid,
                                               std::size_t replicas, std::uint64_t seed);

struct BoundaryMarginals {
  std::vector<double> t_grid;
  // [time][symbol] single-site laws averaged over sites and replicas
  std::vector<std::vector<double>> from_min;
  std::vector<std::vector<double>> from_max;
  std::vector<std::vector<double>> from_min_se;
  std::vector<std::vector<double>> from_max_se;
};

BoundaryMarginals boundary_marginals(const PeriodicRule& rule, std::size_t n, std::span<const double> t_grid,
                                     std::size_t replicas, std::uint64_t seed);

}  // namespace ipslab
