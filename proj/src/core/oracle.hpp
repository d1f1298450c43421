#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "rules.hpp"
#include "sim.hpp"

namespace ipslab {

inline constexpr std::size_t kDefaultStateCap = 4096;

/// Ring states are indexed little-endian in base q: site 0 is the least
/// significant digit.
std::size_t state_count(int alphabet_size, std::size_t n, std::size_t cap = kDefaultStateCap);
Config decode_state(std::size_t index, int alphabet_size, std::size_t n);
std::size_t encode_state(const Config& config, int alphabet_size);

struct Generator {
  int alphabet_size = 2;
  std::size_t sites = 0;
  Eigen::MatrixXd matrix;  // row = from state, column = to state

  std::size_t states() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// Continuous-time generator: each site rings at `rate` and jumps to symbol a
/// with probability P(a | word).
Generator build_generator(const PeriodicRule& rule, std::size_t n, std::size_t cap = kDefaultStateCap,
                          double rate = 1.0);

/// init * exp(tQ) by uniformization; truncation error below tol in total
/// variation.
std::vector<double> exact_distribution(const Generator& gen, std::span<const double> init, double t,
                                       double tol = 1e-12);
/// exp(tQ) * g, the conditional expectation E[g(zeta_t) | zeta_0 = s].
std::vector<double> exact_backward(const Generator& gen, std::span<const double> g, double t, double tol = 1e-12);

/// Cov(f(zeta_0), g(zeta_t)) with zeta_0 ~ init; f and g are tables over
/// all ring states.
double exact_covariance(const Generator& gen, std::span<const double> f, std::span<const double> g, double t,
                        std::span<const double> init, double tol = 1e-12);
double exact_covariance(const PeriodicRule& rule, std::size_t n, std::span<const double> f,
                        std::span<const double> g, double t, std::span<const double> init);

/// One synchronous step: product over sites of the row probabilities.
Eigen::MatrixXd pca_step_matrix(const PeriodicRule& rule, std::size_t n, std::size_t cap = kDefaultStateCap);
std::vector<double> exact_pca_distribution(const PeriodicRule& rule, std::size_t n, std::span<const double> init,
                                           std::size_t steps, std::size_t cap = kDefaultStateCap);

std::vector<double> point_mass(std::size_t index, std::size_t states);
std::vector<double> uniform_distribution(std::size_t states);

}  // namespace ipslab
