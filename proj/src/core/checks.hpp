#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "io.hpp"
#include "sim.hpp"
#include "stats.hpp"

namespace ipslab {

/// Exact law of the initial configuration over ring states.
std::vector<double> init_distribution(const InitLaw& init, int alphabet_size, std::size_t n);

/// Final-state counts of independent forward runs (replica r uses stream
/// stream_base + r).
std::vector<std::size_t> forward_state_counts(const PeriodicRule& rule, std::size_t n, const InitLaw& init, double t,
                                              std::size_t replicas, std::uint64_t seed, std::uint64_t stream_base = 0);
/// Whole-ring counts from the backward cone sampler with ring reduction.
std::vector<std::size_t> cone_state_counts(const PeriodicRule& rule, std::size_t n, const InitLaw& init, double t,
                                           std::size_t replicas, std::uint64_t seed, std::uint64_t stream_base = 0);

struct SampleComparison {
  double tv = 0.0;
  ChiSquaredResult chi2;
};

struct TimeScalingCheck {
  double lambda = 1.0;
  double generator_max_diff = 0.0;  // max |Q(time_scale(P, l)) - l Q(P)|
  double exact_tv = 0.0;            // law of P at l t versus scaled rule at t
  ChiSquaredResult two_sample;      // Monte Carlo P at l t versus scaled rule at t
};

struct OracleCheckOptions {
  std::size_t n = 3;
  double t = 1.0;
  std::size_t replicas = 100000;
  std::uint64_t seed = 1;
  InitLaw init = InitLaw::constant_law(0);
  bool cone = true;
  std::optional<double> lambda;
};

struct OracleCheckReport {
  OracleCheckOptions options;
  std::vector<double> exact;
  SampleComparison forward;
  std::optional<SampleComparison> cone;
  std::optional<TimeScalingCheck> time_scaling;
};

OracleCheckReport oracle_check(const PeriodicRule& rule, const OracleCheckOptions& options);
Json oracle_check_to_json(const OracleCheckReport& report);

}  // namespace ipslab
