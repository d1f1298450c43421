#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "rules.hpp"

namespace testing {

inline std::array<double, 4> random_params(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(gen), u(gen), u(gen), u(gen)};
}

inline ipslab::ParamsNN2 random_nn2(std::mt19937_64& gen) { return ipslab::ParamsNN2::from_array(random_params(gen)); }

// Random rule over an arbitrary alphabet and neighborhood with Dirichlet-like rows.
inline ipslab::RuleTable random_rule(std::mt19937_64& gen, int q, std::vector<int> offsets) {
  std::exponential_distribution<double> e(1.0);
  const ipslab::Neighborhood nb(std::move(offsets));
  std::size_t words = 1;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    words *= static_cast<std::size_t>(q);
  }
  std::vector<double> probs;
  for (std::size_t w = 0; w < words; ++w) {
    std::vector<double> row(static_cast<std::size_t>(q));
    double s = 0.0;
    for (auto& v : row) {
      v = e(gen);
      s += v;
    }
    for (auto& v : row) {
      probs.push_back(v / s);
    }
  }
  return ipslab::RuleTable(ipslab::Alphabet(q), nb, probs);
}

}  // namespace testing
