#include <doctest.h>

#include <cmath>
#include <random>

#include "basis.hpp"
#include "checks.hpp"
#include "estimators.hpp"
#include "helpers.hpp"
#include "oracle.hpp"
#include "rules.hpp"
#include "stats.hpp"

using namespace ipslab;

namespace {

const RuleTable kFlipSelf(Alphabet(2), Neighborhood({0}), {0.0, 1.0, 1.0, 0.0});

// Generator entry computed from the ring dynamics directly.
double rate_oracle(const PeriodicRule& rule, const Config& from, const Config& to) {
  const auto n = static_cast<long long>(from.size());
  int changed = -1;
  for (long long j = 0; j < n; ++j) {
    if (from[static_cast<std::size_t>(j)] != to[static_cast<std::size_t>(j)]) {
      if (changed >= 0) {
        return 0.0;
      }
      changed = static_cast<int>(j);
    }
  }
  if (changed < 0) {
    return 0.0;
  }
  const RuleTable& t = rule.table(changed);
  std::vector<int> word;
  for (int off : t.neighborhood().offsets()) {
    word.push_back(from[static_cast<std::size_t>(((changed + off) % n + n) % n)]);
  }
  return t.prob(t.encode(word), to[static_cast<std::size_t>(changed)]);
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("state encoding is little-endian") {
    CHECK(encode_state(Config{1, 0, 0}, 2) == 1);
    CHECK(encode_state(Config{0, 0, 1}, 2) == 4);
    CHECK(encode_state(Config{2, 1}, 3) == 5);
    CHECK(decode_state(5, 3, 2) == Config{2, 1});
    CHECK(state_count(2, 12) == 4096);
    CHECK_THROWS_AS(state_count(2, 13), Error);
  }

  TEST_CASE("generator examples") {
    const Generator id = build_generator(make_nn2_rule(kIdentityNN2), 3);
    CHECK(id.matrix.cwiseAbs().maxCoeff() == 0.0);

    const Generator flip = build_generator(kFlipSelf, 1);
    CHECK(flip.matrix(0, 0) == -1.0);
    CHECK(flip.matrix(0, 1) == 1.0);
    CHECK(flip.matrix(1, 0) == 1.0);
    CHECK(flip.matrix(1, 1) == -1.0);

    const Generator zero = build_generator(make_nn2_rule({0, 0, 0, 0}), 2);
    CHECK(zero.matrix(3, 3) == -2.0);

    try {
      build_generator(make_nn2_rule({0, 0.2, 0.8, 0.1}), 13);
      FAIL("expected a capacity error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::capacity);
    }
  }

  TEST_CASE("generator matches the ring dynamics entry by entry") {
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 6; ++trial) {
      const int q = 2 + trial % 2;
      const std::size_t n = trial >= 4 ? 4 : 3 + static_cast<std::size_t>(trial % 2);
      PeriodicRule rule = testing::random_rule(gen, q, {-1, 0, 1});
      if (trial >= 4) {
        rule = PeriodicRule({testing::random_rule(gen, q, {0, 1}), testing::random_rule(gen, q, {0, 1})});
      }
      const Generator g = build_generator(rule, n);
      for (std::size_t a = 0; a < g.states(); ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < g.states(); ++b) {
          row += g.matrix(static_cast<long>(a), static_cast<long>(b));
          if (a != b) {
            const double want = rate_oracle(rule, decode_state(a, q, n), decode_state(b, q, n));
            CHECK(std::abs(g.matrix(static_cast<long>(a), static_cast<long>(b)) - want) <= 1e-15);
          }
        }
        CHECK(std::abs(row) <= 1e-12);
      }
    }
  }

  TEST_CASE("time-scaled generator") {
    std::mt19937_64 gen(73);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const RuleTable p = testing::random_rule(gen, 2 + trial % 2, {0, 1});
      const double lam = u(gen);
      const Generator a = build_generator(time_scale(p, lam), 3);
      const Generator b = build_generator(p, 3);
      CHECK((a.matrix - lam * b.matrix).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("uniformization") {
    const Generator flip = build_generator(kFlipSelf, 1);
    const auto init = point_mass(0, 2);
    CHECK(exact_distribution(flip, init, 0.0) == init);
    for (double t : {0.1, 0.5, 1.0, 3.0, 40.0}) {
      const auto d = exact_distribution(flip, init, t);
      CHECK(std::abs(d[1] - (1 - std::exp(-2 * t)) / 2) <= 1e-11);
    }

    const Generator g = build_generator(make_nn2_rule({0, 0.2, 0.8, 0.1}), 4);
    const auto mu = point_mass(0, g.states());
    const auto a = exact_distribution(g, exact_distribution(g, mu, 0.7), 1.6);
    const auto b = exact_distribution(g, mu, 2.3);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i] - b[i]) <= 1e-8);
      CHECK(b[i] >= 0.0);
      sum += b[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-10);

    const auto far = exact_distribution(g, mu, 60.0);
    for (double p : far) {
      CHECK(p > 0.0);
    }
    double prev = total_variation(exact_distribution(g, mu, 1.0), exact_distribution(g, mu, 2.0));
    for (double t = 3.0; t <= 9.0; t += 2.0) {
      const double cur = total_variation(exact_distribution(g, mu, t), exact_distribution(g, mu, t + 1.0));
      CHECK(cur < prev);
      prev = cur;
    }
  }

  TEST_CASE("exact covariance") {
    const ProductBasis pm = ProductBasis::binary(1.0, -1.0);
    const LocalFunction chi0 = LocalFunction::chi(0, 1, pm);
    const std::size_t n = 4;
    const auto f = chi0.lift(n);
    const auto init = uniform_distribution(16);

    // Under the uniform law chi_0 is +-1 with equal weight.
    const PeriodicRule r = make_nn2_rule({0, 0.2, 0.8, 0.1});
    CHECK(exact_covariance(r, n, f, f, 0.0, init) == doctest::Approx(1.0));
    const PeriodicRule id = make_nn2_rule(kIdentityNN2);
    for (double t : {0.0, 1.0, 5.0}) {
      CHECK(exact_covariance(id, n, f, f, t, init) == doctest::Approx(1.0));
    }
    for (int k = 0; k <= 10; ++k) {
      const double t = 2.0 * k;
      CHECK(std::abs(exact_covariance(r, n, f, f, t, init)) <= 2.0 * std::exp(-0.2 * t) + 1e-12);
    }
  }

  TEST_CASE("pca step matrix") {
    const RuleTable uniform(Alphabet(2), Neighborhood({0, 1}), {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    const auto u = exact_pca_distribution(uniform, 3, point_mass(0, 8), 1);
    for (double p : u) {
      CHECK(p == doctest::Approx(0.125));
    }
    std::mt19937_64 gen(79);
    std::vector<double> mu(8);
    for (auto& v : mu) {
      v = static_cast<double>(gen() % 100 + 1);
    }
    double s = 0;
    for (double v : mu) {
      s += v;
    }
    for (auto& v : mu) {
      v /= s;
    }
    const auto same = exact_pca_distribution(make_nn2_rule(kIdentityNN2), 3, mu, 5);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(same[i] == doctest::Approx(mu[i]));
    }
    const auto flipped = exact_pca_distribution(kFlipSelf, 3, point_mass(0, 8), 1);
    CHECK(flipped[7] == doctest::Approx(1.0));
  }

  TEST_CASE("forward simulation frequencies match the exact law") {
    const PeriodicRule r = make_nn2_rule({0, 0.2, 0.8, 0.1});
    const Generator g = build_generator(r, 3);
    const auto exact = exact_distribution(g, point_mass(0, 8), 1.0);
    const auto counts = forward_state_counts(r, 3, InitLaw::constant_law(0), 1.0, 20000, 5);
    CHECK(chi_squared_gof(counts, exact).p_value > 0.001);
    CHECK(total_variation(normalize_counts(counts), exact) < 0.02);
  }

  TEST_CASE("oracle check report") {
    OracleCheckOptions o;
    o.replicas = 2000;
    o.lambda = 0.5;
    const auto id = oracle_check(make_nn2_rule(kIdentityNN2), o);
    CHECK(id.forward.tv == 0.0);
    REQUIRE(id.cone.has_value());
    CHECK(id.cone->tv == 0.0);
    REQUIRE(id.time_scaling.has_value());
    CHECK(id.time_scaling->generator_max_diff == 0.0);
    const auto j = oracle_check_to_json(id);
    CHECK(j.contains("forward"));
  }
}
