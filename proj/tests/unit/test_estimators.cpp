#include <doctest.h>

#include <cmath>
#include <random>

#include "basis.hpp"
#include "error.hpp"
#include "estimators.hpp"
#include "oracle.hpp"
#include "rules.hpp"
#include "stats.hpp"

using namespace ipslab;

namespace {

const ProductBasis kPm = ProductBasis::binary(1.0, -1.0);
const InitLaw kFair = InitLaw::iid_law({0.5, 0.5});

}  // namespace

TEST_SUITE("estimators") {
  TEST_CASE("local functions") {
    const LocalFunction chi = LocalFunction::chi(1, 1, kPm);
    CHECK(chi.sites == std::vector<long long>{1});
    CHECK(chi.values == std::vector<double>{-1.0, 1.0});
    CHECK(chi.sup_norm() == 1.0);
    CHECK(chi(Config{0, 1, 0}) == 1.0);
    CHECK(chi(Config{1, 0, 1}) == -1.0);
    const auto lifted = chi.lift(3);
    REQUIRE(lifted.size() == 8);
    for (std::size_t s = 0; s < 8; ++s) {
      CHECK(lifted[s] == chi(decode_state(s, 2, 3)));
    }
  }

  TEST_CASE("jackknife covariance") {
    std::mt19937_64 gen(83);
    std::normal_distribution<double> nd;
    std::vector<double> a(4000);
    std::vector<double> b(4000);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = nd(gen);
      b[i] = 0.6 * a[i] + 0.8 * nd(gen);
    }
    const auto c = covariance_jackknife(a, b);
    CHECK(std::abs(c.mean - 0.6) < 4 * c.std_error);
    // For jointly normal pairs Var(a b) = 1 + rho^2.
    CHECK(c.std_error == doctest::Approx(std::sqrt(1.36 / 4000.0)).epsilon(0.15));
  }

  TEST_CASE("identity rule keeps the initial variance") {
    const LocalFunction chi = LocalFunction::chi(0, 1, kPm);
    const std::vector<double> grid{0.0, 1.0, 3.0};
    const auto series = mc_covariance_series(make_nn2_rule(kIdentityNN2), 16, chi, chi, grid, 4000, kFair, 3);
    for (const auto& m : series) {
      CHECK(std::abs(m.mean - 1.0) < 4 * m.std_error + 1e-3);
    }
  }

  TEST_CASE("Monte Carlo covariance matches the exact value on a 3-site ring") {
    const PeriodicRule r = make_nn2_rule({0, 0.2, 0.8, 0.1});
    const LocalFunction f = LocalFunction::chi(0, 1, kPm);
    const LocalFunction g = LocalFunction::chi(1, 1, kPm);
    const auto init = uniform_distribution(8);
    for (double t : {0.0, 0.5, 1.5}) {
      const double exact = exact_covariance(r, 3, f.lift(3), g.lift(3), t, init);
      const auto mc = mc_covariance(r, 3, f, g, t, 20000, kFair, 7);
      CHECK(std::abs(mc.mean - exact) < 4 * mc.std_error);
    }
    const auto late = mc_covariance(r, 3, f, f, 40.0, 20000, kFair, 8);
    CHECK(std::abs(late.mean) < 4 * late.std_error);
  }

  TEST_CASE("decay fit") {
    std::vector<double> grid;
    std::vector<MeanStderr> cov;
    for (int k = 0; k < 8; ++k) {
      grid.push_back(k);
      cov.push_back({0.9 * std::exp(-0.3 * k), 1e-4});
    }
    const auto d = fit_decay_from(grid, cov);
    CHECK(d.fitted_rate == doctest::Approx(0.3));
    CHECK_FALSE(d.rate_is_lower_bound);
    CHECK(d.significant_points == 8);

    std::vector<MeanStderr> noisy(8, MeanStderr{0.0, 0.1});
    noisy[0] = {1.0, 0.01};
    const auto s = fit_decay_from(grid, noisy);
    CHECK(s.rate_is_lower_bound);
    CHECK(s.fitted_rate == doctest::Approx(std::log(1.0 / 0.3) / 7.0));

    const LocalFunction chi = LocalFunction::chi(0, 1, kPm);
    const std::vector<double> tg{0.0, 1.0, 2.0, 3.0};
    const auto id = fit_decay(make_nn2_rule(kIdentityNN2), 16, chi, chi, tg, 2000, kFair, 1, kPm);
    CHECK(std::abs(id.fitted_rate) < 0.02);
    CHECK_FALSE(id.bound_rate.has_value());
    CHECK_THROWS_AS(fit_decay(make_nn2_rule(kIdentityNN2), 16, chi, chi, std::vector<double>{0.0, 1.0}, 10, kFair, 1,
                              kPm),
                    Error);

    const PeriodicRule r = make_nn2_rule({0, 0.2, 0.8, 0.1});
    const std::vector<double> dg{0.0, 1.0, 2.0, 3.0, 4.0};
    const auto est = fit_decay(r, 64, chi, chi, dg, 4000, kFair, 2, kPm);
    REQUIRE(est.bound_rate.has_value());
    CHECK(*est.bound_rate == doctest::Approx(0.2));
    CHECK(est.bound_ok);
    CHECK(est.bound.size() == dg.size());
    CHECK(est.bound.front() == doctest::Approx(2.0));
  }

  TEST_CASE("disagreement density") {
    const std::vector<double> grid{0.0, 2.0, 20.0};
    const auto id = disagreement_density(make_nn2_rule(kIdentityNN2), 32, grid, 20, 1);
    for (const auto& p : id) {
      CHECK(p.density == 1.0);
    }
    const auto er = disagreement_density(make_nn2_rule({0, 0.2, 0.8, 0.1}), 64, grid, 200, 2);
    CHECK(er.front().density == 1.0);
    CHECK(er.back().density < 0.05);

    const std::vector<double> mg{0.0, 1.0, 2.0, 4.0, 8.0};
    const auto mono = disagreement_density(make_nn2_rule({0.95, 0.9, 0.1, 0.05}), 64, mg, 400, 3);
    for (std::size_t i = 1; i < mono.size(); ++i) {
      CHECK(mono[i].density <= mono[i - 1].density + 3 * (mono[i].std_error + mono[i - 1].std_error));
    }
  }

  TEST_CASE("boundary marginals") {
    const std::vector<double> grid{0.0, 1.0, 3.0};
    const auto id = boundary_marginals(make_nn2_rule(kIdentityNN2), 16, grid, 20, 1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(id.from_min[k][0] == 1.0);
      CHECK(id.from_max[k][1] == 1.0);
    }
    const std::vector<double> mg{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    const auto m = boundary_marginals(make_nn2_rule({0.95, 0.9, 0.1, 0.05}), 64, mg, 400, 2);
    for (std::size_t k = 1; k < mg.size(); ++k) {
      const double tol_max = 3 * (m.from_max_se[k][1] + m.from_max_se[k - 1][1]);
      const double tol_min = 3 * (m.from_min_se[k][1] + m.from_min_se[k - 1][1]);
      CHECK(m.from_max[k][1] <= m.from_max[k - 1][1] + tol_max);
      CHECK(m.from_min[k][1] >= m.from_min[k - 1][1] - tol_min);
    }
  }
}

TEST_SUITE("stats") {
  TEST_CASE("total variation and normalization") {
    const std::vector<double> p{0.5, 0.5, 0.0};
    const std::vector<double> q{0.25, 0.25, 0.5};
    CHECK(total_variation(p, q) == doctest::Approx(0.5));
    const std::vector<std::size_t> c{1, 3};
    CHECK(normalize_counts(c) == std::vector<double>{0.25, 0.75});
  }

  TEST_CASE("chi-squared goodness of fit") {
    const std::vector<std::size_t> counts{30, 70};
    const std::vector<double> probs{0.5, 0.5};
    const auto r = chi_squared_gof(counts, probs);
    CHECK(r.statistic == doctest::Approx(16.0));
    CHECK(r.dof == 1);
    // P(chi2_1 > 16) = erfc(sqrt(8)).
    CHECK(r.p_value == doctest::Approx(std::erfc(std::sqrt(8.0))).epsilon(1e-6));
    const std::vector<std::size_t> same{50, 50};
    CHECK(chi_squared_two_sample(same, same).p_value == doctest::Approx(1.0));
  }

  TEST_CASE("ks distance") {
    std::vector<double> s{0.1, 0.2, 0.3, 0.4};
    CHECK(ks_distance(s, [](double x) { return x; }) == doctest::Approx(0.6));
  }
}
