#include "estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"
#include "parallel.hpp"

namespace ipslab {
namespace {

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) {
    fail(ErrorKind::domain, "time grid must not be empty");
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1])) {
      fail(ErrorKind::domain, "time grid must be finite, nonnegative and increasing");
    }
  }
}

// Runs one replica and calls observe(k, config) at every grid time t_grid[k].
template <class Observe>
void observe_run(const RingKernel& kernel, Config& config, Rng& rng, std::span<const double> t_grid,
                 SymbolChoice choice, Observe&& observe) {
  std::size_t next = 0;
  run_events(kernel, config, rng, 1.0, t_grid.back(), choice, [&](double t, std::size_t, int) {
    while (next < t_grid.size() && t_grid[next] < t) {
      observe(next, config);
      ++next;
    }
  });
  while (next < t_grid.size()) {
    observe(next, config);
    ++next;
  }
}

}  // namespace

double LocalFunction::operator()(const Config& c) const {
  const auto n = static_cast<long long>(c.size());
  std::size_t w = 0;
  for (long long s : sites) {
    long long k = s % n;
    if (k < 0) {
      k += n;
    }
    w = w * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(c[static_cast<std::size_t>(k)]);
  }
  return values[w];
}

double LocalFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

std::vector<double> LocalFunction::lift(std::size_t n) const {
  std::size_t states = 1;
  for (std::size_t i = 0; i < n; ++i) {
    states *= static_cast<std::size_t>(alphabet_size);
  }
  std::vector<double> out(states);
  Config c(n);
  for (std::size_t s = 0; s < states; ++s) {
    std::size_t rest = s;
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = static_cast<int>(rest % static_cast<std::size_t>(alphabet_size));
      rest /= static_cast<std::size_t>(alphabet_size);
    }
    out[s] = (*this)(c);
  }
  return out;
}

LocalFunction LocalFunction::chi(long long site, int letter, const ProductBasis& basis) {
  LocalFunction f;
  f.sites = {site};
  f.alphabet_size = basis.alphabet().size();
  for (int s = 0; s < f.alphabet_size; ++s) {
    f.values.push_back(basis.factor(s, letter));
  }
  return f;
}

MeanStderr covariance_jackknife(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 2) {
    fail(ErrorKind::domain, "covariance needs at least two paired samples");
  }
  long double sa = 0.0L;
  long double sb = 0.0L;
  long double sab = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    sa += a[i];
    sb += b[i];
    sab += static_cast<long double>(a[i]) * b[i];
  }
  auto cov = [](long double xa, long double xb, long double xab, long double m) {
    return (xab - xa * xb / m) / (m - 1.0L);
  };
  MeanStderr r;
  const auto nn = static_cast<long double>(n);
  r.mean = static_cast<double>(cov(sa, sb, sab, nn));
  if (n < 3) {
    r.std_error = std::numeric_limits<double>::infinity();
    return r;
  }
  std::vector<long double> loo(n);
  long double loo_sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    loo[i] = cov(sa - a[i], sb - b[i], sab - static_cast<long double>(a[i]) * b[i], nn - 1.0L);
    loo_sum += loo[i];
  }
  const long double loo_mean = loo_sum / nn;
  long double ss = 0.0L;
  for (long double v : loo) {
    ss += (v - loo_mean) * (v - loo_mean);
  }
  r.std_error = static_cast<double>(std::sqrt((nn - 1.0L) / nn * ss));
  return r;
}

std::vector<MeanStderr> mc_covariance_series(const PeriodicRule& rule, std::size_t n, const LocalFunction& f,
                                             const LocalFunction& g, std::span<const double> t_grid,
                                             std::size_t replicas, const InitLaw& init, std::uint64_t seed) {
  check_grid(t_grid);
  if (replicas < 2) {
    fail(ErrorKind::domain, "covariance estimation needs at least two replicas");
  }
  init.validate(rule.alphabet().size());
  const RingKernel kernel(rule, n);
  const std::size_t points = t_grid.size();
  std::vector<double> f0(replicas);
  std::vector<double> gt(replicas * points);
  parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, r);
    Config c = init.materialize(n, rng);
    f0[r] = f(c);
    observe_run(kernel, c, rng, t_grid, SymbolChoice::lower,
                [&](std::size_t k, const Config& cfg) { gt[r * points + k] = g(cfg); });
  });
  std::vector<MeanStderr> out;
  std::vector<double> column(replicas);
  for (std::size_t k = 0; k < points; ++k) {
    for (std::size_t r = 0; r < replicas; ++r) {
      column[r] = gt[r * points + k];
    }
    out.push_back(covariance_jackknife(f0, column));
  }
  return out;
}

MeanStderr mc_covariance(const PeriodicRule& rule, std::size_t n, const LocalFunction& f, const LocalFunction& g,
                         double t, std::size_t replicas, const InitLaw& init, std::uint64_t seed) {
  const double grid[1] = {t};
  return mc_covariance_series(rule, n, f, g, grid, replicas, init, seed).front();
}

DecayEstimate fit_decay_from(std::span<const double> t_grid, std::span<const MeanStderr> cov) {
  if (t_grid.size() != cov.size()) {
    fail(ErrorKind::domain, "decay fit needs one estimate per grid time");
  }
  DecayEstimate d;
  d.t_grid.assign(t_grid.begin(), t_grid.end());
  d.cov.assign(cov.begin(), cov.end());
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < cov.size(); ++i) {
    if (std::abs(cov[i].mean) > 3.0 * cov[i].std_error && cov[i].mean != 0.0) {
      xs.push_back(t_grid[i]);
      ys.push_back(std::log(std::abs(cov[i].mean)));
    }
  }
  d.significant_points = xs.size();
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    d.fitted_rate = sxx > 0.0 ? -sxy / sxx : 0.0;
    return d;
  }
  // Below the noise floor: report the smallest rate consistent with the
  // covariance vanishing into the noise by the last grid time.
  d.rate_is_lower_bound = true;
  const MeanStderr& first = cov.front();
  const MeanStderr& last = cov.back();
  const double span = t_grid.back() - t_grid.front();
  if (span > 0.0 && std::abs(first.mean) > 3.0 * last.std_error && last.std_error > 0.0) {
    d.fitted_rate = std::log(std::abs(first.mean) / (3.0 * last.std_error)) / span;
  }
  return d;
}

DecayEstimate fit_decay(const PeriodicRule& rule, std::size_t n, const LocalFunction& f, const LocalFunction& g,
                        std::span<const double> t_grid, std::size_t replicas, const InitLaw& init, std::uint64_t seed,
                        const std::optional<ProductBasis>& basis) {
  if (t_grid.size() < 4) {
    fail(ErrorKind::domain, "decay fit needs at least four grid times");
  }
  const auto cov = mc_covariance_series(rule, n, f, g, t_grid, replicas, init, seed);
  DecayEstimate d = fit_decay_from(t_grid, cov);
  if (basis) {
    const CriterionReport rep = criterion_verdict(rule, *basis);
    if (rep.pass) {
      d.bound_rate = rep.rate;
      const std::vector<int> sites(g.sites.begin(), g.sites.end());
      const double g_pi = seminorm_pi(represent(g.values, sites, *basis), false);
      const double constant = 2.0 * f.sup_norm() * g_pi;
      for (std::size_t i = 0; i < t_grid.size(); ++i) {
        d.bound.push_back(constant * std::exp(-rep.rate * t_grid[i]));
        if (std::abs(cov[i].mean) > d.bound.back() + 3.0 * cov[i].std_error) {
          d.bound_ok = false;
        }
      }
    }
  }
  return d;
}

std::vector<DensityPoint> disagreement_density(const PeriodicRule& rule, std::size_t n, std::span<const double> t_grid,
                                               std::size_t replicas, std::uint64_t seed) {
  check_grid(t_grid);
  if (rule.alphabet().size() != 2) {
    fail(ErrorKind::unsupported, "disagreement density requires alphabet size 2");
  }
  if (replicas < 1) {
    fail(ErrorKind::domain, "disagreement density needs at least one replica");
  }
  const RingKernel kernel(rule, n);
  const std::size_t points = t_grid.size();
  std::vector<double> frac(replicas * points);
  parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, r);
    Config lo(n, 0);
    Config hi(n, 1);
    std::size_t differ = n;
    std::size_t next = 0;
    const double total = static_cast<double>(n);
    double t = 0.0;
    while (true) {
      t += rng.exponential(total);
      while (next < points && t_grid[next] < t) {
        frac[r * points + next] = static_cast<double>(differ) / total;
        ++next;
      }
      if (t > t_grid.back()) {
        break;
      }
      const auto site = static_cast<std::size_t>(rng.below(n));
      const double u = rng.uniform();
      const int a = kernel.choose(site, kernel.word_at(lo.data(), site), u, SymbolChoice::upper);
      const int b = kernel.choose(site, kernel.word_at(hi.data(), site), u, SymbolChoice::upper);
      differ -= lo[site] != hi[site] ? 1 : 0;
      lo[site] = a;
      hi[site] = b;
      differ += a != b ? 1 : 0;
    }
  });
  std::vector<DensityPoint> out;
  std::vector<double> column(replicas);
  for (std::size_t k = 0; k < points; ++k) {
    for (std::size_t r = 0; r < replicas; ++r) {
      column[r] = frac[r * points + k];
    }
    const MeanStderr m = mean_stderr(column);
    out.push_back({t_grid[k], m.mean, replicas < 2 ? 0.0 : m.std_error});
  }
  return out;
}

BoundaryMarginals boundary_marginals(const PeriodicRule& rule, std::size_t n, std::span<const double> t_grid,
                                     std::size_t replicas, std::uint64_t seed) {
  check_grid(t_grid);
  if (replicas < 1) {
    fail(ErrorKind::domain, "boundary marginals need at least one replica");
  }
  const RingKernel kernel(rule, n);
  const int q = rule.alphabet().size();
  const std::size_t points = t_grid.size();
  const auto qs = static_cast<std::size_t>(q);
  // [replica][start][time][symbol] site-averaged frequencies
  std::vector<double> freq(replicas * 2 * points * qs, 0.0);
  parallel_for(replicas, [&](std::size_t r) {
    for (std::size_t start = 0; start < 2; ++start) {
      Rng rng(seed, 2 * r + start);
      Config c(n, start == 0 ? 0 : q - 1);
      observe_run(kernel, c, rng, t_grid, SymbolChoice::lower, [&](std::size_t k, const Config& cfg) {
        double* slot = &freq[((r * 2 + start) * points + k) * qs];
        for (int s : cfg) {
          slot[static_cast<std::size_t>(s)] += 1.0 / static_cast<double>(n);
        }
      });
    }
  });
  BoundaryMarginals out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  std::vector<double> column(replicas);
  for (std::size_t start = 0; start < 2; ++start) {
    auto& means = start == 0 ? out.from_min : out.from_max;
    auto& ses = start == 0 ? out.from_min_se : out.from_max_se;
    means.assign(points, std::vector<double>(qs));
    ses.assign(points, std::vector<double>(qs));
    for (std::size_t k = 0; k < points; ++k) {
      for (std::size_t a = 0; a < qs; ++a) {
        for (std::size_t r = 0; r < replicas; ++r) {
          column[r] = freq[((r * 2 + start) * points + k) * qs + a];
        }
        const MeanStderr m = mean_stderr(column);
        means[k][a] = m.mean;
        ses[k][a] = replicas < 2 ? 0.0 : m.std_error;
      }
    }
  }
  return out;
}

}  // namespace ipslab
