#include "stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace ipslab {
namespace {

constexpr double kMinExpected = 5.0;

double chi_squared_sf(double statistic, int dof) {
  if (dof <= 0) {
    return 1.0;
  }
  const boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    fail(ErrorKind::domain, "total variation needs distributions of equal length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += std::abs(p[i] - q[i]);
  }
  return 0.5 * s;
}

std::vector<double> normalize_counts(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (std::size_t c : counts) {
    total += static_cast<double>(c);
  }
  std::vector<double> p(counts.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      p[i] = static_cast<double>(counts[i]) / total;
    }
  }
  return p;
}

ChiSquaredResult chi_squared_gof(std::span<const std::size_t> counts, std::span<const double> probs) {
  if (counts.size() != probs.size()) {
    fail(ErrorKind::domain, "chi-squared needs counts and probabilities of equal length");
  }
  double total = 0.0;
  for (std::size_t c : counts) {
    total += static_cast<double>(c);
  }
  ChiSquaredResult r;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = probs[i] * total;
    const auto o = static_cast<double>(counts[i]);
    if (e < kMinExpected) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    r.statistic += (o - e) * (o - e) / e;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    r.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  } else if (pooled_obs > 0.0) {
    r.statistic = std::numeric_limits<double>::infinity();
  }
  r.dof = cells - 1;
  r.p_value = std::isinf(r.statistic) ? 0.0 : chi_squared_sf(r.statistic, r.dof);
  return r;
}

ChiSquaredResult chi_squared_two_sample(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::domain, "two-sample chi-squared needs count vectors of equal length");
  }
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  ChiSquaredResult r;
  if (na == 0.0 || nb == 0.0) {
    return r;
  }
  const double n = na + nb;
  auto add_cell = [&](double oa, double ob) {
    const double col = oa + ob;
    const double ea = na * col / n;
    const double eb = nb * col / n;
    r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  };
  double pooled_a = 0.0;
  double pooled_b = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto oa = static_cast<double>(a[i]);
    const auto ob = static_cast<double>(b[i]);
    const double col = oa + ob;
    if (col == 0.0) {
      continue;
    }
    if (std::min(na, nb) * col / n < kMinExpected) {
      pooled_a += oa;
      pooled_b += ob;
      continue;
    }
    add_cell(oa, ob);
    ++cells;
  }
  if (pooled_a + pooled_b > 0.0) {
    add_cell(pooled_a, pooled_b);
    ++cells;
  }
  r.dof = cells - 1;
  r.p_value = chi_squared_sf(r.statistic, r.dof);
  return r;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    fail(ErrorKind::domain, "KS distance needs at least one sample");
  }
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr r;
  if (values.empty()) {
    return r;
  }
  long double s = 0.0L;
  for (double v : values) {
    s += v;
  }
  const auto n = static_cast<long double>(values.size());
  r.mean = static_cast<double>(s / n);
  if (values.size() < 2) {
    r.std_error = std::numeric_limits<double>::infinity();
    return r;
  }
  long double ss = 0.0L;
  for (double v : values) {
    const long double d = v - static_cast<long double>(r.mean);
    ss += d * d;
  }
  r.std_error = static_cast<double>(std::sqrt(ss / (n - 1.0L) / n));
  return r;
}

}  // namespace ipslab
