#include "oracle.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace ipslab {
namespace {

constexpr double kMaxChunk = 50.0;

std::size_t local_word(const PeriodicRule& rule, const Config& c, std::size_t site) {
  const auto n = static_cast<long long>(c.size());
  const auto q = static_cast<std::size_t>(rule.alphabet().size());
  std::size_t w = 0;
  for (int off : rule.neighborhood().offsets()) {
    long long k = (static_cast<long long>(site) + off) % n;
    if (k < 0) {
      k += n;
    }
    w = w * q + static_cast<std::size_t>(c[static_cast<std::size_t>(k)]);
  }
  return w;
}

void check_ring(const PeriodicRule& rule, std::size_t n) {
  if (n == 0 || n % rule.period() != 0) {
    fail(ErrorKind::domain, "ring size must be a positive multiple of the rule period");
  }
}

// Applies sum_k Pois(mu; k) * step^k to v for one uniformization chunk.
template <class Step>
Eigen::VectorXd poisson_series(const Eigen::VectorXd& v, double mu, double tol, Step&& step) {
  double weight = std::exp(-mu);
  double cumulative = weight;
  Eigen::VectorXd term = v;
  Eigen::VectorXd acc = weight * v;
  const auto max_terms = static_cast<std::size_t>(mu + 40.0 * std::sqrt(mu + 1.0) + 100.0);
  for (std::size_t k = 1; k <= max_terms && 1.0 - cumulative > tol; ++k) {
    term = step(term);
    weight *= mu / static_cast<double>(k);
    cumulative += weight;
    acc += weight * term;
  }
  return acc;
}

template <class Step>
Eigen::VectorXd uniformize(const Generator& gen, Eigen::VectorXd v, double t, double tol, Step&& step_with) {
  if (!std::isfinite(t) || t < 0.0) {
    fail(ErrorKind::domain, "time must be finite and nonnegative");
  }
  const double lambda = gen.matrix.diagonal().cwiseAbs().maxCoeff();
  if (t == 0.0 || lambda == 0.0) {
    return v;
  }
  const Eigen::MatrixXd kernel =
      Eigen::MatrixXd::Identity(gen.matrix.rows(), gen.matrix.cols()) + gen.matrix / lambda;
  const double total = lambda * t;
  const auto chunks = static_cast<std::size_t>(std::ceil(total / kMaxChunk));
  const double mu = total / static_cast<double>(chunks);
  const double chunk_tol = tol / static_cast<double>(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    v = poisson_series(v, mu, chunk_tol, [&](const Eigen::VectorXd& x) { return step_with(kernel, x); });
  }
  return v;
}

Eigen::VectorXd to_vector(std::span<const double> v, std::size_t states) {
  if (v.size() != states) {
    fail(ErrorKind::domain, "vector length must equal the number of ring states");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::size_t state_count(int alphabet_size, std::size_t n, std::size_t cap) {
  std::size_t states = 1;
  for (std::size_t i = 0; i < n; ++i) {
    states *= static_cast<std::size_t>(alphabet_size);
    if (states > cap) {
      fail(ErrorKind::capacity, "state space exceeds the oracle cap of " + std::to_string(cap) + " states");
    }
  }
  return states;
}

Config decode_state(std::size_t index, int alphabet_size, std::size_t n) {
  Config c(n);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = static_cast<int>(index % static_cast<std::size_t>(alphabet_size));
    index /= static_cast<std::size_t>(alphabet_size);
  }
  return c;
}

std::size_t encode_state(const Config& config, int alphabet_size) {
  std::size_t index = 0;
  for (std::size_t j = config.size(); j-- > 0;) {
    index = index * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(config[j]);
  }
  return index;
}

Generator build_generator(const PeriodicRule& rule, std::size_t n, std::size_t cap, double rate) {
  check_ring(rule, n);
  const int q = rule.alphabet().size();
  const std::size_t states = state_count(q, n, cap);
  Generator gen;
  gen.alphabet_size = q;
  gen.sites = n;
  gen.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
  std::vector<std::size_t> place(n, 1);
  for (std::size_t j = 1; j < n; ++j) {
    place[j] = place[j - 1] * static_cast<std::size_t>(q);
  }
  for (std::size_t s = 0; s < states; ++s) {
    const Config c = decode_state(s, q, n);
    double out = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = rule.table(static_cast<long long>(j)).row(local_word(rule, c, j));
      for (int a = 0; a < q; ++a) {
        if (a == c[j] || row[static_cast<std::size_t>(a)] == 0.0) {
          continue;
        }
        const std::size_t target = s + place[j] * static_cast<std::size_t>(a) - place[j] * static_cast<std::size_t>(c[j]);
        const double r = rate * row[static_cast<std::size_t>(a)];
        gen.matrix(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(target)) += r;
        out += r;
      }
    }
    gen.matrix(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = -out;
  }
  return gen;
}

std::vector<double> exact_distribution(const Generator& gen, std::span<const double> init, double t, double tol) {
  const Eigen::VectorXd v = to_vector(init, gen.states());
  return to_std(uniformize(gen, v, t, tol, [](const Eigen::MatrixXd& k, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(k.transpose() * x);
  }));
}

std::vector<double> exact_backward(const Generator& gen, std::span<const double> g, double t, double tol) {
  const Eigen::VectorXd v = to_vector(g, gen.states());
  return to_std(uniformize(gen, v, t, tol, [](const Eigen::MatrixXd& k, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(k * x);
  }));
}

double exact_covariance(const Generator& gen, std::span<const double> f, std::span<const double> g, double t,
                        std::span<const double> init, double tol) {
  const Eigen::VectorXd fv = to_vector(f, gen.states());
  const Eigen::VectorXd mu = to_vector(init, gen.states());
  const std::vector<double> h = exact_backward(gen, g, t, tol);
  const Eigen::VectorXd hv = to_vector(h, gen.states());
  const double efh = mu.dot(fv.cwiseProduct(hv));
  const double ef = mu.dot(fv);
  const double eg = mu.dot(hv);
  return efh - ef * eg;
}

double exact_covariance(const PeriodicRule& rule, std::size_t n, std::span<const double> f,
                        std::span<const double> g, double t, std::span<const double> init) {
  return exact_covariance(build_generator(rule, n), f, g, t, init);
}

Eigen::MatrixXd pca_step_matrix(const PeriodicRule& rule, std::size_t n, std::size_t cap) {
  check_ring(rule, n);
  const int q = rule.alphabet().size();
  const std::size_t states = state_count(q, n, cap);
  Eigen::MatrixXd k(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
  std::vector<std::span<const double>> rows(n);
  for (std::size_t s = 0; s < states; ++s) {
    const Config c = decode_state(s, q, n);
    for (std::size_t j = 0; j < n; ++j) {
      rows[j] = rule.table(static_cast<long long>(j)).row(local_word(rule, c, j));
    }
    for (std::size_t target = 0; target < states; ++target) {
      double p = 1.0;
      std::size_t rest = target;
      for (std::size_t j = 0; j < n && p != 0.0; ++j) {
        p *= rows[j][rest % static_cast<std::size_t>(q)];
        rest /= static_cast<std::size_t>(q);
      }
      k(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(target)) = p;
    }
  }
  return k;
}

std::vector<double> exact_pca_distribution(const PeriodicRule& rule, std::size_t n, std::span<const double> init,
                                           std::size_t steps, std::size_t cap) {
  const Eigen::MatrixXd k = pca_step_matrix(rule, n, cap);
  Eigen::VectorXd v = to_vector(init, static_cast<std::size_t>(k.rows()));
  const Eigen::MatrixXd kt = k.transpose();
  for (std::size_t i = 0; i < steps; ++i) {
    v = kt * v;
  }
  return to_std(v);
}

std::vector<double> point_mass(std::size_t index, std::size_t states) {
  std::vector<double> v(states, 0.0);
  v.at(index) = 1.0;
  return v;
}

std::vector<double> uniform_distribution(std::size_t states) {
  return std::vector<double>(states, 1.0 / static_cast<double>(states));
}

}  // namespace ipslab
