#include "checks.hpp"

#include <cmath>

#include "error.hpp"
#include "oracle.hpp"
#include "parallel.hpp"

namespace ipslab {
namespace {

constexpr std::uint64_t kConeStreams = std::uint64_t{1} << 40;
constexpr std::uint64_t kScaledStreams = std::uint64_t{2} << 40;
constexpr std::uint64_t kUnscaledStreams = std::uint64_t{3} << 40;

std::vector<std::size_t> tally(const std::vector<std::size_t>& states, std::size_t count) {
  std::vector<std::size_t> c(count, 0);
  for (std::size_t s : states) {
    ++c[s];
  }
  return c;
}

SampleComparison compare(const std::vector<std::size_t>& counts, const std::vector<double>& exact) {
  SampleComparison s;
  s.tv = total_variation(normalize_counts(counts), exact);
  s.chi2 = chi_squared_gof(counts, exact);
  return s;
}

Json chi_json(const ChiSquaredResult& c) {
  Json j;
  j["statistic"] = round12(c.statistic);
  j["dof"] = c.dof;
  j["p_value"] = round12(c.p_value);
  return j;
}

Json comparison_json(const SampleComparison& s) {
  Json j;
  j["tv"] = round12(s.tv);
  j["chi2"] = chi_json(s.chi2);
  return j;
}

}  // namespace

std::vector<double> init_distribution(const InitLaw& init, int alphabet_size, std::size_t n) {
  init.validate(alphabet_size);
  const std::size_t states = state_count(alphabet_size, n);
  if (init.kind == InitLaw::Kind::iid) {
    std::vector<double> d(states);
    for (std::size_t s = 0; s < states; ++s) {
      const Config c = decode_state(s, alphabet_size, n);
      double p = 1.0;
      for (int v : c) {
        p *= init.probs[static_cast<std::size_t>(v)];
      }
      d[s] = p;
    }
    return d;
  }
  Rng unused(0, 0);
  return point_mass(encode_state(init.materialize(n, unused), alphabet_size), states);
}

std::vector<std::size_t> forward_state_counts(const PeriodicRule& rule, std::size_t n, const InitLaw& init, double t,
                                              std::size_t replicas, std::uint64_t seed, std::uint64_t stream_base) {
  init.validate(rule.alphabet().size());
  const int q = rule.alphabet().size();
  const std::size_t states = state_count(q, n);
  const RingKernel kernel(rule, n);
  std::vector<std::size_t> finals(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, stream_base + r);
    Config c = init.materialize(n, rng);
    run_events(kernel, c, rng, 1.0, t, SymbolChoice::lower, [](double, std::size_t, int) {});
    finals[r] = encode_state(c, q);
  });
  return tally(finals, states);
}

std::vector<std::size_t> cone_state_counts(const PeriodicRule& rule, std::size_t n, const InitLaw& init, double t,
                                           std::size_t replicas, std::uint64_t seed, std::uint64_t stream_base) {
  const int q = rule.alphabet().size();
  const std::size_t states = state_count(q, n);
  std::vector<long long> window(n);
  for (std::size_t j = 0; j < n; ++j) {
    window[j] = static_cast<long long>(j);
  }
  std::vector<std::size_t> finals(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const Config c = perfect_sample_window(rule, init, t, window, seed, 1000000, n, stream_base + r);
    finals[r] = encode_state(c, q);
  });
  return tally(finals, states);
}

OracleCheckReport oracle_check(const PeriodicRule& rule, const OracleCheckOptions& options) {
  if (options.replicas < 1) {
    fail(ErrorKind::domain, "oracle check needs at least one replica");
  }
  const int q = rule.alphabet().size();
  OracleCheckReport rep;
  rep.options = options;
  const Generator gen = build_generator(rule, options.n);
  const std::vector<double> mu0 = init_distribution(options.init, q, options.n);
  rep.exact = exact_distribution(gen, mu0, options.t);
  rep.forward = compare(
      forward_state_counts(rule, options.n, options.init, options.t, options.replicas, options.seed), rep.exact);
  if (options.cone) {
    rep.cone = compare(cone_state_counts(rule, options.n, options.init, options.t, options.replicas, options.seed,
                                         kConeStreams),
                       rep.exact);
  }
  if (options.lambda) {
    const double lambda = *options.lambda;
    const PeriodicRule scaled = time_scale(rule, lambda);
    TimeScalingCheck ts;
    ts.lambda = lambda;
    const Generator gs = build_generator(scaled, options.n);
    ts.generator_max_diff = (gs.matrix - lambda * gen.matrix).cwiseAbs().maxCoeff();
    const auto exact_unscaled = exact_distribution(gen, mu0, lambda * options.t);
    const auto exact_scaled = exact_distribution(gs, mu0, options.t);
    ts.exact_tv = total_variation(exact_unscaled, exact_scaled);
    const auto a = forward_state_counts(rule, options.n, options.init, lambda * options.t, options.replicas,
                                        options.seed, kUnscaledStreams);
    const auto b = forward_state_counts(scaled, options.n, options.init, options.t, options.replicas, options.seed,
                                        kScaledStreams);
    ts.two_sample = chi_squared_two_sample(a, b);
    rep.time_scaling = ts;
  }
  return rep;
}

Json oracle_check_to_json(const OracleCheckReport& report) {
  Json j;
  j["n"] = report.options.n;
  j["t"] = round12(report.options.t);
  j["replicas"] = report.options.replicas;
  j["seed"] = report.options.seed;
  j["states"] = report.exact.size();
  j["forward"] = comparison_json(report.forward);
  if (report.cone) {
    j["cone"] = comparison_json(*report.cone);
  }
  if (report.time_scaling) {
    const auto& ts = *report.time_scaling;
    Json k;
    k["lambda"] = round12(ts.lambda);
    k["generator_max_diff"] = round12(ts.generator_max_diff);
    k["exact_tv"] = round12(ts.exact_tv);
    k["two_sample"] = chi_json(ts.two_sample);
    j["time_scaling"] = k;
  }
  Json exact = Json::array();
  for (double p : report.exact) {
    exact.push_back(round12(p));
  }
  j["exact"] = exact;
  return j;
}

}  // namespace ipslab
