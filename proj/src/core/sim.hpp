#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "rules.hpp"

namespace ipslab {

using Config = std::vector<int>;

enum class ClockKind { exponential, delta1 };

struct Clock {
  ClockKind kind = ClockKind::exponential;
  double rate = 1.0;
};

/// How a uniform draw u becomes a new symbol. lower: smallest a with
/// u < P(symbol <= a). upper: largest a with u < P(symbol >= a). Both respect
/// the stochastic order of rows.
enum class SymbolChoice { lower, upper };

struct Event {
  double time;
  std::uint32_t site;
  int symbol;
};

/// Event-list record of a run on a ring of n sites. Every clock ring is
/// recorded, including those that leave the symbol unchanged.
class Trajectory {
 public:
  Trajectory(std::size_t alphabet_size, Clock clock, std::uint64_t seed, Config initial, std::vector<Event> events,
             double t_max);

  std::size_t size() const noexcept { return initial_.size(); }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  const Clock& clock() const noexcept { return clock_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Config& initial() const noexcept { return initial_; }
  std::span<const Event> events() const noexcept { return events_; }
  double t_max() const noexcept { return t_max_; }

  /// Symbol of a site at time t (events at exactly t are included).
  int query(std::size_t site, double t) const;
  Config state_at(double t) const;
  /// frames configurations at evenly spaced times from 0 to t_max.
  std::vector<Config> raster(std::size_t frames) const;

 private:
  std::size_t alphabet_size_;
  Clock clock_;
  std::uint64_t seed_;
  Config initial_;
  std::vector<Event> events_;
  double t_max_;
  std::vector<std::vector<std::uint32_t>> by_site_;
};

/// Precomputed lookup structure for running a periodic rule on a ring.
class RingKernel {
 public:
  RingKernel(const PeriodicRule& rule, std::size_t n);

  std::size_t size() const noexcept { return n_; }
  int alphabet_size() const noexcept { return q_; }
  std::size_t word_at(const int* config, std::size_t site) const {
    const std::uint32_t* nb = &neighbors_[site * m_];
    std::size_t w = 0;
    for (std::size_t k = 0; k < m_; ++k) {
      w = w * static_cast<std::size_t>(q_) + static_cast<std::size_t>(config[nb[k]]);
    }
    return w;
  }
  int choose(std::size_t site, std::size_t word, double u, SymbolChoice choice) const {
    const std::size_t base = (table_of_site_[site] * words_ + word) * static_cast<std::size_t>(q_);
    if (choice == SymbolChoice::lower) {
      int a = 0;
      while (a < q_ - 1 && u >= cdf_[base + static_cast<std::size_t>(a)]) {
        ++a;
      }
      return a;
    }
    int a = q_ - 1;
    while (a > 0 && !(u < tail_[base + static_cast<std::size_t>(a)])) {
      --a;
    }
    return a;
  }

 private:
  std::size_t n_;
  int q_;
  std::size_t m_;
  std::size_t words_;
  std::vector<std::uint32_t> neighbors_;
  std::vector<std::uint32_t> table_of_site_;
  std::vector<double> cdf_;
  std::vector<double> tail_;
};

/// Runs the aggregate-rate event loop until t_max. on_event(time, site,
/// new_symbol) is invoked before the configuration is updated.
template <class OnEvent>
void run_events(const RingKernel& kernel, Config& config, Rng& rng, double rate, double t_max, SymbolChoice choice,
                OnEvent&& on_event) {
  const std::size_t n = kernel.size();
  const double total = rate * static_cast<double>(n);
  double t = 0.0;
  while (true) {
    t += rng.exponential(total);
    if (t > t_max) {
      break;
    }
    const auto site = static_cast<std::size_t>(rng.below(n));
    const double u = rng.uniform();
    const int symbol = kernel.choose(site, kernel.word_at(config.data(), site), u, choice);
    on_event(t, site, symbol);
    config[site] = symbol;
  }
}

Trajectory simulate_forward(const PeriodicRule& rule, std::size_t n, const Config& init, double t_max, std::uint64_t seed,
                            double rate = 1.0, std::uint64_t stream = 0);
Trajectory simulate_pca(const PeriodicRule& rule, std::size_t n, const Config& init, std::size_t steps,
                        std::uint64_t seed, std::uint64_t stream = 0);

/// Shared event times, sites and uniforms for every rule/initial pair.
std::vector<Trajectory> couple(std::span<const PeriodicRule> rules, std::size_t n, std::span<const Config> inits,
                               double t_max, std::uint64_t seed, bool quantile, double rate = 1.0,
                               std::uint64_t stream = 0);

struct ConePoint {
  double time;
  long long site;
  double u;
};

struct ConeSample {
  std::vector<long long> window;
  double horizon = 0.0;
  std::vector<ConePoint> points;  // in decreasing time order
  std::vector<long long> base;    // sites needed at time 0, sorted
  bool truncated = false;
};

/// Backward cone of dependence of window x {t}. ring = 0 means the infinite
/// line; otherwise sites are reduced mod ring.
ConeSample cone_of_dependence(double t, std::span<const long long> window, const Neighborhood& neighborhood,
                              double rate, std::uint64_t seed, std::size_t cap = 1000000, std::size_t ring = 0,
                              std::uint64_t stream = 0);

/// Initial configuration generator: a constant, an i.i.d. law, a repeating
/// pattern, or a constant background with an interval [lo, hi] set to value.
struct InitLaw {
  enum class Kind { constant, iid, pattern, interval } kind = Kind::constant;
  int value = 0;
  std::vector<double> probs;
  std::vector<int> pattern;
  long long lo = 0;
  long long hi = -1;
  int background = 0;

  static InitLaw constant_law(int v) { return InitLaw{Kind::constant, v, {}, {}, 0, -1, 0}; }
  static InitLaw iid_law(std::vector<double> p) { return InitLaw{Kind::iid, 0, std::move(p), {}, 0, -1, 0}; }
  static InitLaw pattern_law(std::vector<int> p) { return InitLaw{Kind::pattern, 0, {}, std::move(p), 0, -1, 0}; }
  static InitLaw interval_law(long long l, long long h, int v, int bg) {
    return InitLaw{Kind::interval, v, {}, {}, l, h, bg};
  }

  int sample(long long site, Rng& rng) const;
  Config materialize(std::size_t n, Rng& rng) const;
  void validate(int alphabet_size) const;
};

class TruncatedCone : public Error {
 public:
  explicit TruncatedCone(ConeSample partial)
      : Error(ErrorKind::capacity, "cone of dependence exceeded its point cap"), partial_(std::move(partial)) {}
  const ConeSample& partial() const noexcept { return partial_; }

 private:
  ConeSample partial_;
};

/// Exact sample of the window at time t for the process on the infinite line
/// (ring = 0) or on a ring of the given size.
Config perfect_sample_window(const PeriodicRule& rule, const InitLaw& init, double t, std::span<const long long> window,
                             std::uint64_t seed, std::size_t cap = 1000000, std::size_t ring = 0,
                             std::uint64_t stream = 0, double rate = 1.0);

/// Gaps between retained points of Exp(1) arrivals kept with probability
/// lambda.
std::vector<double> sample_thinned_gaps(double lambda, std::size_t count, std::uint64_t seed);

}  // namespace ipslab
