#include "sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace ipslab {
namespace {

void check_ring(const PeriodicRule& rule, std::size_t n) {
  if (n == 0) {
    fail(ErrorKind::domain, "ring size must be at least 1");
  }
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::capacity, "ring size too large");
  }
  if (n % rule.period() != 0) {
    fail(ErrorKind::domain, "ring size must be a multiple of the rule period");
  }
}

void check_config(const Config& c, std::size_t n, int q) {
  if (c.size() != n) {
    fail(ErrorKind::domain, "initial configuration length must equal the ring size");
  }
  for (int s : c) {
    if (s < 0 || s >= q) {
      fail(ErrorKind::domain, "initial configuration has a symbol outside the alphabet");
    }
  }
}

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    fail(ErrorKind::domain, "time horizon must be finite and nonnegative");
  }
}

void check_rate(double rate) {
  if (!std::isfinite(rate) || rate <= 0.0) {
    fail(ErrorKind::domain, "clock rate must be positive");
  }
}

long long reduce(long long site, std::size_t ring) {
  if (ring == 0) {
    return site;
  }
  const auto r = static_cast<long long>(ring);
  const long long v = site % r;
  return v < 0 ? v + r : v;
}

int choose_lower(std::span<const double> row, double u) {
  double acc = 0.0;
  const int q = static_cast<int>(row.size());
  for (int a = 0; a < q - 1; ++a) {
    acc += row[static_cast<std::size_t>(a)];
    if (u < acc) {
      return a;
    }
  }
  return q - 1;
}

ConeSample cone_impl(Rng& rng, double t, std::span<const long long> window, const Neighborhood& neighborhood,
                     double rate, std::size_t cap, std::size_t ring) {
  check_time(t);
  check_rate(rate);
  if (cap == 0) {
    fail(ErrorKind::domain, "cone point cap must be at least 1");
  }
  ConeSample cone;
  cone.window.assign(window.begin(), window.end());
  cone.horizon = t;
  std::vector<long long> active;
  std::unordered_set<long long> member;
  auto adjoin = [&](long long site) {
    site = reduce(site, ring);
    if (member.insert(site).second) {
      active.push_back(site);
    }
  };
  for (long long s : window) {
    adjoin(s);
  }
  double s = t;
  while (!active.empty()) {
    s -= rng.exponential(rate * static_cast<double>(active.size()));
    if (s <= 0.0) {
      break;
    }
    if (cone.points.size() >= cap) {
      cone.truncated = true;
      break;
    }
    const long long site = active[rng.below(active.size())];
    cone.points.push_back({s, site, rng.uniform()});
    for (int off : neighborhood.offsets()) {
      adjoin(site + off);
    }
  }
  cone.base = active;
  std::sort(cone.base.begin(), cone.base.end());
  return cone;
}

}  // namespace

Trajectory::Trajectory(std::size_t alphabet_size, Clock clock, std::uint64_t seed, Config initial,
                       std::vector<Event> events, double t_max)
    : alphabet_size_(alphabet_size),
      clock_(clock),
      seed_(seed),
      initial_(std::move(initial)),
      events_(std::move(events)),
      t_max_(t_max),
      by_site_(initial_.size()) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    by_site_.at(events_[i].site).push_back(static_cast<std::uint32_t>(i));
  }
}

int Trajectory::query(std::size_t site, double t) const {
  const auto& idx = by_site_.at(site);
  auto it = std::upper_bound(idx.begin(), idx.end(), t,
                             [&](double tt, std::uint32_t i) { return tt < events_[i].time; });
  if (it == idx.begin()) {
    return initial_[site];
  }
  return events_[*(it - 1)].symbol;
}

Config Trajectory::state_at(double t) const {
  Config c = initial_;
  for (const Event& e : events_) {
    if (e.time > t) {
      break;
    }
    c[e.site] = e.symbol;
  }
  return c;
}

std::vector<Config> Trajectory::raster(std::size_t frames) const {
  std::vector<Config> out;
  if (frames == 0) {
    return out;
  }
  Config c = initial_;
  std::size_t next = 0;
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = frames == 1 ? t_max_ : t_max_ * static_cast<double>(k) / static_cast<double>(frames - 1);
    while (next < events_.size() && events_[next].time <= t) {
      c[events_[next].site] = events_[next].symbol;
      ++next;
    }
    out.push_back(c);
  }
  return out;
}

RingKernel::RingKernel(const PeriodicRule& rule, std::size_t n)
    : n_(n),
      q_(rule.alphabet().size()),
      m_(rule.neighborhood().size()),
      words_(rule.tables().front().word_count()),
      neighbors_(n * rule.neighborhood().size()),
      table_of_site_(n) {
  check_ring(rule, n);
  const auto offsets = rule.neighborhood().offsets();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < m_; ++k) {
      neighbors_[j * m_ + k] = static_cast<std::uint32_t>(reduce(static_cast<long long>(j) + offsets[k], n));
    }
    table_of_site_[j] = static_cast<std::uint32_t>(j % rule.period());
  }
  const auto q = static_cast<std::size_t>(q_);
  cdf_.resize(rule.period() * words_ * q);
  tail_.resize(rule.period() * words_ * q);
  for (std::size_t r = 0; r < rule.period(); ++r) {
    const RuleTable& t = rule.tables()[r];
    for (std::size_t w = 0; w < words_; ++w) {
      const std::size_t base = (r * words_ + w) * q;
      double acc = 0.0;
      for (std::size_t a = 0; a < q; ++a) {
        acc += t.prob(w, static_cast<int>(a));
        cdf_[base + a] = acc;
        tail_[base + a] = t.upper_tail(w, static_cast<int>(a));
      }
    }
  }
}

Trajectory simulate_forward(const PeriodicRule& rule, std::size_t n, const Config& init, double t_max, std::uint64_t seed,
                            double rate, std::uint64_t stream) {
  check_time(t_max);
  check_rate(rate);
  const RingKernel kernel(rule, n);
  check_config(init, n, rule.alphabet().size());
  Rng rng(seed, stream);
  Config c = init;
  std::vector<Event> events;
  events.reserve(static_cast<std::size_t>(rate * t_max * static_cast<double>(n) * 1.1) + 16);
  run_events(kernel, c, rng, rate, t_max, SymbolChoice::lower, [&](double t, std::size_t site, int symbol) {
    events.push_back({t, static_cast<std::uint32_t>(site), symbol});
  });
  return Trajectory(static_cast<std::size_t>(rule.alphabet().size()), Clock{ClockKind::exponential, rate}, seed, init,
                    std::move(events), t_max);
}

Trajectory simulate_pca(const PeriodicRule& rule, std::size_t n, const Config& init, std::size_t steps,
                        std::uint64_t seed, std::uint64_t stream) {
  const RingKernel kernel(rule, n);
  check_config(init, n, rule.alphabet().size());
  Rng rng(seed, stream);
  Config c = init;
  Config next(n);
  std::vector<Event> events;
  events.reserve(n * steps);
  for (std::size_t k = 1; k <= steps; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      next[j] = kernel.choose(j, kernel.word_at(c.data(), j), rng.uniform(), SymbolChoice::lower);
      events.push_back({static_cast<double>(k), static_cast<std::uint32_t>(j), next[j]});
    }
    c.swap(next);
  }
  return Trajectory(static_cast<std::size_t>(rule.alphabet().size()), Clock{ClockKind::delta1, 1.0}, seed, init,
                    std::move(events), static_cast<double>(steps));
}

std::vector<Trajectory> couple(std::span<const PeriodicRule> rules, std::size_t n, std::span<const Config> inits,
                               double t_max, std::uint64_t seed, bool quantile, double rate, std::uint64_t stream) {
  check_time(t_max);
  check_rate(rate);
  if (rules.empty() || rules.size() != inits.size()) {
    fail(ErrorKind::domain, "couple needs equally many rules and initial configurations");
  }
  std::vector<RingKernel> kernels;
  for (const auto& r : rules) {
    if (!(r.alphabet() == rules.front().alphabet())) {
      fail(ErrorKind::domain, "coupled rules must share the alphabet");
    }
    kernels.emplace_back(r, n);
  }
  const std::size_t k = rules.size();
  std::vector<Config> configs;
  for (const auto& c : inits) {
    check_config(c, n, rules.front().alphabet().size());
    configs.push_back(c);
  }
  const SymbolChoice choice = quantile ? SymbolChoice::upper : SymbolChoice::lower;
  std::vector<std::vector<Event>> events(k);
  Rng rng(seed, stream);
  const double total = rate * static_cast<double>(n);
  double t = 0.0;
  while (true) {
    t += rng.exponential(total);
    if (t > t_max) {
      break;
    }
    const auto site = static_cast<std::size_t>(rng.below(n));
    const double u = rng.uniform();
    for (std::size_t i = 0; i < k; ++i) {
      const int s = kernels[i].choose(site, kernels[i].word_at(configs[i].data(), site), u, choice);
      events[i].push_back({t, static_cast<std::uint32_t>(site), s});
    }
    for (std::size_t i = 0; i < k; ++i) {
      configs[i][site] = events[i].back().symbol;
    }
  }
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.emplace_back(static_cast<std::size_t>(rules[i].alphabet().size()), Clock{ClockKind::exponential, rate}, seed,
                     inits[i], std::move(events[i]), t_max);
  }
  return out;
}

ConeSample cone_of_dependence(double t, std::span<const long long> window, const Neighborhood& neighborhood,
                              double rate, std::uint64_t seed, std::size_t cap, std::size_t ring,
                              std::uint64_t stream) {
  Rng rng(seed, stream);
  return cone_impl(rng, t, window, neighborhood, rate, cap, ring);
}

int InitLaw::sample(long long site, Rng& rng) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::iid: {
      return choose_lower(probs, rng.uniform());
    }
    case Kind::pattern: {
      const auto len = static_cast<long long>(pattern.size());
      const long long r = ((site % len) + len) % len;
      return pattern[static_cast<std::size_t>(r)];
    }
    case Kind::interval:
      return site >= lo && site <= hi ? value : background;
  }
  return value;
}

Config InitLaw::materialize(std::size_t n, Rng& rng) const {
  Config c(n);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = sample(static_cast<long long>(j), rng);
  }
  return c;
}

void InitLaw::validate(int alphabet_size) const {
  auto in_range = [&](int s) { return s >= 0 && s < alphabet_size; };
  switch (kind) {
    case Kind::constant:
      if (!in_range(value)) {
        fail(ErrorKind::domain, "initial symbol outside the alphabet");
      }
      break;
    case Kind::iid: {
      if (probs.size() != static_cast<std::size_t>(alphabet_size)) {
        fail(ErrorKind::domain, "i.i.d. initial law needs one probability per symbol");
      }
      double sum = 0.0;
      for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
          fail(ErrorKind::domain, "initial law probabilities must lie in [0,1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        fail(ErrorKind::domain, "initial law probabilities must sum to 1");
      }
      break;
    }
    case Kind::pattern:
      if (pattern.empty() || !std::all_of(pattern.begin(), pattern.end(), in_range)) {
        fail(ErrorKind::domain, "initial pattern must be non-empty with symbols inside the alphabet");
      }
      break;
    case Kind::interval:
      if (!in_range(value) || !in_range(background)) {
        fail(ErrorKind::domain, "interval initial symbols outside the alphabet");
      }
      break;
  }
}

Config perfect_sample_window(const PeriodicRule& rule, const InitLaw& init, double t, std::span<const long long> window,
                             std::uint64_t seed, std::size_t cap, std::size_t ring, std::uint64_t stream, double rate) {
  init.validate(rule.alphabet().size());
  if (ring != 0 && ring % rule.period() != 0) {
    fail(ErrorKind::domain, "ring size must be a multiple of the rule period");
  }
  Rng rng(seed, stream);
  ConeSample cone = cone_impl(rng, t, window, rule.neighborhood(), rate, cap, ring);
  if (cone.truncated) {
    throw TruncatedCone(std::move(cone));
  }
  std::unordered_map<long long, int> state;
  state.reserve(cone.base.size() * 2);
  for (long long s : cone.base) {
    state[s] = init.sample(s, rng);
  }
  const auto offsets = rule.neighborhood().offsets();
  std::vector<int> word(offsets.size());
  for (auto it = cone.points.rbegin(); it != cone.points.rend(); ++it) {
    const RuleTable& table = rule.table(it->site);
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      word[k] = state.at(reduce(it->site + offsets[k], ring));
    }
    state[it->site] = choose_lower(table.row(table.encode(word)), it->u);
  }
  Config out;
  out.reserve(window.size());
  for (long long s : window) {
    out.push_back(state.at(reduce(s, ring)));
  }
  return out;
}

std::vector<double> sample_thinned_gaps(double lambda, std::size_t count, std::uint64_t seed) {
  if (!std::isfinite(lambda) || lambda <= 0.0 || lambda > 1.0) {
    fail(ErrorKind::domain, "thinning probability must lie in (0,1]");
  }
  Rng rng(seed, 0);
  std::vector<double> gaps;
  gaps.reserve(count);
  double t = 0.0;
  double last = 0.0;
  while (gaps.size() < count) {
    t += rng.exponential(1.0);
    if (rng.bernoulli(lambda)) {
      gaps.push_back(t - last);
      last = t;
    }
  }
  return gaps;
}

}  // namespace ipslab
