#include "rules.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "error.hpp"
#include "lp.hpp"

namespace ipslab {
namespace {

constexpr std::size_t kMaxTableEntries = std::size_t{1} << 24;
constexpr double kCoefSnap = 1e-13;

std::size_t checked_word_count(int q, std::size_t m) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < m; ++i) {
    count *= static_cast<std::size_t>(q);
    if (count * static_cast<std::size_t>(q) > kMaxTableEntries) {
      fail(ErrorKind::capacity, "rule table too large: alphabet^|N| exceeds the supported size");
    }
  }
  return count;
}

std::size_t self_or_throw(const Neighborhood& nb, const char* op) {
  auto pos = nb.self_position();
  if (!pos) {
    fail(ErrorKind::unsupported, std::string(op) + " requires offset 0 in the neighborhood");
  }
  return *pos;
}

void require_binary(const Alphabet& a, const char* op) {
  if (a.size() != 2) {
    fail(ErrorKind::unsupported, std::string(op) + " requires alphabet size 2");
  }
}

int mod_nonneg(long long v, long long m) {
  long long r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

// Symbol at neighborhood position k of a binary word.
int bit_at(std::size_t word, std::size_t m, std::size_t k) { return static_cast<int>((word >> (m - 1 - k)) & 1U); }

std::uint32_t ones_mask(std::size_t word, std::size_t m) {
  std::uint32_t mask = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (bit_at(word, m, k) != 0) {
      mask |= std::uint32_t{1} << k;
    }
  }
  return mask;
}

std::string subset_label(std::uint32_t subset, std::span<const int> offsets) {
  std::string out = "{";
  bool first = true;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    if ((subset >> k) & 1U) {
      if (!first) {
        out += ",";
      }
      out += std::to_string(offsets[k]);
      first = false;
    }
  }
  return out + "}";
}

double snap(double v) { return std::abs(v) < kCoefSnap ? 0.0 : v; }

// Value P(1|word) of a deterministic component matrix.
double component_value(DecompositionMode mode, int parity, std::uint32_t subset, std::uint32_t word_ones) {
  const std::uint32_t hit = subset & word_ones;
  if (mode == DecompositionMode::additive) {
    return hit != 0 ? 1.0 : 0.0;
  }
  const int odd = std::popcount(hit) & 1;
  return parity == 1 ? 1.0 - odd : static_cast<double>(odd);
}

struct Column {
  int parity;
  std::uint32_t subset;
  enum class Role { ones, identity, other } role;
};

DecompositionResult decompose(const RuleTable& rule, bool extended, DecompositionMode mode) {
  require_binary(rule.alphabet(), "decomposition");
  const std::size_t m = rule.neighborhood().size();
  if (m > 16) {
    fail(ErrorKind::capacity, "decomposition supports at most 16 neighborhood offsets");
  }
  const auto self = rule.neighborhood().self_position();
  const std::uint32_t self_mask = self ? (std::uint32_t{1} << *self) : 0;
  const std::uint32_t subsets = std::uint32_t{1} << m;

  std::vector<Column> columns;
  if (mode == DecompositionMode::additive) {
    columns.push_back({-1, 0, Column::Role::ones});
    for (std::uint32_t s = 0; s < subsets; ++s) {
      const bool is_identity = self && s == self_mask;
      columns.push_back({-1, s, is_identity ? Column::Role::identity : Column::Role::other});
    }
  } else {
    for (int parity : {0, 1}) {
      for (std::uint32_t s = 0; s < subsets; ++s) {
        Column::Role role = Column::Role::other;
        if (parity == 1 && s == 0) {
          role = Column::Role::ones;
        } else if (parity == 0 && self && s == self_mask) {
          role = Column::Role::identity;
        }
        columns.push_back({parity, s, role});
      }
    }
  }
  std::size_t identity_col = columns.size();
  std::size_t ones_col = 0;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].role == Column::Role::identity) {
      identity_col = j;
    } else if (columns[j].role == Column::Role::ones) {
      ones_col = j;
    }
  }
  const bool split_identity = extended && identity_col < columns.size();
  const std::size_t vars = columns.size() + (split_identity ? 1 : 0);
  const std::size_t words = rule.word_count();
  const std::size_t rows = words + 1;
  std::vector<double> a(rows * vars, 0.0);
  std::vector<double> b(rows, 0.0);
  for (std::size_t w = 0; w < words; ++w) {
    const std::uint32_t on = ones_mask(w, m);
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto& col = columns[j];
      const double v = col.role == Column::Role::ones ? 1.0 : component_value(mode, col.parity, col.subset, on);
      a[w * vars + j] = v;
    }
    if (split_identity) {
      a[w * vars + columns.size()] = -a[w * vars + identity_col];
    }
    b[w] = rule.prob(w, 1);
  }
  for (std::size_t j = 0; j < columns.size(); ++j) {
    a[words * vars + j] = 1.0;
  }
  if (split_identity) {
    a[words * vars + columns.size()] = -1.0;
  }
  b[words] = 1.0;
  std::vector<double> c(vars, 0.0);
  c[ones_col] = 1.0;

  const LpResult lp = simplex_maximize(rows, vars, a, b, c);

  DecompositionResult out;
  out.mode = mode;
  out.extended = extended;
  out.offsets.assign(rule.neighborhood().offsets().begin(), rule.neighborhood().offsets().end());
  out.feasible = lp.status == LpStatus::optimal;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& col = columns[j];
    double v = out.feasible ? lp.x[j] : 0.0;
    if (out.feasible && j == identity_col && split_identity) {
      v -= lp.x[columns.size()];
    }
    v = snap(v);
    if (col.role == Column::Role::ones) {
      out.ones_coeff = v;
    } else if (col.role == Column::Role::identity) {
      out.identity_coeff = v;
    } else {
      std::string label = subset_label(col.subset, rule.neighborhood().offsets());
      if (mode == DecompositionMode::cancellative) {
        label = "P" + std::to_string(col.parity) + "," + label;
      }
      out.components.push_back({col.parity, col.subset, v, std::move(label)});
    }
  }
  return out;
}

}  // namespace

Alphabet::Alphabet(int size) : size_(size) {
  if (size < 2) {
    fail(ErrorKind::domain, "alphabet size must be at least 2");
  }
}

Neighborhood::Neighborhood(std::vector<int> offsets) : offsets_(std::move(offsets)) {
  if (offsets_.empty()) {
    fail(ErrorKind::domain, "neighborhood must not be empty");
  }
  std::set<int> seen;
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    if (!seen.insert(offsets_[k]).second) {
      fail(ErrorKind::domain, "neighborhood offsets must be distinct");
    }
    if (offsets_[k] == 0) {
      self_ = k;
    }
  }
}

RuleTable::RuleTable(Alphabet alphabet, Neighborhood neighborhood, std::vector<double> probs)
    : alphabet_(alphabet),
      neighborhood_(std::move(neighborhood)),
      word_count_(checked_word_count(alphabet.size(), neighborhood_.size())),
      probs_(std::move(probs)) {
  const auto q = static_cast<std::size_t>(alphabet_.size());
  if (probs_.size() != word_count_ * q) {
    fail(ErrorKind::domain, "rule table must have alphabet^|N| rows of alphabet entries");
  }
  for (std::size_t w = 0; w < word_count_; ++w) {
    double sum = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
      double& p = probs_[w * q + a];
      if (!std::isfinite(p) || p < -kRowSumTol || p > 1.0 + kRowSumTol) {
        fail(ErrorKind::domain, "rule probabilities must lie in [0,1]");
      }
      p = std::clamp(p, 0.0, 1.0);
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol * static_cast<double>(q)) {
      fail(ErrorKind::domain, "rule rows must sum to 1");
    }
  }
}

double RuleTable::upper_tail(std::size_t word, int a) const {
  const auto r = row(word);
  double s = 0.0;
  for (std::size_t b = static_cast<std::size_t>(a); b < r.size(); ++b) {
    s += r[b];
  }
  return s;
}

std::vector<int> RuleTable::decode(std::size_t word) const {
  const std::size_t m = neighborhood_.size();
  std::vector<int> symbols(m);
  const auto q = static_cast<std::size_t>(alphabet_.size());
  for (std::size_t k = m; k-- > 0;) {
    symbols[k] = static_cast<int>(word % q);
    word /= q;
  }
  return symbols;
}

std::size_t RuleTable::encode(std::span<const int> symbols) const {
  std::size_t word = 0;
  for (int s : symbols) {
    word = word * static_cast<std::size_t>(alphabet_.size()) + static_cast<std::size_t>(s);
  }
  return word;
}

int RuleTable::self_symbol(std::size_t word) const {
  const std::size_t pos = self_or_throw(neighborhood_, "self symbol");
  const auto q = static_cast<std::size_t>(alphabet_.size());
  for (std::size_t k = neighborhood_.size() - 1; k > pos; --k) {
    word /= q;
  }
  return static_cast<int>(word % q);
}

bool approx_equal(const RuleTable& a, const RuleTable& b, double tol) {
  if (!(a.alphabet() == b.alphabet()) || !(a.neighborhood() == b.neighborhood())) {
    return false;
  }
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (std::abs(da[i] - db[i]) > tol) {
      return false;
    }
  }
  return true;
}

PeriodicRule::PeriodicRule(RuleTable table) : tables_{std::move(table)} {}

PeriodicRule::PeriodicRule(std::vector<RuleTable> tables) : tables_(std::move(tables)) {
  if (tables_.empty()) {
    fail(ErrorKind::domain, "periodic rule needs at least one table");
  }
  for (const auto& t : tables_) {
    if (!(t.alphabet() == tables_.front().alphabet()) || !(t.neighborhood() == tables_.front().neighborhood())) {
      fail(ErrorKind::domain, "all tables of a periodic rule must share alphabet and neighborhood");
    }
  }
}

const RuleTable& PeriodicRule::table(long long site) const {
  return tables_[static_cast<std::size_t>(mod_nonneg(site, static_cast<long long>(tables_.size())))];
}

bool approx_equal(const PeriodicRule& a, const PeriodicRule& b, double tol) {
  if (a.period() != b.period()) {
    return false;
  }
  for (std::size_t r = 0; r < a.period(); ++r) {
    if (!approx_equal(a.tables()[r], b.tables()[r], tol)) {
      return false;
    }
  }
  return true;
}

RuleTable make_nn2_rule(const ParamsNN2& p) {
  const auto arr = p.as_array();
  for (double v : arr) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      fail(ErrorKind::domain, "nn2 parameters must lie in [0,1]");
    }
  }
  // Words 00, 01, 10, 11 in that order.
  const double p1[4] = {p.p00, p.p01, p.p10, p.p11};
  std::vector<double> probs;
  probs.reserve(8);
  for (double v : p1) {
    probs.push_back(1.0 - v);
    probs.push_back(v);
  }
  return RuleTable(Alphabet(2), Neighborhood({0, 1}), std::move(probs));
}

std::optional<ParamsNN2> nn2_params(const RuleTable& rule) {
  if (rule.alphabet().size() != 2 || rule.neighborhood().size() != 2 || rule.neighborhood().offsets()[0] != 0 ||
      rule.neighborhood().offsets()[1] != 1) {
    return std::nullopt;
  }
  return ParamsNN2{rule.prob(3, 1), rule.prob(2, 1), rule.prob(1, 1), rule.prob(0, 1)};
}

RuleTable identity_rule(Alphabet alphabet, Neighborhood neighborhood) {
  const std::size_t pos = self_or_throw(neighborhood, "identity rule");
  const std::size_t m = neighborhood.size();
  const std::size_t words = checked_word_count(alphabet.size(), m);
  const auto q = static_cast<std::size_t>(alphabet.size());
  std::size_t stride = 1;
  for (std::size_t k = pos + 1; k < m; ++k) {
    stride *= q;
  }
  std::vector<double> probs(words * q, 0.0);
  for (std::size_t w = 0; w < words; ++w) {
    probs[w * q + (w / stride) % q] = 1.0;
  }
  return RuleTable(alphabet, std::move(neighborhood), std::move(probs));
}

RuleTable time_scale(const RuleTable& rule, double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0 || lambda > 1.0) {
    fail(ErrorKind::domain, "time scale lambda must lie in (0,1]");
  }
  self_or_throw(rule.neighborhood(), "time scaling");
  const auto q = static_cast<std::size_t>(rule.alphabet().size());
  std::vector<double> probs(rule.data().begin(), rule.data().end());
  for (std::size_t w = 0; w < rule.word_count(); ++w) {
    const auto own = static_cast<std::size_t>(rule.self_symbol(w));
    for (std::size_t a = 0; a < q; ++a) {
      probs[w * q + a] = lambda * probs[w * q + a] + (a == own ? 1.0 - lambda : 0.0);
    }
  }
  return RuleTable(rule.alphabet(), rule.neighborhood(), std::move(probs));
}

PeriodicRule time_scale(const PeriodicRule& rule, double lambda) {
  std::vector<RuleTable> tables;
  for (const auto& t : rule.tables()) {
    tables.push_back(time_scale(t, lambda));
  }
  return PeriodicRule(std::move(tables));
}

ParamsNN2 time_scale(const ParamsNN2& p, double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0 || lambda > 1.0) {
    fail(ErrorKind::domain, "time scale lambda must lie in (0,1]");
  }
  const auto id = kIdentityNN2.as_array();
  auto v = p.as_array();
  for (std::size_t i = 0; i < 4; ++i) {
    v[i] = lambda * v[i] + (1.0 - lambda) * id[i];
  }
  return ParamsNN2::from_array(v);
}

std::string face_name(Face face) {
  switch (face) {
    case Face::p11_zero:
      return "p11=0";
    case Face::p10_zero:
      return "p10=0";
    case Face::p01_one:
      return "p01=1";
    case Face::p00_one:
      return "p00=1";
  }
  return "unknown";
}

FaceProjection project_to_face(const ParamsNN2& p) {
  make_nn2_rule(p);  // range validation
  const auto v = p.as_array();
  // Scalar placing the projected point on each face:
  // p11 = 1 - l, p10 = 1 - l, p01 = l, p00 = l.
  const std::array<double, 4> candidates{1.0 - v[0], 1.0 - v[1], v[2], v[3]};
  const double lambda = *std::max_element(candidates.begin(), candidates.end());
  if (lambda <= 0.0) {
    fail(ErrorKind::domain, "identity rule has no projection");
  }
  std::size_t face = 0;
  while (candidates[face] < lambda) {
    ++face;
  }
  const auto id = kIdentityNN2.as_array();
  std::array<double, 4> q{};
  for (std::size_t i = 0; i < 4; ++i) {
    q[i] = std::clamp(id[i] + (v[i] - id[i]) / lambda, 0.0, 1.0);
  }
  q[face] = face < 2 ? 0.0 : 1.0;
  return {static_cast<Face>(face), ParamsNN2::from_array(q), lambda};
}

RuleTable flip_states(const RuleTable& rule) {
  require_binary(rule.alphabet(), "flip_states");
  const std::size_t words = rule.word_count();
  const std::size_t all = words - 1;  // complement of a binary word
  std::vector<double> probs(words * 2);
  for (std::size_t w = 0; w < words; ++w) {
    const double p1 = 1.0 - rule.prob(all - w, 1);
    probs[w * 2] = 1.0 - p1;
    probs[w * 2 + 1] = p1;
  }
  return RuleTable(rule.alphabet(), rule.neighborhood(), std::move(probs));
}

PeriodicRule alternating_flip(const PeriodicRule& rule) {
  require_binary(rule.alphabet(), "alternating_flip");
  const std::size_t period = std::lcm(rule.period(), std::size_t{2});
  const auto offsets = rule.neighborhood().offsets();
  const std::size_t m = offsets.size();
  std::vector<RuleTable> tables;
  for (std::size_t r = 0; r < period; ++r) {
    const RuleTable& src = rule.table(static_cast<long long>(r));
    std::size_t mask = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (mod_nonneg(static_cast<long long>(r) + offsets[k], 2) == 1) {
        mask |= std::size_t{1} << (m - 1 - k);
      }
    }
    const bool own_flipped = r % 2 == 1;
    std::vector<double> probs(src.word_count() * 2);
    for (std::size_t w = 0; w < src.word_count(); ++w) {
      double p1 = src.prob(w ^ mask, 1);
      if (own_flipped) {
        p1 = 1.0 - p1;
      }
      probs[w * 2] = 1.0 - p1;
      probs[w * 2 + 1] = p1;
    }
    tables.emplace_back(src.alphabet(), src.neighborhood(), std::move(probs));
  }
  return PeriodicRule(std::move(tables));
}

PeriodicRule alternating_flip(const ParamsNN2& p) { return alternating_flip(PeriodicRule(make_nn2_rule(p))); }

bool is_positive_rates(const PeriodicRule& rule, double eps) {
  for (const auto& t : rule.tables()) {
    self_or_throw(t.neighborhood(), "positive rates");
    for (std::size_t w = 0; w < t.word_count(); ++w) {
      if (t.prob(w, t.self_symbol(w)) >= 1.0 - eps) {
        return false;
      }
    }
  }
  return true;
}

namespace {

bool check_monotone(const PeriodicRule& rule, bool weak) {
  const int q = rule.alphabet().size();
  const auto self = rule.neighborhood().self_position();
  for (const auto& t : rule.tables()) {
    const std::size_t words = t.word_count();
    std::vector<std::vector<int>> decoded(words);
    for (std::size_t w = 0; w < words; ++w) {
      decoded[w] = t.decode(w);
    }
    for (std::size_t hi = 0; hi < words; ++hi) {
      for (std::size_t lo = 0; lo < words; ++lo) {
        const auto& z = decoded[hi];
        const auto& x = decoded[lo];
        bool ge = true;
        for (std::size_t k = 0; k < z.size() && ge; ++k) {
          ge = z[k] >= x[k];
        }
        if (!ge || hi == lo) {
          continue;
        }
        for (int a = 1; a < q; ++a) {
          if (weak && self && ((z[*self] >= a) != (x[*self] >= a))) {
            continue;
          }
          if (t.upper_tail(hi, a) < t.upper_tail(lo, a) - kSlack) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

}  // namespace

bool is_monotone(const PeriodicRule& rule) { return check_monotone(rule, false); }

bool is_weakly_monotone(const PeriodicRule& rule) { return check_monotone(rule, true); }

bool check_weak_lemma(const PeriodicRule& rule, double lambda) { return is_monotone(time_scale(rule, lambda)); }

bool in_gray_region(const ParamsNN2& p, double eps) {
  return p.p11 <= p.p10 + kSlack && p.p10 < 1.0 - eps && p.p01 > eps && p.p01 <= p.p00 + kSlack;
}

DecompositionResult decompose_additive(const RuleTable& rule, bool extended) {
  return decompose(rule, extended, DecompositionMode::additive);
}

DecompositionResult decompose_cancellative(const RuleTable& rule, bool extended) {
  return decompose(rule, extended, DecompositionMode::cancellative);
}

double griffeath_rate(const DecompositionResult& d) {
  if (!d.feasible) {
    fail(ErrorKind::infeasible, "no ergodicity rate for an infeasible decomposition");
  }
  return d.mode == DecompositionMode::additive ? d.ones_coeff : 2.0 * d.ones_coeff;
}

RuleTable reconstruct(const DecompositionResult& d) {
  if (d.offsets.empty()) {
    fail(ErrorKind::domain, "decomposition has no neighborhood");
  }
  Neighborhood nb(d.offsets);
  const std::size_t m = nb.size();
  const auto self = nb.self_position();
  const std::size_t words = std::size_t{1} << m;
  std::vector<double> probs(words * 2);
  for (std::size_t w = 0; w < words; ++w) {
    const std::uint32_t on = ones_mask(w, m);
    double p1 = d.ones_coeff;
    if (self) {
      p1 += d.identity_coeff * bit_at(w, m, *self);
    }
    for (const auto& c : d.components) {
      p1 += c.coeff * component_value(d.mode, c.parity, c.subset, on);
    }
    probs[w * 2] = 1.0 - p1;
    probs[w * 2 + 1] = p1;
  }
  return RuleTable(Alphabet(2), std::move(nb), std::move(probs));
}

}  // namespace ipslab
