#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ipslab {

/// Default slack for strict inequalities ("< 1", "> 0") on rule parameters.
inline constexpr double kStrictEps = 1e-9;
/// Slack for non-strict inequalities in the structural classifiers.
inline constexpr double kSlack = 1e-12;
/// Row-sum tolerance for stochastic rows.
inline constexpr double kRowSumTol = 1e-12;

/// Symbols are 0..size-1 with the natural order.
class Alphabet {
 public:
  explicit Alphabet(int size);
  int size() const noexcept { return size_; }
  int max_symbol() const noexcept { return size_ - 1; }
  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  int size_;
};

/// Ordered interaction offsets relative to the updated site. The first offset
/// is the most significant digit of a neighborhood word.
class Neighborhood {
 public:
  explicit Neighborhood(std::vector<int> offsets);
  std::span<const int> offsets() const noexcept { return offsets_; }
  std::size_t size() const noexcept { return offsets_.size(); }
  /// Position of offset 0 inside the word, if the site reads itself.
  std::optional<std::size_t> self_position() const noexcept { return self_; }
  friend bool operator==(const Neighborhood& a, const Neighborhood& b) { return a.offsets_ == b.offsets_; }

 private:
  std::vector<int> offsets_;
  std::optional<std::size_t> self_;
};

/// Transition matrix of one site: a probability row over the alphabet for each
/// neighborhood word. Words are ordered lexicographically, first offset most
/// significant.
class RuleTable {
 public:
  /// probs holds word_count() rows of alphabet.size() entries each.
  RuleTable(Alphabet alphabet, Neighborhood neighborhood, std::vector<double> probs);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const Neighborhood& neighborhood() const noexcept { return neighborhood_; }
  std::size_t word_count() const noexcept { return word_count_; }

  std::span<const double> row(std::size_t word) const {
    return {probs_.data() + word * static_cast<std::size_t>(alphabet_.size()),
            static_cast<std::size_t>(alphabet_.size())};
  }
  double prob(std::size_t word, int symbol) const { return row(word)[static_cast<std::size_t>(symbol)]; }
  /// P(symbol >= a | word).
  double upper_tail(std::size_t word, int a) const;
  std::span<const double> data() const noexcept { return probs_; }

  std::vector<int> decode(std::size_t word) const;
  std::size_t encode(std::span<const int> symbols) const;
  /// Symbol of the updated site inside the word; requires offset 0.
  int self_symbol(std::size_t word) const;

 private:
  Alphabet alphabet_;
  Neighborhood neighborhood_;
  std::size_t word_count_;
  std::vector<double> probs_;
};

bool approx_equal(const RuleTable& a, const RuleTable& b, double tol);

/// Site j uses tables[j mod period]. A homogeneous rule has period 1.
class PeriodicRule {
 public:
  PeriodicRule(RuleTable table);  // NOLINT: a homogeneous rule is a period-1 rule
  explicit PeriodicRule(std::vector<RuleTable> tables);

  std::size_t period() const noexcept { return tables_.size(); }
  const RuleTable& table(long long site) const;
  std::span<const RuleTable> tables() const noexcept { return tables_; }
  const Alphabet& alphabet() const noexcept { return tables_.front().alphabet(); }
  const Neighborhood& neighborhood() const noexcept { return tables_.front().neighborhood(); }

 private:
  std::vector<RuleTable> tables_;
};

bool approx_equal(const PeriodicRule& a, const PeriodicRule& b, double tol);

/// (p_{1|11}, p_{1|10}, p_{1|01}, p_{1|00}) of the one-sided nearest-neighbor
/// binary rule; the word is (own site, right neighbor).
struct ParamsNN2 {
  double p11 = 0.0;
  double p10 = 0.0;
  double p01 = 0.0;
  double p00 = 0.0;

  std::array<double, 4> as_array() const { return {p11, p10, p01, p00}; }
  static ParamsNN2 from_array(const std::array<double, 4>& p) { return {p[0], p[1], p[2], p[3]}; }
};

inline constexpr ParamsNN2 kIdentityNN2{1.0, 1.0, 0.0, 0.0};

RuleTable make_nn2_rule(const ParamsNN2& p);
/// Recovers the parameters when the rule is binary on offsets [0, 1].
std::optional<ParamsNN2> nn2_params(const RuleTable& rule);

RuleTable identity_rule(Alphabet alphabet, Neighborhood neighborhood);

/// lambda * rule + (1 - lambda) * identity.
RuleTable time_scale(const RuleTable& rule, double lambda);
PeriodicRule time_scale(const PeriodicRule& rule, double lambda);
ParamsNN2 time_scale(const ParamsNN2& p, double lambda);

enum class Face { p11_zero = 0, p10_zero = 1, p01_one = 2, p00_one = 3 };
std::string face_name(Face face);

struct FaceProjection {
  Face face;
  ParamsNN2 params;
  double lambda;
};

/// Moves p away from the identity along the line through (1,1,0,0) until it
/// hits the first face of the parameter cube opposite the identity.
FaceProjection project_to_face(const ParamsNN2& p);

/// Renames symbol a to size-1-a; binary rules only.
RuleTable flip_states(const RuleTable& rule);

/// Conjugates a binary rule by flipping the state of every odd site. The
/// result has period lcm(period, 2).
PeriodicRule alternating_flip(const PeriodicRule& rule);
PeriodicRule alternating_flip(const ParamsNN2& p);

bool is_positive_rates(const PeriodicRule& rule, double eps = kStrictEps);
bool is_monotone(const PeriodicRule& rule);
bool is_weakly_monotone(const PeriodicRule& rule);
/// is_monotone(time_scale(rule, lambda)).
bool check_weak_lemma(const PeriodicRule& rule, double lambda);

/// p11 <= p10 < 1 and 0 < p01 <= p00.
bool in_gray_region(const ParamsNN2& p, double eps = kStrictEps);

enum class DecompositionMode { additive, cancellative };

struct DecompositionComponent {
  int parity = -1;              // -1 for additive components, 0/1 for P_{i,S}
  std::uint32_t subset = 0;     // bitmask over neighborhood positions
  double coeff = 0.0;
  std::string label;
};

struct DecompositionResult {
  DecompositionMode mode = DecompositionMode::additive;
  double ones_coeff = 0.0;
  double identity_coeff = 0.0;
  std::vector<DecompositionComponent> components;  // everything except 1 and identity
  bool extended = false;
  bool feasible = false;
  std::vector<int> offsets;
};

DecompositionResult decompose_additive(const RuleTable& rule, bool extended);
DecompositionResult decompose_cancellative(const RuleTable& rule, bool extended);
/// Certified lower bound on the exponential ergodicity rate.
double griffeath_rate(const DecompositionResult& d);
/// Rebuilds the binary rule from a decomposition.
RuleTable reconstruct(const DecompositionResult& d);

}  // namespace ipslab
