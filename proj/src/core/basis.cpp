#include "basis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"
#include "parallel.hpp"

namespace ipslab {
namespace {

Eigen::MatrixXd factor_matrix(const ProductBasis& basis) {
  const int q = basis.alphabet().size();
  Eigen::MatrixXd m(q, q);
  for (int s = 0; s < q; ++s) {
    for (int b = 0; b < q; ++b) {
      m(s, b) = basis.factor(s, b);
    }
  }
  return m;
}

// Applies the linear map `op` (q-vector to q-vector) along every axis of a
// tensor with `dims` axes.
template <class Op>
std::vector<double> apply_along_axes(std::size_t q, const Op& op, std::vector<double> data, std::size_t dims) {
  std::size_t stride = 1;
  Eigen::VectorXd fiber(static_cast<Eigen::Index>(q));
  for (std::size_t axis = 0; axis < dims; ++axis) {
    const std::size_t block = stride * q;
    for (std::size_t base = 0; base < data.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t i = 0; i < q; ++i) {
          fiber(static_cast<Eigen::Index>(i)) = data[base + off + i * stride];
        }
        const Eigen::VectorXd out = op(fiber);
        for (std::size_t i = 0; i < q; ++i) {
          data[base + off + i * stride] = out(static_cast<Eigen::Index>(i));
        }
      }
    }
    stride = block;
  }
  return data;
}

std::size_t power(std::size_t q, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) {
    r *= q;
  }
  return r;
}

struct LetterStats {
  double alpha_term;
  double beta_term;
};

LetterStats letter_stats(const UpdateCoefficients& uc) {
  const std::size_t self = uc.self_index();
  const bool has_self = uc.self_position.has_value();
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < uc.repr.coeffs.size(); ++i) {
    const double c = uc.repr.coeffs[i];
    b += std::abs(c);
    a += (has_self && i == self) ? c : std::abs(c);
  }
  return {a, b};
}

}  // namespace

ProductBasis::ProductBasis(Alphabet alphabet, std::vector<double> x, std::vector<double> y)
    : alphabet_(alphabet), x_(std::move(x)), y_(std::move(y)) {
  const auto letters = static_cast<std::size_t>(alphabet_.size() - 1);
  if (x_.size() != letters || y_.size() != letters) {
    fail(ErrorKind::domain, "product basis needs one x and one y value per non-minimal symbol");
  }
  for (std::size_t i = 0; i < letters; ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) {
      fail(ErrorKind::domain, "product basis values must be finite");
    }
    if (x_[i] == y_[i]) {
      fail(ErrorKind::domain, "product basis requires x(a) != y(a) for every letter");
    }
  }
}

std::array<bool, 4> ProductBasis::conditions() const {
  std::array<bool, 4> ok{true, true, true, true};
  const int q = alphabet_.size();
  for (int a = 1; a < q; ++a) {
    if (std::abs(x(a)) > 1.0 + kSlack || std::abs(y(a)) > 1.0 + kSlack) {
      ok[0] = false;
    }
    if (x(a) * y(a) > kSlack) {
      ok[1] = false;
    }
    for (int b = 1; b < a; ++b) {
      if (std::abs(x(b)) + std::abs(y(a)) + std::abs(x(b) * y(a)) > 1.0 + kSlack) {
        ok[2] = false;
      }
    }
  }
  return ok;
}

double BasisRepr::coeff(std::span<const int> letters) const {
  std::size_t idx = 0;
  for (int l : letters) {
    idx = idx * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(l);
  }
  return coeffs.at(idx);
}

BasisRepr represent(std::span<const double> values, std::span<const int> sites, const ProductBasis& basis) {
  const auto q = static_cast<std::size_t>(basis.alphabet().size());
  if (values.size() != power(q, sites.size())) {
    fail(ErrorKind::domain, "function table must have alphabet^|K| entries");
  }
  const Eigen::MatrixXd m = factor_matrix(basis);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    fail(ErrorKind::numeric,
         "product basis system is numerically singular (condition number estimate " +
             std::to_string(rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity()) + ")");
  }
  BasisRepr r;
  r.sites.assign(sites.begin(), sites.end());
  r.alphabet_size = static_cast<int>(q);
  r.coeffs = apply_along_axes(
      q, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(lu.solve(v)); },
      std::vector<double>(values.begin(), values.end()), sites.size());
  return r;
}

std::vector<double> evaluate(const BasisRepr& repr, const ProductBasis& basis) {
  const Eigen::MatrixXd m = factor_matrix(basis);
  return apply_along_axes(
      static_cast<std::size_t>(m.rows()), [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(m * v); }, repr.coeffs,
      repr.sites.size());
}

double seminorm_pi(const BasisRepr& repr, bool starred) {
  double s = 0.0;
  for (std::size_t i = starred ? 0 : 1; i < repr.coeffs.size(); ++i) {
    s += std::abs(repr.coeffs[i]);
  }
  return s;
}

std::size_t UpdateCoefficients::self_index() const {
  if (!self_position) {
    return std::numeric_limits<std::size_t>::max();
  }
  const std::size_t m = repr.sites.size();
  return static_cast<std::size_t>(letter) * power(static_cast<std::size_t>(repr.alphabet_size), m - 1 - *self_position);
}

double UpdateCoefficients::self_coeff() const { return self_position ? repr.coeffs[self_index()] : 0.0; }

UpdateCoefficients update_row(const PeriodicRule& rule, const ProductBasis& basis, std::size_t residue, int letter) {
  if (!(rule.alphabet() == basis.alphabet())) {
    fail(ErrorKind::domain, "rule and basis alphabets differ");
  }
  if (letter < 1 || letter >= rule.alphabet().size()) {
    fail(ErrorKind::domain, "update letter must be a non-minimal symbol");
  }
  const RuleTable& t = rule.table(static_cast<long long>(residue));
  std::vector<double> values(t.word_count());
  const double xa = basis.x(letter);
  const double ya = basis.y(letter);
  for (std::size_t w = 0; w < t.word_count(); ++w) {
    const double up = t.upper_tail(w, letter);
    values[w] = up * xa + (1.0 - up) * ya;
  }
  UpdateCoefficients uc;
  uc.residue = residue % rule.period();
  uc.letter = letter;
  uc.self_position = t.neighborhood().self_position();
  uc.repr = represent(values, t.neighborhood().offsets(), basis);
  return uc;
}

double alpha(const PeriodicRule& rule, const ProductBasis& basis) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rule.period(); ++r) {
    for (int a = 1; a < rule.alphabet().size(); ++a) {
      best = std::max(best, letter_stats(update_row(rule, basis, r, a)).alpha_term);
    }
  }
  return best;
}

double beta(const PeriodicRule& rule, const ProductBasis& basis) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rule.period(); ++r) {
    for (int a = 1; a < rule.alphabet().size(); ++a) {
      best = std::max(best, letter_stats(update_row(rule, basis, r, a)).beta_term);
    }
  }
  return best;
}

CriterionReport criterion_verdict(const PeriodicRule& rule, const ProductBasis& basis, double eps) {
  CriterionReport rep;
  rep.basis = basis;
  rep.alpha = -std::numeric_limits<double>::infinity();
  rep.beta = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rule.period(); ++r) {
    for (int a = 1; a < rule.alphabet().size(); ++a) {
      const LetterStats s = letter_stats(update_row(rule, basis, r, a));
      rep.alpha = std::max(rep.alpha, s.alpha_term);
      rep.beta = std::max(rep.beta, s.beta_term);
    }
  }
  rep.conditions = basis.conditions();
  const bool conditions_ok = std::all_of(rep.conditions.begin(), rep.conditions.end(), [](bool b) { return b; });
  rep.pass = conditions_ok && rep.alpha < 1.0 - eps;
  rep.rate = rep.pass ? 1.0 - rep.alpha : 0.0;
  return rep;
}

std::vector<double> grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) {
    fail(ErrorKind::domain, "grid needs step > 0 and hi >= lo");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = lo + static_cast<double>(i) * step;
  }
  return g;
}

std::vector<double> default_x_grid(int alphabet_size) {
  return alphabet_size == 2 ? std::vector<double>{1.0} : grid(-1.0, 1.0, 0.1);
}

std::vector<double> default_y_grid(int alphabet_size) {
  return alphabet_size == 2 ? grid(-1.0, 0.0, 0.01) : grid(-1.0, 1.0, 0.1);
}

BasisSearchResult basis_search_detailed(const PeriodicRule& rule, std::span<const double> x_grid,
                                        std::span<const double> y_grid, double eps) {
  const int letters = rule.alphabet().size() - 1;
  std::vector<std::pair<double, double>> pairs;
  for (double x : x_grid) {
    for (double y : y_grid) {
      if (x == y || x * y > 0.0) {
        continue;
      }
      if (std::abs(x) > 1.0 + kSlack || std::abs(y) > 1.0 + kSlack) {
        continue;
      }
      pairs.emplace_back(x, y);
    }
  }
  // Candidates: one pair per letter, pruned by condition 3 as letters are added.
  std::vector<std::vector<std::size_t>> candidates;
  std::vector<std::size_t> current;
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(current.size()) == letters) {
      candidates.push_back(current);
      return;
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double ya = pairs[p].second;
      bool ok = true;
      for (std::size_t b = 0; b < current.size() && ok; ++b) {
        const double xb = pairs[current[b]].first;
        ok = std::abs(xb) + std::abs(ya) + std::abs(xb * ya) <= 1.0 + kSlack;
      }
      if (!ok) {
        continue;
      }
      current.push_back(p);
      self(self);
      current.pop_back();
    }
  };
  extend(extend);

  auto make_basis = [&](const std::vector<std::size_t>& cand) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t p : cand) {
      xs.push_back(pairs[p].first);
      ys.push_back(pairs[p].second);
    }
    return ProductBasis(rule.alphabet(), std::move(xs), std::move(ys));
  };

  std::vector<double> alphas(candidates.size(), std::numeric_limits<double>::infinity());
  std::vector<char> passed(candidates.size(), 0);
  parallel_for(candidates.size(), [&](std::size_t i) {
    const CriterionReport rep = criterion_verdict(rule, make_basis(candidates[i]), eps);
    alphas[i] = rep.alpha;
    passed[i] = rep.pass ? 1 : 0;
  });

  std::optional<std::size_t> best;
  std::optional<std::size_t> lowest;
  auto key = [&](std::size_t i) {
    std::vector<double> k;
    for (std::size_t p : candidates[i]) {
      k.push_back(pairs[p].first);
    }
    for (std::size_t p : candidates[i]) {
      k.push_back(pairs[p].second);
    }
    return k;
  };
  auto better = [&](std::size_t i, const std::optional<std::size_t>& cur) {
    return !cur || alphas[i] < alphas[*cur] || (alphas[i] == alphas[*cur] && key(i) < key(*cur));
  };
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (better(i, lowest)) {
      lowest = i;
    }
    if (passed[i] && better(i, best)) {
      best = i;
    }
  }
  BasisSearchResult result;
  result.candidates = candidates.size();
  if (best) {
    result.best_pass = criterion_verdict(rule, make_basis(candidates[*best]), eps);
  }
  if (lowest) {
    result.min_alpha = criterion_verdict(rule, make_basis(candidates[*lowest]), eps);
  }
  return result;
}

std::optional<CriterionReport> basis_search(const PeriodicRule& rule, std::span<const double> x_grid,
                                            std::span<const double> y_grid, double eps) {
  return basis_search_detailed(rule, x_grid, y_grid, eps).best_pass;
}

double lv_gamma(double x, double y, int r) {
  if (x == y) {
    fail(ErrorKind::domain, "lv_gamma requires x != y");
  }
  if (r < 1) {
    fail(ErrorKind::domain, "lv_gamma requires R >= 1");
  }
  const double big = std::max(std::abs(x), std::abs(y));
  double gamma = 1.0;
  for (int m = 1; m <= r; ++m) {
    const double expo = static_cast<double>(r) / m;
    const double xm = std::pow(x, m);
    const double ym = std::pow(y, m);
    const double first = std::abs((xm - ym) / (x - y));
    const double second = std::abs((xm * y - x * ym) / (x - y));
    gamma = std::max({gamma, std::pow(big, expo - 1.0), std::pow(first + second, expo)});
  }
  return gamma;
}

PcaReport pca_criterion(const PeriodicRule& rule, const ProductBasis& basis) {
  if (rule.alphabet().size() != 2) {
    fail(ErrorKind::unsupported, "pca criterion requires alphabet size 2");
  }
  PcaReport rep;
  rep.beta = beta(rule, basis);
  rep.gamma = lv_gamma(basis.x(1), basis.y(1), static_cast<int>(rule.neighborhood().size()));
  rep.pass = rep.beta < 1.0 / rep.gamma;
  return rep;
}

std::vector<int> two_stage_offsets(int n_size) {
  if (n_size < 1) {
    fail(ErrorKind::domain, "two-stage neighborhood size must be at least 1");
  }
  std::vector<int> offsets{0};
  for (int k = 1; static_cast<int>(offsets.size()) < n_size; ++k) {
    offsets.push_back(k);
    if (static_cast<int>(offsets.size()) < n_size) {
      offsets.push_back(-k);
    }
  }
  return offsets;
}

RuleTable two_stage_rule(double lam, double gam, double del, int n_size) {
  if (!(lam >= 0.0) || !(gam >= 0.0) || !(del >= 0.0) || !std::isfinite(lam + gam + del)) {
    fail(ErrorKind::domain, "two-stage rates must be finite and nonnegative");
  }
  Neighborhood nb(two_stage_offsets(n_size));
  const double b = 1.0 + del + gam + lam * n_size;
  const std::size_t m = nb.size();
  const std::size_t words = power(3, m);
  std::vector<double> probs;
  probs.reserve(words * 3);
  for (std::size_t w = 0; w < words; ++w) {
    std::size_t rest = w;
    int adults = 0;
    int own = 0;
    for (std::size_t k = m; k-- > 0;) {
      const int s = static_cast<int>(rest % 3);
      rest /= 3;
      if (k == 0) {
        own = s;
      } else if (s == 2) {
        ++adults;
      }
    }
    std::array<double, 3> row{};
    switch (own) {
      case 0:
        row = {1.0 - lam * adults / b, lam * adults / b, 0.0};
        break;
      case 1:
        row = {(1.0 + del) / b, 1.0 - gam / b - (1.0 + del) / b, gam / b};
        break;
      default:
        row = {1.0 / b, 0.0, 1.0 - 1.0 / b};
        break;
    }
    for (double p : row) {
      if (p < -kRowSumTol || p > 1.0 + kRowSumTol) {
        fail(ErrorKind::domain, "two-stage parameters give probabilities outside [0,1]");
      }
      probs.push_back(p);
    }
  }
  return RuleTable(Alphabet(3), std::move(nb), std::move(probs));
}

TwoStageCondition two_stage_condition(double lam, double gam, double del, int n_size) {
  TwoStageCondition c;
  c.lhs = std::max(gam / (1.0 + gam), lam / (lam + del));
  const double n = n_size;
  c.rhs = (1.0 + 2.0 * lam + del - lam * n) / (del + lam * n);
  c.dies_out = c.lhs < c.rhs;
  return c;
}

}  // namespace ipslab
