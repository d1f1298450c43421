#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rules.hpp"

namespace ipslab {

/// Values x(a), y(a) for letters a = 1..q-1, stored at index a-1. The basis
/// function chi_{j,a} equals x(a) when sigma(j) >= a and y(a) otherwise.
class ProductBasis {
 public:
  ProductBasis(Alphabet alphabet, std::vector<double> x, std::vector<double> y);
  static ProductBasis binary(double x, double y) { return ProductBasis(Alphabet(2), {x}, {y}); }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  double x(int letter) const { return x_[static_cast<std::size_t>(letter - 1)]; }
  double y(int letter) const { return y_[static_cast<std::size_t>(letter - 1)]; }
  std::span<const double> xs() const noexcept { return x_; }
  std::span<const double> ys() const noexcept { return y_; }

  /// Value of the single-site factor for letter b (b = 0 is the constant 1).
  double factor(int symbol, int letter) const {
    if (letter == 0) {
      return 1.0;
    }
    return symbol >= letter ? x(letter) : y(letter);
  }

  /// Conditions 1-3 on the basis values, then condition 4 (bounded
  /// coefficients), which holds for every periodic rule.
  std::array<bool, 4> conditions() const;

 private:
  Alphabet alphabet_;
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Coefficients of a function on the finite site set `sites` in the product
/// basis. Index digits (first site most significant) are letters; digit 0
/// means the site is absent, so index 0 is the constant term.
struct BasisRepr {
  std::vector<int> sites;
  int alphabet_size = 2;
  std::vector<double> coeffs;

  double constant() const { return coeffs.empty() ? 0.0 : coeffs.front(); }
  double coeff(std::span<const int> letters) const;
};

/// values holds q^|sites| entries, words ordered with the first site most
/// significant.
BasisRepr represent(std::span<const double> values, std::span<const int> sites, const ProductBasis& basis);
std::vector<double> evaluate(const BasisRepr& repr, const ProductBasis& basis);
double seminorm_pi(const BasisRepr& repr, bool starred);

/// Representation of E_j(chi_{j,a}) on the neighborhood of a site with the
/// given residue.
struct UpdateCoefficients {
  std::size_t residue = 0;
  int letter = 1;
  std::optional<std::size_t> self_position;
  BasisRepr repr;

  /// Coefficient C_{{j},a} of the site's own basis element (0 if the site does
  /// not read itself).
  double self_coeff() const;
  std::size_t self_index() const;
};

UpdateCoefficients update_row(const PeriodicRule& rule, const ProductBasis& basis, std::size_t residue, int letter);

double alpha(const PeriodicRule& rule, const ProductBasis& basis);
double beta(const PeriodicRule& rule, const ProductBasis& basis);

struct CriterionReport {
  double alpha = 0.0;
  double beta = 0.0;
  ProductBasis basis = ProductBasis::binary(1.0, -1.0);
  std::array<bool, 4> conditions{};
  bool pass = false;
  double rate = 0.0;
};

CriterionReport criterion_verdict(const PeriodicRule& rule, const ProductBasis& basis, double eps = kStrictEps);

/// Default search grids: for alphabet 2, x = {1} and y in [-1, 0] step 0.01;
/// for larger alphabets both grids span [-1, 1] with step 0.1.
std::vector<double> default_x_grid(int alphabet_size);
std::vector<double> default_y_grid(int alphabet_size);
/// Evenly spaced grid lo, lo+step, ..., hi.
std::vector<double> grid(double lo, double hi, double step);

/// Minimal-alpha passing basis with per-letter values drawn from the grids.
/// Pairs with x = y or x*y > 0 are skipped; ties go to the lexicographically
/// smallest (x..., y...).
std::optional<CriterionReport> basis_search(const PeriodicRule& rule, std::span<const double> x_grid,
                                            std::span<const double> y_grid, double eps = kStrictEps);

struct BasisSearchResult {
  std::optional<CriterionReport> best_pass;
  std::optional<CriterionReport> min_alpha;  // over all admissible candidates, passing or not
  std::size_t candidates = 0;
};

BasisSearchResult basis_search_detailed(const PeriodicRule& rule, std::span<const double> x_grid,
                                        std::span<const double> y_grid, double eps = kStrictEps);

double lv_gamma(double x, double y, int r);

struct PcaReport {
  double beta = 0.0;
  double gamma = 0.0;
  bool pass = false;
};

/// Synchronous-update criterion: beta < 1 / gamma with R = |N|.
PcaReport pca_criterion(const PeriodicRule& rule, const ProductBasis& basis);

/// Vacant (0), young (1), adult (2) population rule. The updated site is the
/// first offset; the remaining n_size-1 offsets are +1, -1, +2, -2, ...
RuleTable two_stage_rule(double lam, double gam, double del, int n_size);
std::vector<int> two_stage_offsets(int n_size);

struct TwoStageCondition {
  double lhs = 0.0;
  double rhs = 0.0;
  bool dies_out = false;
};

TwoStageCondition two_stage_condition(double lam, double gam, double del, int n_size);

}  // namespace ipslab
