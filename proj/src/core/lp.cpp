#include "lp.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace ipslab {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Tableau with one row per constraint plus an objective row at the bottom.
// The objective row stores reduced costs for a minimization; the last column
// holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return cells_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) {
      at(pr, c) /= p;
    }
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) {
        continue;
      }
      const double f = at(r, pc);
      if (f == 0.0) {
        continue;
      }
      for (std::size_t c = 0; c <= cols_; ++c) {
        at(r, c) -= f * at(pr, c);
      }
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
};

// Runs simplex iterations minimizing the objective row over the allowed
// columns. Returns false if the problem is unbounded.
bool run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::size_t allowed_cols) {
  const std::size_t max_iter = 50000;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::size_t entering = allowed_cols;
    for (std::size_t c = 0; c < allowed_cols; ++c) {
      if (t.cost(c) < -kPivotTol) {
        entering = c;
        break;
      }
    }
    if (entering == allowed_cols) {
      return true;
    }
    std::size_t leaving = t.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double coef = t.at(r, entering);
      if (coef > kPivotTol) {
        const double ratio = t.rhs(r) / coef;
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && leaving < t.rows() && basis[r] < basis[leaving])) {
          best_ratio = ratio;
          leaving = r;
        }
      }
    }
    if (leaving == t.rows()) {
      return false;
    }
    t.pivot(leaving, entering);
    basis[leaving] = entering;
  }
  fail(ErrorKind::numeric, "simplex iteration limit reached");
}

}  // namespace

LpResult simplex_maximize(std::size_t rows, std::size_t cols, const std::vector<double>& a,
                          const std::vector<double>& b, const std::vector<double>& c) {
  if (a.size() != rows * cols || b.size() != rows || c.size() != cols) {
    fail(ErrorKind::domain, "simplex: inconsistent problem dimensions");
  }
  // Columns: original variables, then one artificial per row.
  Tableau t(rows, cols + rows);
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double sign = b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < cols; ++j) {
      t.at(r, j) = sign * a[r * cols + j];
    }
    t.at(r, cols + r) = 1.0;
    t.rhs(r) = sign * b[r];
    basis[r] = cols + r;
  }
  // Phase one: minimize the sum of artificials.
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j <= cols + rows; ++j) {
      if (j < cols || j == cols + rows) {
        t.at(rows, j) -= t.at(r, j);
      }
    }
  }
  run_simplex(t, basis, cols + rows);
  LpResult result;
  if (-t.rhs(rows) > kFeasTol) {
    result.status = LpStatus::infeasible;
    return result;
  }
  // Drive remaining artificials out of the basis; rows where that is
  // impossible are redundant and are neutralized.
  std::vector<bool> redundant(rows, false);
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] < cols) {
      continue;
    }
    std::size_t pc = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (std::abs(t.at(r, j)) > kPivotTol) {
        pc = j;
        break;
      }
    }
    if (pc == cols) {
      redundant[r] = true;
      continue;
    }
    t.pivot(r, pc);
    basis[r] = pc;
  }
  // Phase two: minimize -c over the original columns only.
  for (std::size_t j = 0; j <= cols + rows; ++j) {
    t.at(rows, j) = 0.0;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    t.cost(j) = -c[j];
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (redundant[r]) {
      for (std::size_t j = 0; j <= cols + rows; ++j) {
        t.at(r, j) = 0.0;
      }
      continue;
    }
    const double f = t.cost(basis[r]);
    if (f != 0.0) {
      for (std::size_t j = 0; j <= cols + rows; ++j) {
        t.at(rows, j) -= f * t.at(r, j);
      }
    }
  }
  if (!run_simplex(t, basis, cols)) {
    result.status = LpStatus::unbounded;
    return result;
  }
  result.status = LpStatus::optimal;
  result.x.assign(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!redundant[r] && basis[r] < cols) {
      result.x[basis[r]] = t.rhs(r);
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    result.objective += c[j] * result.x[j];
  }
  return result;
}

}  // namespace ipslab
