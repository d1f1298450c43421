#pragma once

#include <cstddef>
#include <vector>

namespace ipslab {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

/// Maximizes c.x subject to A x = b and x >= 0 with a dense two-phase simplex
/// using Bland's pivoting rule. A is row-major with rows*cols entries.
LpResult simplex_maximize(std::size_t rows, std::size_t cols, const std::vector<double>& a,
                          const std::vector<double>& b, const std::vector<double>& c);

}  // namespace ipslab
