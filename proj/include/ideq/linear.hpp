#pragma once

#include <vector>

#include "ideq/rational.hpp"

namespace ideq {

/// Solve A X = B exactly by Gaussian elimination with column pivoting.
/// A is n x n, B is n x m (columns are independent right-hand sides).
/// Throws std::runtime_error if A is singular.
std::vector<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> a,
                                                std::vector<std::vector<Rational>> b);

}  // namespace ideq
