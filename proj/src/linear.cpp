#include "ideq/linear.hpp"

#include <stdexcept>

namespace ideq {

std::vector<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> a,
                                                std::vector<std::vector<Rational>> b) {
  std::size_t n = a.size();
  std::size_t m = n == 0 ? 0 : b[0].size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw std::runtime_error("singular linear system");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    Rational inv = a[col][col];
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col] == 0) continue;
      Rational factor = a[row][col] / inv;
      for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
      for (std::size_t k = 0; k < m; ++k) b[row][k] -= factor * b[col][k];
    }
  }
  std::vector<std::vector<Rational>> x(n, std::vector<Rational>(m));
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t k = 0; k < m; ++k) x[row][k] = b[row][k] / a[row][row];
  return x;
}

}  // namespace ideq
