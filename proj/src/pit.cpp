#include "mobo/pit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mobo::copula {

PseudoObservations pit_transform(const Matrix& Y) {
  const auto n = Y.rows();
  const auto m = Y.cols();
  require(n >= 2, "pit_transform: need at least two rows");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      require(std::isfinite(Y(i, j)), "pit_transform: non-finite value");

  PseudoObservations out;
  out.u.resize(n, m);
  out.ranks.resize(n, m);

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index col = 0; col < m; ++col) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) {
                return Y(a, col) < Y(b, col);
              });
    Eigen::Index i = 0;
    while (i < n) {
      Eigen::Index j = i;
      while (j < n && Y(order[j], col) == Y(order[i], col)) ++j;
      // Tied block spans ranks i+1..j; all members get the average.
      const double avg = 0.5 * static_cast<double>(i + 1 + j);
      for (Eigen::Index k = i; k < j; ++k) {
        out.ranks(order[k], col) = avg;
        out.u(order[k], col) = avg / static_cast<double>(n + 1);
      }
      i = j;
    }
  }
  return out;
}

} // namespace mobo::copula
