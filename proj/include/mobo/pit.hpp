#pragma once

#include "mobo/common.hpp"

namespace mobo::copula {

/// Rank-based pseudo-observations: u[i][m] = rank/(n+1), ties averaged.
/// Values lie strictly inside (0,1); ranks holds the (possibly half-integer)
/// averaged ranks.
struct PseudoObservations {
  Matrix u;
  Matrix ranks;
};

PseudoObservations pit_transform(const Matrix& Y);

} // namespace mobo::copula
