#pragma once

#include <cstddef>
#include <vector>

#include "mobo/common.hpp"

namespace mobo::indicators {

enum class IndicatorKind { hypervolume, cdf };

struct IndicatorValue {
  IndicatorKind kind;
  double value;
};

/// Lebesgue measure of the union of boxes [ref, y] over front members
/// (maximization). Points not strictly above ref in every coordinate
/// contribute nothing. Exact WFG-style recursion, 2-D sweep base case.
double hypervolume(const std::vector<Vector>& front, const Vector& ref);

/// max(0, HV(front + candidate) - HV(front)), computed as the candidate's
/// exclusive contribution.
double hv_improvement(const std::vector<Vector>& front, const Vector& candidate,
                      const Vector& ref);

/// Sequential greedy selection: each pick maximizes marginal hypervolume
/// improvement against the already-picked set. Ties break to the lower index.
std::vector<std::size_t> greedy_topk_hypervolume(
    const std::vector<Vector>& points, std::size_t k, const Vector& ref);

/// Indices of the k largest scores, best first; ties break to the lower index.
std::vector<std::size_t> topk_scores(const std::vector<double>& scores,
                                     std::size_t k);

} // namespace mobo::indicators
