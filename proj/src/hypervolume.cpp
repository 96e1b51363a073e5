#include "mobo/hypervolume.hpp"

#include <algorithm>
#include <numeric>

#include "mobo/pareto.hpp"

namespace mobo::indicators {

namespace {

// Volume of [ref, p]; zero unless p > ref in every coordinate.
double box_volume(const Vector& p, const Vector& ref) {
  double v = 1.0;
  for (Eigen::Index m = 0; m < p.size(); ++m) {
    const double side = p[m] - ref[m];
    if (side <= 0.0) return 0.0;
    v *= side;
  }
  return v;
}

// Keeps points strictly above ref somewhere useful, drops dominated ones.
std::vector<Vector> clean(const std::vector<Vector>& pts, const Vector& ref) {
  std::vector<Vector> kept;
  kept.reserve(pts.size());
  for (const Vector& p : pts)
    if (box_volume(p, ref) > 0.0) kept.push_back(p);
  if (kept.empty()) return kept;
  return pareto::pareto_front(kept).members;
}

double hv_2d(std::vector<Vector> front, const Vector& ref) {
  // Non-dominated 2-D points sorted by falling first coordinate have a
  // rising second coordinate; sweep accumulates disjoint strips.
  std::sort(front.begin(), front.end(),
            [](const Vector& a, const Vector& b) { return a[0] > b[0]; });
  double hv = 0.0;
  double floor = ref[1];
  for (const Vector& p : front) {
    if (p[1] > floor) {
      hv += (p[0] - ref[0]) * (p[1] - floor);
      floor = p[1];
    }
  }
  return hv;
}

double hv_clean(std::vector<Vector> front, const Vector& ref);

// Exclusive contribution of p against the set T (both already clean).
double exclusive(const Vector& p, const std::vector<Vector>& T,
                 const Vector& ref) {
  const double inc = box_volume(p, ref);
  if (inc == 0.0) return 0.0;
  if (T.empty()) return inc;
  std::vector<Vector> limited;
  limited.reserve(T.size());
  for (const Vector& t : T) limited.push_back(t.cwiseMin(p));
  return inc - hv_clean(clean(limited, ref), ref);
}

// `front` is mutually non-dominated with positive box volumes.
double hv_clean(std::vector<Vector> front, const Vector& ref) {
  if (front.empty()) return 0.0;
  if (ref.size() == 2) return hv_2d(std::move(front), ref);
  // Processing high-first-coordinate points first keeps limited sets small.
  std::sort(front.begin(), front.end(),
            [](const Vector& a, const Vector& b) { return a[0] > b[0]; });
  double hv = 0.0;
  for (std::size_t i = 0; i < front.size(); ++i) {
    const std::vector<Vector> rest(front.begin() + i + 1, front.end());
    hv += exclusive(front[i], rest, ref);
  }
  return hv;
}

} // namespace

double hypervolume(const std::vector<Vector>& front, const Vector& ref) {
  require(ref.size() >= 2, "hypervolume: need at least two objectives");
  for (const Vector& p : front)
    require(p.size() == ref.size(), "hypervolume: dimension mismatch");
  return hv_clean(clean(front, ref), ref);
}

double hv_improvement(const std::vector<Vector>& front, const Vector& candidate,
                      const Vector& ref) {
  require(candidate.size() == ref.size(),
          "hv_improvement: dimension mismatch");
  const std::vector<Vector> base = clean(front, ref);
  const double gain = exclusive(candidate, base, ref);
  return std::max(0.0, gain);
}

std::vector<std::size_t> greedy_topk_hypervolume(
    const std::vector<Vector>& points, std::size_t k, const Vector& ref) {
  require(k <= points.size(), "greedy_topk: k exceeds point count");
  std::vector<std::size_t> picked;
  std::vector<Vector> picked_points;
  std::vector<bool> used(points.size(), false);
  while (picked.size() < k) {
    double best_gain = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (used[i]) continue;
      const double gain = hv_improvement(picked_points, points[i], ref);
      if (gain > best_gain) {
        best_gain = gain;
        best_idx = i;
      }
    }
    used[best_idx] = true;
    picked.push_back(best_idx);
    picked_points.push_back(points[best_idx]);
  }
  return picked;
}

std::vector<std::size_t> topk_scores(const std::vector<double>& scores,
                                     std::size_t k) {
  require(k <= scores.size(), "topk_scores: k exceeds score count");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  order.resize(k);
  return order;
}

} // namespace mobo::indicators
