#include "mobo/vine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "mobo/simd.hpp"
#include "mobo/stats.hpp"

namespace mobo::copula {

namespace {

constexpr int kMaxDim = 16;

std::uint32_t bit(int v) { return 1u << v; }

std::vector<int> mask_to_vars(std::uint32_t mask) {
  std::vector<int> vars;
  for (int v = 0; mask != 0; ++v, mask >>= 1)
    if (mask & 1u) vars.push_back(v);
  return vars;
}

// Disjoint-set forest for the spanning-tree selection.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// A node while fitting: an already-fitted edge (or, in tree 1, a bare
// variable) together with its conditional pseudo-observation columns.
struct FitNode {
  std::uint32_t variables = 0;
  int a = 0, b = 0;               // conditioned pair (tree 1: a == b == var)
  std::vector<double> col_a;      // F(a | variables \ {a})
  std::vector<double> col_b;      // F(b | variables \ {b})
};

struct Candidate {
  int e = 0, f = 0; // node indices
  double weight = 0.0;
  int va = 0, vb = 0;
};

const std::vector<double>& column_for(const FitNode& node, int v) {
  require(v == node.a || v == node.b,
          "vine fit: variable is not conditioned in the parent edge");
  return v == node.a ? node.col_a : node.col_b;
}

} // namespace

const VineEdge* VineCopula::edge_for(std::uint32_t variables) const {
  const int t = std::popcount(variables) - 2;
  if (t < 0 || t >= static_cast<int>(trees_.size())) return nullptr;
  for (const auto& e : trees_[t])
    if (e.variables == variables) return &e;
  return nullptr;
}

VineCopula VineCopula::fit(const Matrix& u, Family policy, int cache_size,
                           std::uint64_t cache_seed) {
  return fit_impl(u, policy, nullptr, cache_size, cache_seed);
}

VineCopula VineCopula::fit(const Matrix& u, const VineSpec& spec,
                           int cache_size, std::uint64_t cache_seed) {
  return fit_impl(u, Family::gaussian, &spec, cache_size, cache_seed);
}

VineCopula VineCopula::fit_impl(const Matrix& u, Family policy,
                                const VineSpec* spec, int cache_size,
                                std::uint64_t cache_seed) {
  const int m = static_cast<int>(u.cols());
  const std::size_t n = static_cast<std::size_t>(u.rows());
  require(m >= 2, "vine fit: need at least two variables");
  require(m <= kMaxDim, "vine fit: dimension above supported maximum");
  require(n >= 10, "vine fit: need at least 10 observations");
  require(cache_size > 0, "vine fit: cache size must be positive");
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j)
      require(std::isfinite(u(i, j)) && u(i, j) > 0.0 && u(i, j) < 1.0,
              "vine fit: pseudo-observations must lie in (0,1)");
  if (spec != nullptr) {
    require(spec->dim == m, "vine fit: spec dimension mismatch");
    require(static_cast<int>(spec->trees.size()) == m - 1,
            "vine fit: spec must have dim-1 trees");
  }

  VineCopula vine;
  vine.dim_ = m;
  vine.fitted_n_ = n;
  vine.trees_.resize(m - 1);

  // Tree-1 nodes are the raw pseudo-observation columns.
  std::vector<FitNode> nodes(m);
  for (int v = 0; v < m; ++v) {
    nodes[v].variables = bit(v);
    nodes[v].a = nodes[v].b = v;
    nodes[v].col_a.assign(u.col(v).data(), u.col(v).data() + n);
    nodes[v].col_b = nodes[v].col_a;
  }

  for (int t = 1; t <= m - 1; ++t) {
    const int edges_wanted = m - t;
    std::vector<Candidate> chosen;

    if (spec == nullptr) {
      std::vector<Candidate> cands;
      for (int e = 0; e < static_cast<int>(nodes.size()); ++e)
        for (int f = e + 1; f < static_cast<int>(nodes.size()); ++f) {
          const std::uint32_t shared = nodes[e].variables & nodes[f].variables;
          if (std::popcount(shared) != t - 1) continue;
          const std::uint32_t only_e = nodes[e].variables & ~shared;
          const std::uint32_t only_f = nodes[f].variables & ~shared;
          const int va = std::countr_zero(only_e);
          const int vb = std::countr_zero(only_f);
          if (va != nodes[e].a && va != nodes[e].b) continue;
          if (vb != nodes[f].a && vb != nodes[f].b) continue;
          const double tau =
              stats::kendall_tau(column_for(nodes[e], va),
                                 column_for(nodes[f], vb));
          cands.push_back({e, f, std::abs(tau), va, vb});
        }
      std::stable_sort(cands.begin(), cands.end(),
                       [](const Candidate& x, const Candidate& y) {
                         if (x.weight != y.weight) return x.weight > y.weight;
                         if (x.e != y.e) return x.e < y.e;
                         return x.f < y.f;
                       });
      UnionFind uf(static_cast<int>(nodes.size()));
      for (const auto& c : cands) {
        if (static_cast<int>(chosen.size()) == edges_wanted) break;
        if (uf.unite(c.e, c.f)) chosen.push_back(c);
      }
      require(static_cast<int>(chosen.size()) == edges_wanted,
              "vine fit: proximity graph is disconnected");
    } else {
      const auto& level = spec->trees[t - 1];
      require(static_cast<int>(level.size()) == edges_wanted,
              "vine fit: spec tree has wrong edge count");
      for (const auto& se : level) {
        require(se.a >= 0 && se.b >= 0 && se.a < m && se.b < m && se.a != se.b,
                "vine fit: spec edge variables out of range");
        std::uint32_t cond_mask = 0;
        for (int d : se.conditioning) {
          require(d >= 0 && d < m, "vine fit: spec conditioning out of range");
          cond_mask |= bit(d);
        }
        require(static_cast<int>(se.conditioning.size()) == t - 1 &&
                    std::popcount(cond_mask) == t - 1 &&
                    (cond_mask & (bit(se.a) | bit(se.b))) == 0,
                "vine fit: spec edge has invalid conditioning set");
        const int va = std::min(se.a, se.b);
        const int vb = std::max(se.a, se.b);
        int e = -1, f = -1;
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
          if (nodes[i].variables == (bit(va) | cond_mask)) e = i;
          if (nodes[i].variables == (bit(vb) | cond_mask)) f = i;
        }
        require(e >= 0 && f >= 0,
                "vine fit: spec edge violates the proximity condition");
        require((va == nodes[e].a || va == nodes[e].b) &&
                    (vb == nodes[f].a || vb == nodes[f].b),
                "vine fit: spec edge variables not conditioned in parents");
        chosen.push_back({e, f, 0.0, va, vb});
      }
    }

    std::vector<FitNode> next;
    next.reserve(chosen.size());
    for (std::size_t ci = 0; ci < chosen.size(); ++ci) {
      const auto& c = chosen[ci];
      const FitNode& ne = nodes[c.e];
      const FitNode& nf = nodes[c.f];
      const int a = std::min(c.va, c.vb);
      const int b = std::max(c.va, c.vb);
      const std::vector<double>& col_x =
          column_for(a == c.va ? ne : nf, a);
      const std::vector<double>& col_y =
          column_for(b == c.vb ? nf : ne, b);

      Family edge_policy = policy;
      if (spec != nullptr) edge_policy = spec->trees[t - 1][ci].family;
      BivariateCopula cop = BivariateCopula::fit(col_x, col_y, edge_policy);

      VineEdge edge;
      edge.a = a;
      edge.b = b;
      edge.variables = ne.variables | nf.variables;
      edge.conditioning = mask_to_vars(ne.variables & nf.variables);
      edge.tau = stats::kendall_tau(col_x, col_y);
      edge.copula = cop;
      if (cop.family() != Family::gaussian &&
          cop.family() != Family::independence)
        vine.all_gaussian_ = false;
      vine.trees_[t - 1].push_back(std::move(edge));

      FitNode nn;
      nn.variables = ne.variables | nf.variables;
      nn.a = a;
      nn.b = b;
      if (t < m - 1) { // last tree's conditionals are never consumed
        nn.col_a.resize(n);
        nn.col_b.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
          nn.col_a[r] = cop.h2(col_x[r], col_y[r]);
          nn.col_b[r] = cop.h1(col_x[r], col_y[r]);
        }
      }
      next.push_back(std::move(nn));
    }
    nodes = std::move(next);
  }

  vine.build_sampling_plan();
  vine.cache_size_ = cache_size;
  vine.cache_seed_ = cache_seed;
  vine.build_cache();
  return vine;
}

bool VineCopula::plan_var(int v, std::uint32_t mask,
                         std::vector<std::uint32_t>& chain) const {
  if (mask == 0) return true;
  const VineEdge* e = edge_for(bit(v) | mask);
  if (e == nullptr || (e->a != v && e->b != v)) return false;
  chain.push_back(bit(v) | mask);
  const int other = e->a == v ? e->b : e->a;
  return plan_var(v, mask & ~bit(other), chain);
}

void VineCopula::build_sampling_plan() {
  sample_order_.clear();
  descent_.clear();
  std::uint32_t used = 0;
  // Depth-first search for an ordering in which every variable can be
  // inverted through a full descending chain of edges.
  auto rec = [&](auto&& self) -> bool {
    if (static_cast<int>(sample_order_.size()) == dim_) return true;
    for (int v = 0; v < dim_; ++v) {
      if (used & bit(v)) continue;
      std::vector<std::uint32_t> chain;
      if (!plan_var(v, used, chain)) continue;
      sample_order_.push_back(v);
      descent_.push_back(std::move(chain));
      used |= bit(v);
      if (self(self)) return true;
      used &= ~bit(v);
      sample_order_.pop_back();
      descent_.pop_back();
    }
    return false;
  };
  require(rec(rec), "vine: structure admits no sampling order");
}

struct VineCopula::Workspace {
  std::vector<double> val;
  std::vector<int> epoch;
  int current = 0;

  explicit Workspace(int dim)
      : val(static_cast<std::size_t>(dim) << dim, 0.0),
        epoch(static_cast<std::size_t>(dim) << dim, -1) {}

  std::size_t index(int v, std::uint32_t mask, int dim) const {
    return (static_cast<std::size_t>(v) << dim) | mask;
  }
};

double VineCopula::eval_cond(int v, std::uint32_t mask, const double* x,
                             Workspace& ws) const {
  if (mask == 0) return x[v];
  const std::size_t idx = ws.index(v, mask, dim_);
  if (ws.epoch[idx] == ws.current) return ws.val[idx];
  const VineEdge* e = edge_for(bit(v) | mask);
  if (e == nullptr || (e->a != v && e->b != v))
    throw Error("vine: missing edge for conditional evaluation");
  const int other = e->a == v ? e->b : e->a;
  const std::uint32_t sub = mask & ~bit(other);
  const double fa = eval_cond(e->a, sub, x, ws);
  const double fb = eval_cond(e->b, sub, x, ws);
  const double value = v == e->b ? e->copula.h1(fa, fb) : e->copula.h2(fa, fb);
  ws.val[idx] = value;
  ws.epoch[idx] = ws.current;
  return value;
}

void VineCopula::sample_into(std::span<double> row, std::mt19937_64& rng,
                             Workspace& ws) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t k = 0; k < sample_order_.size(); ++k) {
    const int v = sample_order_[k];
    double w = unif(rng);
    // Walk the chain from the full conditioning set down to the first tree,
    // peeling one conditioning variable per inverse h-transform. Each
    // intermediate w equals F(v | remaining set); seeding the memo with it
    // keeps later forward passes consistent with the inversion.
    for (const std::uint32_t edge_mask : descent_[k]) {
      const std::size_t pre = ws.index(v, edge_mask & ~bit(v), dim_);
      ws.val[pre] = w;
      ws.epoch[pre] = ws.current;
      const VineEdge* e = edge_for(edge_mask);
      const int other = e->a == v ? e->b : e->a;
      const std::uint32_t sub = edge_mask & ~bit(v) & ~bit(other);
      const double fo = eval_cond(other, sub, row.data(), ws);
      if (v == e->b)
        w = e->copula.h1_inv(fo, w);
      else
        w = e->copula.h2_inv(w, fo);
      const std::size_t post = ws.index(v, sub, dim_);
      ws.val[post] = w;
      ws.epoch[post] = ws.current;
    }
    row[v] = std::clamp(w, 1e-12, 1.0 - 1e-12);
  }
}

Matrix VineCopula::sample(std::size_t n, std::uint64_t seed) const {
  require(dim_ >= 2, "vine sample: unfitted vine");
  Matrix out(n, dim_);
  Workspace ws(dim_);
  auto rng = seeded_rng(seed, 0x76736d70ULL);
  std::vector<double> row(dim_, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    ws.current = static_cast<int>(i);
    sample_into(row, rng, ws);
    for (int d = 0; d < dim_; ++d) out(i, d) = row[d];
  }
  return out;
}

void VineCopula::build_cache() {
  const Matrix s = sample(static_cast<std::size_t>(cache_size_), cache_seed_);
  cache_.resize(static_cast<std::size_t>(cache_size_) * dim_);
  for (int d = 0; d < dim_; ++d)
    for (int i = 0; i < cache_size_; ++i)
      cache_[static_cast<std::size_t>(d) * cache_size_ + i] = s(i, d);
}

Matrix VineCopula::gaussian_correlation() const {
  require(all_gaussian_, "vine: correlation requires an all-gaussian vine");
  Matrix r = Matrix::Identity(dim_, dim_);
  // Partial correlation is affine in the missing entry, so each edge's
  // parameter pins r(a,b) once all pairs inside its conditioning set are
  // known; processing trees in order guarantees that.
  for (const auto& tree : trees_) {
    for (const auto& e : tree) {
      const double pc =
          e.copula.family() == Family::gaussian ? e.copula.parameter() : 0.0;
      const int nd = static_cast<int>(e.conditioning.size());
      if (nd == 0) {
        r(e.a, e.b) = r(e.b, e.a) = pc;
        continue;
      }
      Matrix rdd(nd, nd);
      Vector rad(nd), rbd(nd);
      for (int i = 0; i < nd; ++i) {
        rad[i] = r(e.a, e.conditioning[i]);
        rbd[i] = r(e.b, e.conditioning[i]);
        for (int j = 0; j < nd; ++j)
          rdd(i, j) = r(e.conditioning[i], e.conditioning[j]);
      }
      const Eigen::LLT<Matrix> llt(rdd);
      require(llt.info() == Eigen::Success,
              "vine: conditioning correlation block not positive definite");
      const Vector wa = llt.solve(rad);
      const double cross = wa.dot(rbd);
      const double var_a = std::max(1e-12, 1.0 - wa.dot(rad));
      const double var_b = std::max(1e-12, 1.0 - rbd.dot(llt.solve(rbd)));
      const double rho = pc * std::sqrt(var_a * var_b) + cross;
      r(e.a, e.b) = r(e.b, e.a) = std::clamp(rho, -0.99999, 0.99999);
    }
  }
  return r;
}

double VineCopula::cdf(std::span<const double> u, CdfMethod method,
                       int mc_size, std::uint64_t mc_seed) const {
  require(static_cast<int>(u.size()) == dim_, "vine cdf: dimension mismatch");
  for (double x : u)
    require(x >= 0.0 && x <= 1.0, "vine cdf: query outside the unit cube");

  if (method == CdfMethod::auto_policy)
    method = (all_gaussian_ && dim_ == 2) ? CdfMethod::exact_gaussian
                                          : CdfMethod::mc;

  if (method == CdfMethod::exact_gaussian) {
    const Matrix r = gaussian_correlation();
    std::vector<int> active;
    for (int d = 0; d < dim_; ++d) {
      if (u[d] <= 0.0) return 0.0;
      if (u[d] < 1.0) active.push_back(d);
    }
    if (active.empty()) return 1.0;
    if (active.size() == 1) return u[active[0]];
    if (active.size() == 2)
      return stats::bivariate_normal_cdf(stats::normal_quantile(u[active[0]]),
                                         stats::normal_quantile(u[active[1]]),
                                         r(active[0], active[1]));
    const int na = static_cast<int>(active.size());
    Vector b(na);
    Matrix sub(na, na);
    for (int i = 0; i < na; ++i) {
      b[i] = stats::normal_quantile(u[active[i]]);
      for (int j = 0; j < na; ++j) sub(i, j) = r(active[i], active[j]);
    }
    return stats::mvn_rectangle(b, sub);
  }

  require(mc_size > 0, "vine cdf: sample count must be positive");
  const double* data = nullptr;
  std::size_t k = 0;
  std::vector<double> scratch;
  if (mc_size == cache_size_ && mc_seed == cache_seed_) {
    data = cache_.data();
    k = static_cast<std::size_t>(cache_size_);
  } else {
    const Matrix s = sample(static_cast<std::size_t>(mc_size), mc_seed);
    scratch.resize(static_cast<std::size_t>(mc_size) * dim_);
    for (int d = 0; d < dim_; ++d)
      for (int i = 0; i < mc_size; ++i)
        scratch[static_cast<std::size_t>(d) * mc_size + i] = s(i, d);
    data = scratch.data();
    k = static_cast<std::size_t>(mc_size);
  }
  const std::size_t count = simd::count_leq(data, k, dim_, u.data());
  return static_cast<double>(count) / static_cast<double>(k);
}

VineSpec VineCopula::spec() const {
  VineSpec s;
  s.dim = dim_;
  s.trees.resize(trees_.size());
  for (std::size_t t = 0; t < trees_.size(); ++t)
    for (const auto& e : trees_[t])
      s.trees[t].push_back({e.a, e.b, e.conditioning, e.copula.family()});
  return s;
}

namespace {

nlohmann::json edge_to_json(const VineEdge& e) {
  nlohmann::json j;
  j["conditioned"] = {e.a, e.b};
  j["conditioning"] = e.conditioning;
  j["family"] = family_name(e.copula.family());
  j["tau"] = e.tau;
  switch (e.copula.family()) {
    case Family::gaussian:
    case Family::clayton:
    case Family::gumbel:
      j["parameter"] = e.copula.parameter();
      j["rotation"] = static_cast<int>(e.copula.rotation());
      break;
    case Family::kde:
      j["bandwidth"] = e.copula.kde()->bandwidth;
      break;
    default:
      break;
  }
  return j;
}

} // namespace

std::string VineCopula::to_json_text() const {
  nlohmann::json j;
  j["dim"] = dim_;
  j["fitted_n"] = fitted_n_;
  j["trees"] = nlohmann::json::array();
  for (const auto& tree : trees_) {
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& e : tree) jt.push_back(edge_to_json(e));
    j["trees"].push_back(jt);
  }
  return j.dump(2);
}

std::string VineSpec::to_json_text() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["trees"] = nlohmann::json::array();
  for (const auto& tree : trees) {
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& e : tree) {
      nlohmann::json je;
      je["conditioned"] = {e.a, e.b};
      je["conditioning"] = e.conditioning;
      je["family"] = family_name(e.family);
      jt.push_back(je);
    }
    j["trees"].push_back(jt);
  }
  return j.dump(2);
}

VineSpec VineSpec::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("vine spec: invalid JSON: ") + e.what());
  }
  VineSpec s;
  try {
    s.dim = j.at("dim").get<int>();
    for (const auto& jt : j.at("trees")) {
      std::vector<VineSpecEdge> tree;
      for (const auto& je : jt) {
        VineSpecEdge e;
        const auto& pair = je.at("conditioned");
        require(pair.size() == 2, "vine spec: conditioned pair must have 2 entries");
        e.a = pair[0].get<int>();
        e.b = pair[1].get<int>();
        if (je.contains("conditioning"))
          e.conditioning = je["conditioning"].get<std::vector<int>>();
        e.family = family_from_name(je.at("family").get<std::string>());
        tree.push_back(std::move(e));
      }
      s.trees.push_back(std::move(tree));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("vine spec: missing or mistyped field: ") +
                e.what());
  }
  return s;
}

} // namespace mobo::copula
