#include "igp_routing.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "error.h"

namespace srte {
namespace {

std::uint64_t AddPathCounts(std::uint64_t a, std::uint64_t b) {
  std::uint64_t sum;
  if (__builtin_add_overflow(a, b, &sum)) {
    throw Error(ErrorCode::kInvalidInstance, "shortest-path count overflow");
  }
  return sum;
}

SparseLoads MergeLoads(const SparseLoads& a, const SparseLoads& b) {
  SparseLoads out;
  out.reserve(a.size() + b.size());
  size_t x = 0, y = 0;
  while (x < a.size() || y < b.size()) {
    if (y == b.size() || (x < a.size() && a[x].arc < b[y].arc)) {
      out.push_back(a[x++]);
    } else if (x == a.size() || b[y].arc < a[x].arc) {
      out.push_back(b[y++]);
    } else {
      out.push_back({a[x].arc, a[x].load + b[y].load});
      ++x;
      ++y;
    }
  }
  return out;
}

}  // namespace

SingleSourcePaths ShortestPathsFrom(const Topology& topo, int source,
                                    const std::vector<char>& excluded) {
  const int n = topo.num_nodes();
  SingleSourcePaths out;
  out.dist.assign(n, ApspTable::kUnreachable);
  out.sigma.assign(n, 0);
  out.hop.assign(n, std::numeric_limits<int>::max());
  auto is_excluded = [&](int v) { return !excluded.empty() && excluded[v]; };
  if (is_excluded(source)) return out;

  using Entry = std::pair<std::int64_t, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<char> done(n, 0);
  out.dist[source] = 0;
  out.sigma[source] = 1;
  out.hop[source] = 0;
  queue.emplace(0, source);
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    // Weights are >= 1, so every predecessor of u on a shortest path was
    // finalized before u and sigma[u] is complete here.
    for (int a : topo.out_arcs(u)) {
      const Arc& arc = topo.arc(a);
      int v = arc.dst;
      if (is_excluded(v)) continue;
      std::int64_t nd = d + arc.igp_weight;
      if (out.dist[v] == ApspTable::kUnreachable || nd < out.dist[v]) {
        out.dist[v] = nd;
        out.sigma[v] = out.sigma[u];
        out.hop[v] = out.hop[u] + 1;
        queue.emplace(nd, v);
      } else if (nd == out.dist[v]) {
        out.sigma[v] = AddPathCounts(out.sigma[v], out.sigma[u]);
        out.hop[v] = std::min(out.hop[v], out.hop[u] + 1);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (out.dist[v] == ApspTable::kUnreachable) out.hop[v] = -1;
  }
  return out;
}

ApspTable ComputeApsp(const Topology& topo) {
  const int n = topo.num_nodes();
  ApspTable table;
  table.n = n;
  table.dist.resize(static_cast<size_t>(n) * n);
  table.sigma.resize(static_cast<size_t>(n) * n);
  table.hop.resize(static_cast<size_t>(n) * n);
  for (int s = 0; s < n; ++s) {
    SingleSourcePaths paths = ShortestPathsFrom(topo, s);
    for (int t = 0; t < n; ++t) {
      if (paths.dist[t] == ApspTable::kUnreachable) {
        throw Error(ErrorCode::kInvalidInstance,
                    "node " + std::to_string(t) + " unreachable from " + std::to_string(s));
      }
      size_t idx = static_cast<size_t>(s) * n + t;
      table.dist[idx] = paths.dist[t];
      table.sigma[idx] = paths.sigma[t];
      table.hop[idx] = paths.hop[t];
    }
  }
  return table;
}

SparseLoads EcmpFractionsForPair(const Topology& topo, const ApspTable& apsp,
                                 int i, int j) {
  if (i == j) return {};
  const int n = topo.num_nodes();
  const std::int64_t total = apsp.Dist(i, j);

  std::vector<int> dag_nodes;
  for (int u = 0; u < n; ++u) {
    if (apsp.Dist(i, u) + apsp.Dist(u, j) == total) dag_nodes.push_back(u);
  }
  std::sort(dag_nodes.begin(), dag_nodes.end(), [&](int a, int b) {
    std::int64_t da = apsp.Dist(i, a), db = apsp.Dist(i, b);
    return da != db ? da < db : a < b;
  });

  std::vector<double> inflow(n, 0.0);
  inflow[i] = 1.0;
  SparseLoads loads;
  std::vector<int> next;
  for (int u : dag_nodes) {
    if (u == j || inflow[u] == 0.0) continue;
    next.clear();
    for (int a : topo.out_arcs(u)) {
      const Arc& arc = topo.arc(a);
      if (apsp.Dist(i, u) + arc.igp_weight + apsp.Dist(arc.dst, j) == total) {
        next.push_back(a);
      }
    }
    double share = inflow[u] / static_cast<double>(next.size());
    for (int a : next) {
      loads.push_back({a, share});
      inflow[topo.arc(a).dst] += share;
    }
  }
  std::sort(loads.begin(), loads.end(),
            [](const ArcLoad& x, const ArcLoad& y) { return x.arc < y.arc; });
  return loads;
}

EcmpTable ComputeEcmpFractions(const Topology& topo, const ApspTable& apsp) {
  const int n = topo.num_nodes();
  std::vector<SparseLoads> fractions(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      fractions[static_cast<size_t>(i) * n + j] = EcmpFractionsForPair(topo, apsp, i, j);
    }
  }
  return EcmpTable(n, std::move(fractions));
}

PathLoadVector SrPathLoads(int i, int j, int k, const EcmpTable& ecmp) {
  const int n = ecmp.num_nodes();
  if (i == j) {
    throw Error(ErrorCode::kInvalidArgument, "SR path endpoints must differ");
  }
  if (i < 0 || i >= n || j < 0 || j >= n || k < kDirect || k >= n) {
    throw Error(ErrorCode::kInvalidArgument, "SR path node out of range");
  }
  PathLoadVector path;
  path.src = i;
  path.dst = j;
  path.middlepoint = NormalizeMiddlepoint(i, j, k);
  if (path.middlepoint == kDirect) {
    path.loads = ecmp.Fractions(i, j);
  } else {
    path.loads = MergeLoads(ecmp.Fractions(i, k), ecmp.Fractions(k, j));
  }
  return path;
}

Utilization SprMlu(const Topology& topo, const TrafficMatrix& tm,
                   const EcmpTable& ecmp) {
  std::vector<double> load(topo.num_arcs(), 0.0);
  for (const Demand& d : tm.demands()) {
    for (const ArcLoad& f : ecmp.Fractions(d.src, d.dst)) {
      load[f.arc] += d.volume * f.load;
    }
  }
  Utilization out;
  out.per_arc.resize(topo.num_arcs());
  for (int a = 0; a < topo.num_arcs(); ++a) {
    out.per_arc[a] = load[a] / topo.arc(a).capacity;
    out.mlu = std::max(out.mlu, out.per_arc[a]);
  }
  return out;
}

}  // namespace srte
