#ifndef SRTE_CORE_IGP_ROUTING_H
#define SRTE_CORE_IGP_ROUTING_H

#include <cstdint>
#include <utility>
#include <vector>

#include "net_model.h"

namespace srte {

// Middlepoint sentinel for the plain shortest-path route.
inline constexpr int kDirect = -1;

// All-pairs IGP distances, shortest-path counts and minimum hop counts.
// sigma counts distinct arc sequences, so parallel equal-weight arcs count
// separately.
struct ApspTable {
  static constexpr std::int64_t kUnreachable = -1;

  int n = 0;
  std::vector<std::int64_t> dist;
  std::vector<std::uint64_t> sigma;
  std::vector<int> hop;

  std::int64_t Dist(int i, int j) const { return dist[static_cast<size_t>(i) * n + j]; }
  std::uint64_t Sigma(int i, int j) const { return sigma[static_cast<size_t>(i) * n + j]; }
  int Hop(int i, int j) const { return hop[static_cast<size_t>(i) * n + j]; }
};

// Single-source shortest paths restricted to nodes with excluded[v] == 0.
// dist is kUnreachable (-1) for nodes that cannot be reached.
struct SingleSourcePaths {
  std::vector<std::int64_t> dist;
  std::vector<std::uint64_t> sigma;
  std::vector<int> hop;
};
SingleSourcePaths ShortestPathsFrom(const Topology& topo, int source,
                                    const std::vector<char>& excluded = {});

ApspTable ComputeApsp(const Topology& topo);

struct ArcLoad {
  int arc;
  double load;

  friend bool operator==(const ArcLoad&, const ArcLoad&) = default;
};

// Sparse vectors sorted by arc index.
using SparseLoads = std::vector<ArcLoad>;

// f_ij(e): the share of a unit demand i->j that ECMP puts on each arc.
class EcmpTable {
 public:
  EcmpTable() = default;
  EcmpTable(int n, std::vector<SparseLoads> fractions)
      : n_(n), fractions_(std::move(fractions)) {}

  int num_nodes() const { return n_; }
  // Empty for i == j.
  const SparseLoads& Fractions(int i, int j) const {
    return fractions_[static_cast<size_t>(i) * n_ + j];
  }

 private:
  int n_ = 0;
  std::vector<SparseLoads> fractions_;
};

// Propagates a unit of flow from i along the shortest-path DAG towards j,
// splitting equally among outgoing DAG arcs at each node.
SparseLoads EcmpFractionsForPair(const Topology& topo, const ApspTable& apsp,
                                 int i, int j);
EcmpTable ComputeEcmpFractions(const Topology& topo, const ApspTable& apsp);

struct PathLoadVector {
  int src = 0;
  int dst = 0;
  int middlepoint = kDirect;
  SparseLoads loads;
};

// Normalizes a middlepoint equal to either endpoint to kDirect.
inline int NormalizeMiddlepoint(int src, int dst, int k) {
  return (k == src || k == dst) ? kDirect : k;
}

// g_ij^k(e) = f_ik(e) + f_kj(e); f_ij(e) for kDirect.
PathLoadVector SrPathLoads(int i, int j, int k, const EcmpTable& ecmp);

struct Utilization {
  double mlu = 0;
  std::vector<double> per_arc;
};

// Utilization with every demand routed on its ECMP shortest paths.
Utilization SprMlu(const Topology& topo, const TrafficMatrix& tm,
                   const EcmpTable& ecmp);

}  // namespace srte

#endif  // SRTE_CORE_IGP_ROUTING_H
