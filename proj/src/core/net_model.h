#ifndef SRTE_CORE_NET_MODEL_H
#define SRTE_CORE_NET_MODEL_H

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace srte {

struct Node {
  int index = 0;
  std::string label;
  double x = 0;
  double y = 0;
};

// One directed arc. Undirected links appear as two arcs.
struct Arc {
  int index = 0;
  int src = 0;
  int dst = 0;
  std::int64_t igp_weight = 1;
  double capacity = 0;
  std::string label;
};

// Directed, weighted, capacitated graph. Construction does not enforce the
// instance invariants (positive weights, connectivity, ...) so that
// ValidateInstance can report on arbitrary inputs; the parsers do enforce
// them. Arcs with out-of-range endpoints are left out of the adjacency lists.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Node> nodes, std::vector<Arc> arcs);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(int index) const { return arcs_[index]; }
  const std::vector<int>& out_arcs(int node) const { return out_arcs_[node]; }
  const std::vector<int>& in_arcs(int node) const { return in_arcs_[node]; }

  // Returns the index of the node with the given label, or -1.
  int FindNode(std::string_view label) const;

  bool IsStronglyConnected() const;

  friend bool operator==(const Topology& a, const Topology& b);

 private:
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_arcs_;
  std::vector<std::vector<int>> in_arcs_;
};

struct Demand {
  int id = 0;
  int src = 0;
  int dst = 0;
  double volume = 0;
  std::string label;
};

// Demands indexed by id: demands()[i].id == i.
class TrafficMatrix {
 public:
  TrafficMatrix() = default;
  explicit TrafficMatrix(std::vector<Demand> demands);

  int size() const { return static_cast<int>(demands_.size()); }
  bool empty() const { return demands_.empty(); }
  const std::vector<Demand>& demands() const { return demands_; }
  const Demand& demand(int id) const { return demands_[id]; }
  double TotalVolume() const;

 private:
  std::vector<Demand> demands_;
};

// Repetita graph file. Errors carry the offending line number.
Topology ParseTopology(std::string_view text);
// Repetita demands file. Node references may be indices or labels.
TrafficMatrix ParseDemands(std::string_view text, const Topology& topo);

std::string SerializeTopology(const Topology& topo);
std::string SerializeDemands(const TrafficMatrix& tm);

// t_ij = total * o_i * a_j / sum_{u != v} o_u * a_v with o, a drawn i.i.d.
// from the unit exponential distribution. Deterministic for a fixed seed.
TrafficMatrix GenerateGravityTraffic(const Topology& topo, double total_volume,
                                     std::uint64_t seed);

// Lists every violated instance invariant; empty iff admissible.
std::vector<std::string> ValidateInstance(const Topology& topo,
                                          const TrafficMatrix& tm);

// Formats a double with the shortest round-trip representation.
std::string FormatDouble(double value);

}  // namespace srte

#endif  // SRTE_CORE_NET_MODEL_H
