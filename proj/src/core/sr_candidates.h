#ifndef SRTE_CORE_SR_CANDIDATES_H
#define SRTE_CORE_SR_CANDIDATES_H

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "igp_routing.h"
#include "net_model.h"

namespace srte {

// Admissible middlepoints per demand id. Each list is sorted ascending, so
// kDirect (-1), when present, comes first. Pinned demands hold {kDirect}.
class CandidateSet {
 public:
  CandidateSet() = default;
  explicit CandidateSet(std::vector<std::vector<int>> candidates);

  int num_demands() const { return static_cast<int>(candidates_.size()); }
  const std::vector<int>& candidates(int demand) const { return candidates_[demand]; }
  bool pinned(int demand) const { return pinned_[demand]; }

  void Pin(int demand);
  // Replaces the candidate list of an unpinned demand. Sorts and dedups.
  void Set(int demand, std::vector<int> candidates);

  std::int64_t TotalCandidates() const;
  int NumPinned() const;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;

 private:
  std::vector<std::vector<int>> candidates_;
  std::vector<bool> pinned_;
};

enum class FilterStage { kCentrality, kPinning, kStretch, kDomination };

const char* FilterStageName(FilterStage stage);

struct FilterConfig {
  // Stretch-bounding factor, >= 1; infinity disables the bound.
  double alpha_sb = std::numeric_limits<double>::infinity();
  bool one_hop_extension = true;
  // Demand-pinning share of total volume, in [0, 1].
  double alpha_dp = 0.0;
  // 0 disables the centrality stage.
  int centrality_group_size = 0;
  // Stage order; the combined pipeline default is pinning, stretch, domination.
  std::vector<FilterStage> stages = {FilterStage::kPinning, FilterStage::kStretch,
                                     FilterStage::kDomination};
};

// Throws kInvalidArgument if a field is out of range.
void CheckFilterConfig(const FilterConfig& config, int num_nodes);

struct StageCount {
  std::string stage;
  std::int64_t remaining_paths = 0;
};

struct ExclusionStats {
  std::int64_t total_paths = 0;
  std::int64_t remaining_paths = 0;
  double excluded_fraction = 0;
  std::vector<StageCount> stages;
};

CandidateSet FullCandidates(const Topology& topo, const TrafficMatrix& tm);

// Sum over ordered pairs s != t outside the group of the fraction of s-t
// shortest paths that visit a group node.
double GroupGspCentrality(const Topology& topo, const ApspTable& apsp,
                          const std::vector<int>& group);

// Grows a group one node at a time by maximal marginal centrality gain,
// breaking ties by the smaller node index. Returned in insertion order.
std::vector<int> GreedyCentralityGroup(const Topology& topo, const ApspTable& apsp,
                                       int size);

CandidateSet CentralityFilter(const CandidateSet& cands, const TrafficMatrix& tm,
                              const std::vector<int>& group);

CandidateSet StretchBoundingFilter(const CandidateSet& cands, const TrafficMatrix& tm,
                                   const ApspTable& apsp, double alpha_sb,
                                   bool one_hop_extension);

// Ids of the demands the pinning rule selects, ascending.
std::vector<int> DemandsToPin(const TrafficMatrix& tm, double alpha_dp);

CandidateSet DemandPinningFilter(const CandidateSet& cands, const TrafficMatrix& tm,
                                 double alpha_dp);

// Relation between the load vectors of two SR paths of the same demand.
enum class LoadOrder { kEquivalent, kDominates, kDominatedBy, kIncomparable };

// Compares a against b arcwise over the union of supports (absent = 0).
// kDominates means a <= b everywhere with strict inequality somewhere.
LoadOrder CompareLoads(const SparseLoads& a, const SparseLoads& b);

CandidateSet DominationFilter(const CandidateSet& cands, const TrafficMatrix& tm,
                              const EcmpTable& ecmp);

ExclusionStats ComputeExclusionStats(const CandidateSet& before,
                                     const CandidateSet& after);

struct PipelineResult {
  CandidateSet candidates;
  ExclusionStats stats;
};

// Runs config.stages in order starting from the full candidate sets.
PipelineResult CombinedPipeline(const Topology& topo, const TrafficMatrix& tm,
                                const ApspTable& apsp, const EcmpTable& ecmp,
                                const FilterConfig& config);

// CSV "demand_id,src,dst,candidate" with a header line.
std::string DumpCandidates(const CandidateSet& cands, const TrafficMatrix& tm);

}  // namespace srte

#endif  // SRTE_CORE_SR_CANDIDATES_H
