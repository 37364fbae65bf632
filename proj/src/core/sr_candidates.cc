#include "sr_candidates.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "error.h"

namespace srte {
namespace {

// Loads are sums of ECMP split fractions; identical loads reached through
// different summation orders can differ in the last bits.
constexpr double kLoadTolerance = 1e-12;

}  // namespace

CandidateSet::CandidateSet(std::vector<std::vector<int>> candidates)
    : candidates_(std::move(candidates)), pinned_(candidates_.size(), false) {
  for (auto& list : candidates_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

void CandidateSet::Pin(int demand) {
  candidates_[demand] = {kDirect};
  pinned_[demand] = true;
}

void CandidateSet::Set(int demand, std::vector<int> candidates) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates_[demand] = std::move(candidates);
}

std::int64_t CandidateSet::TotalCandidates() const {
  std::int64_t total = 0;
  for (const auto& list : candidates_) total += static_cast<std::int64_t>(list.size());
  return total;
}

int CandidateSet::NumPinned() const {
  return static_cast<int>(std::count(pinned_.begin(), pinned_.end(), true));
}

const char* FilterStageName(FilterStage stage) {
  switch (stage) {
    case FilterStage::kCentrality: return "centrality";
    case FilterStage::kPinning: return "pinning";
    case FilterStage::kStretch: return "stretch";
    case FilterStage::kDomination: return "domination";
  }
  return "unknown";
}

void CheckFilterConfig(const FilterConfig& config, int num_nodes) {
  if (std::isnan(config.alpha_sb) || config.alpha_sb < 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_sb must be >= 1");
  }
  if (!(config.alpha_dp >= 0.0 && config.alpha_dp <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_dp must lie in [0, 1]");
  }
  if (config.centrality_group_size < 0 || config.centrality_group_size > num_nodes) {
    throw Error(ErrorCode::kInvalidArgument, "centrality group size out of range");
  }
}

CandidateSet FullCandidates(const Topology& topo, const TrafficMatrix& tm) {
  std::vector<std::vector<int>> lists(tm.size());
  for (const Demand& d : tm.demands()) {
    auto& list = lists[d.id];
    list.reserve(topo.num_nodes() - 1);
    list.push_back(kDirect);
    for (int k = 0; k < topo.num_nodes(); ++k) {
      if (k != d.src && k != d.dst) list.push_back(k);
    }
  }
  return CandidateSet(std::move(lists));
}

double GroupGspCentrality(const Topology& topo, const ApspTable& apsp,
                          const std::vector<int>& group) {
  const int n = topo.num_nodes();
  if (group.empty()) return 0.0;
  std::vector<char> in_group(n, 0);
  for (int v : group) in_group[v] = 1;

  double value = 0.0;
  for (int s = 0; s < n; ++s) {
    if (in_group[s]) continue;
    SingleSourcePaths avoiding = ShortestPathsFrom(topo, s, in_group);
    for (int t = 0; t < n; ++t) {
      if (t == s || in_group[t]) continue;
      std::uint64_t all = apsp.Sigma(s, t);
      std::uint64_t avoid =
          avoiding.dist[t] == apsp.Dist(s, t) ? avoiding.sigma[t] : 0;
      value += static_cast<double>(all - avoid) / static_cast<double>(all);
    }
  }
  return value;
}

std::vector<int> GreedyCentralityGroup(const Topology& topo, const ApspTable& apsp,
                                       int size) {
  const int n = topo.num_nodes();
  if (size < 1 || size > n) {
    throw Error(ErrorCode::kInvalidArgument, "group size out of range");
  }
  std::vector<int> group;
  std::vector<char> chosen(n, 0);
  while (static_cast<int>(group.size()) < size) {
    int best = -1;
    double best_value = 0;
    for (int v = 0; v < n; ++v) {
      if (chosen[v]) continue;
      group.push_back(v);
      double value = GroupGspCentrality(topo, apsp, group);
      group.pop_back();
      double tolerance = 1e-12 * std::max(1.0, std::abs(best_value));
      if (best < 0 || value > best_value + tolerance) {
        best = v;
        best_value = value;
      }
    }
    chosen[best] = 1;
    group.push_back(best);
  }
  return group;
}

CandidateSet CentralityFilter(const CandidateSet& cands, const TrafficMatrix& tm,
                              const std::vector<int>& group) {
  if (group.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "centrality group must be nonempty");
  }
  std::vector<int> sorted_group = group;
  std::sort(sorted_group.begin(), sorted_group.end());
  CandidateSet out = cands;
  for (int id = 0; id < cands.num_demands(); ++id) {
    if (cands.pinned(id)) continue;
    const Demand& d = tm.demand(id);
    std::vector<int> kept;
    for (int k : cands.candidates(id)) {
      if (k == kDirect ||
          (k != d.src && k != d.dst &&
           std::binary_search(sorted_group.begin(), sorted_group.end(), k))) {
        kept.push_back(k);
      }
    }
    out.Set(id, std::move(kept));
  }
  return out;
}

CandidateSet StretchBoundingFilter(const CandidateSet& cands, const TrafficMatrix& tm,
                                   const ApspTable& apsp, double alpha_sb,
                                   bool one_hop_extension) {
  if (std::isnan(alpha_sb) || alpha_sb < 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_sb must be >= 1");
  }
  CandidateSet out = cands;
  for (int id = 0; id < cands.num_demands(); ++id) {
    if (cands.pinned(id)) continue;
    const Demand& d = tm.demand(id);
    const double direct = static_cast<double>(apsp.Dist(d.src, d.dst));
    const bool extend = one_hop_extension && apsp.Hop(d.src, d.dst) == 1;
    std::vector<int> kept;
    for (int k : cands.candidates(id)) {
      if (k == kDirect) {
        kept.push_back(k);
        continue;
      }
      double detour =
          static_cast<double>(apsp.Dist(d.src, k) + apsp.Dist(k, d.dst));
      bool within = detour / direct <= alpha_sb;
      bool two_hop = extend && apsp.Hop(d.src, k) == 1 && apsp.Hop(k, d.dst) == 1;
      if (within || two_hop) kept.push_back(k);
    }
    out.Set(id, std::move(kept));
  }
  return out;
}

std::vector<int> DemandsToPin(const TrafficMatrix& tm, double alpha_dp) {
  if (!(alpha_dp >= 0.0 && alpha_dp <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_dp must lie in [0, 1]");
  }
  std::vector<int> order(tm.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double va = tm.demand(a).volume, vb = tm.demand(b).volume;
    return va != vb ? va < vb : a < b;
  });
  // Summed in sorted order so that alpha_dp = 1 pins everything exactly,
  // independent of the input demand order.
  double total = 0;
  for (int id : order) total += tm.demand(id).volume;
  const double threshold = alpha_dp * total * (1.0 + 1e-12);

  std::vector<int> pinned;
  double cumulative = 0;
  for (int id : order) {
    double next = cumulative + tm.demand(id).volume;
    if (next > threshold) break;
    cumulative = next;
    pinned.push_back(id);
  }
  std::sort(pinned.begin(), pinned.end());
  return pinned;
}

CandidateSet DemandPinningFilter(const CandidateSet& cands, const TrafficMatrix& tm,
                                 double alpha_dp) {
  CandidateSet out = cands;
  for (int id : DemandsToPin(tm, alpha_dp)) out.Pin(id);
  return out;
}

LoadOrder CompareLoads(const SparseLoads& a, const SparseLoads& b) {
  bool a_smaller = false;
  bool a_larger = false;
  auto compare = [&](double x, double y) {
    if (x < y - kLoadTolerance) a_smaller = true;
    if (x > y + kLoadTolerance) a_larger = true;
  };
  size_t x = 0, y = 0;
  while ((x < a.size() || y < b.size()) && !(a_smaller && a_larger)) {
    if (y == b.size() || (x < a.size() && a[x].arc < b[y].arc)) {
      compare(a[x++].load, 0.0);
    } else if (x == a.size() || b[y].arc < a[x].arc) {
      compare(0.0, b[y++].load);
    } else {
      compare(a[x].load, b[y].load);
      ++x;
      ++y;
    }
  }
  if (a_smaller && a_larger) return LoadOrder::kIncomparable;
  if (a_smaller) return LoadOrder::kDominates;
  if (a_larger) return LoadOrder::kDominatedBy;
  return LoadOrder::kEquivalent;
}

CandidateSet DominationFilter(const CandidateSet& cands, const TrafficMatrix& tm,
                              const EcmpTable& ecmp) {
  CandidateSet out = cands;
  std::vector<SparseLoads> loads;
  std::vector<char> removed;
  for (int id = 0; id < cands.num_demands(); ++id) {
    const std::vector<int>& list = cands.candidates(id);
    if (cands.pinned(id) || list.size() < 2) continue;
    const Demand& d = tm.demand(id);
    const size_t r = list.size();
    loads.clear();
    for (int k : list) loads.push_back(SrPathLoads(d.src, d.dst, k, ecmp).loads);

    removed.assign(r, 0);
    for (size_t p = 0; p < r; ++p) {
      for (size_t q = p + 1; q < r; ++q) {
        switch (CompareLoads(loads[p], loads[q])) {
          case LoadOrder::kDominates: removed[q] = 1; break;
          case LoadOrder::kDominatedBy: removed[p] = 1; break;
          default: break;
        }
      }
    }
    // Within each equivalence class the first survivor in list order wins:
    // kDirect if present, else the smallest node index.
    std::vector<int> kept;
    std::vector<size_t> kept_pos;
    for (size_t p = 0; p < r; ++p) {
      if (removed[p]) continue;
      bool duplicate = std::any_of(kept_pos.begin(), kept_pos.end(), [&](size_t q) {
        return CompareLoads(loads[p], loads[q]) == LoadOrder::kEquivalent;
      });
      if (duplicate) continue;
      kept.push_back(list[p]);
      kept_pos.push_back(p);
    }
    out.Set(id, std::move(kept));
  }
  return out;
}

ExclusionStats ComputeExclusionStats(const CandidateSet& before,
                                     const CandidateSet& after) {
  if (before.num_demands() != after.num_demands()) {
    throw Error(ErrorCode::kDemandMismatch, "candidate sets cover different demands");
  }
  ExclusionStats stats;
  stats.total_paths = before.TotalCandidates();
  stats.remaining_paths = after.TotalCandidates();
  stats.excluded_fraction =
      stats.total_paths == 0
          ? 0.0
          : 1.0 - static_cast<double>(stats.remaining_paths) /
                      static_cast<double>(stats.total_paths);
  return stats;
}

PipelineResult CombinedPipeline(const Topology& topo, const TrafficMatrix& tm,
                                const ApspTable& apsp, const EcmpTable& ecmp,
                                const FilterConfig& config) {
  CheckFilterConfig(config, topo.num_nodes());
  const CandidateSet full = FullCandidates(topo, tm);
  CandidateSet current = full;
  std::vector<StageCount> stages;
  for (FilterStage stage : config.stages) {
    switch (stage) {
      case FilterStage::kCentrality:
        if (config.centrality_group_size > 0) {
          current = CentralityFilter(
              current, tm, GreedyCentralityGroup(topo, apsp, config.centrality_group_size));
        }
        break;
      case FilterStage::kPinning:
        current = DemandPinningFilter(current, tm, config.alpha_dp);
        break;
      case FilterStage::kStretch:
        current = StretchBoundingFilter(current, tm, apsp, config.alpha_sb,
                                        config.one_hop_extension);
        break;
      case FilterStage::kDomination:
        current = DominationFilter(current, tm, ecmp);
        break;
    }
    stages.push_back({FilterStageName(stage), current.TotalCandidates()});
  }
  PipelineResult result{std::move(current), {}};
  result.stats = ComputeExclusionStats(full, result.candidates);
  result.stats.stages = std::move(stages);
  return result;
}

std::string DumpCandidates(const CandidateSet& cands, const TrafficMatrix& tm) {
  std::ostringstream out;
  out << "demand_id,src,dst,candidate\n";
  for (int id = 0; id < cands.num_demands(); ++id) {
    const Demand& d = tm.demand(id);
    for (int k : cands.candidates(id)) {
      out << id << ',' << d.src << ',' << d.dst << ',';
      if (k == kDirect) {
        out << "DIRECT";
      } else {
        out << k;
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace srte
