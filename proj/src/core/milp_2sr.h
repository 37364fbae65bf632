#ifndef SRTE_CORE_MILP_2SR_H
#define SRTE_CORE_MILP_2SR_H

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "igp_routing.h"
#include "net_model.h"
#include "sr_candidates.h"

namespace srte {

// Binary x(demand, candidate).
struct BinaryVar {
  int demand = 0;
  int candidate = kDirect;
  std::string name;
};

struct ModelTerm {
  int var = 0;
  double coef = 0;
};

// sum_k x(demand, k) = 1
struct AssignmentRow {
  int demand = 0;
  std::vector<int> vars;
};

// sum terms - capacity * theta <= -pinned_load
struct CapacityRow {
  int arc = 0;
  std::vector<ModelTerm> terms;
  double capacity = 0;
  double pinned_load = 0;
};

// min theta over the binary 2SR formulation. Pinned demands are folded into
// the capacity rows as constant load and have no variables.
class MilpModel {
 public:
  int num_demands() const { return num_demands_; }
  const std::vector<BinaryVar>& vars() const { return vars_; }
  const std::vector<AssignmentRow>& assignment_rows() const { return assignment_rows_; }
  const std::vector<CapacityRow>& capacity_rows() const { return capacity_rows_; }
  const std::vector<int>& pinned_demands() const { return pinned_demands_; }
  int num_rows() const {
    return static_cast<int>(assignment_rows_.size() + capacity_rows_.size());
  }
  // -1 if unknown.
  int FindVar(std::string_view name) const;

 private:
  friend MilpModel BuildModel(const Topology&, const TrafficMatrix&,
                              const CandidateSet&, const EcmpTable&);

  int num_demands_ = 0;
  std::vector<BinaryVar> vars_;
  std::vector<AssignmentRow> assignment_rows_;
  std::vector<CapacityRow> capacity_rows_;
  std::vector<int> pinned_demands_;
  std::unordered_map<std::string, int> var_index_;
};

std::string VarName(int demand, int candidate);

MilpModel BuildModel(const Topology& topo, const TrafficMatrix& tm,
                     const CandidateSet& cands, const EcmpTable& ecmp);

// CPLEX LP syntax. Byte-identical for identical models.
std::string WriteLpFile(const MilpModel& model);

enum class SolveStatus { kOptimal, kGapLimit, kTimeLimit, kInfeasible, kError };

const char* SolveStatusName(SolveStatus status);
// Throws kUnparseableOutput for unknown names.
SolveStatus ParseSolveStatus(std::string_view name);

struct SrSolution {
  // Chosen middlepoint per demand id (kDirect for pinned demands).
  std::vector<int> assignment;
  double theta = 0;
  SolveStatus status = SolveStatus::kOptimal;
  double reported_objective = 0;
  double reported_gap = 0;
  double wall_seconds = 0;
};

// Reads a solution listing: "objective <value>" first, then optional
// "status <name>" and "gap <value>" lines and "<variable> <value>" lines.
// Binaries round at 0.5.
SrSolution ParseSolution(std::string_view text, const MilpModel& model);

// Utilization of the given assignment computed from the ECMP table alone.
Utilization EvaluateAssignmentMlu(const Topology& topo, const TrafficMatrix& tm,
                                  const std::vector<int>& assignment,
                                  const EcmpTable& ecmp);

}  // namespace srte

#endif  // SRTE_CORE_MILP_2SR_H
