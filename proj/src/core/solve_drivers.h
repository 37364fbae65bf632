#ifndef SRTE_CORE_SOLVE_DRIVERS_H
#define SRTE_CORE_SOLVE_DRIVERS_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "igp_routing.h"
#include "milp_2sr.h"
#include "net_model.h"
#include "sr_candidates.h"

namespace srte {

enum class Backend { kExternal, kExact };

// Environment variable that overrides SolverConfig::command.
inline constexpr const char* kSolverCommandEnv = "SRTE_SOLVER_CMD";

struct SolverConfig {
  Backend backend = Backend::kExact;
  // Shell command template. {model} and {solution} are replaced by file
  // paths; {gap}, {time_limit} and {threads} by the values below.
  std::string command;
  double gap = 1e-4;
  double time_limit = 3600;
  int threads = 1;
  // Exact oracle refuses instances whose candidate-set product, after
  // bounding against the greedy incumbent at the root, exceeds this.
  double oracle_search_limit = 1e8;
};

void CheckSolverConfig(const SolverConfig& config);

struct SolveReport {
  std::optional<SrSolution> solution;
  double solve_seconds = 0;
  double preprocess_seconds = 0;
  SolveStatus status = SolveStatus::kError;
  std::string message;
};

// Resolves the command template: environment override, then config, then
// the build-time default (the bundled HiGHS adapter).
std::string ResolveSolverCommand(const SolverConfig& config);

// Writes the LP file to a private temp directory, runs the solver command and
// reads back its solution listing. Throws kCommandNotFound, kSolverFailed,
// kUnparseableOutput or kInfeasible; a time limit without incumbent yields a
// report with status kTimeLimit and no solution.
SolveReport SolveExternal(const MilpModel& model, const SolverConfig& config);

// Best-first branch and bound over per-demand candidate choices.
class ExactOracle {
 public:
  ExactOracle(const Topology& topo, const TrafficMatrix& tm,
              const CandidateSet& cands, const EcmpTable& ecmp);

  // Unpinned demands in branching order (descending volume, then id).
  const std::vector<int>& order() const { return order_; }
  int num_options(int level) const { return static_cast<int>(options_[level].size()); }
  int candidate(int level, int option) const { return options_[level][option].candidate; }

  // Lower bound on theta for any completion of the given choices for the
  // first prefix.size() levels.
  double LowerBound(std::span<const int> prefix) const;
  // Max utilization of a complete choice vector.
  double Evaluate(std::span<const int> choices) const;

  SolveReport Solve(const SolverConfig& config) const;

 private:
  struct Option {
    int candidate;
    SparseLoads load;  // volume * g(e)
  };

  std::vector<double> LoadsFor(std::span<const int> prefix) const;
  double BoundFrom(const std::vector<double>& loads, int next_level,
                   const std::vector<std::vector<Option>>& options) const;
  std::vector<int> Assignment(std::span<const int> choices,
                              const std::vector<std::vector<Option>>& options) const;

  int num_demands_ = 0;
  std::vector<double> capacity_;
  std::vector<double> base_load_;
  std::vector<int> order_;
  std::vector<std::vector<Option>> options_;
};

SolveReport SolveExactOracle(const Topology& topo, const TrafficMatrix& tm,
                             const CandidateSet& cands, const EcmpTable& ecmp,
                             const SolverConfig& config);

}  // namespace srte

#endif  // SRTE_CORE_SOLVE_DRIVERS_H
