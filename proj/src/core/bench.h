#ifndef SRTE_CORE_BENCH_H
#define SRTE_CORE_BENCH_H

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "net_model.h"
#include "solve_drivers.h"
#include "sr_candidates.h"

namespace srte {

// Synthetic topologies for experiments when no instance files are at hand.
//
// Backbone: n nodes scattered in a square, a ring through them in angular
// order, nearest-neighbour chords and about a fifth of the nodes attached as
// single-homed stubs. IGP weights follow geometric distance. Capacities are
// provisioned against the shortest-path load of the seed's gravity traffic
// with random headroom and rounded up to standard link speeds.
Topology GenerateBackboneTopology(int n, std::uint64_t seed);

// Fully meshed hubs, each with its own single-homed stubs.
Topology GenerateStarOfStars(int hubs, int stubs_per_hub);

struct Instance {
  std::string id;
  Topology topology;
  TrafficMatrix traffic;
};

struct SyntheticSpec {
  int n = 0;  // 0 = no synthetic instances
  std::uint64_t seed_begin = 1;
  std::uint64_t seed_end = 1;  // inclusive
  double total_volume = 0;     // 0 = scale so that SPR MLU is 1
};

// Backbone topology plus gravity traffic for the given seed.
Instance MakeSyntheticInstance(int n, std::uint64_t seed, double total_volume);

struct FilterCell {
  std::string id;
  FilterConfig filter;
};

struct ExperimentConfig {
  // Pairs of (graph file, demands file).
  std::vector<std::pair<std::string, std::string>> instance_files;
  SyntheticSpec synthetic;
  std::vector<FilterCell> cells;
  SolverConfig solver;
  int repetitions = 1;
  bool skip_spr_optimal = false;
  // Runs cells concurrently; timing columns are then only indicative.
  bool throughput_mode = false;
};

// Key-value config: one "key = value" per line, '#' comments. Keys:
//   instance = <graph path> <demands path>     (repeatable)
//   synthetic_n, synthetic_seeds = <a>-<b>, synthetic_volume
//   cell = <id> [dp=<a>] [sb=<a>|inf] [onehop=0|1] [centrality=<k>]
//          [stages=pinning,stretch,domination]    (repeatable)
//   backend = external|exact, solver_cmd, gap, time_limit, threads,
//   repetitions, skip_spr_optimal = 0|1, mode = timing|throughput
ExperimentConfig ParseExperimentConfig(std::string_view text);

// Parses the filter part of a cell line ("dp=0.05 sb=1.4 ...").
FilterConfig ParseFilterSpec(std::string_view spec);

struct BenchmarkRecord {
  std::string instance;
  std::string config;
  double theta_base = 0;
  double t_base = 0;
  double theta_filt = 0;
  double t_pre = 0;
  double t_filt = 0;
  double speedup = 0;
  double mlu_det = 0;
  double excluded_frac = 0;
  std::string status_base;
  std::string status_filt;
  // Not part of the CSV.
  std::vector<StageCount> stages;
  std::int64_t total_paths = 0;
};

struct Metrics {
  double speedup = 0;
  double mlu_deterioration = 0;
  double excluded_fraction = 0;
};

// speedup = t_base / (t_pre + t_filt); deterioration relative to the
// baseline theta. Throws kSprTrivial when the baseline theta is 0.
Metrics ComputeMetrics(const SolveReport& baseline, const SolveReport& filtered,
                       const ExclusionStats& stats);

// Solves one instance with the configured backend.
SolveReport SolveInstance(const Topology& topo, const TrafficMatrix& tm,
                          const CandidateSet& cands, const EcmpTable& ecmp,
                          const SolverConfig& config);

std::vector<Instance> LoadInstances(const ExperimentConfig& config);

std::vector<BenchmarkRecord> RunBenchmark(const ExperimentConfig& config);

std::string FormatReport(const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> ParseReport(std::string_view csv);
void EmitReport(const std::vector<BenchmarkRecord>& records, const std::string& path);

}  // namespace srte

#endif  // SRTE_CORE_BENCH_H
