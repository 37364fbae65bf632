#include "srte/srte.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "core/bench.h"
#include "core/error.h"
#include "core/igp_routing.h"
#include "core/milp_2sr.h"
#include "core/net_model.h"
#include "core/solve_drivers.h"
#include "core/sr_candidates.h"

struct srte_instance {
  srte::Topology topology;
  srte::TrafficMatrix traffic;
  srte::ApspTable apsp;
  srte::EcmpTable ecmp;

  void Recompute() {
    apsp = srte::ComputeApsp(topology);
    ecmp = srte::ComputeEcmpFractions(topology, apsp);
  }
};

struct srte_candidates {
  srte::CandidateSet set;
  srte::TrafficMatrix traffic;
  std::vector<srte::StageCount> stages;
};

struct srte_solution {
  std::optional<srte::SrSolution> solution;
  srte::SolveStatus status = srte::SolveStatus::kError;
  double seconds = 0;
  double evaluated_mlu = std::nan("");
};

namespace {

thread_local std::string last_error;

srte_status Fail(srte_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
srte_status Guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SRTE_OK;
  } catch (const srte::Error& e) {
    return Fail(static_cast<srte_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(SRTE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(SRTE_ERR_INTERNAL, e.what());
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string ReadFile(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw srte::Error(srte::ErrorCode::kIo, std::string("cannot read ") + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void RequireValid(const srte_instance& instance) {
  std::vector<std::string> findings =
      srte::ValidateInstance(instance.topology, instance.traffic);
  // An empty traffic matrix is still a usable instance for modelling.
  if (!findings.empty() && !(findings.size() == 1 && instance.traffic.empty())) {
    throw srte::Error(srte::ErrorCode::kInvalidInstance, findings.front());
  }
}

std::unique_ptr<srte_instance> MakeInstance(srte::Topology topology,
                                            srte::TrafficMatrix traffic) {
  auto instance = std::make_unique<srte_instance>();
  instance->topology = std::move(topology);
  instance->traffic = std::move(traffic);
  RequireValid(*instance);
  instance->Recompute();
  return instance;
}

srte::FilterConfig ToFilterConfig(const srte_filter_config& c) {
  srte::FilterConfig config;
  config.alpha_sb = c.alpha_sb;
  config.one_hop_extension = c.one_hop_extension != 0;
  config.alpha_dp = c.alpha_dp;
  config.centrality_group_size = c.centrality_group_size;
  if (c.stages != nullptr) {
    config.stages = srte::ParseFilterSpec(std::string("stages=") + c.stages).stages;
  }
  if (c.centrality_group_size > 0 &&
      std::find(config.stages.begin(), config.stages.end(),
                srte::FilterStage::kCentrality) == config.stages.end()) {
    config.stages.insert(config.stages.begin(), srte::FilterStage::kCentrality);
  }
  return config;
}

srte::SolverConfig ToSolverConfig(const srte_solver_config& c) {
  srte::SolverConfig config;
  config.backend =
      c.backend == SRTE_BACKEND_EXACT ? srte::Backend::kExact : srte::Backend::kExternal;
  if (c.command != nullptr) config.command = c.command;
  config.gap = c.gap;
  config.time_limit = c.time_limit;
  config.threads = c.threads;
  return config;
}

const srte::CandidateSet& CandidatesOrFull(const srte_instance& instance,
                                           const srte_candidates* cands,
                                           std::optional<srte::CandidateSet>* storage) {
  if (cands != nullptr) {
    if (cands->set.num_demands() != instance.traffic.size()) {
      throw srte::Error(srte::ErrorCode::kDemandMismatch,
                        "candidate set belongs to a different instance");
    }
    return cands->set;
  }
  storage->emplace(srte::FullCandidates(instance.topology, instance.traffic));
  return **storage;
}

void FillEvaluation(const srte_instance& instance, srte_solution* out) {
  if (out->solution) {
    out->evaluated_mlu = srte::EvaluateAssignmentMlu(instance.topology, instance.traffic,
                                                     out->solution->assignment, instance.ecmp)
                             .mlu;
  }
}

}  // namespace

extern "C" {

const char* srte_last_error(void) { return last_error.c_str(); }

const char* srte_status_name(srte_status status) {
  switch (status) {
    case SRTE_OK: return "ok";
    case SRTE_ERR_PARSE: return "parse error";
    case SRTE_ERR_INVALID_INSTANCE: return "invalid instance";
    case SRTE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SRTE_ERR_COMMAND_NOT_FOUND: return "command not found";
    case SRTE_ERR_SOLVER_FAILED: return "solver failed";
    case SRTE_ERR_UNPARSEABLE_OUTPUT: return "unparseable solver output";
    case SRTE_ERR_INFEASIBLE: return "infeasible";
    case SRTE_ERR_SEARCH_LIMIT: return "search limit exceeded";
    case SRTE_ERR_IO: return "i/o error";
    case SRTE_ERR_NON_UNIQUE_ASSIGNMENT: return "non-unique assignment";
    case SRTE_ERR_MISSING_VARIABLE: return "missing variable";
    case SRTE_ERR_DEMAND_MISMATCH: return "demand mismatch";
    case SRTE_ERR_SPR_TRIVIAL: return "SPR-trivial";
    case SRTE_ERR_NO_SOLUTION: return "no solution";
    case SRTE_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void srte_string_free(char* s) { std::free(s); }

srte_status srte_instance_parse(const char* graph_text, const char* demands_text,
                                srte_instance** out) {
  if (graph_text == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    srte::Topology topo = srte::ParseTopology(graph_text);
    srte::TrafficMatrix tm =
        demands_text != nullptr ? srte::ParseDemands(demands_text, topo) : srte::TrafficMatrix();
    *out = MakeInstance(std::move(topo), std::move(tm)).release();
  });
}

srte_status srte_instance_load(const char* graph_path, const char* demands_path,
                               srte_instance** out) {
  if (graph_path == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    srte::Topology topo = srte::ParseTopology(ReadFile(graph_path));
    srte::TrafficMatrix tm = demands_path != nullptr
                                 ? srte::ParseDemands(ReadFile(demands_path), topo)
                                 : srte::TrafficMatrix();
    *out = MakeInstance(std::move(topo), std::move(tm)).release();
  });
}

srte_status srte_instance_synthetic(int num_nodes, uint64_t seed, double total_volume,
                                    srte_instance** out) {
  if (out == nullptr) return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    srte::Instance synthetic = srte::MakeSyntheticInstance(num_nodes, seed, total_volume);
    *out = MakeInstance(std::move(synthetic.topology), std::move(synthetic.traffic)).release();
  });
}

srte_status srte_instance_set_gravity_traffic(srte_instance* instance, double total_volume,
                                              uint64_t seed) {
  if (instance == nullptr) return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    instance->traffic = srte::GenerateGravityTraffic(instance->topology, total_volume, seed);
  });
}

void srte_instance_free(srte_instance* instance) { delete instance; }

int srte_instance_num_nodes(const srte_instance* instance) {
  return instance ? instance->topology.num_nodes() : 0;
}
int srte_instance_num_arcs(const srte_instance* instance) {
  return instance ? instance->topology.num_arcs() : 0;
}
int srte_instance_num_demands(const srte_instance* instance) {
  return instance ? instance->traffic.size() : 0;
}

srte_status srte_instance_validate(const srte_instance* instance, char** report) {
  if (instance == nullptr || report == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    std::string text;
    for (const std::string& finding :
         srte::ValidateInstance(instance->topology, instance->traffic)) {
      text += finding + "\n";
    }
    *report = CopyString(text);
  });
}

srte_status srte_lint_files(const char* graph_path, const char* demands_path,
                            char** report) {
  if (graph_path == nullptr || report == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    srte::Topology topo = srte::ParseTopology(ReadFile(graph_path));
    srte::TrafficMatrix tm = demands_path != nullptr
                                 ? srte::ParseDemands(ReadFile(demands_path), topo)
                                 : srte::TrafficMatrix();
    std::string text;
    for (const std::string& finding : srte::ValidateInstance(topo, tm)) {
      if (demands_path == nullptr && tm.empty() && finding == "traffic matrix is empty") continue;
      text += finding + "\n";
    }
    *report = CopyString(text);
  });
}

srte_status srte_instance_graph_text(const srte_instance* instance, char** out) {
  if (instance == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] { *out = CopyString(srte::SerializeTopology(instance->topology)); });
}

srte_status srte_instance_demands_text(const srte_instance* instance, char** out) {
  if (instance == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] { *out = CopyString(srte::SerializeDemands(instance->traffic)); });
}

srte_status srte_spr_mlu(const srte_instance* instance, double* mlu) {
  if (instance == nullptr || mlu == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    *mlu = srte::SprMlu(instance->topology, instance->traffic, instance->ecmp).mlu;
  });
}

void srte_filter_config_init(srte_filter_config* config) {
  if (config == nullptr) return;
  config->alpha_sb = HUGE_VAL;
  config->one_hop_extension = 1;
  config->alpha_dp = 0.0;
  config->centrality_group_size = 0;
  config->stages = nullptr;
}

srte_status srte_full_candidates(const srte_instance* instance, srte_candidates** out) {
  if (instance == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    auto cands = std::make_unique<srte_candidates>();
    cands->set = srte::FullCandidates(instance->topology, instance->traffic);
    cands->traffic = instance->traffic;
    *out = cands.release();
  });
}

srte_status srte_preprocess(const srte_instance* instance, const srte_filter_config* config,
                            srte_candidates** out, srte_exclusion_stats* stats) {
  if (instance == nullptr || config == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    auto start = std::chrono::steady_clock::now();
    srte::PipelineResult result =
        srte::CombinedPipeline(instance->topology, instance->traffic, instance->apsp,
                               instance->ecmp, ToFilterConfig(*config));
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto cands = std::make_unique<srte_candidates>();
    cands->set = std::move(result.candidates);
    cands->stages = result.stats.stages;
    cands->traffic = instance->traffic;
    if (stats != nullptr) {
      stats->total_paths = result.stats.total_paths;
      stats->remaining_paths = result.stats.remaining_paths;
      stats->excluded_fraction = result.stats.excluded_fraction;
      stats->preprocess_seconds = seconds;
    }
    *out = cands.release();
  });
}

void srte_candidates_free(srte_candidates* cands) { delete cands; }

int srte_candidates_count(const srte_candidates* cands, int demand) {
  if (cands == nullptr || demand < 0 || demand >= cands->set.num_demands()) return -1;
  return static_cast<int>(cands->set.candidates(demand).size());
}

int srte_candidates_get(const srte_candidates* cands, int demand, int index) {
  int count = srte_candidates_count(cands, demand);
  if (index < 0 || index >= count) return -2;
  return cands->set.candidates(demand)[index];
}

int srte_candidates_pinned(const srte_candidates* cands, int demand) {
  if (cands == nullptr || demand < 0 || demand >= cands->set.num_demands()) return 0;
  return cands->set.pinned(demand) ? 1 : 0;
}

srte_status srte_candidates_dump(const srte_candidates* cands, char** csv) {
  if (cands == nullptr || csv == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] { *csv = CopyString(srte::DumpCandidates(cands->set, cands->traffic)); });
}

srte_status srte_candidates_stage_counts(const srte_candidates* cands, char** out) {
  if (cands == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    std::string text;
    for (const srte::StageCount& stage : cands->stages) {
      text += stage.stage + " " + std::to_string(stage.remaining_paths) + "\n";
    }
    *out = CopyString(text);
  });
}

srte_status srte_centrality_group(const srte_instance* instance, int size, int* nodes_out) {
  if (instance == nullptr || nodes_out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    std::vector<int> group =
        srte::GreedyCentralityGroup(instance->topology, instance->apsp, size);
    std::copy(group.begin(), group.end(), nodes_out);
  });
}

srte_status srte_group_centrality(const srte_instance* instance, const int* group,
                                  size_t size, double* value) {
  if (instance == nullptr || value == nullptr || (group == nullptr && size > 0)) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    std::vector<int> nodes(group, group + size);
    for (int v : nodes) {
      if (v < 0 || v >= instance->topology.num_nodes()) {
        throw srte::Error(srte::ErrorCode::kInvalidArgument, "group node out of range");
      }
    }
    *value = srte::GroupGspCentrality(instance->topology, instance->apsp, nodes);
  });
}

void srte_solver_config_init(srte_solver_config* config) {
  if (config == nullptr) return;
  srte::SolverConfig defaults;
  config->backend = SRTE_BACKEND_EXTERNAL;
  config->command = nullptr;
  config->gap = defaults.gap;
  config->time_limit = defaults.time_limit;
  config->threads = defaults.threads;
}

srte_status srte_write_lp(const srte_instance* instance, const srte_candidates* cands,
                          char** out) {
  if (instance == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    std::optional<srte::CandidateSet> storage;
    const srte::CandidateSet& set = CandidatesOrFull(*instance, cands, &storage);
    *out = CopyString(srte::WriteLpFile(
        srte::BuildModel(instance->topology, instance->traffic, set, instance->ecmp)));
  });
}

srte_status srte_solve(const srte_instance* instance, const srte_candidates* cands,
                       const srte_solver_config* config, srte_solution** out) {
  if (instance == nullptr || config == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    std::optional<srte::CandidateSet> storage;
    const srte::CandidateSet& set = CandidatesOrFull(*instance, cands, &storage);
    srte::SolveReport report = srte::SolveInstance(instance->topology, instance->traffic, set,
                                                   instance->ecmp, ToSolverConfig(*config));
    auto solution = std::make_unique<srte_solution>();
    solution->solution = std::move(report.solution);
    solution->status = report.status;
    solution->seconds = report.solve_seconds;
    FillEvaluation(*instance, solution.get());
    *out = solution.release();
  });
}

srte_status srte_parse_solution(const srte_instance* instance, const srte_candidates* cands,
                                const char* listing, srte_solution** out) {
  if (instance == nullptr || listing == nullptr || out == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    std::optional<srte::CandidateSet> storage;
    const srte::CandidateSet& set = CandidatesOrFull(*instance, cands, &storage);
    srte::MilpModel model =
        srte::BuildModel(instance->topology, instance->traffic, set, instance->ecmp);
    auto solution = std::make_unique<srte_solution>();
    solution->solution = srte::ParseSolution(listing, model);
    solution->status = solution->solution->status;
    FillEvaluation(*instance, solution.get());
    *out = solution.release();
  });
}

void srte_solution_free(srte_solution* solution) { delete solution; }

int srte_solution_has_assignment(const srte_solution* solution) {
  return solution != nullptr && solution->solution.has_value() ? 1 : 0;
}

double srte_solution_theta(const srte_solution* solution) {
  return srte_solution_has_assignment(solution) ? solution->solution->theta : std::nan("");
}

double srte_solution_evaluated_mlu(const srte_solution* solution) {
  return solution != nullptr ? solution->evaluated_mlu : std::nan("");
}

const char* srte_solution_status(const srte_solution* solution) {
  return solution != nullptr ? srte::SolveStatusName(solution->status) : "error";
}

double srte_solution_seconds(const srte_solution* solution) {
  return solution != nullptr ? solution->seconds : 0.0;
}

int srte_solution_num_demands(const srte_solution* solution) {
  return srte_solution_has_assignment(solution)
             ? static_cast<int>(solution->solution->assignment.size())
             : 0;
}

int srte_solution_middlepoint(const srte_solution* solution, int demand) {
  if (demand < 0 || demand >= srte_solution_num_demands(solution)) return -2;
  return solution->solution->assignment[demand];
}

srte_status srte_bench_run(const char* config_text, const char* csv_path,
                           size_t* num_records) {
  if (config_text == nullptr || csv_path == nullptr) {
    return Fail(SRTE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    std::vector<srte::BenchmarkRecord> records =
        srte::RunBenchmark(srte::ParseExperimentConfig(config_text));
    srte::EmitReport(records, csv_path);
    if (num_records != nullptr) *num_records = records.size();
  });
}

}  // extern "C"
