// srte command-line front end. Talks to the library only through srte.h.

#include <srte/srte.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

struct InstanceFree {
  void operator()(srte_instance* p) const { srte_instance_free(p); }
};
struct CandidatesFree {
  void operator()(srte_candidates* p) const { srte_candidates_free(p); }
};
struct SolutionFree {
  void operator()(srte_solution* p) const { srte_solution_free(p); }
};
struct StringFree {
  void operator()(char* p) const { srte_string_free(p); }
};

using InstancePtr = std::unique_ptr<srte_instance, InstanceFree>;
using CandidatesPtr = std::unique_ptr<srte_candidates, CandidatesFree>;
using SolutionPtr = std::unique_ptr<srte_solution, SolutionFree>;
using StringPtr = std::unique_ptr<char, StringFree>;

struct Failure {
  srte_status status;
};

void Check(srte_status status) {
  if (status != SRTE_OK) {
    std::string name = srte_status_name(status);
    std::string message = srte_last_error();
    if (message.rfind(name, 0) == 0) message = message.substr(name.size());
    if (message.rfind(": ", 0) == 0) message = message.substr(2);
    std::cerr << "error: " << name << ": " << message << "\n";
    throw Failure{status};
  }
}

int ExitCode(srte_status status) { return status == SRTE_OK ? 0 : 2; }

std::string ReadFileOrThrow(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    throw Failure{SRTE_ERR_IO};
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void WriteFileOrThrow(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    throw Failure{SRTE_ERR_IO};
  }
}

struct InstanceOptions {
  std::string graph;
  std::string demands;
  int synthetic_n = 0;
  uint64_t seed = 1;
  double volume = 0;

  void Add(CLI::App* app) {
    app->add_option("-g,--graph", graph, "Repetita graph file");
    app->add_option("-d,--demands", demands, "Repetita demands file");
    app->add_option("--synthetic", synthetic_n, "Use a synthetic backbone with this many nodes");
    app->add_option("--seed", seed, "Seed for synthetic instances");
    app->add_option("--volume", volume,
                    "Total synthetic traffic (0 scales to shortest-path MLU 1)");
  }

  InstancePtr Load() const {
    srte_instance* raw = nullptr;
    if (synthetic_n > 0) {
      Check(srte_instance_synthetic(synthetic_n, seed, volume, &raw));
    } else if (!graph.empty()) {
      Check(srte_instance_load(graph.c_str(), demands.empty() ? nullptr : demands.c_str(),
                               &raw));
    } else {
      std::cerr << "error: pass --graph or --synthetic\n";
      throw Failure{SRTE_ERR_INVALID_ARGUMENT};
    }
    return InstancePtr(raw);
  }
};

struct FilterOptions {
  double alpha_sb = std::numeric_limits<double>::infinity();
  bool no_one_hop = false;
  double alpha_dp = 0;
  int centrality = 0;
  std::string stages;

  void Add(CLI::App* app) {
    app->add_option("--alpha-sb", alpha_sb, "Stretch bound (>= 1, default inf)");
    app->add_flag("--no-one-hop", no_one_hop, "Disable the one-hop extension");
    app->add_option("--alpha-dp", alpha_dp, "Share of volume pinned to shortest paths");
    app->add_option("--centrality", centrality, "Centrality group size (0 = off)");
    app->add_option("--stages", stages,
                    "Stage order, e.g. pinning,stretch,domination");
  }

  srte_filter_config Config() const {
    srte_filter_config config;
    srte_filter_config_init(&config);
    config.alpha_sb = alpha_sb;
    config.one_hop_extension = no_one_hop ? 0 : 1;
    config.alpha_dp = alpha_dp;
    config.centrality_group_size = centrality;
    config.stages = stages.empty() ? nullptr : stages.c_str();
    return config;
  }
};

struct SolverOptions {
  std::string backend = "external";
  std::string command;
  double gap = 1e-4;
  double time_limit = 3600;
  int threads = 1;

  void Add(CLI::App* app) {
    app->add_option("--backend", backend, "external or exact")
        ->check(CLI::IsMember({"external", "exact"}));
    app->add_option("--solver-cmd", command,
                    "Solver command template (overrides SRTE_SOLVER_CMD)");
    app->add_option("--gap", gap, "Relative optimality gap");
    app->add_option("--time-limit", time_limit, "Solver time limit in seconds");
    app->add_option("--threads", threads, "Solver threads");
  }

  srte_solver_config Config() const {
    srte_solver_config config;
    srte_solver_config_init(&config);
    config.backend = backend == "exact" ? SRTE_BACKEND_EXACT : SRTE_BACKEND_EXTERNAL;
    config.command = command.empty() ? nullptr : command.c_str();
    config.gap = gap;
    config.time_limit = time_limit;
    config.threads = threads;
    return config;
  }
};

void PrintStats(const srte_exclusion_stats& stats, srte_candidates* cands) {
  std::printf("total_paths %lld\nremaining_paths %lld\nexcluded_fraction %.6f\n"
              "preprocess_seconds %.6f\n",
              static_cast<long long>(stats.total_paths),
              static_cast<long long>(stats.remaining_paths), stats.excluded_fraction,
              stats.preprocess_seconds);
  char* raw = nullptr;
  Check(srte_candidates_stage_counts(cands, &raw));
  StringPtr text(raw);
  std::istringstream lines(text.get());
  std::string stage;
  long long remaining;
  while (lines >> stage >> remaining) std::printf("stage %s %lld\n", stage.c_str(), remaining);
}

int RunSolve(const InstanceOptions& io, const FilterOptions& fo, const SolverOptions& so,
             bool full, const std::string& lp_out, bool quiet) {
  InstancePtr instance = io.Load();
  srte_candidates* raw = nullptr;
  srte_exclusion_stats stats{};
  if (full) {
    Check(srte_full_candidates(instance.get(), &raw));
  } else {
    srte_filter_config config = fo.Config();
    Check(srte_preprocess(instance.get(), &config, &raw, &stats));
  }
  CandidatesPtr cands(raw);
  if (!lp_out.empty()) {
    char* lp = nullptr;
    Check(srte_write_lp(instance.get(), cands.get(), &lp));
    WriteFileOrThrow(lp_out, StringPtr(lp).get());
  }
  double spr = 0;
  Check(srte_spr_mlu(instance.get(), &spr));
  srte_solver_config config = so.Config();
  srte_solution* sol_raw = nullptr;
  Check(srte_solve(instance.get(), cands.get(), &config, &sol_raw));
  SolutionPtr solution(sol_raw);

  std::printf("status %s\n", srte_solution_status(solution.get()));
  std::printf("spr_mlu %.9g\n", spr);
  if (!full) std::printf("excluded_fraction %.6f\n", stats.excluded_fraction);
  std::printf("solve_seconds %.6f\n", srte_solution_seconds(solution.get()));
  if (!srte_solution_has_assignment(solution.get())) {
    std::printf("theta none\n");
    return 3;
  }
  std::printf("theta %.9g\n", srte_solution_theta(solution.get()));
  std::printf("evaluated_mlu %.9g\n", srte_solution_evaluated_mlu(solution.get()));
  if (!quiet) {
    std::printf("demand,middlepoint\n");
    int d = srte_solution_num_demands(solution.get());
    for (int i = 0; i < d; ++i) {
      int m = srte_solution_middlepoint(solution.get(), i);
      if (m == SRTE_DIRECT) {
        std::printf("%d,DIRECT\n", i);
      } else {
        std::printf("%d,%d\n", i, m);
      }
    }
  }
  return 0;
}

int RunPreprocess(const InstanceOptions& io, const FilterOptions& fo, const std::string& dump) {
  InstancePtr instance = io.Load();
  srte_filter_config config = fo.Config();
  srte_candidates* raw = nullptr;
  srte_exclusion_stats stats{};
  Check(srte_preprocess(instance.get(), &config, &raw, &stats));
  CandidatesPtr cands(raw);
  PrintStats(stats, cands.get());
  if (!dump.empty()) {
    char* csv = nullptr;
    Check(srte_candidates_dump(cands.get(), &csv));
    WriteFileOrThrow(dump, StringPtr(csv).get());
  }
  return 0;
}

int RunCentrality(const InstanceOptions& io, int size) {
  InstancePtr instance = io.Load();
  std::vector<int> group(static_cast<size_t>(std::max(size, 0)));
  Check(srte_centrality_group(instance.get(), size, group.data()));
  double value = 0;
  Check(srte_group_centrality(instance.get(), group.data(), group.size(), &value));
  std::printf("group");
  for (int v : group) std::printf(" %d", v);
  std::printf("\ncentrality %.12g\n", value);
  return 0;
}

int RunBench(const std::string& config_path, const std::string& out) {
  std::string text = ReadFileOrThrow(config_path);
  size_t records = 0;
  Check(srte_bench_run(text.c_str(), out.c_str(), &records));
  std::fprintf(stderr, "wrote %zu records to %s\n", records, out.c_str());
  return 0;
}

int RunValidate(const std::string& graph, const std::string& demands) {
  char* raw = nullptr;
  Check(srte_lint_files(graph.c_str(), demands.empty() ? nullptr : demands.c_str(), &raw));
  StringPtr report(raw);
  if (report.get()[0] == '\0') {
    std::printf("ok\n");
    return 0;
  }
  std::printf("%s", report.get());
  return 1;
}

int RunGen(const InstanceOptions& io, double total, uint64_t seed, const std::string& out,
           const std::string& graph_out) {
  InstancePtr instance = io.Load();
  Check(srte_instance_set_gravity_traffic(instance.get(), total, seed));
  if (!graph_out.empty()) {
    char* graph = nullptr;
    Check(srte_instance_graph_text(instance.get(), &graph));
    WriteFileOrThrow(graph_out, StringPtr(graph).get());
  }
  char* demands = nullptr;
  Check(srte_instance_demands_text(instance.get(), &demands));
  WriteFileOrThrow(out, StringPtr(demands).get());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-routing traffic engineering with path preprocessing"};
  app.require_subcommand(1);
  app.footer("Environment: SRTE_SOLVER_CMD overrides the external solver command template.");

  InstanceOptions io;
  FilterOptions fo;
  SolverOptions so;

  CLI::App* solve = app.add_subcommand("solve", "Optimize one instance and print theta");
  io.Add(solve);
  fo.Add(solve);
  so.Add(solve);
  bool full = false;
  bool quiet = false;
  std::string lp_out;
  solve->add_flag("--full", full, "Skip preprocessing and use every middlepoint");
  solve->add_flag("-q,--quiet", quiet, "Do not print the assignment");
  solve->add_option("--write-lp", lp_out, "Also write the LP model to this path");

  CLI::App* pre = app.add_subcommand("preprocess", "Filter candidates and report exclusion");
  io.Add(pre);
  fo.Add(pre);
  std::string dump;
  pre->add_option("--dump", dump, "Write the candidate CSV here ('-' for stdout)");

  CLI::App* cent = app.add_subcommand("centrality", "Greedy GSP-centrality group");
  io.Add(cent);
  int group_size = 1;
  cent->add_option("-k,--size", group_size, "Group size")->required();

  CLI::App* bench = app.add_subcommand("bench", "Run an experiment config, write CSV");
  std::string bench_config;
  std::string bench_out = "report.csv";
  bench->add_option("config", bench_config, "Key-value experiment config")->required();
  bench->add_option("-o,--out", bench_out, "CSV report path");

  CLI::App* validate = app.add_subcommand("validate", "Lint an instance");
  std::string lint_graph;
  std::string lint_demands;
  validate->add_option("-g,--graph", lint_graph, "Repetita graph file")->required();
  validate->add_option("-d,--demands", lint_demands, "Repetita demands file");

  CLI::App* gen = app.add_subcommand("gen", "Gravity-model traffic for a topology");
  io.Add(gen);
  double gen_total = 1000;
  uint64_t gen_seed = 1;
  std::string gen_out = "-";
  std::string gen_graph_out;
  gen->add_option("--total", gen_total, "Total traffic volume");
  gen->add_option("--traffic-seed", gen_seed, "Seed of the gravity draws");
  gen->add_option("-o,--out", gen_out, "Demands output ('-' for stdout)");
  gen->add_option("--graph-out", gen_graph_out, "Also write the topology here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return RunSolve(io, fo, so, full, lp_out, quiet);
    if (pre->parsed()) return RunPreprocess(io, fo, dump);
    if (cent->parsed()) return RunCentrality(io, group_size);
    if (bench->parsed()) return RunBench(bench_config, bench_out);
    if (validate->parsed()) return RunValidate(lint_graph, lint_demands);
    if (gen->parsed()) return RunGen(io, gen_total, gen_seed, gen_out, gen_graph_out);
  } catch (const Failure& failure) {
    return ExitCode(failure.status);
  }
  return 0;
}
