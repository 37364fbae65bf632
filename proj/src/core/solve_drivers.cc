#include "solve_drivers.h"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>

#include "error.h"

extern char** environ;

namespace srte {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void ReplaceAll(std::string* text, std::string_view from, const std::string& to) {
  size_t pos = 0;
  while ((pos = text->find(from, pos)) != std::string::npos) {
    text->replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string Tail(const std::string& text, size_t max_chars) {
  return text.size() <= max_chars ? text : "..." + text.substr(text.size() - max_chars);
}

// Private scratch directory, removed on destruction unless SRTE_KEEP_TEMP
// is set.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "srte-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) {
      throw Error(ErrorCode::kIo, "cannot create temporary directory");
    }
    path_ = pattern;
  }
  ~TempDir() {
    if (std::getenv("SRTE_KEEP_TEMP") == nullptr) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct ProcessResult {
  int exit_code = 0;
  bool killed = false;
};

// Runs `command` through /bin/sh with stdout and stderr sent to log_path.
// The process is killed once the deadline passes.
ProcessResult RunShell(const std::string& command, const fs::path& log_path,
                       double deadline_seconds) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  // Own process group, so a timeout kill reaches the solver too.
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::string shell = "/bin/sh";
  std::string flag = "-c";
  std::string cmd = command;
  char* argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};
  pid_t pid;
  int rc = posix_spawn(&pid, shell.c_str(), &actions, &attr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) {
    throw Error(ErrorCode::kCommandNotFound, "cannot spawn /bin/sh");
  }

  ProcessResult result;
  const auto start = Clock::now();
  int status = 0;
  auto poll = std::chrono::milliseconds(1);
  while (true) {
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) throw Error(ErrorCode::kSolverFailed, "waitpid failed");
    if (SecondsSince(start) > deadline_seconds) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      result.killed = true;
      break;
    }
    std::this_thread::sleep_for(poll);
    poll = std::min(poll * 2, std::chrono::milliseconds(50));
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else {
    result.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  }
  return result;
}

}  // namespace

void CheckSolverConfig(const SolverConfig& config) {
  if (!(config.gap >= 0.0 && config.gap <= 0.1)) {
    throw Error(ErrorCode::kInvalidArgument, "gap must lie in [0, 0.1]");
  }
  if (!(config.time_limit > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "time limit must be positive");
  }
  if (config.threads < 1) {
    throw Error(ErrorCode::kInvalidArgument, "threads must be >= 1");
  }
}

std::string ResolveSolverCommand(const SolverConfig& config) {
  const char* env = std::getenv(kSolverCommandEnv);
  if (env != nullptr && *env != '\0') return env;
  if (!config.command.empty()) return config.command;
#ifdef SRTE_DEFAULT_SOLVER_CMD
  return SRTE_DEFAULT_SOLVER_CMD;
#else
  return {};
#endif
}

SolveReport SolveExternal(const MilpModel& model, const SolverConfig& config) {
  CheckSolverConfig(config);
  std::string command = ResolveSolverCommand(config);
  if (command.empty()) {
    throw Error(ErrorCode::kCommandNotFound,
                std::string("command not found: no solver command configured (set ") +
                    kSolverCommandEnv + ")");
  }

  TempDir dir;
  const fs::path model_path = dir.path() / "model.lp";
  const fs::path solution_path = dir.path() / "solution.txt";
  const fs::path log_path = dir.path() / "solver.log";
  {
    std::ofstream out(model_path, std::ios::binary);
    out << WriteLpFile(model);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + model_path.string());
  }
  ReplaceAll(&command, "{model}", model_path.string());
  ReplaceAll(&command, "{solution}", solution_path.string());
  ReplaceAll(&command, "{gap}", FormatDouble(config.gap));
  ReplaceAll(&command, "{time_limit}", FormatDouble(config.time_limit));
  ReplaceAll(&command, "{threads}", std::to_string(config.threads));

  SolveReport report;
  const auto start = Clock::now();
  // The solver enforces the time limit itself; the hard kill is a backstop.
  ProcessResult process = RunShell(command, log_path, config.time_limit * 1.5 + 30);
  report.solve_seconds = SecondsSince(start);

  if (process.killed) {
    report.status = SolveStatus::kTimeLimit;
    report.message = "solver killed after exceeding the time limit";
    return report;
  }
  if (process.exit_code == 127 || process.exit_code == 126) {
    throw Error(ErrorCode::kCommandNotFound,
                "command not found: " + command + "\n" + Tail(ReadFile(log_path), 500));
  }
  if (process.exit_code != 0) {
    throw Error(ErrorCode::kSolverFailed,
                "solver exited with code " + std::to_string(process.exit_code) + "\n" +
                    Tail(ReadFile(log_path), 2000));
  }
  if (!fs::exists(solution_path)) {
    throw Error(ErrorCode::kUnparseableOutput, "solver produced no solution listing");
  }

  try {
    SrSolution solution = ParseSolution(ReadFile(solution_path), model);
    solution.wall_seconds = report.solve_seconds;
    report.status = solution.status;
    report.solution = std::move(solution);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoSolution) throw;
    report.status = SolveStatus::kTimeLimit;
    report.message = e.what();
  }
  return report;
}

ExactOracle::ExactOracle(const Topology& topo, const TrafficMatrix& tm,
                         const CandidateSet& cands, const EcmpTable& ecmp)
    : num_demands_(tm.size()),
      capacity_(topo.num_arcs()),
      base_load_(topo.num_arcs(), 0.0) {
  if (cands.num_demands() != tm.size()) {
    throw Error(ErrorCode::kDemandMismatch, "candidate set does not match traffic matrix");
  }
  for (int a = 0; a < topo.num_arcs(); ++a) capacity_[a] = topo.arc(a).capacity;
  for (const Demand& d : tm.demands()) {
    if (cands.candidates(d.id).empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "empty candidate set for demand " + std::to_string(d.id));
    }
    if (cands.pinned(d.id)) {
      for (const ArcLoad& f : ecmp.Fractions(d.src, d.dst)) {
        base_load_[f.arc] += d.volume * f.load;
      }
    } else {
      order_.push_back(d.id);
    }
  }
  std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
    return tm.demand(a).volume > tm.demand(b).volume;
  });
  for (int id : order_) {
    const Demand& d = tm.demand(id);
    std::vector<Option> level;
    for (int k : cands.candidates(id)) {
      Option option{k, SrPathLoads(d.src, d.dst, k, ecmp).loads};
      for (ArcLoad& x : option.load) x.load *= d.volume;
      level.push_back(std::move(option));
    }
    options_.push_back(std::move(level));
  }
}

std::vector<double> ExactOracle::LoadsFor(std::span<const int> prefix) const {
  std::vector<double> loads = base_load_;
  for (size_t level = 0; level < prefix.size(); ++level) {
    for (const ArcLoad& x : options_[level][prefix[level]].load) loads[x.arc] += x.load;
  }
  return loads;
}

// max(current max utilization, max over undecided levels of the best
// utilization that level alone can reach). Each undecided demand must pick
// some option and loads only grow, so this never exceeds the optimum of
// the subtree.
double ExactOracle::BoundFrom(const std::vector<double>& loads, int next_level,
                              const std::vector<std::vector<Option>>& options) const {
  double bound = 0;
  for (size_t a = 0; a < loads.size(); ++a) bound = std::max(bound, loads[a] / capacity_[a]);
  for (size_t level = next_level; level < options.size(); ++level) {
    double best = kInf;
    for (const Option& option : options[level]) {
      double worst = 0;
      for (const ArcLoad& x : option.load) {
        worst = std::max(worst, (loads[x.arc] + x.load) / capacity_[x.arc]);
        if (worst >= best) break;
      }
      best = std::min(best, worst);
    }
    bound = std::max(bound, best);
  }
  return bound;
}

double ExactOracle::LowerBound(std::span<const int> prefix) const {
  return BoundFrom(LoadsFor(prefix), static_cast<int>(prefix.size()), options_);
}

double ExactOracle::Evaluate(std::span<const int> choices) const {
  std::vector<double> loads = LoadsFor(choices);
  double theta = 0;
  for (size_t a = 0; a < loads.size(); ++a) theta = std::max(theta, loads[a] / capacity_[a]);
  return theta;
}

std::vector<int> ExactOracle::Assignment(
    std::span<const int> choices, const std::vector<std::vector<Option>>& options) const {
  std::vector<int> assignment(num_demands_, kDirect);
  for (size_t level = 0; level < choices.size(); ++level) {
    assignment[order_[level]] = options[level][choices[level]].candidate;
  }
  return assignment;
}

SolveReport ExactOracle::Solve(const SolverConfig& config) const {
  CheckSolverConfig(config);
  const auto start = Clock::now();
  const int depth_total = static_cast<int>(options_.size());

  // Greedy incumbent: each demand takes the option minimizing the running
  // maximum utilization.
  std::vector<int> incumbent(depth_total, 0);
  std::vector<double> loads = base_load_;
  double running = 0;
  for (size_t a = 0; a < loads.size(); ++a) running = std::max(running, loads[a] / capacity_[a]);
  for (int level = 0; level < depth_total; ++level) {
    double best = kInf;
    for (int o = 0; o < num_options(level); ++o) {
      double worst = running;
      for (const ArcLoad& x : options_[level][o].load) {
        worst = std::max(worst, (loads[x.arc] + x.load) / capacity_[x.arc]);
      }
      if (worst < best) {
        best = worst;
        incumbent[level] = o;
      }
    }
    for (const ArcLoad& x : options_[level][incumbent[level]].load) loads[x.arc] += x.load;
    running = best;
  }
  double incumbent_theta = Evaluate(incumbent);
  auto tolerance = [](double theta) { return 1e-12 * std::max(1.0, theta); };

  // Root bounding: an option that alone reaches the incumbent value cannot be
  // part of a strictly better solution.
  std::vector<std::vector<Option>> pruned(depth_total);
  std::vector<std::vector<int>> original_index(depth_total);
  double product = 1;
  for (int level = 0; level < depth_total; ++level) {
    for (int o = 0; o < num_options(level); ++o) {
      double worst = 0;
      for (size_t a = 0; a < base_load_.size(); ++a) {
        worst = std::max(worst, base_load_[a] / capacity_[a]);
      }
      for (const ArcLoad& x : options_[level][o].load) {
        worst = std::max(worst, (base_load_[x.arc] + x.load) / capacity_[x.arc]);
      }
      if (worst < incumbent_theta - tolerance(incumbent_theta)) {
        pruned[level].push_back(options_[level][o]);
        original_index[level].push_back(o);
      }
    }
    product *= std::max<size_t>(1, pruned[level].size());
  }
  if (product > config.oracle_search_limit) {
    throw Error(ErrorCode::kSearchLimit,
                "search space after root bounding (" + FormatDouble(product) +
                    ") exceeds the oracle limit");
  }

  struct TreeNode {
    std::int64_t parent;
    int choice;  // index into pruned[depth - 1]
    int depth;
  };
  struct Open {
    double bound;
    int depth;
    std::int64_t node;
  };
  auto worse = [](const Open& a, const Open& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.node > b.node;
  };
  std::vector<TreeNode> tree = {{-1, -1, 0}};
  std::priority_queue<Open, std::vector<Open>, decltype(worse)> frontier(worse);
  frontier.push({BoundFrom(base_load_, 0, pruned), 0, 0});

  std::vector<int> best_choices;  // in pruned indices; empty = greedy incumbent
  std::vector<int> path;
  SolveStatus status = SolveStatus::kOptimal;
  std::int64_t expansions = 0;
  while (!frontier.empty()) {
    Open open = frontier.top();
    if (open.bound >= incumbent_theta - tolerance(incumbent_theta)) break;
    frontier.pop();
    if (++expansions % 1024 == 0 && SecondsSince(start) > config.time_limit) {
      status = SolveStatus::kTimeLimit;
      break;
    }

    path.assign(open.depth, 0);
    for (std::int64_t n = open.node; tree[n].parent >= 0; n = tree[n].parent) {
      path[tree[n].depth - 1] = tree[n].choice;
    }
    std::vector<double> node_loads = base_load_;
    for (int level = 0; level < open.depth; ++level) {
      for (const ArcLoad& x : pruned[level][path[level]].load) node_loads[x.arc] += x.load;
    }

    const int level = open.depth;
    for (int o = 0; o < static_cast<int>(pruned[level].size()); ++o) {
      const SparseLoads& add = pruned[level][o].load;
      for (const ArcLoad& x : add) node_loads[x.arc] += x.load;
      double bound = BoundFrom(node_loads, level + 1, pruned);
      if (bound < incumbent_theta - tolerance(incumbent_theta)) {
        if (level + 1 == depth_total) {
          incumbent_theta = bound;
          best_choices = path;
          best_choices.push_back(o);
        } else {
          tree.push_back({open.node, o, level + 1});
          frontier.push({bound, level + 1, static_cast<std::int64_t>(tree.size() - 1)});
        }
      }
      for (const ArcLoad& x : add) node_loads[x.arc] -= x.load;
    }
  }

  SrSolution solution;
  if (best_choices.empty()) {
    solution.assignment = Assignment(incumbent, options_);
  } else {
    std::vector<int> choices(depth_total);
    for (int level = 0; level < depth_total; ++level) {
      choices[level] = original_index[level][best_choices[level]];
    }
    solution.assignment = Assignment(choices, options_);
    incumbent_theta = Evaluate(choices);
  }
  solution.theta = incumbent_theta;
  solution.reported_objective = incumbent_theta;
  solution.status = status;
  solution.reported_gap = 0;

  SolveReport report;
  report.solve_seconds = SecondsSince(start);
  solution.wall_seconds = report.solve_seconds;
  report.status = status;
  report.solution = std::move(solution);
  return report;
}

SolveReport SolveExactOracle(const Topology& topo, const TrafficMatrix& tm,
                             const CandidateSet& cands, const EcmpTable& ecmp,
                             const SolverConfig& config) {
  return ExactOracle(topo, tm, cands, ecmp).Solve(config);
}

}  // namespace srte
