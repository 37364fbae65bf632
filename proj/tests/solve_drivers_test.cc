#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <unistd.h>

#include "core/bench.h"
#include "core/error.h"
#include "core/igp_routing.h"
#include "core/milp_2sr.h"
#include "core/solve_drivers.h"
#include "core/sr_candidates.h"
#include "test_support.h"

namespace srte {
namespace {

using testing::MakeTraffic;

struct Case {
  Topology topo;
  TrafficMatrix tm;
  EcmpTable ecmp;
  CandidateSet cands;
};

Case Make(Topology topo, TrafficMatrix tm) {
  Case c{std::move(topo), std::move(tm), {}, {}};
  c.ecmp = ComputeEcmpFractions(c.topo, ComputeApsp(c.topo));
  c.cands = FullCandidates(c.topo, c.tm);
  return c;
}

Case UnitDiamond() {
  return Make(testing::MakeTopology(4, {{0, 1, 1, 1}, {0, 2, 1, 1}, {1, 3, 1, 1}, {2, 3, 1, 1}}),
              MakeTraffic({{0, 3, 1.0}}));
}

Case HeterogeneousDiamond() {
  return Make(testing::MakeTopology(4, {{0, 1, 1, 10}, {0, 2, 1, 1}, {1, 3, 1, 10}, {2, 3, 1, 1}}),
              MakeTraffic({{0, 3, 2.0}}));
}

SolverConfig External(const std::string& command = "") {
  SolverConfig config;
  config.backend = Backend::kExternal;
  config.command = command;
  config.time_limit = 60;
  return config;
}

ErrorCode ExternalErrorCode(const MilpModel& model, const SolverConfig& config,
                            std::string* message = nullptr) {
  try {
    SolveExternal(model, config);
  } catch (const Error& e) {
    if (message != nullptr) *message = e.what();
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    setenv(name, value, 1);
  }
  ~ScopedEnv() {
    if (old_.empty()) {
      unsetenv(name_);
    } else {
      setenv(name_, old_.c_str(), 1);
    }
  }

 private:
  const char* name_;
  std::string old_;
};

TEST(SolverConfig, Validation) {
  SolverConfig config;
  EXPECT_NO_THROW(CheckSolverConfig(config));
  config.gap = 0.2;
  EXPECT_THROW(CheckSolverConfig(config), Error);
  config.gap = 0.0;
  config.time_limit = 0;
  EXPECT_THROW(CheckSolverConfig(config), Error);
  config.time_limit = 1;
  config.threads = 0;
  EXPECT_THROW(CheckSolverConfig(config), Error);
}

TEST(SolveExternal, DiamondWithHighs) {
  Case c = UnitDiamond();
  SolveReport report = SolveExternal(BuildModel(c.topo, c.tm, c.cands, c.ecmp), External());
  ASSERT_TRUE(report.solution.has_value()) << report.message;
  EXPECT_EQ(report.status, SolveStatus::kOptimal);
  EXPECT_NEAR(report.solution->theta, 0.5, 1e-9);
  EXPECT_EQ(report.solution->assignment, std::vector<int>{kDirect});
  EXPECT_GE(report.solve_seconds, 0);

  Case h = HeterogeneousDiamond();
  report = SolveExternal(BuildModel(h.topo, h.tm, h.cands, h.ecmp), External());
  ASSERT_TRUE(report.solution.has_value());
  EXPECT_NEAR(report.solution->theta, 0.2, 1e-9);
  EXPECT_EQ(report.solution->assignment, std::vector<int>{1});
}

TEST(SolveExternal, MissingBinaryIsCommandNotFound) {
  Case c = UnitDiamond();
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  std::string message;
  EXPECT_EQ(ExternalErrorCode(model, External("/nonexistent/solver {model} {solution}"), &message),
            ErrorCode::kCommandNotFound);
  EXPECT_EQ(message.rfind("command not found", 0), 0u) << message;
}

TEST(SolveExternal, DistinctFailureModes) {
  Case c = UnitDiamond();
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  EXPECT_EQ(ExternalErrorCode(model, External("exit 3")), ErrorCode::kSolverFailed);
  EXPECT_EQ(ExternalErrorCode(model, External("true")), ErrorCode::kUnparseableOutput);
  EXPECT_EQ(ExternalErrorCode(model, External("echo garbage > {solution}")),
            ErrorCode::kUnparseableOutput);
  EXPECT_EQ(ExternalErrorCode(model, External("printf 'objective nan\\nstatus infeasible\\n' > "
                                              "{solution}")),
            ErrorCode::kInfeasible);
}

TEST(SolveExternal, PlaceholdersAndEnvironmentOverride) {
  Case c = UnitDiamond();
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  const std::filesystem::path record =
      std::filesystem::temp_directory_path() / ("srte-args-" + std::to_string(getpid()));
  std::string fake = "test -s {model} && echo {gap} {time_limit} {threads} > " + record.string() +
                     " && printf 'objective 1\\nx_d0_mdir 0\\nx_d0_m1 1\\nx_d0_m2 0\\n' > "
                     "{solution}";
  SolverConfig config = External(fake);
  config.gap = 0.001;
  config.time_limit = 12.5;
  config.threads = 3;
  SolveReport report = SolveExternal(model, config);
  ASSERT_TRUE(report.solution.has_value());
  EXPECT_EQ(report.solution->assignment, std::vector<int>{1});
  std::ifstream in(record);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "0.001 12.5 3");
  std::filesystem::remove(record);

  ScopedEnv env(kSolverCommandEnv, "/nonexistent/other {model} {solution}");
  EXPECT_EQ(ResolveSolverCommand(config), "/nonexistent/other {model} {solution}");
  EXPECT_EQ(ExternalErrorCode(model, config), ErrorCode::kCommandNotFound);
}

TEST(SolveExternal, TinyTimeLimitReportsTimeLimit) {
  Instance instance = MakeSyntheticInstance(30, 4, 0);
  EcmpTable ecmp = ComputeEcmpFractions(instance.topology, ComputeApsp(instance.topology));
  MilpModel model = BuildModel(instance.topology, instance.traffic,
                               FullCandidates(instance.topology, instance.traffic), ecmp);
  SolverConfig config = External();
  config.time_limit = 0.001;
  SolveReport report = SolveExternal(model, config);
  EXPECT_EQ(report.status, SolveStatus::kTimeLimit);
  if (report.solution) {
    double mlu = EvaluateAssignmentMlu(instance.topology, instance.traffic,
                                       report.solution->assignment, ecmp)
                     .mlu;
    EXPECT_NEAR(mlu, report.solution->theta, 1e-6 * std::max(1.0, mlu));
  }
}

TEST(ExactOracle, DiamondExamples) {
  SolverConfig config;
  Case c = UnitDiamond();
  SolveReport report = SolveExactOracle(c.topo, c.tm, c.cands, c.ecmp, config);
  ASSERT_TRUE(report.solution.has_value());
  EXPECT_EQ(report.status, SolveStatus::kOptimal);
  EXPECT_EQ(report.solution->theta, 0.5);
  EXPECT_EQ(report.solution->assignment, std::vector<int>{kDirect});

  Case h = HeterogeneousDiamond();
  report = SolveExactOracle(h.topo, h.tm, h.cands, h.ecmp, config);
  ASSERT_TRUE(report.solution.has_value());
  EXPECT_NEAR(report.solution->theta, 0.2, 1e-15);
  EXPECT_EQ(report.solution->assignment, std::vector<int>{1});
}

TEST(ExactOracle, GreedyOptimalTwoDemandInstance) {
  // Five-node ring; both demands are best left on their shortest paths.
  Case c = Make(testing::MakeTopology(
                    5, {{0, 1, 1, 10}, {1, 2, 1, 10}, {2, 3, 1, 10}, {3, 4, 1, 10}, {4, 0, 1, 10}}),
                MakeTraffic({{0, 1, 4.0}, {2, 3, 3.0}}));
  SolveReport report = SolveExactOracle(c.topo, c.tm, c.cands, c.ecmp, SolverConfig{});
  ASSERT_TRUE(report.solution.has_value());
  std::vector<std::vector<int>> lists = {c.cands.candidates(0), c.cands.candidates(1)};
  EXPECT_NEAR(report.solution->theta, testing::BruteOptimum(c.topo, c.tm, lists), 1e-12);
  EXPECT_NEAR(report.solution->theta, 0.4, 1e-12);
  EXPECT_EQ(report.solution->assignment, (std::vector<int>{kDirect, kDirect}));
}

TEST(ExactOracle, MatchesEnumeration) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    Case c = Make(testing::RandomTopology(5 + trial % 4, rng, trial % 2, trial % 3 == 0),
                  MakeTraffic({}));
    c.tm = testing::SampleGravity(c.topo, 10, trial, 3 + trial % 3);
    c.cands = FullCandidates(c.topo, c.tm);
    SolveReport report = SolveExactOracle(c.topo, c.tm, c.cands, c.ecmp, SolverConfig{});
    ASSERT_TRUE(report.solution.has_value());
    std::vector<std::vector<int>> lists;
    for (int d = 0; d < c.tm.size(); ++d) lists.push_back(c.cands.candidates(d));
    double expected = testing::BruteOptimum(c.topo, c.tm, lists);
    EXPECT_NEAR(report.solution->theta, expected, 1e-9 * expected) << trial;
    EXPECT_NEAR(EvaluateAssignmentMlu(c.topo, c.tm, report.solution->assignment, c.ecmp).mlu,
                report.solution->theta, 1e-12);
  }
}

// The bound of a partial choice never exceeds the best completion below it.
TEST(ExactOracle, LowerBoundIsAdmissible) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 12; ++trial) {
    Case c = Make(testing::RandomTopology(6, rng, trial % 2, trial % 2), MakeTraffic({}));
    c.tm = testing::SampleGravity(c.topo, 10, trial + 7, 4);
    c.cands = FullCandidates(c.topo, c.tm);
    ExactOracle oracle(c.topo, c.tm, c.cands, c.ecmp);
    const int levels = static_cast<int>(oracle.order().size());
    std::vector<int> choice(levels, 0);
    std::function<double(int)> best_below = [&](int level) -> double {
      if (level == levels) return oracle.Evaluate(choice);
      double best = INFINITY;
      for (int o = 0; o < oracle.num_options(level); ++o) {
        choice[level] = o;
        best = std::min(best, best_below(level + 1));
      }
      return best;
    };
    std::function<void(int)> check = [&](int depth) {
      std::vector<int> prefix(choice.begin(), choice.begin() + depth);
      double bound = oracle.LowerBound(prefix);
      double best = best_below(depth);
      EXPECT_LE(bound, best * (1 + 1e-12)) << "trial " << trial << " depth " << depth;
      if (depth == levels) return;
      for (int o = 0; o < oracle.num_options(depth); ++o) {
        choice[depth] = o;
        check(depth + 1);
      }
    };
    check(0);
  }
}

TEST(ExactOracle, OrderIsDescendingVolume) {
  Case c = Make(testing::MakeTopology(4, {{0, 1, 1, 1}, {1, 2, 1, 1}, {2, 3, 1, 1}, {3, 0, 1, 1}}),
                MakeTraffic({{0, 1, 1.0}, {1, 2, 3.0}, {2, 3, 3.0}, {3, 0, 2.0}}));
  ExactOracle oracle(c.topo, c.tm, c.cands, c.ecmp);
  EXPECT_EQ(oracle.order(), (std::vector<int>{1, 2, 3, 0}));
}

TEST(ExactOracle, RefusesHugeSearchSpaces) {
  Instance instance = MakeSyntheticInstance(20, 2, 0);
  EcmpTable ecmp = ComputeEcmpFractions(instance.topology, ComputeApsp(instance.topology));
  CandidateSet cands = FullCandidates(instance.topology, instance.traffic);
  try {
    SolveExactOracle(instance.topology, instance.traffic, cands, ecmp, SolverConfig{});
    FAIL() << "expected the search guard to trigger";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSearchLimit);
  }
}

TEST(ExactOracle, PinnedDemandsAreConstants) {
  Case c = Make(testing::MakeTopology(4, {{0, 1, 1, 1}, {0, 2, 1, 1}, {1, 3, 1, 1}, {2, 3, 1, 1}}),
                MakeTraffic({{0, 3, 1.0}, {1, 2, 1.0}}));
  c.cands.Pin(1);
  SolveReport report = SolveExactOracle(c.topo, c.tm, c.cands, c.ecmp, SolverConfig{});
  ASSERT_TRUE(report.solution.has_value());
  EXPECT_EQ(report.solution->assignment[1], kDirect);
  EXPECT_NEAR(EvaluateAssignmentMlu(c.topo, c.tm, report.solution->assignment, c.ecmp).mlu,
              report.solution->theta, 1e-12);
}

}  // namespace
}  // namespace srte
