#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "core/error.h"
#include "core/igp_routing.h"
#include "core/milp_2sr.h"
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

Case UnitDiamond(double volume = 1.0) {
  Case c{testing::MakeTopology(4, {{0, 1, 1, 1}, {0, 2, 1, 1}, {1, 3, 1, 1}, {2, 3, 1, 1}}),
         MakeTraffic({{0, 3, volume}}), {}, {}};
  c.ecmp = ComputeEcmpFractions(c.topo, ComputeApsp(c.topo));
  c.cands = FullCandidates(c.topo, c.tm);
  return c;
}

// Arcs 0->1 and 1->3 get capacity 10, the rest 1; demand 0->3 of volume 2.
Case HeterogeneousDiamond() {
  Case c{testing::MakeTopology(4, {{0, 1, 1, 10}, {0, 2, 1, 1}, {1, 3, 1, 10}, {2, 3, 1, 1}}),
         MakeTraffic({{0, 3, 2.0}}), {}, {}};
  c.ecmp = ComputeEcmpFractions(c.topo, ComputeApsp(c.topo));
  c.cands = FullCandidates(c.topo, c.tm);
  return c;
}

SrSolution Parse(const std::string& text, const MilpModel& model) {
  return ParseSolution(text, model);
}

ErrorCode ParseErrorCode(const std::string& text, const MilpModel& model) {
  try {
    ParseSolution(text, model);
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

TEST(BuildModel, DiamondShape) {
  Case c = UnitDiamond();
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  EXPECT_EQ(model.vars().size(), 3u);
  EXPECT_EQ(model.assignment_rows().size(), 1u);
  EXPECT_EQ(model.capacity_rows().size(), 8u);
  EXPECT_EQ(model.num_rows(), 1 + 8);
  EXPECT_EQ(model.vars()[0].name, "x_d0_mdir");
  EXPECT_EQ(model.FindVar("x_d0_m2"), 2);
  EXPECT_EQ(model.FindVar("theta"), -1);
}

TEST(BuildModel, SizeFollowsCandidatesAndPinning) {
  std::mt19937_64 rng(6);
  Topology topo = testing::RandomTopology(9, rng, false, false);
  EcmpTable ecmp = ComputeEcmpFractions(topo, ComputeApsp(topo));
  TrafficMatrix tm = GenerateGravityTraffic(topo, 100, 6);
  CandidateSet cands = DemandPinningFilter(FullCandidates(topo, tm), tm, 0.3);
  MilpModel model = BuildModel(topo, tm, cands, ecmp);
  std::int64_t binaries = 0;
  int unpinned = 0;
  for (int d = 0; d < tm.size(); ++d) {
    if (cands.pinned(d)) continue;
    ++unpinned;
    binaries += static_cast<std::int64_t>(cands.candidates(d).size());
  }
  EXPECT_EQ(static_cast<std::int64_t>(model.vars().size()), binaries);
  EXPECT_EQ(model.num_rows(), unpinned + topo.num_arcs());
  EXPECT_EQ(static_cast<int>(model.pinned_demands().size()), cands.NumPinned());
}

TEST(WriteLpFile, AssignmentRowAndDeterminism) {
  Case c = UnitDiamond();
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  std::string lp = WriteLpFile(model);
  EXPECT_NE(lp.find("\na0: x_d0_mdir + x_d0_m1 + x_d0_m2 = 1\n"), std::string::npos) << lp;
  EXPECT_NE(lp.find("Minimize\n obj: theta\n"), std::string::npos);
  EXPECT_NE(lp.find("Binary\n x_d0_mdir\n x_d0_m1\n x_d0_m2\nEnd\n"), std::string::npos);
  // Arc 0 (0->1) carries 0.5 via DIRECT and 1 via middlepoint 1.
  EXPECT_NE(lp.find("\nc0: 0.5 x_d0_mdir + 1 x_d0_m1 - 1 theta <= 0\n"), std::string::npos) << lp;
  EXPECT_EQ(lp, WriteLpFile(BuildModel(c.topo, c.tm, c.cands, c.ecmp)));
}

TEST(WriteLpFile, EmptyTrafficMatrixIsMinimal) {
  Case c = UnitDiamond();
  TrafficMatrix empty;
  MilpModel model = BuildModel(c.topo, empty, FullCandidates(c.topo, empty), c.ecmp);
  std::string lp = WriteLpFile(model);
  EXPECT_EQ(lp.find("Subject To"), std::string::npos);
  EXPECT_EQ(lp.find("Binary"), std::string::npos);
  EXPECT_NE(lp.find("Minimize\n obj: theta\nBounds\n theta >= 0\nEnd\n"), std::string::npos) << lp;
}

TEST(WriteLpFile, PinnedLoadMovesToRightHandSide) {
  Case c = UnitDiamond();
  c.tm = MakeTraffic({{0, 3, 1.0}, {1, 3, 4.0}});
  c.cands = FullCandidates(c.topo, c.tm);
  c.cands.Pin(0);
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  ASSERT_EQ(model.pinned_demands(), std::vector<int>{0});
  std::string lp = WriteLpFile(model);
  // Arc 4 is 1->3: half of the pinned demand plus the free demand's terms.
  EXPECT_NE(lp.find("\nc4: 4 x_d1_mdir + 2 x_d1_m0 + 2 x_d1_m2 - 1 theta <= -0.5\n"),
            std::string::npos)
      << lp;
  EXPECT_NE(lp.find("\nc2: 2 x_d1_m0 + 2 x_d1_m2 - 1 theta <= -0.5\n"), std::string::npos) << lp;
  // Arc 3 (2->0) carries nothing and is left out.
  EXPECT_EQ(lp.find("\nc3:"), std::string::npos) << lp;
}

TEST(WriteLpFile, LongRowsWrap) {
  std::vector<testing::Link> star;
  for (int i = 1; i < 14; ++i) star.push_back({0, i, 1, 1});
  Topology topo = testing::MakeTopology(14, star);
  EcmpTable ecmp = ComputeEcmpFractions(topo, ComputeApsp(topo));
  TrafficMatrix tm = MakeTraffic({{1, 2, 1.0}});
  std::string lp = WriteLpFile(BuildModel(topo, tm, FullCandidates(topo, tm), ecmp));
  size_t start = lp.find("a0:");
  size_t stop = lp.find("= 1", start);
  std::string row = lp.substr(start, stop - start);
  EXPECT_GE(std::count(row.begin(), row.end(), '\n'), 1);
}

TEST(ParseSolution, Examples) {
  Case c = UnitDiamond();
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  SrSolution s = Parse("objective 0.5\nx_d0_mdir 1\nx_d0_m1 0\nx_d0_m2 0\ntheta 0.5\n", model);
  EXPECT_EQ(s.assignment, std::vector<int>{kDirect});
  EXPECT_EQ(s.theta, 0.5);
  EXPECT_EQ(s.status, SolveStatus::kOptimal);

  s = Parse("objective 1\nstatus gap-limit\ngap 0.01\nx_d0_mdir 1e-7\nx_d0_m1 0.9999\nx_d0_m2 0\n",
            model);
  EXPECT_EQ(s.assignment, std::vector<int>{1});
  EXPECT_EQ(s.status, SolveStatus::kGapLimit);
  EXPECT_EQ(s.reported_gap, 0.01);
}

TEST(ParseSolution, Errors) {
  Case c = UnitDiamond();
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  EXPECT_EQ(ParseErrorCode("objective 0.5\nx_d0_mdir 1\nx_d0_m1 1\nx_d0_m2 0\n", model),
            ErrorCode::kNonUniqueAssignment);
  try {
    Parse("objective 0.5\nx_d0_mdir 1\nx_d0_m1 1\nx_d0_m2 0\n", model);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("non-unique assignment"), std::string::npos);
  }
  EXPECT_EQ(ParseErrorCode("objective 0.5\nx_d0_mdir 1\nx_d0_m2 0\n", model),
            ErrorCode::kMissingVariable);
  EXPECT_EQ(ParseErrorCode("objective 0.5\nx_d0_mdir 0\nx_d0_m1 0\nx_d0_m2 0\n", model),
            ErrorCode::kMissingVariable);
  EXPECT_EQ(ParseErrorCode("objective nan\nstatus infeasible\n", model), ErrorCode::kInfeasible);
  EXPECT_EQ(ParseErrorCode("objective nan\nstatus time-limit\n", model), ErrorCode::kNoSolution);
  EXPECT_EQ(ParseErrorCode("objective 1\nstatus sleepy\n", model), ErrorCode::kUnparseableOutput);
  EXPECT_EQ(ParseErrorCode("x_d0_mdir 1\nobjective 1\n", model), ErrorCode::kUnparseableOutput);
  EXPECT_EQ(ParseErrorCode("", model), ErrorCode::kUnparseableOutput);
}

TEST(ParseSolution, PinnedDemandsAreDirect) {
  Case c = UnitDiamond();
  c.tm = MakeTraffic({{0, 3, 1.0}, {1, 2, 1.0}});
  c.cands = FullCandidates(c.topo, c.tm);
  c.cands.Pin(1);
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  SrSolution s = Parse("objective 1\nx_d0_mdir 0\nx_d0_m1 0\nx_d0_m2 1\n", model);
  EXPECT_EQ(s.assignment, (std::vector<int>{2, kDirect}));
}

TEST(EvaluateAssignment, Examples) {
  Case c = UnitDiamond();
  EXPECT_EQ(EvaluateAssignmentMlu(c.topo, c.tm, {kDirect}, c.ecmp).mlu, 0.5);
  EXPECT_EQ(EvaluateAssignmentMlu(c.topo, c.tm, {1}, c.ecmp).mlu, 1.0);
  EXPECT_THROW(EvaluateAssignmentMlu(c.topo, c.tm, {}, c.ecmp), Error);

  std::mt19937_64 rng(12);
  Topology topo = testing::RandomTopology(10, rng, false, false);
  EcmpTable ecmp = ComputeEcmpFractions(topo, ComputeApsp(topo));
  TrafficMatrix tm = GenerateGravityTraffic(topo, 50, 1);
  std::vector<int> all_direct(tm.size(), kDirect);
  EXPECT_EQ(EvaluateAssignmentMlu(topo, tm, all_direct, ecmp).mlu, SprMlu(topo, tm, ecmp).mlu);
}

TEST(EvaluateAssignment, MatchesModelRowsForRandomAssignments) {
  Case c = HeterogeneousDiamond();
  MilpModel model = BuildModel(c.topo, c.tm, c.cands, c.ecmp);
  for (int k : {kDirect, 1, 2}) {
    double worst = 0;
    for (const CapacityRow& row : model.capacity_rows()) {
      double load = row.pinned_load;
      for (const ModelTerm& t : row.terms) {
        if (model.vars()[t.var].candidate == k) load += t.coef;
      }
      worst = std::max(worst, load / row.capacity);
    }
    EXPECT_NEAR(EvaluateAssignmentMlu(c.topo, c.tm, {k}, c.ecmp).mlu, worst, 1e-12);
  }
}

}  // namespace
}  // namespace srte
