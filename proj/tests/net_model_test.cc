#include <gtest/gtest.h>

#include <cmath>
#include <iterator>
#include <random>
#include <set>

#include "core/error.h"
#include "core/net_model.h"
#include "test_support.h"

namespace srte {
namespace {

using testing::LoadTopology;
using testing::ReadFixture;

std::string ParseError(std::string_view graph) {
  try {
    ParseTopology(graph);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  return "";
}

std::string DemandError(std::string_view text, const Topology& topo) {
  try {
    ParseDemands(text, topo);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  return "";
}

TEST(ParseTopology, DiamondHasFourNodesEightArcs) {
  Topology topo = LoadTopology("diamond.graph");
  EXPECT_EQ(topo.num_nodes(), 4);
  EXPECT_EQ(topo.num_arcs(), 8);
  EXPECT_EQ(topo.nodes()[1].label, "n1");
  EXPECT_EQ(topo.arc(4).label, "e4");
  EXPECT_EQ(topo.arc(4).src, 1);
  EXPECT_EQ(topo.arc(4).dst, 3);
  EXPECT_EQ(topo.arc(4).igp_weight, 1);
  EXPECT_EQ(topo.arc(4).capacity, 1000);
}

TEST(ParseTopology, ArcCountMismatch) {
  std::string text = ReadFixture("diamond.graph");
  text.erase(text.rfind("e7"));
  std::string err = ParseError(text);
  EXPECT_NE(err.find("arc count mismatch"), std::string::npos) << err;
}

TEST(ParseTopology, UnusedNodeIsNotStronglyConnected) {
  std::string text = ReadFixture("diamond.graph");
  text.replace(text.find("NODES 4"), 7, "NODES 5");
  text.insert(text.find("\n\nEDGES"), "\nn4 5 5");
  std::string err = ParseError(text);
  EXPECT_NE(err.find("graph not strongly connected"), std::string::npos) << err;
}

TEST(ParseTopology, ErrorsCarryLineNumbers) {
  std::string text = ReadFixture("diamond.graph");
  text.replace(text.find("e3 2 0 1 1000 1"), 15, "e3 2 0 0 1000 1");
  std::string err = ParseError(text);
  EXPECT_EQ(err.rfind("line 14: non-positive weight", 0), 0u) << err;
}

TEST(ParseTopology, DanglingReferenceAndCapacity) {
  std::string text = ReadFixture("diamond.graph");
  std::string dangling = text;
  dangling.replace(dangling.find("e7 3 2"), 6, "e7 3 9");
  EXPECT_NE(ParseError(dangling).find("dangling node reference"), std::string::npos);
  std::string cap = text;
  cap.replace(cap.find("e7 3 2 1 1000"), 13, "e7 3 2 1 -5");
  EXPECT_NE(ParseError(cap).find("non-positive capacity"), std::string::npos);
}

TEST(ParseTopology, DelayIsIgnored) {
  std::string text = ReadFixture("diamond.graph");
  std::string changed = text;
  changed.replace(changed.find("e0 0 1 1 1000 1"), 15, "e0 0 1 1 1000 77.5");
  EXPECT_TRUE(ParseTopology(text) == ParseTopology(changed));
}

// Every single-rule mutation of a valid file must be rejected.
TEST(ParseTopology, RejectsGrammarMutations) {
  const std::string base = ReadFixture("grid6.graph");
  ASSERT_NO_THROW(ParseTopology(base));
  std::vector<std::string> lines;
  {
    std::istringstream in(base);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  auto join = [](const std::vector<std::string>& ls) {
    std::string out;
    for (const auto& l : ls) out += l + "\n";
    return out;
  };
  auto is_data = [](const std::string& l) {
    return !l.empty() && l[0] != '#' && l.rfind("NODES", 0) != 0 &&
           l.rfind("EDGES", 0) != 0 && l.rfind("label", 0) != 0;
  };

  int mutations = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '#') continue;
    auto dropped = lines;
    dropped.erase(dropped.begin() + i);
    EXPECT_THROW(ParseTopology(join(dropped)), Error) << "dropped line " << i + 1;
    ++mutations;
    if (is_data(lines[i])) {
      auto extra = lines;
      extra[i] += " 1";
      EXPECT_THROW(ParseTopology(join(extra)), Error) << "extra field on line " << i + 1;
      auto fewer = lines;
      fewer[i] = fewer[i].substr(0, fewer[i].rfind(' '));
      EXPECT_THROW(ParseTopology(join(fewer)), Error) << "missing field on line " << i + 1;
      mutations += 2;
    }
  }
  // Non-numeric tokens in every numeric field of one edge line.
  size_t edge = 0;
  while (lines[edge].rfind("h0", 0) != 0) ++edge;
  for (int field = 1; field <= 5; ++field) {
    auto bad = lines;
    std::istringstream in(lines[edge]);
    std::vector<std::string> tok{std::istream_iterator<std::string>(in), {}};
    tok[field] = "x" + tok[field];
    bad[edge] = tok[0];
    for (size_t k = 1; k < tok.size(); ++k) bad[edge] += " " + tok[k];
    EXPECT_THROW(ParseTopology(join(bad)), Error) << "field " << field;
    ++mutations;
  }
  // Header corruptions.
  for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"NODES 6", "NODES six"}, {"NODES 6", "NODE 6"}, {"EDGES 14", "EDGES 15"},
           {"EDGES 14", "EDGES 13"}, {"NODES 6", "NODES 7"}, {"NODES 6", "NODES -1"}}) {
    std::string bad = base;
    bad.replace(bad.find(from), from.size(), to);
    EXPECT_THROW(ParseTopology(bad), Error) << to;
    ++mutations;
  }
  EXPECT_GT(mutations, 50);
}

TEST(ParseTopology, CommentsAndBlankLinesAreSkipped) {
  std::string text = "# leading comment\n\n" + ReadFixture("line.graph") + "\n# trailing\n";
  EXPECT_EQ(ParseTopology(text).num_arcs(), 4);
}

TEST(SerializeTopology, RoundTripOnFixtures) {
  for (const std::string& name : testing::SmallFixtures()) {
    Topology topo = LoadTopology(name);
    Topology again = ParseTopology(SerializeTopology(topo));
    EXPECT_TRUE(topo == again) << name;
  }
}

TEST(SerializeTopology, RoundTripOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    Topology topo = testing::RandomTopology(2 + trial % 15, rng, trial % 2 == 0, false);
    EXPECT_TRUE(topo == ParseTopology(SerializeTopology(topo))) << trial;
  }
}

TEST(ParseDemands, SingleDemandOnDiamond) {
  Topology topo = LoadTopology("diamond.graph");
  TrafficMatrix tm = ParseDemands(ReadFixture("diamond.demands"), topo);
  ASSERT_EQ(tm.size(), 1);
  EXPECT_EQ(tm.demand(0).id, 0);
  EXPECT_EQ(tm.demand(0).src, 0);
  EXPECT_EQ(tm.demand(0).dst, 3);
  EXPECT_EQ(tm.demand(0).volume, 10.0);
}

TEST(ParseDemands, Errors) {
  Topology topo = LoadTopology("diamond.graph");
  const std::string head = "DEMANDS 2\nlabel src dest bw\n";
  EXPECT_NE(DemandError(head + "d0 0 3 1\nd1 0 3 2\n", topo).find("duplicate"),
            std::string::npos);
  EXPECT_NE(DemandError("DEMANDS 1\nlabel src dest bw\nd0 0 9 1\n", topo).find("unknown node"),
            std::string::npos);
  EXPECT_NE(DemandError("DEMANDS 1\nlabel src dest bw\nd0 0 3 0\n", topo)
                .find("non-positive volume"),
            std::string::npos);
  EXPECT_NE(DemandError(head + "d0 0 3 1\n", topo).find("demand count mismatch"),
            std::string::npos);
}

TEST(ParseDemands, LabelsResolveAndIdsFollowFileOrder) {
  Topology topo = LoadTopology("diamond.graph");
  TrafficMatrix tm =
      ParseDemands("DEMANDS 2\nlabel src dest bw\nx n3 n0 4\ny 1 2 5\n", topo);
  ASSERT_EQ(tm.size(), 2);
  EXPECT_EQ(tm.demand(0).src, 3);
  EXPECT_EQ(tm.demand(0).dst, 0);
  EXPECT_EQ(tm.demand(1).id, 1);
  EXPECT_EQ(tm.demand(1).label, "y");
  EXPECT_EQ(ParseDemands(SerializeDemands(tm), topo).demands().size(), 2u);
}

TEST(GravityTraffic, TwoNodesGiveTwoDemands) {
  Topology topo = testing::MakeTopology(2, {{0, 1, 1, 1}});
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    TrafficMatrix tm = GenerateGravityTraffic(topo, 100, seed);
    ASSERT_EQ(tm.size(), 2);
    EXPECT_NEAR(tm.demand(0).volume + tm.demand(1).volume, 100, 1e-12);
  }
}

TEST(GravityTraffic, Deterministic) {
  Topology topo = LoadTopology("grid6.graph");
  TrafficMatrix a = GenerateGravityTraffic(topo, 500, 3);
  TrafficMatrix b = GenerateGravityTraffic(topo, 500, 3);
  TrafficMatrix c = GenerateGravityTraffic(topo, 500, 4);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (int i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.demand(i).volume, b.demand(i).volume);
    differs = differs || a.demand(i).volume != c.demand(i).volume;
  }
  EXPECT_TRUE(differs);
}

TEST(GravityTraffic, FourNodesSeedSeven) {
  Topology topo = LoadTopology("diamond.graph");
  TrafficMatrix tm = GenerateGravityTraffic(topo, 1000, 7);
  ASSERT_EQ(tm.size(), 12);
  double sum = 0;
  std::set<std::pair<int, int>> pairs;
  for (const Demand& d : tm.demands()) {
    EXPECT_GT(d.volume, 0);
    sum += d.volume;
    pairs.emplace(d.src, d.dst);
  }
  EXPECT_EQ(pairs.size(), 12u);
  EXPECT_NEAR(sum, 1000, 1e-9 * 1000);
}

TEST(GravityTraffic, MassConservationProperty) {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 50; ++n) {
    std::vector<testing::Link> ring;
    for (int i = 0; i < n; ++i) ring.push_back({i, (i + 1) % n, 1, 1});
    if (n == 2) ring.resize(1);
    Topology topo = testing::MakeTopology(n, ring);
    double total = std::ldexp(1.0, static_cast<int>(rng() % 40)) * 1.37;
    TrafficMatrix tm = GenerateGravityTraffic(topo, total, rng());
    ASSERT_EQ(tm.size(), n * (n - 1));
    double sum = 0;
    for (const Demand& d : tm.demands()) sum += d.volume;
    EXPECT_NEAR(sum, total, 1e-9 * total) << "n=" << n;
  }
}

TEST(GravityTraffic, RejectsTinyGraphs) {
  Topology one({Node{0, "a", 0, 0}}, {});
  EXPECT_THROW(GenerateGravityTraffic(one, 1, 1), Error);
}

TEST(ValidateInstance, Findings) {
  Topology topo = LoadTopology("diamond.graph");
  TrafficMatrix tm = ParseDemands(ReadFixture("diamond.demands"), topo);
  EXPECT_TRUE(ValidateInstance(topo, tm).empty());

  TrafficMatrix zero = testing::MakeTraffic({{0, 3, 0.0}});
  auto findings = ValidateInstance(topo, zero);
  ASSERT_FALSE(findings.empty());
  EXPECT_EQ(findings[0], "non-positive volume, demand 0");

  Topology split({Node{0, "a", 0, 0}, Node{1, "b", 0, 0}, Node{2, "c", 0, 0}},
                 {Arc{0, 0, 1, 1, 1, "x"}, Arc{1, 1, 0, 1, 1, "y"}});
  findings = ValidateInstance(split, testing::MakeTraffic({{0, 1, 1.0}}));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0], "graph not strongly connected");
}

}  // namespace
}  // namespace srte
