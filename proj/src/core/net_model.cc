#include "net_model.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "error.h"

namespace srte {
namespace {

struct Line {
  int number;
  std::vector<std::string_view> tokens;
};

// Splits into non-empty, non-comment lines of whitespace-separated tokens.
std::vector<Line> Tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;

    Line line{number, {}};
    size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i > start) line.tokens.push_back(raw.substr(start, i - start));
    }
    if (!line.tokens.empty() && line.tokens[0].front() != '#') {
      lines.push_back(std::move(line));
    }
    if (end == text.size()) break;
  }
  return lines;
}

[[noreturn]] void Fail(int line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

bool ToInt(std::string_view token, std::int64_t* out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), *out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool ToDouble(std::string_view token, double* out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), *out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(*out);
}

std::int64_t ExpectInt(const Line& line, size_t field, const char* what) {
  std::int64_t value;
  if (!ToInt(line.tokens[field], &value)) {
    Fail(line.number, std::string("expected integer ") + what + ", got '" +
                          std::string(line.tokens[field]) + "'");
  }
  return value;
}

double ExpectDouble(const Line& line, size_t field, const char* what) {
  double value;
  if (!ToDouble(line.tokens[field], &value)) {
    Fail(line.number, std::string("expected number ") + what + ", got '" +
                          std::string(line.tokens[field]) + "'");
  }
  return value;
}

// Parses "<keyword> <count>" at lines[*cursor].
std::int64_t ExpectSection(const std::vector<Line>& lines, size_t* cursor,
                           std::string_view keyword, int last_line) {
  if (*cursor >= lines.size()) {
    Fail(last_line + 1, "missing " + std::string(keyword) + " section");
  }
  const Line& line = lines[*cursor];
  if (line.tokens[0] != keyword || line.tokens.size() != 2) {
    Fail(line.number, "malformed header, expected '" + std::string(keyword) + " <count>'");
  }
  std::int64_t count = ExpectInt(line, 1, "count");
  if (count < 0) Fail(line.number, "negative count");
  ++*cursor;
  if (*cursor >= lines.size() || lines[*cursor].tokens[0] != "label") {
    Fail(*cursor < lines.size() ? lines[*cursor].number : line.number + 1,
         "missing column header after " + std::string(keyword));
  }
  ++*cursor;
  return count;
}

bool IsSectionKeyword(std::string_view token) {
  return token == "NODES" || token == "EDGES" || token == "DEMANDS";
}

}  // namespace

Topology::Topology(std::vector<Node> nodes, std::vector<Arc> arcs)
    : nodes_(std::move(nodes)),
      arcs_(std::move(arcs)),
      out_arcs_(nodes_.size()),
      in_arcs_(nodes_.size()) {
  const int n = num_nodes();
  for (const Arc& arc : arcs_) {
    if (arc.src < 0 || arc.src >= n || arc.dst < 0 || arc.dst >= n) continue;
    out_arcs_[arc.src].push_back(arc.index);
    in_arcs_[arc.dst].push_back(arc.index);
  }
}

int Topology::FindNode(std::string_view label) const {
  for (const Node& node : nodes_) {
    if (node.label == label) return node.index;
  }
  return -1;
}

bool Topology::IsStronglyConnected() const {
  const int n = num_nodes();
  if (n == 0) return false;
  auto reaches_all = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int a : forward ? out_arcs_[u] : in_arcs_[u]) {
        int v = forward ? arcs_[a].dst : arcs_[a].src;
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(true) && reaches_all(false);
}

bool operator==(const Topology& a, const Topology& b) {
  if (a.nodes_.size() != b.nodes_.size() || a.arcs_.size() != b.arcs_.size()) {
    return false;
  }
  for (size_t i = 0; i < a.nodes_.size(); ++i) {
    const Node& x = a.nodes_[i];
    const Node& y = b.nodes_[i];
    if (x.index != y.index || x.label != y.label || x.x != y.x || x.y != y.y) {
      return false;
    }
  }
  for (size_t i = 0; i < a.arcs_.size(); ++i) {
    const Arc& x = a.arcs_[i];
    const Arc& y = b.arcs_[i];
    if (x.index != y.index || x.src != y.src || x.dst != y.dst ||
        x.igp_weight != y.igp_weight || x.capacity != y.capacity ||
        x.label != y.label) {
      return false;
    }
  }
  return true;
}

TrafficMatrix::TrafficMatrix(std::vector<Demand> demands)
    : demands_(std::move(demands)) {
  for (size_t i = 0; i < demands_.size(); ++i) {
    demands_[i].id = static_cast<int>(i);
  }
}

double TrafficMatrix::TotalVolume() const {
  double total = 0;
  for (const Demand& d : demands_) total += d.volume;
  return total;
}

Topology ParseTopology(std::string_view text) {
  std::vector<Line> lines = Tokenize(text);
  int last_line = lines.empty() ? 0 : lines.back().number;
  size_t cursor = 0;

  std::int64_t n = ExpectSection(lines, &cursor, "NODES", last_line);
  std::vector<Node> nodes;
  for (std::int64_t i = 0; i < n; ++i) {
    if (cursor >= lines.size() || IsSectionKeyword(lines[cursor].tokens[0])) {
      Fail(cursor < lines.size() ? lines[cursor].number : last_line + 1,
           "node count mismatch: header says " + std::to_string(n) +
               ", found " + std::to_string(i));
    }
    const Line& line = lines[cursor++];
    if (line.tokens.size() != 3) {
      Fail(line.number, "wrong field count for node line (expected 3, got " +
                            std::to_string(line.tokens.size()) + ")");
    }
    Node node;
    node.index = static_cast<int>(i);
    node.label = std::string(line.tokens[0]);
    node.x = ExpectDouble(line, 1, "x");
    node.y = ExpectDouble(line, 2, "y");
    nodes.push_back(std::move(node));
  }

  std::int64_t m = ExpectSection(lines, &cursor, "EDGES", last_line);
  std::vector<Arc> arcs;
  for (std::int64_t i = 0; i < m; ++i) {
    if (cursor >= lines.size() || IsSectionKeyword(lines[cursor].tokens[0])) {
      Fail(cursor < lines.size() ? lines[cursor].number : last_line + 1,
           "arc count mismatch: header says " + std::to_string(m) +
               ", found " + std::to_string(i));
    }
    const Line& line = lines[cursor++];
    if (line.tokens.size() != 6) {
      Fail(line.number, "wrong field count for edge line (expected 6, got " +
                            std::to_string(line.tokens.size()) + ")");
    }
    Arc arc;
    arc.index = static_cast<int>(i);
    arc.label = std::string(line.tokens[0]);
    std::int64_t src = ExpectInt(line, 1, "src");
    std::int64_t dst = ExpectInt(line, 2, "dest");
    if (src < 0 || src >= n || dst < 0 || dst >= n) {
      Fail(line.number, "dangling node reference");
    }
    if (src == dst) Fail(line.number, "self-loop arc");
    arc.src = static_cast<int>(src);
    arc.dst = static_cast<int>(dst);
    arc.igp_weight = ExpectInt(line, 3, "weight");
    if (arc.igp_weight < 1) Fail(line.number, "non-positive weight");
    arc.capacity = ExpectDouble(line, 4, "bw");
    if (arc.capacity <= 0) Fail(line.number, "non-positive capacity");
    ExpectDouble(line, 5, "delay");
    arcs.push_back(std::move(arc));
  }
  if (cursor < lines.size()) {
    Fail(lines[cursor].number, "arc count mismatch: header says " +
                                   std::to_string(m) + ", found more");
  }

  Topology topo(std::move(nodes), std::move(arcs));
  if (!topo.IsStronglyConnected()) {
    Fail(last_line, "graph not strongly connected");
  }
  return topo;
}

TrafficMatrix ParseDemands(std::string_view text, const Topology& topo) {
  std::vector<Line> lines = Tokenize(text);
  int last_line = lines.empty() ? 0 : lines.back().number;
  size_t cursor = 0;
  std::int64_t d = ExpectSection(lines, &cursor, "DEMANDS", last_line);

  auto resolve = [&](const Line& line, size_t field) {
    std::int64_t index;
    if (ToInt(line.tokens[field], &index)) {
      if (index < 0 || index >= topo.num_nodes()) {
        Fail(line.number, "unknown node " + std::string(line.tokens[field]));
      }
      return static_cast<int>(index);
    }
    int found = topo.FindNode(line.tokens[field]);
    if (found < 0) Fail(line.number, "unknown node " + std::string(line.tokens[field]));
    return found;
  };

  std::vector<Demand> demands;
  std::set<std::pair<int, int>> seen;
  for (std::int64_t i = 0; i < d; ++i) {
    if (cursor >= lines.size() || IsSectionKeyword(lines[cursor].tokens[0])) {
      Fail(cursor < lines.size() ? lines[cursor].number : last_line + 1,
           "demand count mismatch: header says " + std::to_string(d) +
               ", found " + std::to_string(i));
    }
    const Line& line = lines[cursor++];
    if (line.tokens.size() != 4) {
      Fail(line.number, "wrong field count for demand line (expected 4, got " +
                            std::to_string(line.tokens.size()) + ")");
    }
    Demand demand;
    demand.label = std::string(line.tokens[0]);
    demand.src = resolve(line, 1);
    demand.dst = resolve(line, 2);
    if (demand.src == demand.dst) Fail(line.number, "demand with src == dst");
    demand.volume = ExpectDouble(line, 3, "volume");
    if (demand.volume <= 0) Fail(line.number, "non-positive volume");
    if (!seen.emplace(demand.src, demand.dst).second) {
      Fail(line.number, "duplicate demand " + std::to_string(demand.src) +
                            " -> " + std::to_string(demand.dst));
    }
    demands.push_back(std::move(demand));
  }
  if (cursor < lines.size()) {
    Fail(lines[cursor].number, "demand count mismatch: header says " +
                                   std::to_string(d) + ", found more");
  }
  return TrafficMatrix(std::move(demands));
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string SerializeTopology(const Topology& topo) {
  std::ostringstream out;
  out << "NODES " << topo.num_nodes() << "\nlabel x y\n";
  for (const Node& node : topo.nodes()) {
    out << node.label << ' ' << FormatDouble(node.x) << ' ' << FormatDouble(node.y)
        << '\n';
  }
  out << "\nEDGES " << topo.num_arcs() << "\nlabel src dest weight bw delay\n";
  for (const Arc& arc : topo.arcs()) {
    out << arc.label << ' ' << arc.src << ' ' << arc.dst << ' ' << arc.igp_weight
        << ' ' << FormatDouble(arc.capacity) << " 0\n";
  }
  return out.str();
}

std::string SerializeDemands(const TrafficMatrix& tm) {
  std::ostringstream out;
  out << "DEMANDS " << tm.size() << "\nlabel src dest bw\n";
  for (const Demand& d : tm.demands()) {
    out << (d.label.empty() ? "demand_" + std::to_string(d.id) : d.label) << ' '
        << d.src << ' ' << d.dst << ' ' << FormatDouble(d.volume) << '\n';
  }
  return out.str();
}

TrafficMatrix GenerateGravityTraffic(const Topology& topo, double total_volume,
                                     std::uint64_t seed) {
  const int n = topo.num_nodes();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument, "gravity model needs at least 2 nodes");
  }
  if (!(total_volume > 0) || !std::isfinite(total_volume)) {
    throw Error(ErrorCode::kInvalidArgument, "total volume must be positive");
  }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> unit_exp(1.0);
  std::vector<double> out_factor(n), in_factor(n);
  for (int i = 0; i < n; ++i) {
    out_factor[i] = unit_exp(rng);
    in_factor[i] = unit_exp(rng);
  }
  double mass = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) mass += out_factor[i] * in_factor[j];
    }
  }
  std::vector<Demand> demands;
  demands.reserve(static_cast<size_t>(n) * (n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Demand d;
      d.src = i;
      d.dst = j;
      d.volume = total_volume * (out_factor[i] * in_factor[j]) / mass;
      d.label = "demand_" + std::to_string(demands.size());
      demands.push_back(std::move(d));
    }
  }
  return TrafficMatrix(std::move(demands));
}

std::vector<std::string> ValidateInstance(const Topology& topo,
                                          const TrafficMatrix& tm) {
  std::vector<std::string> findings;
  const int n = topo.num_nodes();
  if (n == 0) findings.push_back("topology has no nodes");
  for (int i = 0; i < n; ++i) {
    if (topo.nodes()[i].index != i) {
      findings.push_back("node index gap at position " + std::to_string(i));
    }
  }
  bool endpoints_ok = true;
  for (int a = 0; a < topo.num_arcs(); ++a) {
    const Arc& arc = topo.arc(a);
    std::string id = "arc " + std::to_string(a);
    if (arc.index != a) findings.push_back("arc index gap at position " + std::to_string(a));
    if (arc.src < 0 || arc.src >= n || arc.dst < 0 || arc.dst >= n) {
      findings.push_back("dangling endpoint, " + id);
      endpoints_ok = false;
    } else if (arc.src == arc.dst) {
      findings.push_back("self-loop, " + id);
    }
    if (arc.igp_weight < 1) findings.push_back("non-positive weight, " + id);
    if (!(arc.capacity > 0) || !std::isfinite(arc.capacity)) {
      findings.push_back("non-positive capacity, " + id);
    }
  }
  if (n > 0 && endpoints_ok && !topo.IsStronglyConnected()) {
    findings.push_back("graph not strongly connected");
  }

  std::set<std::pair<int, int>> seen;
  for (const Demand& d : tm.demands()) {
    std::string id = "demand " + std::to_string(d.id);
    bool in_range = d.src >= 0 && d.src < n && d.dst >= 0 && d.dst < n;
    if (!in_range) findings.push_back("unknown node, " + id);
    if (d.src == d.dst) findings.push_back("src equals dst, " + id);
    if (!(d.volume > 0) || !std::isfinite(d.volume)) {
      findings.push_back("non-positive volume, " + id);
    }
    if (!seen.emplace(d.src, d.dst).second) findings.push_back("duplicate pair, " + id);
  }
  if (tm.empty()) findings.push_back("traffic matrix is empty");
  return findings;
}

}  // namespace srte
