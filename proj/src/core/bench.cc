#include "bench.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "error.h"
#include "igp_routing.h"
#include "milp_2sr.h"

namespace srte {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double Median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    size_t end = s.find(sep, start);
    parts.push_back(s.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

std::vector<std::string_view> Words(std::string_view s) {
  std::vector<std::string_view> words;
  for (std::string_view part : Split(s, ' ')) {
    part = Trim(part);
    if (!part.empty()) words.push_back(part);
  }
  return words;
}

double ToNumber(std::string_view token, const std::string& what) {
  token = Trim(token);
  if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
  double value;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::kParse, "bad number for " + what + ": '" + std::string(token) + "'");
  }
  return value;
}

bool ToBool(std::string_view token, const std::string& what) {
  token = Trim(token);
  if (token == "1" || token == "true" || token == "yes") return true;
  if (token == "0" || token == "false" || token == "no") return false;
  throw Error(ErrorCode::kParse, "bad boolean for " + what);
}

std::string ReadFileOrThrow(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void AddLink(std::vector<Arc>* arcs, int u, int v, std::int64_t weight, double capacity) {
  for (auto [a, b] : {std::pair{u, v}, std::pair{v, u}}) {
    Arc arc;
    arc.index = static_cast<int>(arcs->size());
    arc.src = a;
    arc.dst = b;
    arc.igp_weight = weight;
    arc.capacity = capacity;
    arc.label = "edge_" + std::to_string(arc.index);
    arcs->push_back(std::move(arc));
  }
}

}  // namespace

Topology GenerateBackboneTopology(int n, std::uint64_t seed) {
  if (n < 3) throw Error(ErrorCode::kInvalidArgument, "backbone needs at least 3 nodes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1000.0);

  std::vector<Node> nodes(n);
  for (int i = 0; i < n; ++i) {
    nodes[i].index = i;
    nodes[i].label = "n" + std::to_string(i);
    nodes[i].x = coord(rng);
    nodes[i].y = coord(rng);
  }
  auto distance = [&](int a, int b) {
    return std::hypot(nodes[a].x - nodes[b].x, nodes[a].y - nodes[b].y);
  };
  auto weight = [&](int a, int b) {
    return std::max<std::int64_t>(1, std::llround(distance(a, b) / 50.0));
  };

  const int stubs = std::max(0, n / 5);
  const int core = n - stubs;
  std::vector<int> ring(core);
  for (int i = 0; i < core; ++i) ring[i] = i;
  double cx = 0, cy = 0;
  for (int i = 0; i < core; ++i) {
    cx += nodes[i].x / core;
    cy += nodes[i].y / core;
  }
  std::sort(ring.begin(), ring.end(), [&](int a, int b) {
    return std::atan2(nodes[a].y - cy, nodes[a].x - cx) <
           std::atan2(nodes[b].y - cy, nodes[b].x - cx);
  });

  std::vector<Arc> arcs;
  std::set<std::pair<int, int>> linked;
  std::vector<char> stub_link;
  auto link = [&](int u, int v, bool stub) {
    if (u == v || !linked.emplace(std::min(u, v), std::max(u, v)).second) return;
    AddLink(&arcs, u, v, weight(u, v), 1.0);
    stub_link.push_back(stub);
  };
  for (int i = 0; i < core; ++i) link(ring[i], ring[(i + 1) % core], false);
  // Two nearest core neighbours per core node.
  for (int u = 0; u < core; ++u) {
    std::vector<int> others;
    for (int v = 0; v < core; ++v) {
      if (v != u) others.push_back(v);
    }
    std::partial_sort(others.begin(), others.begin() + std::min<size_t>(2, others.size()),
                      others.end(),
                      [&](int a, int b) { return distance(u, a) < distance(u, b); });
    for (size_t k = 0; k < std::min<size_t>(2, others.size()); ++k) link(u, others[k], false);
  }
  // Stubs hang off their nearest core node.
  for (int s = core; s < n; ++s) {
    int best = 0;
    for (int v = 1; v < core; ++v) {
      if (distance(s, v) < distance(s, best)) best = v;
    }
    link(s, best, true);
  }

  // Capacities follow the shortest-path load of the gravity traffic drawn
  // with the same seed, times a random headroom, rounded up to a link speed
  // from the 1000 / 2500 / 4000 / 10000 ladder (and its decades).
  Topology draft(nodes, arcs);
  ApspTable apsp = ComputeApsp(draft);
  EcmpTable ecmp = ComputeEcmpFractions(draft, apsp);
  Utilization load = SprMlu(draft, GenerateGravityTraffic(draft, 1.0, seed), ecmp);
  double max_load = *std::max_element(load.per_arc.begin(), load.per_arc.end());
  std::uniform_real_distribution<double> core_headroom(1.0, 3.0);
  std::uniform_real_distribution<double> stub_headroom(3.0, 4.5);
  for (size_t a = 0; a < arcs.size(); a += 2) {
    double link_load = std::max({load.per_arc[a], load.per_arc[a + 1], 0.02 * max_load});
    double headroom = stub_link[a / 2] ? stub_headroom(rng) : core_headroom(rng);
    double wanted = 10000.0 * link_load * headroom / (3.0 * max_load);
    double decade = 1000;
    double speed = decade;
    while (speed < wanted) {
      if (speed == decade) {
        speed = 2.5 * decade;
      } else if (speed == 2.5 * decade) {
        speed = 4 * decade;
      } else {
        decade *= 10;
        speed = decade;
      }
    }
    arcs[a].capacity = arcs[a + 1].capacity = speed;
  }
  return Topology(std::move(nodes), std::move(arcs));
}

Topology GenerateStarOfStars(int hubs, int stubs_per_hub) {
  if (hubs < 1 || stubs_per_hub < 0 || hubs + hubs * stubs_per_hub < 2) {
    throw Error(ErrorCode::kInvalidArgument, "star-of-stars needs at least two nodes");
  }
  std::vector<Node> nodes;
  for (int h = 0; h < hubs; ++h) {
    nodes.push_back({h, "hub" + std::to_string(h), std::cos(2 * std::numbers::pi * h / hubs),
                     std::sin(2 * std::numbers::pi * h / hubs)});
  }
  for (int h = 0; h < hubs; ++h) {
    for (int s = 0; s < stubs_per_hub; ++s) {
      int index = static_cast<int>(nodes.size());
      nodes.push_back({index, "stub" + std::to_string(h) + "_" + std::to_string(s),
                       nodes[h].x * 2, nodes[h].y * 2});
    }
  }
  std::vector<Arc> arcs;
  for (int a = 0; a < hubs; ++a) {
    for (int b = a + 1; b < hubs; ++b) AddLink(&arcs, a, b, 1, 10000);
  }
  for (int h = 0; h < hubs; ++h) {
    for (int s = 0; s < stubs_per_hub; ++s) {
      AddLink(&arcs, h, hubs + h * stubs_per_hub + s, 1, 1000);
    }
  }
  return Topology(std::move(nodes), std::move(arcs));
}

Instance MakeSyntheticInstance(int n, std::uint64_t seed, double total_volume) {
  Instance instance;
  instance.id = "synthetic-n" + std::to_string(n) + "-s" + std::to_string(seed);
  instance.topology = GenerateBackboneTopology(n, seed);
  if (total_volume > 0) {
    instance.traffic = GenerateGravityTraffic(instance.topology, total_volume, seed);
    return instance;
  }
  TrafficMatrix unit = GenerateGravityTraffic(instance.topology, 1.0, seed);
  ApspTable apsp = ComputeApsp(instance.topology);
  EcmpTable ecmp = ComputeEcmpFractions(instance.topology, apsp);
  double spr = SprMlu(instance.topology, unit, ecmp).mlu;
  instance.traffic = GenerateGravityTraffic(instance.topology, 1.0 / spr, seed);
  return instance;
}

FilterConfig ParseFilterSpec(std::string_view spec) {
  FilterConfig filter;
  for (std::string_view word : Words(spec)) {
    size_t eq = word.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "expected key=value in filter spec, got '" +
                                         std::string(word) + "'");
    }
    std::string key(word.substr(0, eq));
    std::string_view value = word.substr(eq + 1);
    if (key == "dp") {
      filter.alpha_dp = ToNumber(value, key);
    } else if (key == "sb") {
      filter.alpha_sb = ToNumber(value, key);
    } else if (key == "onehop") {
      filter.one_hop_extension = ToBool(value, key);
    } else if (key == "centrality") {
      filter.centrality_group_size = static_cast<int>(ToNumber(value, key));
    } else if (key == "stages") {
      filter.stages.clear();
      for (std::string_view name : Split(value, ',')) {
        if (name == "centrality") {
          filter.stages.push_back(FilterStage::kCentrality);
        } else if (name == "pinning") {
          filter.stages.push_back(FilterStage::kPinning);
        } else if (name == "stretch") {
          filter.stages.push_back(FilterStage::kStretch);
        } else if (name == "domination") {
          filter.stages.push_back(FilterStage::kDomination);
        } else if (!name.empty()) {
          throw Error(ErrorCode::kParse, "unknown stage '" + std::string(name) + "'");
        }
      }
    } else {
      throw Error(ErrorCode::kParse, "unknown filter key '" + key + "'");
    }
  }
  if (filter.centrality_group_size > 0 &&
      std::find(filter.stages.begin(), filter.stages.end(), FilterStage::kCentrality) ==
          filter.stages.end()) {
    filter.stages.insert(filter.stages.begin(), FilterStage::kCentrality);
  }
  return filter;
}

ExperimentConfig ParseExperimentConfig(std::string_view text) {
  ExperimentConfig config;
  int line_number = 0;
  for (std::string_view raw : Split(text, '\n')) {
    ++line_number;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line_number) +
                                         ": expected 'key = value'");
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string_view value = Trim(line.substr(eq + 1));
    if (key == "instance") {
      std::vector<std::string_view> paths = Words(value);
      if (paths.size() != 2) {
        throw Error(ErrorCode::kParse, "instance needs '<graph> <demands>'");
      }
      config.instance_files.emplace_back(paths[0], paths[1]);
    } else if (key == "synthetic_n") {
      config.synthetic.n = static_cast<int>(ToNumber(value, key));
    } else if (key == "synthetic_seeds") {
      std::vector<std::string_view> range = Split(value, '-');
      config.synthetic.seed_begin = static_cast<std::uint64_t>(ToNumber(range[0], key));
      config.synthetic.seed_end =
          range.size() > 1 ? static_cast<std::uint64_t>(ToNumber(range[1], key))
                           : config.synthetic.seed_begin;
    } else if (key == "synthetic_volume") {
      config.synthetic.total_volume = ToNumber(value, key);
    } else if (key == "cell") {
      std::vector<std::string_view> words = Words(value);
      if (words.empty()) throw Error(ErrorCode::kParse, "cell needs an id");
      size_t rest = value.find(words[0]) + words[0].size();
      config.cells.push_back({std::string(words[0]), ParseFilterSpec(value.substr(rest))});
    } else if (key == "backend") {
      if (value == "external") {
        config.solver.backend = Backend::kExternal;
      } else if (value == "exact") {
        config.solver.backend = Backend::kExact;
      } else {
        throw Error(ErrorCode::kParse, "backend must be external or exact");
      }
    } else if (key == "solver_cmd") {
      config.solver.command = std::string(value);
    } else if (key == "gap") {
      config.solver.gap = ToNumber(value, key);
    } else if (key == "time_limit") {
      config.solver.time_limit = ToNumber(value, key);
    } else if (key == "threads") {
      config.solver.threads = static_cast<int>(ToNumber(value, key));
    } else if (key == "repetitions") {
      config.repetitions = static_cast<int>(ToNumber(value, key));
    } else if (key == "skip_spr_optimal") {
      config.skip_spr_optimal = ToBool(value, key);
    } else if (key == "mode") {
      if (value != "timing" && value != "throughput") {
        throw Error(ErrorCode::kParse, "mode must be timing or throughput");
      }
      config.throughput_mode = value == "throughput";
    } else {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line_number) +
                                         ": unknown key '" + key + "'");
    }
  }
  if (config.instance_files.empty() && config.synthetic.n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "experiment needs at least one instance");
  }
  if (config.cells.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "experiment needs at least one cell");
  }
  if (config.repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  }
  CheckSolverConfig(config.solver);
  return config;
}

Metrics ComputeMetrics(const SolveReport& baseline, const SolveReport& filtered,
                       const ExclusionStats& stats) {
  if (!baseline.solution || !filtered.solution) {
    throw Error(ErrorCode::kNoSolution, "metrics need two solved reports");
  }
  const double theta_base = baseline.solution->theta;
  if (theta_base == 0.0) {
    throw Error(ErrorCode::kSprTrivial, "SPR-trivial: baseline theta is 0");
  }
  Metrics metrics;
  metrics.speedup =
      baseline.solve_seconds / (filtered.preprocess_seconds + filtered.solve_seconds);
  metrics.mlu_deterioration = (filtered.solution->theta - theta_base) / theta_base;
  metrics.excluded_fraction = stats.excluded_fraction;
  return metrics;
}

SolveReport SolveInstance(const Topology& topo, const TrafficMatrix& tm,
                          const CandidateSet& cands, const EcmpTable& ecmp,
                          const SolverConfig& config) {
  if (config.backend == Backend::kExact) {
    return SolveExactOracle(topo, tm, cands, ecmp, config);
  }
  return SolveExternal(BuildModel(topo, tm, cands, ecmp), config);
}

std::vector<Instance> LoadInstances(const ExperimentConfig& config) {
  std::vector<Instance> instances;
  for (const auto& [graph, demands] : config.instance_files) {
    Instance instance;
    instance.id = graph;
    instance.topology = ParseTopology(ReadFileOrThrow(graph));
    instance.traffic = ParseDemands(ReadFileOrThrow(demands), instance.topology);
    instances.push_back(std::move(instance));
  }
  if (config.synthetic.n > 0) {
    for (std::uint64_t seed = config.synthetic.seed_begin; seed <= config.synthetic.seed_end;
         ++seed) {
      instances.push_back(
          MakeSyntheticInstance(config.synthetic.n, seed, config.synthetic.total_volume));
    }
  }
  return instances;
}

namespace {

SolveReport SolveRepeated(const Instance& instance, const CandidateSet& cands,
                          const EcmpTable& ecmp, const SolverConfig& solver,
                          int repetitions) {
  SolveReport first;
  std::vector<double> times;
  for (int r = 0; r < repetitions; ++r) {
    SolveReport report =
        SolveInstance(instance.topology, instance.traffic, cands, ecmp, solver);
    times.push_back(report.solve_seconds);
    if (r == 0) first = std::move(report);
  }
  first.solve_seconds = Median(times);
  return first;
}

BenchmarkRecord RunCell(const Instance& instance, const FilterCell& cell,
                        const ApspTable& apsp, const EcmpTable& ecmp,
                        const SolveReport& baseline, const ExperimentConfig& config) {
  BenchmarkRecord record;
  record.instance = instance.id;
  record.config = cell.id;
  record.theta_base = baseline.solution ? baseline.solution->theta : std::nan("");
  record.t_base = baseline.solve_seconds;
  record.status_base = SolveStatusName(baseline.status);
  record.theta_filt = record.t_pre = record.t_filt = record.speedup = record.mlu_det =
      record.excluded_frac = std::nan("");
  try {
    PipelineResult pipeline;
    std::vector<double> pre_times;
    for (int r = 0; r < config.repetitions; ++r) {
      auto start = Clock::now();
      pipeline = CombinedPipeline(instance.topology, instance.traffic, apsp, ecmp, cell.filter);
      pre_times.push_back(SecondsSince(start));
    }
    record.excluded_frac = pipeline.stats.excluded_fraction;
    record.stages = pipeline.stats.stages;
    record.total_paths = pipeline.stats.total_paths;
    record.t_pre = Median(pre_times);

    SolveReport filtered =
        SolveRepeated(instance, pipeline.candidates, ecmp, config.solver, config.repetitions);
    filtered.preprocess_seconds = record.t_pre;
    record.status_filt = SolveStatusName(filtered.status);
    record.t_filt = filtered.solve_seconds;
    if (filtered.solution) record.theta_filt = filtered.solution->theta;
    if (baseline.solution && filtered.solution) {
      Metrics metrics = ComputeMetrics(baseline, filtered, pipeline.stats);
      record.speedup = metrics.speedup;
      record.mlu_det = metrics.mlu_deterioration;
    }
  } catch (const Error& e) {
    record.status_filt = "error";
  }
  return record;
}

}  // namespace

std::vector<BenchmarkRecord> RunBenchmark(const ExperimentConfig& config) {
  std::vector<BenchmarkRecord> records;
  for (const Instance& instance : LoadInstances(config)) {
    std::vector<std::string> findings = ValidateInstance(instance.topology, instance.traffic);
    if (!findings.empty()) {
      throw Error(ErrorCode::kInvalidInstance, instance.id + ": " + findings.front());
    }
    ApspTable apsp = ComputeApsp(instance.topology);
    EcmpTable ecmp = ComputeEcmpFractions(instance.topology, apsp);

    SolveReport baseline;
    try {
      baseline = SolveRepeated(instance, FullCandidates(instance.topology, instance.traffic),
                               ecmp, config.solver, config.repetitions);
    } catch (const Error& e) {
      baseline.status = SolveStatus::kError;
      baseline.message = e.what();
    }

    if (config.skip_spr_optimal && baseline.solution) {
      double spr = SprMlu(instance.topology, instance.traffic, ecmp).mlu;
      if (baseline.solution->theta >= spr * (1.0 - config.solver.gap) - 1e-12) {
        BenchmarkRecord skipped;
        skipped.instance = instance.id;
        skipped.config = "-";
        skipped.theta_base = baseline.solution->theta;
        skipped.t_base = baseline.solve_seconds;
        skipped.theta_filt = skipped.t_pre = skipped.t_filt = skipped.speedup =
            skipped.mlu_det = skipped.excluded_frac = std::nan("");
        skipped.status_base = "spr-optimal";
        skipped.status_filt = "skipped";
        records.push_back(std::move(skipped));
        continue;
      }
    }

    if (config.throughput_mode) {
      std::vector<std::future<BenchmarkRecord>> futures;
      for (const FilterCell& cell : config.cells) {
        futures.push_back(std::async(std::launch::async, RunCell, std::cref(instance),
                                     std::cref(cell), std::cref(apsp), std::cref(ecmp),
                                     std::cref(baseline), std::cref(config)));
      }
      for (auto& future : futures) records.push_back(future.get());
    } else {
      for (const FilterCell& cell : config.cells) {
        records.push_back(RunCell(instance, cell, apsp, ecmp, baseline, config));
      }
    }
  }
  return records;
}

std::string FormatReport(const std::vector<BenchmarkRecord>& records) {
  std::ostringstream out;
  out << "instance,config,theta_base,t_base,theta_filt,t_pre,t_filt,speedup,mlu_det,"
         "excluded_frac,status_base,status_filt\n";
  for (const BenchmarkRecord& r : records) {
    out << r.instance << ',' << r.config << ',' << FormatDouble(r.theta_base) << ','
        << FormatDouble(r.t_base) << ',' << FormatDouble(r.theta_filt) << ','
        << FormatDouble(r.t_pre) << ',' << FormatDouble(r.t_filt) << ','
        << FormatDouble(r.speedup) << ',' << FormatDouble(r.mlu_det) << ','
        << FormatDouble(r.excluded_frac) << ',' << r.status_base << ',' << r.status_filt
        << '\n';
  }
  return out.str();
}

std::vector<BenchmarkRecord> ParseReport(std::string_view csv) {
  std::vector<BenchmarkRecord> records;
  bool header = true;
  for (std::string_view line : Split(csv, '\n')) {
    if (Trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string_view> f = Split(line, ',');
    if (f.size() != 12) throw Error(ErrorCode::kParse, "report row needs 12 fields");
    auto num = [&](int i) {
      if (f[i] == "nan" || f[i] == "-nan") return std::nan("");
      return ToNumber(f[i], "report field");
    };
    BenchmarkRecord r;
    r.instance = std::string(f[0]);
    r.config = std::string(f[1]);
    r.theta_base = num(2);
    r.t_base = num(3);
    r.theta_filt = num(4);
    r.t_pre = num(5);
    r.t_filt = num(6);
    r.speedup = num(7);
    r.mlu_det = num(8);
    r.excluded_frac = num(9);
    r.status_base = std::string(f[10]);
    r.status_filt = std::string(f[11]);
    records.push_back(std::move(r));
  }
  return records;
}

void EmitReport(const std::vector<BenchmarkRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << FormatReport(records);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

}  // namespace srte
