#include "milp_2sr.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "error.h"

namespace srte {
namespace {

constexpr int kTermsPerLine = 8;

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool ParseValue(std::string_view token, double* out) {
  if (token == "nan" || token == "NaN") {
    *out = std::nan("");
    return true;
  }
  if (token == "inf" || token == "+inf" || token == "Infinity") {
    *out = HUGE_VAL;
    return true;
  }
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), *out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

int MilpModel::FindVar(std::string_view name) const {
  auto it = var_index_.find(std::string(name));
  return it == var_index_.end() ? -1 : it->second;
}

std::string VarName(int demand, int candidate) {
  return "x_d" + std::to_string(demand) + "_m" +
         (candidate == kDirect ? std::string("dir") : std::to_string(candidate));
}

MilpModel BuildModel(const Topology& topo, const TrafficMatrix& tm,
                     const CandidateSet& cands, const EcmpTable& ecmp) {
  if (cands.num_demands() != tm.size()) {
    throw Error(ErrorCode::kDemandMismatch, "candidate set does not match traffic matrix");
  }
  MilpModel model;
  model.num_demands_ = tm.size();
  model.capacity_rows_.resize(topo.num_arcs());
  for (int a = 0; a < topo.num_arcs(); ++a) {
    model.capacity_rows_[a].arc = a;
    model.capacity_rows_[a].capacity = topo.arc(a).capacity;
  }

  for (const Demand& d : tm.demands()) {
    const std::vector<int>& list = cands.candidates(d.id);
    if (list.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "empty candidate set for demand " + std::to_string(d.id));
    }
    if (cands.pinned(d.id)) {
      model.pinned_demands_.push_back(d.id);
      for (const ArcLoad& f : ecmp.Fractions(d.src, d.dst)) {
        model.capacity_rows_[f.arc].pinned_load += d.volume * f.load;
      }
      continue;
    }
    AssignmentRow row;
    row.demand = d.id;
    for (int k : list) {
      int var = static_cast<int>(model.vars_.size());
      model.vars_.push_back({d.id, k, VarName(d.id, k)});
      model.var_index_.emplace(model.vars_.back().name, var);
      row.vars.push_back(var);
      for (const ArcLoad& g : SrPathLoads(d.src, d.dst, k, ecmp).loads) {
        if (g.load == 0.0) continue;
        model.capacity_rows_[g.arc].terms.push_back({var, d.volume * g.load});
      }
    }
    model.assignment_rows_.push_back(std::move(row));
  }
  return model;
}

std::string WriteLpFile(const MilpModel& model) {
  std::ostringstream out;
  out << "\\ 2SR model: " << model.assignment_rows().size() << " free demands, "
      << model.pinned_demands().size() << " pinned, " << model.vars().size()
      << " binaries\n";
  out << "Minimize\n obj: theta\n";

  std::ostringstream rows;
  for (const AssignmentRow& row : model.assignment_rows()) {
    rows << 'a' << row.demand << ':';
    for (size_t t = 0; t < row.vars.size(); ++t) {
      if (t > 0 && t % kTermsPerLine == 0) rows << "\n ";
      rows << (t == 0 ? " " : " + ") << model.vars()[row.vars[t]].name;
    }
    rows << " = 1\n";
  }
  for (const CapacityRow& row : model.capacity_rows()) {
    // -c * theta <= 0 holds for every theta >= 0.
    if (row.terms.empty() && row.pinned_load == 0.0) continue;
    rows << 'c' << row.arc << ':';
    for (size_t t = 0; t < row.terms.size(); ++t) {
      if (t > 0 && t % kTermsPerLine == 0) rows << "\n ";
      rows << (t == 0 ? " " : " + ") << FormatDouble(row.terms[t].coef) << ' '
           << model.vars()[row.terms[t].var].name;
    }
    rows << (row.terms.empty() ? " -" : " - ") << FormatDouble(row.capacity)
         << " theta <= ";
    rows << (row.pinned_load == 0.0 ? std::string("0") : FormatDouble(-row.pinned_load))
         << '\n';
  }
  std::string constraints = rows.str();
  if (!constraints.empty()) out << "Subject To\n" << constraints;

  out << "Bounds\n theta >= 0\n";
  if (!model.vars().empty()) {
    out << "Binary\n";
    for (const BinaryVar& var : model.vars()) out << ' ' << var.name << '\n';
  }
  out << "End\n";
  return out.str();
}

const char* SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapLimit: return "gap-limit";
    case SolveStatus::kTimeLimit: return "time-limit";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kError: return "error";
  }
  return "error";
}

SolveStatus ParseSolveStatus(std::string_view name) {
  for (SolveStatus s : {SolveStatus::kOptimal, SolveStatus::kGapLimit,
                        SolveStatus::kTimeLimit, SolveStatus::kInfeasible,
                        SolveStatus::kError}) {
    if (name == SolveStatusName(s)) return s;
  }
  throw Error(ErrorCode::kUnparseableOutput, "unknown solver status '" + std::string(name) + "'");
}

SrSolution ParseSolution(std::string_view text, const MilpModel& model) {
  SrSolution solution;
  bool have_objective = false;
  std::vector<double> values(model.vars().size(), std::nan(""));
  int assigned_values = 0;

  int line_number = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    std::vector<std::string_view> fields = SplitFields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() != 2) {
      throw Error(ErrorCode::kUnparseableOutput,
                  "solution line " + std::to_string(line_number) + ": expected '<name> <value>'");
    }
    if (!have_objective) {
      double objective;
      if (fields[0] != "objective" || !ParseValue(fields[1], &objective)) {
        throw Error(ErrorCode::kUnparseableOutput,
                    "solution listing must start with 'objective <value>'");
      }
      solution.reported_objective = objective;
      have_objective = true;
      continue;
    }
    if (fields[0] == "status") {
      solution.status = ParseSolveStatus(fields[1]);
      continue;
    }
    double value;
    if (!ParseValue(fields[1], &value)) {
      throw Error(ErrorCode::kUnparseableOutput,
                  "solution line " + std::to_string(line_number) + ": bad value");
    }
    if (fields[0] == "gap") {
      solution.reported_gap = value;
      continue;
    }
    int var = model.FindVar(fields[0]);
    if (var < 0) continue;  // theta and solver-private columns
    if (std::isnan(values[var])) ++assigned_values;
    values[var] = value;
  }
  if (!have_objective) {
    throw Error(ErrorCode::kUnparseableOutput, "empty solution listing");
  }
  if (solution.status == SolveStatus::kInfeasible) {
    throw Error(ErrorCode::kInfeasible, "solver reports the model infeasible");
  }
  if (solution.status == SolveStatus::kError) {
    throw Error(ErrorCode::kSolverFailed, "solver reports an error status");
  }
  if (assigned_values == 0 && !model.vars().empty() &&
      (solution.status == SolveStatus::kTimeLimit || std::isnan(solution.reported_objective))) {
    throw Error(ErrorCode::kNoSolution, "solver stopped without a feasible solution");
  }
  if (std::isnan(solution.reported_objective)) {
    throw Error(ErrorCode::kUnparseableOutput, "objective is not a number");
  }
  for (size_t v = 0; v < values.size(); ++v) {
    if (std::isnan(values[v])) {
      throw Error(ErrorCode::kMissingVariable,
                  "missing variable " + model.vars()[v].name);
    }
  }

  solution.assignment.assign(model.num_demands(), kDirect);
  for (const AssignmentRow& row : model.assignment_rows()) {
    int chosen = -1;
    for (int var : row.vars) {
      if (values[var] < 0.5) continue;
      if (chosen >= 0) {
        throw Error(ErrorCode::kNonUniqueAssignment,
                    "non-unique assignment for demand " + std::to_string(row.demand));
      }
      chosen = var;
    }
    if (chosen < 0) {
      throw Error(ErrorCode::kMissingVariable,
                  "no candidate selected for demand " + std::to_string(row.demand));
    }
    solution.assignment[row.demand] = model.vars()[chosen].candidate;
  }
  solution.theta = solution.reported_objective;
  return solution;
}

Utilization EvaluateAssignmentMlu(const Topology& topo, const TrafficMatrix& tm,
                                  const std::vector<int>& assignment,
                                  const EcmpTable& ecmp) {
  if (static_cast<int>(assignment.size()) != tm.size()) {
    throw Error(ErrorCode::kDemandMismatch, "assignment does not cover every demand");
  }
  std::vector<double> load(topo.num_arcs(), 0.0);
  auto add = [&](const SparseLoads& f, double volume) {
    for (const ArcLoad& x : f) load[x.arc] += volume * x.load;
  };
  for (const Demand& d : tm.demands()) {
    int k = NormalizeMiddlepoint(d.src, d.dst, assignment[d.id]);
    if (k == kDirect) {
      add(ecmp.Fractions(d.src, d.dst), d.volume);
    } else {
      add(ecmp.Fractions(d.src, k), d.volume);
      add(ecmp.Fractions(k, d.dst), d.volume);
    }
  }
  Utilization out;
  out.per_arc.resize(topo.num_arcs());
  for (int a = 0; a < topo.num_arcs(); ++a) {
    out.per_arc[a] = load[a] / topo.arc(a).capacity;
    out.mlu = std::max(out.mlu, out.per_arc[a]);
  }
  return out;
}

}  // namespace srte
