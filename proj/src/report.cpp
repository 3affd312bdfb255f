#include "cogscript/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace cogscript {

namespace {

using json = nlohmann::json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string id_list(const std::vector<int>& ids) {
  std::string s = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s + "}";
}

std::string id_list(const std::set<int>& ids) {
  return id_list(std::vector<int>(ids.begin(), ids.end()));
}

std::string inline_program(const Program& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "; " : "") + to_string(p[i]);
  return s;
}

bool loops_paired(const Program& p) {
  int depth = 0;
  for (const auto& inst : p.instructions) {
    if (inst.op == Opcode::loop_start) ++depth;
    if (inst.op == Opcode::loop_end && --depth < 0) return false;
  }
  return depth == 0;
}

}  // namespace

std::string format_solve_report(const Concept& c, const SearchConfig& config,
                                const InductionResult& r) {
  std::ostringstream os;
  os << "concept: " << c.name << " (" << c.examples.size() << " examples)\n"
     << "mode: " << to_string(config.mode)
     << "  mutation: " << (config.mutation_enabled ? "on" : "off")
     << "  match: " << (config.match_mode == MatchMode::by_id ? "by_id" : "by_property")
     << "  budget: " << config.n_progs << "\n"
     << "status: " << to_string(r.status) << "\n"
     << "visited: " << r.visited << "\n"
     << "mutation rounds: " << r.mutation_rounds << "\n";
  if (r.program) {
    os << "program (" << r.program->size() << " instructions, "
       << fixed(nats_to_bits(r.dl), 3) << " bits):\n";
    for (const auto& inst : r.program->instructions) os << "  " << to_string(inst) << "\n";
  }
  os << "sub-goals: " << r.subgoal_history.size() << "\n";
  for (std::size_t i = 0; i < r.subgoal_history.size(); ++i) {
    const auto& h = r.subgoal_history[i];
    os << "  " << i + 1 << ". visited " << h.visited_at_restart << " via " << h.source;
    if (h.attempt) os << " (attempt " << h.attempt + 1 << ")";
    os << ", newly matched";
    for (const auto& ids : h.newly_matched) os << ' ' << id_list(ids);
    os << "\n     root: " << inline_program(h.root) << "\n";
  }
  if (r.status != Status::solved) {
    const auto& bp = r.best_partial;
    os << "best partial solution:\n";
    for (const auto& inst : bp.root.instructions) os << "  " << to_string(inst) << "\n";
    for (std::size_t e = 0; e < bp.matches.size() && e < c.examples.size(); ++e) {
      const auto& m = bp.matches[e];
      const auto& target = c.examples[e].output;
      std::set<int> unmatched_targets;
      for (const auto& o : target.objects)
        if (!m.matched_target_ids.count(o.id)) unmatched_targets.insert(o.id);
      os << "  example " << e << ": matched " << m.size() << "/" << target.objects.size()
         << " objects " << id_list(m.matched_work_ids) << ", unmatched targets "
         << id_list(unmatched_targets) << "\n";
    }
  }
  return os.str();
}

std::string format_search_log(const InductionResult& r) {
  std::string out;
  for (const auto& rec : r.log) {
    json j = {{"event", rec.event},
              {"visited", rec.visited},
              {"root", inline_program(rec.root)},
              {"matched", rec.matched_counts},
              {"detail", rec.detail}};
    out += j.dump() + "\n";
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::vector<BenchAggregate> BenchReport::aggregates() const {
  std::vector<BenchAggregate> out;
  for (const auto& row : rows) {
    if (std::none_of(out.begin(), out.end(), [&](const auto& a) { return a.mode == row.mode; }))
      out.push_back({row.mode});
  }
  for (auto& agg : out) {
    std::vector<double> visited, seconds;
    for (const auto& row : rows) {
      if (row.mode != agg.mode) continue;
      ++agg.concepts;
      if (row.status == Status::solved) ++agg.solved;
      visited.push_back(static_cast<double>(row.visited));
      seconds.push_back(row.seconds);
    }
    agg.solve_rate = agg.concepts ? static_cast<double>(agg.solved) / agg.concepts : 0.0;
    agg.median_visited = median(visited);
    agg.median_seconds = median(seconds);
  }
  return out;
}

BenchReport run_bench(const std::vector<ManifestEntry>& entries, const TransitionModel& model,
                      const std::vector<BenchMode>& modes, long default_budget,
                      const std::function<void(const BenchRow&)>& progress) {
  BenchReport report;
  for (const auto& entry : entries) {
    std::optional<Concept> c;
    std::string error;
    try {
      c = load_concept(entry.concept_path);
      if (c->name.empty()) c->name = entry.concept_path.stem().string();
    } catch (const std::exception& e) {
      error = e.what();
    }
    for (const auto& mode : modes) {
      BenchRow row;
      row.name = c ? c->name : entry.concept_path.stem().string();
      row.mode = mode.label;
      row.budget = entry.budget.value_or(default_budget);
      if (!c) {
        row.error = error;
      } else {
        SearchConfig cfg = mode.config;
        cfg.n_progs = row.budget;
        const auto t0 = std::chrono::steady_clock::now();
        InductionResult r = induce(*c, model, cfg);
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.status = r.status;
        row.visited = r.visited;
        row.mutation_rounds = r.mutation_rounds;
        if (r.program) {
          row.program_length = static_cast<int>(r.program->size());
          row.loops_paired = loops_paired(*r.program);
        }
      }
      if (progress) progress(row);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string format_bench_table(const BenchReport& report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-20s %-18s %9s %9s %4s %4s\n", "concept", "mode",
                "status", "visited", "seconds", "len", "mut");
  os << line;
  for (const auto& r : report.rows) {
    std::string status = r.status ? std::string(to_string(*r.status)) : "error";
    std::snprintf(line, sizeof line, "%-28s %-20s %-18s %9ld %9.3f %4d %4d\n", r.name.c_str(),
                  r.mode.c_str(), status.c_str(), r.visited, r.seconds, r.program_length,
                  r.mutation_rounds);
    os << line;
  }
  os << "\n";
  std::snprintf(line, sizeof line, "%-20s %8s %8s %10s %14s %14s\n", "mode", "concepts", "solved",
                "solve rate", "median visited", "median seconds");
  os << line;
  for (const auto& a : report.aggregates()) {
    std::snprintf(line, sizeof line, "%-20s %8d %8d %9.1f%% %14.1f %14.3f\n", a.mode.c_str(),
                  a.concepts, a.solved, 100.0 * a.solve_rate, a.median_visited,
                  a.median_seconds);
    os << line;
  }
  return os.str();
}

std::string format_bench_jsonl(const BenchReport& report) {
  std::string out;
  for (const auto& r : report.rows) {
    json j = {{"type", "row"},
              {"name", r.name},
              {"mode", r.mode},
              {"status", r.status ? std::string(to_string(*r.status)) : "error"},
              {"budget", r.budget},
              {"visited", r.visited},
              {"seconds", r.seconds},
              {"program_length", r.program_length},
              {"mutation_rounds", r.mutation_rounds}};
    if (!r.error.empty()) j["error"] = r.error;
    out += j.dump() + "\n";
  }
  for (const auto& a : report.aggregates()) {
    json j = {{"type", "aggregate"},
              {"mode", a.mode},
              {"concepts", a.concepts},
              {"solved", a.solved},
              {"solve_rate", a.solve_rate},
              {"median_visited", a.median_visited},
              {"median_seconds", a.median_seconds}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string format_bench_histogram(const BenchReport& report) {
  std::string out = "mode,name,visited,seconds\n";
  for (const auto& r : report.rows)
    out += r.mode + "," + r.name + "," + std::to_string(r.visited) + "," + fixed(r.seconds, 6) +
           "\n";
  return out;
}

}  // namespace cogscript
