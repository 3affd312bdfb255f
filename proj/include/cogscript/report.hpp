#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cogscript/corpus.hpp"
#include "cogscript/search.hpp"

namespace cogscript {

/// Human-readable solve result. Contains no timing, so identical runs give
/// identical bytes.
std::string format_solve_report(const Concept& c, const SearchConfig& config,
                                const InductionResult& result);

/// One JSON record per restart or mutation round.
std::string format_search_log(const InductionResult& result);

inline double nats_to_bits(double nats) { return nats / 0.6931471805599453; }

// --- Benchmarks ---------------------------------------------------------------

struct BenchRow {
  std::string name;
  std::string mode;
  std::optional<Status> status;  // empty when the concept could not be run
  std::string error;
  long budget = 0;
  long visited = 0;
  double seconds = 0.0;
  int program_length = 0;
  int mutation_rounds = 0;
  bool loops_paired = true;  // loop_start/loop_end balanced in the found program
};

struct BenchAggregate {
  std::string mode;
  int concepts = 0;
  int solved = 0;
  double solve_rate = 0.0;
  double median_visited = 0.0;
  double median_seconds = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  /// Per mode, in order of first appearance. Unsolved rows count with the
  /// visited total they reached.
  std::vector<BenchAggregate> aggregates() const;
};

struct BenchMode {
  std::string label;
  SearchConfig config;
};

double median(std::vector<double> values);

/// Runs every manifest concept under every mode. Rows are never dropped: a
/// concept that fails to load yields error rows.
BenchReport run_bench(const std::vector<ManifestEntry>& entries, const TransitionModel& model,
                      const std::vector<BenchMode>& modes, long default_budget,
                      const std::function<void(const BenchRow&)>& progress = {});

std::string format_bench_table(const BenchReport& report);
/// Row records followed by aggregate records, one JSON object per line.
std::string format_bench_jsonl(const BenchReport& report);
/// CSV of (mode, name, visited, seconds) for histograms.
std::string format_bench_histogram(const BenchReport& report);

}  // namespace cogscript
