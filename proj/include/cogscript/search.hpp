#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cogscript/concept.hpp"
#include "cogscript/emulator.hpp"
#include "cogscript/model.hpp"

namespace cogscript {

enum class SearchMode { naive, factorized };
enum class Status { solved, budget_exhausted, frontier_exhausted };

std::string_view to_string(SearchMode mode);
std::string_view to_string(Status status);

struct SearchConfig {
  long n_progs = 4000;
  SearchMode mode = SearchMode::factorized;
  bool mutation_enabled = true;
  MatchMode match_mode = MatchMode::by_property;
  ArgumentPriorOptions arg_options;  // carries epsilon_arg
  std::uint64_t seed = 0;
  int parallel_workers = 1;
  /// Retry with a different first sub-goal when an attempt fails.
  bool order_retry = false;
  /// Prune against the parent's matched set instead of the root baseline.
  bool prune_against_parent = false;
  std::size_t seen_memory_cap = std::size_t{1} << 30;
  int max_mutation_rounds = 10;
};

/// One program's outcome across every example of a concept.
struct Evaluation {
  bool error = false;
  bool solved = false;
  std::vector<std::uint64_t> matched;  // per example, bit per work object id
  std::vector<VmState> finals;         // empty on error
};

struct SearchNode {
  Program program;
  double dl = 0.0;
  std::vector<std::uint64_t> matched_baseline;  // inherited from the root
  std::vector<std::uint64_t> matched;           // this program's own matches
};

struct SubgoalRecord {
  Program root;
  std::vector<std::vector<int>> newly_matched;  // per example
  std::vector<std::vector<int>> matched;        // per example, full set
  long visited_at_restart = 0;
  std::string source;  // "search", "mutation" or "pending"
  int attempt = 0;
};

struct PartialSolution {
  Program root;
  std::vector<MatchReport> matches;  // per example
};

struct SearchLogRecord {
  std::string event;  // "restart" or "mutation"
  long visited = 0;
  Program root;
  std::vector<int> matched_counts;  // per example
  std::string detail;
};

struct InductionResult {
  Status status = Status::budget_exhausted;
  std::optional<Program> program;
  double dl = kInfinity;
  long visited = 0;
  std::vector<SubgoalRecord> subgoal_history;
  int mutation_rounds = 0;
  PartialSolution best_partial;
  std::vector<SearchLogRecord> log;
};

/// Instrumentation points. Every hook is optional.
struct SearchHooks {
  std::function<void(const Program&)> on_execute;
  /// The phase advances on every mutation round, pending-root switch and
  /// retry attempt; pops within one phase come out in DL order.
  std::function<void(const SearchNode&, int phase)> on_pop;
  std::function<void(const SubgoalRecord&)> on_restart;
};

/// Canonical encodings of every evaluated program, capped in memory.
class SeenSet {
 public:
  explicit SeenSet(std::size_t memory_cap = std::size_t{1} << 30) : cap_(memory_cap) {}
  bool contains(const std::string& key) const { return keys_.count(key) != 0; }
  void insert(const std::string& key);
  std::size_t size() const { return keys_.size(); }
  bool saturated() const { return saturated_; }

 private:
  std::unordered_set<std::string> keys_;
  std::size_t cap_;
  std::size_t bytes_ = 0;
  bool saturated_ = false;
};

/// Runs programs on a concept and owns the program budget: every call to
/// execute() on behalf of a program counts as one visit.
class Evaluator {
 public:
  Evaluator(const Concept& cpt, MatchMode mode, long budget,
            const SearchHooks* hooks = nullptr, int workers = 1,
            std::size_t seen_cap = std::size_t{1} << 30);

  long visited() const { return visited_; }
  long budget() const { return budget_; }
  bool exhausted() const { return visited_ >= budget_; }
  const SeenSet& seen() const { return seen_; }
  const Concept& target() const { return *cpt_; }

  /// nullopt when the budget is already spent.
  std::optional<Evaluation> evaluate(const Program& program);
  /// Evaluates as many programs as the budget allows, in order.
  std::vector<Evaluation> evaluate_all(const std::vector<Program>& programs);

 private:
  Evaluation run(const Program& program) const;

  const Concept* cpt_;
  MatchMode mode_;
  long budget_;
  long visited_ = 0;
  const SearchHooks* hooks_;
  int workers_;
  SeenSet seen_;
};

/// Pure evaluation of a program against a concept (no budget accounting).
Evaluation evaluate_program(const Program& program, const Concept& cpt,
                            MatchMode mode);

/// One child per registry variant with a nonzero transition factor; the
/// child's dl is the parent's plus -ln(factor). Children inherit the parent's
/// baseline; their own matched sets are left empty.
std::vector<SearchNode> expand(const SearchNode& node, const TransitionModel& model,
                               const ArgumentPrior& prior);

// --- Mutation ---------------------------------------------------------------

/// Every single-edit variant of `root` that leaves the first and last
/// instruction in place: adjacent transpositions and deletions of interior
/// instructions, changes of an interior instruction to any other variant, and
/// insertions before an interior instruction. Each loop_start insertion also
/// yields one candidate per loop_end position after it. Not deduplicated.
std::vector<Program> mutation_candidates(const Program& root);

struct MutationOutcome {
  enum class Kind { none, solved, new_roots, enqueue } kind = Kind::none;
  std::vector<SearchNode> programs;  // sorted by (dl, program)
  std::vector<std::vector<VmState>> finals;  // parallel to programs for new_roots
  long evaluated = 0;
};

MutationOutcome mutate(const Program& root, const TransitionModel& model,
                       const ArgumentPrior& prior, Evaluator& evaluator,
                       const std::vector<std::uint64_t>& baseline);

// --- Induction --------------------------------------------------------------

InductionResult induce(const Concept& cpt, const TransitionModel& model,
                       const SearchConfig& config, const SearchHooks* hooks = nullptr);

/// induce() with sub-goal restarts, unmatch pruning and mutation disabled.
InductionResult induce_naive(const Concept& cpt, const TransitionModel& model,
                             SearchConfig config, const SearchHooks* hooks = nullptr);

}  // namespace cogscript
