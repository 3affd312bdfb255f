#include "cogscript/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

namespace cogscript {

namespace {

constexpr double kTieTol = 1e-12;

bool subset(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

std::vector<int> ids_of(std::uint64_t mask) {
  std::vector<int> ids;
  while (mask) {
    int id = std::countr_zero(mask);
    ids.push_back(id);
    mask &= mask - 1;
  }
  return ids;
}

int total_matched(const std::vector<std::uint64_t>& masks) {
  int n = 0;
  for (auto m : masks) n += std::popcount(m);
  return n;
}

std::vector<int> matched_counts(const std::vector<std::uint64_t>& masks) {
  std::vector<int> out;
  for (auto m : masks) out.push_back(std::popcount(m));
  return out;
}

// (dl, length, lexicographic); dl within kTieTol counts as equal.
bool better_solution(const SearchNode& a, const SearchNode& b) {
  if (a.dl < b.dl - kTieTol) return true;
  if (a.dl > b.dl + kTieTol) return false;
  if (a.program.size() != b.program.size()) return a.program.size() < b.program.size();
  return lexicographic_less(a.program, b.program);
}

bool by_dl_then_program(const SearchNode& a, const SearchNode& b) {
  if (a.dl != b.dl) return a.dl < b.dl;
  return lexicographic_less(a.program, b.program);
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Min-heap on (dl, tie). Ties are FIFO unless a salt is set, in which case
// they are broken by a seeded hash of the insertion counter.
class Frontier {
 public:
  void set_salt(std::optional<std::uint64_t> salt) { salt_ = salt; }

  void push(SearchNode node) {
    std::uint64_t seq = seq_++;
    std::uint64_t tie = salt_ ? mix(*salt_ ^ seq) : seq;
    heap_.push_back({std::move(node), tie});
    std::push_heap(heap_.begin(), heap_.end(), after);
  }
  SearchNode pop() {
    std::pop_heap(heap_.begin(), heap_.end(), after);
    SearchNode n = std::move(heap_.back().node);
    heap_.pop_back();
    return n;
  }
  double top_dl() const { return heap_.front().node.dl; }
  bool empty() const { return heap_.empty(); }
  void clear() { heap_.clear(); }

 private:
  struct Entry {
    SearchNode node;
    std::uint64_t tie;
  };
  static bool after(const Entry& a, const Entry& b) {
    if (a.node.dl != b.node.dl) return a.node.dl > b.node.dl;
    return a.tie > b.tie;
  }
  std::vector<Entry> heap_;
  std::uint64_t seq_ = 0;
  std::optional<std::uint64_t> salt_;
};

struct RootInfo {
  Program program;
  std::vector<std::uint64_t> matched;
  std::vector<VmState> finals;
};

struct PendingRoot {
  SearchNode node;
  std::vector<VmState> finals;
  std::vector<std::uint64_t> created_from;  // baseline when it was produced
};

struct AttemptResult {
  InductionResult result;
  std::optional<RootInfo> deepest;
  std::optional<std::vector<std::uint64_t>> first_signature;
};

class Induction {
 public:
  Induction(const Concept& cpt, const TransitionModel& model,
            const SearchConfig& config, const SearchHooks* hooks, Evaluator& ev,
            int attempt, const std::vector<std::vector<std::uint64_t>>& banned, int& phase)
      : cpt_(cpt),
        model_(model),
        config_(config),
        hooks_(hooks),
        ev_(ev),
        prior_(argument_prior(cpt, config.arg_options)),
        factorized_(config.mode == SearchMode::factorized),
        attempt_(attempt),
        banned_(banned),
        phase_(phase) {
    step_ = std::max<long>(1, ev.budget() / 10);
    threshold_ = ev.budget() / 10;
    if (attempt > 0) frontier_.set_salt(mix(config.seed + attempt));
  }

  AttemptResult run() {
    Program start = make_program({{Opcode::scene_parse, 0}});
    auto eval = ev_.evaluate(start);
    if (!eval) return finish(Status::budget_exhausted);
    SearchNode root{start, description_length(start, model_, prior_), {}, eval->matched};
    if (eval->error) return finish(Status::frontier_exhausted);
    baseline_ = eval->matched;
    root.matched_baseline = baseline_;
    root_ = root.program;
    note_root(root.program, eval->matched, std::move(eval->finals));
    if (eval->solved) {
      incumbent_ = root;
      return finish(Status::solved);
    }
    frontier_.push(std::move(root));
    return finish(loop());
  }

 private:
  Status loop() {
    while (true) {
      if (incumbent_ && (frontier_.empty() || frontier_.top_dl() > incumbent_->dl + kTieTol))
        return Status::solved;
      if (ev_.exhausted()) return incumbent_ ? Status::solved : Status::budget_exhausted;

      if (mutation_allowed() && ev_.visited() > threshold_) {
        if (run_mutation()) return Status::solved;
        continue;
      }

      if (frontier_.empty()) {
        if (switch_to_pending()) continue;
        // An empty frontier would end the search; spend a mutation round first.
        if (mutation_allowed()) {
          if (run_mutation()) return Status::solved;
          continue;
        }
        return incumbent_ ? Status::solved : Status::frontier_exhausted;
      }

      SearchNode node = frontier_.pop();
      if (hooks_ && hooks_->on_pop) hooks_->on_pop(node, phase_);
      expand_node(node);
    }
  }

  bool mutation_allowed() const {
    return factorized_ && config_.mutation_enabled && !result_.subgoal_history.empty() &&
           result_.mutation_rounds < config_.max_mutation_rounds;
  }

  void expand_node(const SearchNode& node) {
    auto children = expand(node, model_, prior_);
    if (incumbent_) {
      std::erase_if(children, [&](const SearchNode& c) {
        return c.dl > incumbent_->dl + kTieTol;
      });
    }
    if (config_.parallel_workers > 1) {
      std::vector<Program> programs;
      programs.reserve(children.size());
      for (const auto& c : children) programs.push_back(c.program);
      auto evals = ev_.evaluate_all(programs);
      for (std::size_t i = 0; i < evals.size(); ++i)
        if (consider_child(node, std::move(children[i]), std::move(evals[i]))) return;
      return;
    }
    for (auto& child : children) {
      auto eval = ev_.evaluate(child.program);
      if (!eval) return;
      if (consider_child(node, std::move(child), std::move(*eval))) return;
    }
  }

  // Returns true when the child triggered a restart.
  bool consider_child(const SearchNode& parent, SearchNode child, Evaluation eval) {
    if (eval.error) return false;
    child.matched = eval.matched;
    const std::size_t n = cpt_.examples.size();
    if (factorized_) {
      const auto& reference = config_.prune_against_parent ? parent.matched : baseline_;
      for (std::size_t e = 0; e < n; ++e)
        if (!subset(reference[e], child.matched[e])) return false;
    }
    if (eval.solved) {
      offer_solution(child);
      return false;
    }
    if (factorized_ && qualifies(child.matched)) {
      restart(std::move(child), std::move(eval.finals), "search");
      return true;
    }
    frontier_.push(std::move(child));
    return false;
  }

  bool qualifies(const std::vector<std::uint64_t>& matched) const {
    for (std::size_t e = 0; e < matched.size(); ++e)
      if (!subset(baseline_[e], matched[e]) || matched[e] == baseline_[e]) return false;
    if (result_.subgoal_history.empty() && !banned_.empty()) {
      std::vector<std::uint64_t> sig(matched.size());
      for (std::size_t e = 0; e < matched.size(); ++e) sig[e] = matched[e] & ~baseline_[e];
      if (std::find(banned_.begin(), banned_.end(), sig) != banned_.end()) return false;
    }
    return true;
  }

  void offer_solution(const SearchNode& candidate) {
    if (!incumbent_ || better_solution(candidate, *incumbent_)) incumbent_ = candidate;
  }

  void restart(SearchNode node, std::vector<VmState> finals, const std::string& source,
               const std::vector<std::uint64_t>* created_from = nullptr) {
    const auto& from = created_from ? *created_from : baseline_;
    SubgoalRecord rec;
    rec.root = node.program;
    rec.visited_at_restart = ev_.visited();
    rec.source = source;
    rec.attempt = attempt_;
    std::vector<std::uint64_t> newly(node.matched.size());
    for (std::size_t e = 0; e < node.matched.size(); ++e) {
      newly[e] = node.matched[e] & ~from[e];
      rec.newly_matched.push_back(ids_of(newly[e]));
      rec.matched.push_back(ids_of(node.matched[e]));
    }
    if (result_.subgoal_history.empty() || !first_signature_) first_signature_ = newly;
    result_.subgoal_history.push_back(rec);
    result_.log.push_back({"restart", ev_.visited(), node.program,
                           matched_counts(node.matched), source});
    if (hooks_ && hooks_->on_restart) hooks_->on_restart(rec);

    baseline_ = node.matched;
    root_ = node.program;
    note_root(node.program, node.matched, std::move(finals));
    frontier_.clear();
    node.matched_baseline = baseline_;
    frontier_.push(std::move(node));
  }

  bool switch_to_pending() {
    while (!pending_.empty()) {
      PendingRoot p = std::move(pending_.front());
      pending_.erase(pending_.begin());
      ++phase_;
      auto from = p.created_from;
      restart(std::move(p.node), std::move(p.finals), "pending", &from);
      return true;
    }
    return false;
  }

  // Returns true when a mutant solved the cpt.
  bool run_mutation() {
    ++result_.mutation_rounds;
    threshold_ += step_;
    ++phase_;
    auto outcome = mutate(root_, model_, prior_, ev_, baseline_);
    std::string detail;
    switch (outcome.kind) {
      case MutationOutcome::Kind::none: detail = "none"; break;
      case MutationOutcome::Kind::solved: detail = "solved"; break;
      case MutationOutcome::Kind::new_roots: detail = "new_roots"; break;
      case MutationOutcome::Kind::enqueue: detail = "enqueue"; break;
    }
    detail += " evaluated=" + std::to_string(outcome.evaluated) +
              " kept=" + std::to_string(outcome.programs.size());
    result_.log.push_back({"mutation", ev_.visited(), root_, matched_counts(baseline_), detail});

    switch (outcome.kind) {
      case MutationOutcome::Kind::none:
        break;
      case MutationOutcome::Kind::solved:
        // The shortest solving mutant is the answer.
        incumbent_ = outcome.programs.front();
        mutation_solved_ = true;
        return true;
      case MutationOutcome::Kind::new_roots: {
        auto created_from = baseline_;
        for (std::size_t i = 1; i < outcome.programs.size(); ++i)
          pending_.push_back({outcome.programs[i], std::move(outcome.finals[i]), created_from});
        restart(outcome.programs.front(), std::move(outcome.finals.front()), "mutation");
        break;
      }
      case MutationOutcome::Kind::enqueue:
        for (auto& m : outcome.programs) {
          m.matched_baseline = baseline_;
          frontier_.push(std::move(m));
        }
        break;
    }
    return false;
  }

  void note_root(const Program& program, const std::vector<std::uint64_t>& matched,
                 std::vector<VmState> finals) {
    if (!deepest_ || total_matched(matched) >= total_matched(deepest_->matched))
      deepest_ = RootInfo{program, matched, std::move(finals)};
  }

  AttemptResult finish(Status status) {
    result_.status = status;
    result_.visited = ev_.visited();
    if (status == Status::solved && incumbent_) {
      result_.program = incumbent_->program;
      result_.dl = incumbent_->dl;
    }
    AttemptResult out{std::move(result_), std::move(deepest_), first_signature_};
    return out;
  }

  const Concept& cpt_;
  const TransitionModel& model_;
  const SearchConfig& config_;
  const SearchHooks* hooks_;
  Evaluator& ev_;
  ArgumentPrior prior_;
  bool factorized_;
  int attempt_;
  const std::vector<std::vector<std::uint64_t>>& banned_;

  InductionResult result_;
  Frontier frontier_;
  std::vector<std::uint64_t> baseline_;
  Program root_;
  std::optional<SearchNode> incumbent_;
  bool mutation_solved_ = false;
  std::vector<PendingRoot> pending_;
  std::optional<RootInfo> deepest_;
  std::optional<std::vector<std::uint64_t>> first_signature_;
  long step_ = 1;
  long threshold_ = 0;
  int& phase_;
};

PartialSolution partial_from(const std::optional<RootInfo>& info, const Concept& cpt,
                             MatchMode mode) {
  PartialSolution p;
  if (!info) return p;
  p.root = info->program;
  for (std::size_t e = 0; e < info->finals.size() && e < cpt.examples.size(); ++e) {
    const auto& f = info->finals[e];
    p.matches.push_back(match_objects(f.working, cpt.examples[e].output, f.held, mode));
  }
  return p;
}

}  // namespace

std::string_view to_string(SearchMode mode) {
  return mode == SearchMode::naive ? "naive" : "factorized";
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::solved: return "solved";
    case Status::budget_exhausted: return "budget_exhausted";
    case Status::frontier_exhausted: return "frontier_exhausted";
  }
  return "?";
}

void SeenSet::insert(const std::string& key) {
  if (saturated_) return;
  std::size_t cost = key.size() + 64;
  if (bytes_ + cost > cap_) {
    saturated_ = true;
    return;
  }
  if (keys_.insert(key).second) bytes_ += cost;
}

Evaluation evaluate_program(const Program& program, const Concept& cpt,
                            MatchMode mode) {
  Evaluation out;
  out.solved = true;
  out.matched.reserve(cpt.examples.size());
  out.finals.reserve(cpt.examples.size());
  for (const auto& ex : cpt.examples) {
    auto r = execute(program, ex.input);
    if (!r.ok()) return Evaluation{true, false, {}, {}};
    const auto& fin = r.final;
    auto mask = matched_mask(fin.working, ex.output, fin.held, mode);
    auto prop = mode == MatchMode::by_property
                    ? mask
                    : matched_mask(fin.working, ex.output, fin.held, MatchMode::by_property);
    bool solved = !fin.held && fin.working.objects.size() == ex.output.objects.size() &&
                  std::popcount(prop) == static_cast<int>(fin.working.objects.size());
    out.solved = out.solved && solved;
    out.matched.push_back(mask);
    out.finals.push_back(std::move(r.final));
  }
  return out;
}

Evaluator::Evaluator(const Concept& cpt, MatchMode mode, long budget,
                     const SearchHooks* hooks, int workers, std::size_t seen_cap)
    : cpt_(&cpt),
      mode_(mode),
      budget_(budget),
      hooks_(hooks),
      workers_(std::max(1, workers)),
      seen_(seen_cap) {}

Evaluation Evaluator::run(const Program& program) const {
  return evaluate_program(program, *cpt_, mode_);
}

std::optional<Evaluation> Evaluator::evaluate(const Program& program) {
  if (exhausted()) return std::nullopt;
  ++visited_;
  if (hooks_ && hooks_->on_execute) hooks_->on_execute(program);
  seen_.insert(program.encode());
  return run(program);
}

std::vector<Evaluation> Evaluator::evaluate_all(const std::vector<Program>& programs) {
  const std::size_t n =
      std::min<std::size_t>(programs.size(), static_cast<std::size_t>(budget_ - visited_));
  std::vector<Evaluation> out(n);
  if (workers_ <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = run(programs[i]);
  } else {
    const std::size_t w = std::min<std::size_t>(workers_, n);
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < w; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += w) out[i] = run(programs[i]);
      });
  }
  for (std::size_t i = 0; i < n; ++i) {
    ++visited_;
    if (hooks_ && hooks_->on_execute) hooks_->on_execute(programs[i]);
    seen_.insert(programs[i].encode());
  }
  return out;
}

std::vector<SearchNode> expand(const SearchNode& node, const TransitionModel& model,
                               const ArgumentPrior& prior) {
  std::vector<SearchNode> children;
  const int last = node.program.empty() ? kStartState : state_of(node.program.instructions.back());
  for (int v = 0; v < kVariantCount; ++v) {
    const Instruction inst = variant(v);
    const double f = transition_factor(model, prior, last, inst);
    if (f <= 0.0) continue;
    SearchNode child;
    child.program.instructions.reserve(node.program.size() + 1);
    child.program = node.program;
    child.program.instructions.push_back(inst);
    child.dl = node.dl + -std::log(f);
    child.matched_baseline = node.matched_baseline;
    children.push_back(std::move(child));
  }
  return children;
}

std::vector<Program> mutation_candidates(const Program& root) {
  std::vector<Program> out;
  const auto& src = root.instructions;
  const int l = static_cast<int>(src.size());
  if (l < 3) return out;
  const int first_interior = 1, last_interior = l - 2;

  for (int i = first_interior; i < last_interior; ++i) {
    Program p = root;
    std::swap(p.instructions[i], p.instructions[i + 1]);
    out.push_back(std::move(p));
  }
  for (int i = first_interior; i <= last_interior; ++i) {
    Program p = root;
    p.instructions.erase(p.instructions.begin() + i);
    out.push_back(std::move(p));
  }
  for (int i = first_interior; i <= last_interior; ++i) {
    for (int v = 0; v < kVariantCount; ++v) {
      if (variant(v) == src[i]) continue;
      Program p = root;
      p.instructions[i] = variant(v);
      out.push_back(std::move(p));
    }
  }
  const Instruction loop_end{Opcode::loop_end, 0};
  for (int i = first_interior; i <= last_interior; ++i) {
    for (int v = 0; v < kVariantCount; ++v) {
      Program p = root;
      p.instructions.insert(p.instructions.begin() + i, variant(v));
      if (variant(v).op == Opcode::loop_start) {
        // Loop closure: pair the loop_start with a loop_end at every later
        // position, the end of the program included.
        for (int j = i + 1; j <= l + 1; ++j) {
          Program q = p;
          q.instructions.insert(q.instructions.begin() + j, loop_end);
          out.push_back(std::move(q));
        }
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

MutationOutcome mutate(const Program& root, const TransitionModel& model,
                       const ArgumentPrior& prior, Evaluator& evaluator,
                       const std::vector<std::uint64_t>& baseline) {
  MutationOutcome outcome;
  std::vector<SearchNode> survivors;
  std::unordered_set<std::string> local;
  for (auto& cand : mutation_candidates(root)) {
    auto key = cand.encode();
    if (evaluator.seen().contains(key) || !local.insert(key).second) continue;
    double dl = description_length(cand, model, prior);
    if (!std::isfinite(dl)) continue;
    survivors.push_back({std::move(cand), dl, baseline, {}});
  }

  std::vector<Program> programs;
  for (const auto& s : survivors) programs.push_back(s.program);
  auto evals = evaluator.evaluate_all(programs);
  outcome.evaluated = static_cast<long>(evals.size());

  std::vector<SearchNode> solved, roots, same;
  std::vector<std::vector<VmState>> root_finals;
  for (std::size_t i = 0; i < evals.size(); ++i) {
    auto& ev = evals[i];
    if (ev.error) continue;
    auto& node = survivors[i];
    node.matched = ev.matched;
    if (ev.solved) {
      solved.push_back(node);
      continue;
    }
    bool superset = true, equal = true;
    for (std::size_t e = 0; e < baseline.size(); ++e) {
      if (!subset(baseline[e], ev.matched[e])) superset = equal = false;
      if (ev.matched[e] == baseline[e]) superset = false;
      else equal = false;
    }
    if (superset) {
      roots.push_back(node);
      root_finals.push_back(std::move(ev.finals));
    } else if (equal) {
      same.push_back(node);
    }
  }

  if (!solved.empty()) {
    std::sort(solved.begin(), solved.end(), [](const SearchNode& a, const SearchNode& b) {
      if (a.program.size() != b.program.size()) return a.program.size() < b.program.size();
      return by_dl_then_program(a, b);
    });
    outcome.kind = MutationOutcome::Kind::solved;
    outcome.programs = std::move(solved);
  } else if (!roots.empty()) {
    std::vector<std::size_t> order(roots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return by_dl_then_program(roots[a], roots[b]); });
    outcome.kind = MutationOutcome::Kind::new_roots;
    for (auto i : order) {
      outcome.programs.push_back(std::move(roots[i]));
      outcome.finals.push_back(std::move(root_finals[i]));
    }
  } else if (!same.empty()) {
    std::sort(same.begin(), same.end(), by_dl_then_program);
    outcome.kind = MutationOutcome::Kind::enqueue;
    outcome.programs = std::move(same);
  }
  return outcome;
}

InductionResult induce(const Concept& cpt, const TransitionModel& model,
                       const SearchConfig& config, const SearchHooks* hooks) {
  const long total = std::max<long>(1, config.n_progs);
  const bool retry = config.order_retry && config.mode == SearchMode::factorized;
  const int attempts = retry ? 3 : 1;

  InductionResult merged;
  std::optional<RootInfo> deepest;
  std::vector<std::vector<std::uint64_t>> banned;
  long spent = 0;
  int phase = 0;
  for (int a = 0; a < attempts; ++a) {
    if (a > 0) ++phase;
    long share = total - spent;
    if (a + 1 < attempts) share = share / 2;
    if (share <= 0) break;
    Evaluator ev(cpt, config.match_mode, share, hooks, config.parallel_workers,
                 config.seen_memory_cap);
    Induction run(cpt, model, config, hooks, ev, a, banned, phase);
    AttemptResult r = run.run();
    spent += r.result.visited;

    merged.status = r.result.status;
    merged.program = r.result.program;
    merged.dl = r.result.dl;
    merged.mutation_rounds += r.result.mutation_rounds;
    for (auto& h : r.result.subgoal_history) merged.subgoal_history.push_back(std::move(h));
    for (auto& l : r.result.log) merged.log.push_back(std::move(l));
    if (r.deepest && (!deepest || total_matched(r.deepest->matched) > total_matched(deepest->matched)))
      deepest = std::move(r.deepest);
    if (merged.status == Status::solved) break;
    if (!r.first_signature) break;  // no sub-goal was reached; reordering cannot help
    banned.push_back(*r.first_signature);
  }
  merged.visited = spent;
  merged.best_partial = partial_from(deepest, cpt, config.match_mode);
  return merged;
}

InductionResult induce_naive(const Concept& cpt, const TransitionModel& model,
                             SearchConfig config, const SearchHooks* hooks) {
  config.mode = SearchMode::naive;
  config.mutation_enabled = false;
  config.order_retry = false;
  return induce(cpt, model, config, hooks);
}

}  // namespace cogscript
