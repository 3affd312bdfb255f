#pragma once

#include <array>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cogscript/concept.hpp"
#include "cogscript/instruction.hpp"

namespace cogscript {

// Markov states: the start symbol followed by every instruction variant.
inline constexpr int kStartState = 0;
inline constexpr int kStateCount = kVariantCount + 1;

inline int state_of(const Instruction& inst) { return variant_index(inst) + 1; }
std::string state_name(int state);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Square boolean matrix over states: allowed[from][to].
class TransitionMask {
 public:
  /// Everything allowed except transitions into the start state.
  static TransitionMask all_allowed();
  /// Only start -> scene_parse allowed.
  static TransitionMask none_allowed();

  bool allowed(int from, int to) const { return cells_[from * kStateCount + to]; }
  void set(int from, int to, bool value) { cells_[from * kStateCount + to] = value; }

  /// Restricts both endpoints to the given variants; everything else masked.
  TransitionMask restricted_to(const std::vector<int>& variants) const;

  friend bool operator==(const TransitionMask&, const TransitionMask&) = default;

 private:
  std::array<bool, kStateCount * kStateCount> cells_{};
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransitionModel {
 public:
  TransitionModel() = default;
  TransitionModel(std::vector<double> probs, TransitionMask mask);

  double prob(int from, int to) const { return probs_[from * kStateCount + to]; }
  const TransitionMask& mask() const { return mask_; }
  const std::vector<double>& table() const { return probs_; }

  /// Empty when each reachable row sums to 1 over allowed cells and every
  /// masked cell is exactly 0.
  std::string violation(double tol = 1e-9) const;

 private:
  std::vector<double> probs_ = std::vector<double>(kStateCount * kStateCount, 0.0);
  TransitionMask mask_ = TransitionMask::none_allowed();
};

/// Counts transitions (start -> first instruction included), adds alpha to
/// every allowed cell, and normalizes each row. Rows unreachable under the
/// mask may be all-masked; a reachable all-masked row is an error.
TransitionModel train(const std::vector<Program>& programs, double alpha,
                      const TransitionMask& mask);

/// Per-concept argument distributions standing in for a learned argument
/// predictor.
class ArgumentPrior {
 public:
  /// Uniform over both palettes.
  ArgumentPrior();
  ArgumentPrior(std::array<double, kColorCount> colors,
                std::array<double, kShapeCount> shapes);

  double color(Color c) const { return colors_[static_cast<int>(c)]; }
  double shape(Shape s) const { return shapes_[static_cast<int>(s)]; }
  /// Probability of the instruction's argument; 1 for opcodes without one.
  double factor(const Instruction& inst) const;

  const std::array<double, kColorCount>& colors() const { return colors_; }
  const std::array<double, kShapeCount>& shapes() const { return shapes_; }

 private:
  std::array<double, kColorCount> colors_{};
  std::array<double, kShapeCount> shapes_{};
};

struct ArgumentPriorOptions {
  double epsilon = 0.01;
  /// Arguments the predictor misses: dropped from the diff support as if the
  /// predictor had assigned them no mass.
  std::set<Color> suppressed_colors;
  std::set<Shape> suppressed_shapes;
};

/// Mass spread uniformly over colors/shapes carried (before or after) by
/// objects that change in some example; other entries get epsilon, then the
/// distribution is renormalized. No changing object gives a uniform prior.
ArgumentPrior argument_prior(const Concept& cpt,
                             const ArgumentPriorOptions& options = {});

/// P(next | prev) times the argument probability of `next`.
inline double transition_factor(const TransitionModel& model,
                                const ArgumentPrior& prior, int prev_state,
                                const Instruction& next) {
  return model.prob(prev_state, state_of(next)) * prior.factor(next);
}

/// Negative log-probability in nats; +infinity when any factor is 0.
double description_length(const Program& program, const TransitionModel& model,
                          const ArgumentPrior& prior);

// --- File formats -----------------------------------------------------------

/// One forbidden pair per line: `<from> -> <to>`. Tokens are `<start>`, an
/// opcode name (covers every argument variant) or a variant like
/// `fill_color(red)`. '#' starts a comment.
TransitionMask parse_mask(std::string_view text);
std::string format_mask(const TransitionMask& mask);

/// JSON document with the states list, row-major probability table and mask.
std::string format_model(const TransitionModel& model);
TransitionModel parse_model(std::string_view text);

}  // namespace cogscript
