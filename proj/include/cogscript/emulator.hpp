#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cogscript/instruction.hpp"
#include "cogscript/world.hpp"

namespace cogscript {

inline constexpr int kStepCap = 1000;

struct LoopFrame {
  int start = 0;  // program index of the loop_start
  int iterations = 0;

  friend bool operator==(const LoopFrame&, const LoopFrame&) = default;
};

struct VmState {
  Scene working;
  GridPos hand;
  std::optional<int> held;
  GridPos fixation;
  std::vector<GridPos> fixation_history;
  int fixation_cursor = 0;  // index of the current history entry
  std::optional<Color> color_filter;
  std::optional<Shape> shape_filter;
  std::vector<int> attended;
  std::optional<int> attended_index;
  std::vector<LoopFrame> loop_stack;
  bool parsed = false;

  /// Object under attention, or nullptr.
  const SceneObject* attended_object() const;

  friend bool operator==(const VmState&, const VmState&) = default;
};

/// Pre-parse state for an example input; scene_parse finishes initialization.
VmState initial_state(const Scene& input);

/// Empty when the state satisfies every VmState and Scene invariant.
std::string state_violation(const VmState& state);

enum class ErrorKind { invalid_transition, step_cap_exceeded };

std::string_view to_string(ErrorKind kind);

struct ExecError {
  ErrorKind kind = ErrorKind::invalid_transition;
  int at_step = 0;        // 0-based count of steps executed before the error
  int program_index = 0;  // instruction that failed
  std::string message;
};

enum class Flow { next, jump, loop_exhausted };

struct StepOutcome {
  VmState state;
  Flow flow = Flow::next;
  int jump_to = -1;  // for Flow::jump
};

/// Applies one instruction to a copy of `state`. Control flow for loops is
/// reported through StepOutcome::flow; execute() resolves it.
std::variant<StepOutcome, ExecError> step(const VmState& state,
                                          const Instruction& inst,
                                          int program_index);

struct TraceStep {
  int program_index = 0;
  Instruction instruction;
  VmState state;  // after the instruction
};

struct ExecOptions {
  bool record_trace = false;
  bool check_invariants = false;  // throws std::logic_error on violation
};

struct ExecResult {
  std::optional<ExecError> error;
  VmState final;
  std::vector<TraceStep> trace;
  int steps = 0;

  bool ok() const { return !error.has_value(); }
};

ExecResult execute(const Program& program, const Scene& input,
                   const ExecOptions& options = {});

/// Index of the loop_end closing the loop_start at `start`, if any.
std::optional<int> matching_loop_end(const Program& program, int start);

}  // namespace cogscript
