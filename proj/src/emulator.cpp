#include "cogscript/emulator.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace cogscript {

namespace {

struct Fault {
  std::string message;
};

bool adjacent(GridPos a, GridPos b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1;
}

int sign(int v) { return (v > 0) - (v < 0); }

bool occupied_by_other(const VmState& s, GridPos p) {
  const auto* o = s.working.at(p);
  return o && (!s.held || o->id != *s.held);
}

void carry_to(VmState& s, GridPos p) {
  s.hand = p;
  if (s.held) s.working.find(*s.held)->pos = p;
}

// Slides the held object toward `target` along the x-then-y path. With
// `stop_adjacent` the slide ends at the first cell 4-adjacent to the target;
// otherwise it ends on the target. Occupied cells block the slide.
void slide_toward(VmState& s, GridPos target, bool stop_adjacent) {
  GridPos pos = s.hand;
  while (true) {
    if (stop_adjacent ? adjacent(pos, target) : pos == target) break;
    GridPos next = pos;
    if (pos.x != target.x)
      next.x += sign(target.x - pos.x);
    else if (pos.y != target.y)
      next.y += sign(target.y - pos.y);
    else
      break;
    if (!s.working.in_bounds(next) || occupied_by_other(s, next)) break;
    pos = next;
  }
  carry_to(s, pos);
}

void move_direction(VmState& s, int dx, int dy) {
  if (!s.held) {
    GridPos p = s.hand;
    if (dx < 0) p.x = 0;
    if (dx > 0) p.x = s.working.width - 1;
    if (dy < 0) p.y = 0;
    if (dy > 0) p.y = s.working.height - 1;
    s.hand = p;
    return;
  }
  GridPos pos = s.hand;
  while (true) {
    GridPos next{pos.x + dx, pos.y + dy};
    if (!s.working.in_bounds(next) || occupied_by_other(s, next)) break;
    pos = next;
  }
  carry_to(s, pos);
}

const SceneObject& require_attended(const VmState& s) {
  const auto* o = s.attended_object();
  if (!o) throw Fault{"no attended object"};
  return *o;
}

void attend(VmState& s) {
  std::vector<const SceneObject*> pass;
  for (const auto& o : s.working.objects) {
    if (s.color_filter && o.color != *s.color_filter) continue;
    if (s.shape_filter && o.shape != *s.shape_filter) continue;
    pass.push_back(&o);
  }
  if (pass.empty()) throw Fault{"top_down_attend found no object"};
  auto dist2 = [&](GridPos p) {
    int dx = p.x - s.fixation.x, dy = p.y - s.fixation.y;
    return dx * dx + dy * dy;
  };
  std::sort(pass.begin(), pass.end(), [&](const auto* a, const auto* b) {
    int da = dist2(a->pos), db = dist2(b->pos);
    if (da != db) return da < db;
    if (a->pos.y != b->pos.y) return a->pos.y < b->pos.y;
    return a->pos.x < b->pos.x;
  });
  s.attended.clear();
  for (const auto* o : pass) s.attended.push_back(o->id);
  s.attended_index = 0;
}

// In-place transition. Throws Fault for an invalid transition.
Flow apply(VmState& s, const Instruction& inst, int program_index,
           int& jump_to) {
  if (inst.op == Opcode::scene_parse) {
    if (s.parsed || program_index != 0)
      throw Fault{"scene_parse is only legal as the first instruction"};
    s.parsed = true;
    s.hand = {s.working.width / 2, s.working.height / 2};
    s.fixation = s.hand;
    s.held.reset();
    s.fixation_history.clear();
    s.fixation_cursor = 0;
    s.color_filter.reset();
    s.shape_filter.reset();
    s.attended.clear();
    s.attended_index.reset();
    return Flow::next;
  }
  if (!s.parsed) throw Fault{"scene not parsed"};

  switch (inst.op) {
    case Opcode::scene_parse:
      break;
    case Opcode::set_color_attn:
      s.color_filter = inst.color_arg();
      break;
    case Opcode::set_shape_attn:
      s.shape_filter = inst.shape_arg();
      break;
    case Opcode::top_down_attend:
      attend(s);
      break;
    case Opcode::reset_attn:
      s.color_filter.reset();
      s.shape_filter.reset();
      s.attended.clear();
      s.attended_index.reset();
      break;
    case Opcode::next_object: {
      if (!s.attended_index) throw Fault{"next_object with nothing attended"};
      if (*s.attended_index + 1 < static_cast<int>(s.attended.size())) {
        ++*s.attended_index;
        break;
      }
      if (s.loop_stack.empty())
        throw Fault{"next_object exhausted outside a loop"};
      return Flow::loop_exhausted;
    }
    case Opcode::fixate_object: {
      const auto& o = require_attended(s);
      s.fixation = o.pos;
      s.fixation_history.push_back(o.pos);
      s.fixation_cursor = static_cast<int>(s.fixation_history.size()) - 1;
      break;
    }
    case Opcode::fixate_previous:
      if (s.fixation_history.empty() || s.fixation_cursor == 0)
        throw Fault{"no earlier fixation"};
      s.fixation = s.fixation_history[--s.fixation_cursor];
      break;
    case Opcode::fixate_next:
      if (s.fixation_cursor + 1 >= static_cast<int>(s.fixation_history.size()))
        throw Fault{"no later fixation"};
      s.fixation = s.fixation_history[++s.fixation_cursor];
      break;
    case Opcode::move_hand_to_attended_object: {
      const auto& o = require_attended(s);
      if (s.held && o.id == *s.held)
        throw Fault{"attended object is the held object"};
      if (!s.held)
        s.hand = o.pos;
      else
        slide_toward(s, o.pos, /*stop_adjacent=*/true);
      break;
    }
    case Opcode::move_hand_to_fixation:
      if (!s.held)
        s.hand = s.fixation;
      else
        slide_toward(s, s.fixation, occupied_by_other(s, s.fixation));
      break;
    case Opcode::move_hand_up:
      move_direction(s, 0, -1);
      break;
    case Opcode::move_hand_down:
      move_direction(s, 0, 1);
      break;
    case Opcode::move_hand_left:
      move_direction(s, -1, 0);
      break;
    case Opcode::move_hand_right:
      move_direction(s, 1, 0);
      break;
    case Opcode::grab_object: {
      if (s.held) throw Fault{"hand already holds an object"};
      const auto* o = s.working.at(s.hand);
      if (!o) throw Fault{"nothing under the hand"};
      s.held = o->id;
      break;
    }
    case Opcode::release_object:
      if (!s.held) throw Fault{"hand is empty"};
      s.held.reset();
      break;
    case Opcode::fill_color: {
      int id = require_attended(s).id;
      s.working.find(id)->color = inst.color_arg();
      break;
    }
    case Opcode::loop_start:
      s.loop_stack.push_back({program_index, 0});
      break;
    case Opcode::loop_end: {
      if (s.loop_stack.empty()) throw Fault{"loop_end without open loop"};
      auto& top = s.loop_stack.back();
      ++top.iterations;
      if (top.iterations > static_cast<int>(s.working.objects.size()) + 1) {
        s.loop_stack.pop_back();
        break;
      }
      jump_to = top.start + 1;
      return Flow::jump;
    }
  }
  return Flow::next;
}

}  // namespace

const SceneObject* VmState::attended_object() const {
  if (!attended_index || *attended_index < 0 ||
      *attended_index >= static_cast<int>(attended.size()))
    return nullptr;
  return working.find(attended[*attended_index]);
}

VmState initial_state(const Scene& input) {
  VmState s;
  s.working = input;
  return s;
}

std::string state_violation(const VmState& s) {
  if (auto v = s.working.violation(); !v.empty()) return v;
  if (!s.parsed) return {};
  if (!s.working.in_bounds(s.hand)) return "hand out of bounds";
  if (!s.working.in_bounds(s.fixation)) return "fixation out of bounds";
  if (s.held) {
    const auto* o = s.working.find(*s.held);
    if (!o) return "held object missing";
    if (o->pos != s.hand) return "held object not under the hand";
  }
  for (int id : s.attended)
    if (!s.working.find(id)) return "attended object missing";
  if (s.attended_index && (*s.attended_index < 0 ||
                           *s.attended_index >= static_cast<int>(s.attended.size())))
    return "attended index out of range";
  if (s.fixation_cursor < 0 ||
      s.fixation_cursor > static_cast<int>(s.fixation_history.size()))
    return "fixation cursor out of range";
  for (const auto& f : s.loop_stack)
    if (f.iterations > static_cast<int>(s.working.objects.size()) + 1)
      return "loop iteration count above cap";
  return {};
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_transition: return "InvalidTransition";
    case ErrorKind::step_cap_exceeded: return "StepCapExceeded";
  }
  return "?";
}

std::variant<StepOutcome, ExecError> step(const VmState& state,
                                          const Instruction& inst,
                                          int program_index) {
  StepOutcome out{state};
  try {
    out.flow = apply(out.state, inst, program_index, out.jump_to);
  } catch (const Fault& f) {
    return ExecError{ErrorKind::invalid_transition, 0, program_index, f.message};
  }
  return out;
}

std::optional<int> matching_loop_end(const Program& program, int start) {
  int depth = 0;
  for (int j = start + 1; j < static_cast<int>(program.size()); ++j) {
    auto op = program[j].op;
    if (op == Opcode::loop_start) {
      ++depth;
    } else if (op == Opcode::loop_end) {
      if (depth == 0) return j;
      --depth;
    }
  }
  return std::nullopt;
}

ExecResult execute(const Program& program, const Scene& input,
                   const ExecOptions& options) {
  ExecResult result;
  result.final = initial_state(input);
  VmState& s = result.final;
  const int n = static_cast<int>(program.size());
  int pc = 0;
  while (pc < n) {
    if (result.steps >= kStepCap) {
      result.error = ExecError{ErrorKind::step_cap_exceeded, result.steps, pc,
                               "step cap exceeded"};
      return result;
    }
    const auto& inst = program[pc];
    int jump_to = -1;
    Flow flow;
    try {
      flow = apply(s, inst, pc, jump_to);
    } catch (const Fault& f) {
      result.error =
          ExecError{ErrorKind::invalid_transition, result.steps, pc, f.message};
      return result;
    }
    ++result.steps;
    if (options.check_invariants) {
      if (auto v = state_violation(s); !v.empty())
        throw std::logic_error("invariant violated at index " +
                               std::to_string(pc) + ": " + v);
    }
    if (options.record_trace) result.trace.push_back({pc, inst, s});

    switch (flow) {
      case Flow::next:
        ++pc;
        break;
      case Flow::jump:
        pc = jump_to;
        break;
      case Flow::loop_exhausted: {
        int start = s.loop_stack.back().start;
        s.loop_stack.pop_back();
        auto end = matching_loop_end(program, start);
        pc = end ? *end + 1 : n;
        break;
      }
    }
  }
  return result;
}

}  // namespace cogscript
