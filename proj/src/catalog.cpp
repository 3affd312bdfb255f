#include "cogscript/catalog.hpp"

#include <stdexcept>

#include "cogscript/emulator.hpp"

namespace cogscript {

namespace {

struct Obj {
  Shape shape;
  Color color;
  int x, y;
};

Scene grid(std::initializer_list<Obj> objs) {
  Scene s;
  s.width = 10;
  s.height = 10;
  int id = 0;
  for (const auto& o : objs) s.objects.push_back({id++, o.shape, o.color, {o.x, o.y}});
  return s;
}

Program program(std::string_view text) { return parse_program(text); }

CatalogEntry entry(std::string name, std::string_view text, std::vector<Scene> inputs) {
  CatalogEntry e{std::move(name), {}, program(text)};
  e.definition.name = e.name;
  for (auto& in : inputs) {
    auto r = execute(e.ground_truth, in);
    if (!r.ok() || r.final.held)
      throw std::logic_error("catalog entry " + e.name + " does not run cleanly");
    e.definition.examples.push_back({std::move(in), std::move(r.final.working)});
  }
  return e;
}

using S = Shape;
using C = Color;

}  // namespace

std::vector<CatalogEntry> fixtures() {
  std::vector<CatalogEntry> out;

  // Green is carried next to the red object, which is then recolored yellow.
  // Recoloring first is far cheaper, but afterwards neither yellow nor the
  // distance rank singles out the former red object.
  out.push_back(entry("wrong_order", R"(scene_parse
set_color_attn(green)
top_down_attend
move_hand_to_attended_object
grab_object
reset_attn
set_color_attn(red)
top_down_attend
move_hand_to_attended_object
release_object
fill_color(yellow)
)",
                      {grid({{S::square, C::red, 3, 5},
                             {S::circle, C::green, 1, 8},
                             {S::square, C::blue, 5, 4},
                             {S::star, C::yellow, 6, 6}}),
                       grid({{S::circle, C::red, 5, 3},
                             {S::square, C::green, 8, 8},
                             {S::triangle, C::blue, 4, 6},
                             {S::circle, C::yellow, 7, 7}}),
                       grid({{S::triangle, C::red, 6, 7},
                             {S::star, C::green, 8, 1},
                             {S::triangle, C::blue, 2, 2},
                             {S::square, C::yellow, 4, 4}})}));

  // Two identical red squares: the central one goes to the upper left corner
  // and the other takes its old cell.
  out.push_back(entry("mistaken_identity", R"(scene_parse
top_down_attend
fixate_object
move_hand_to_attended_object
grab_object
move_hand_up
move_hand_left
release_object
next_object
top_down_attend
move_hand_to_attended_object
grab_object
move_hand_to_fixation
release_object
)",
                      {grid({{S::square, C::red, 5, 4},
                             {S::square, C::red, 5, 7},
                             {S::circle, C::blue, 2, 2}}),
                       grid({{S::square, C::red, 4, 5},
                             {S::square, C::red, 4, 8},
                             {S::triangle, C::green, 8, 1}}),
                       grid({{S::square, C::red, 6, 6},
                             {S::square, C::red, 3, 7},
                             {S::star, C::yellow, 1, 1}})}));

  // The star touches the circle. Every object is blue and the star's
  // distance rank differs per example, so only set_shape_attn(star) finds it.
  out.push_back(entry("faulty_argument", R"(scene_parse
set_shape_attn(star)
top_down_attend
move_hand_to_attended_object
grab_object
reset_attn
set_shape_attn(circle)
top_down_attend
move_hand_to_attended_object
release_object
)",
                      {grid({{S::star, C::blue, 2, 2},
                             {S::circle, C::blue, 7, 7},
                             {S::square, C::blue, 5, 6},
                             {S::triangle, C::blue, 4, 4}}),
                       grid({{S::star, C::blue, 5, 6},
                             {S::circle, C::blue, 1, 1},
                             {S::square, C::blue, 8, 3},
                             {S::triangle, C::blue, 3, 8}}),
                       grid({{S::star, C::blue, 8, 5},
                             {S::circle, C::blue, 2, 8},
                             {S::square, C::blue, 6, 6},
                             {S::triangle, C::blue, 3, 3}})}));

  // Nothing is in place until the fifteenth instruction.
  out.push_back(entry("swap_locations", R"(scene_parse
top_down_attend
move_hand_to_attended_object
grab_object
fixate_object
move_hand_down
release_object
next_object
top_down_attend
move_hand_to_attended_object
grab_object
fixate_object
fixate_previous
move_hand_to_fixation
release_object
reset_attn
top_down_attend
next_object
move_hand_to_attended_object
grab_object
fixate_next
move_hand_to_fixation
release_object
)",
                      {grid({{S::square, C::red, 5, 4}, {S::circle, C::blue, 7, 6}}),
                       grid({{S::triangle, C::green, 4, 5}, {S::star, C::yellow, 2, 2}}),
                       grid({{S::square, C::blue, 6, 5}, {S::circle, C::red, 8, 3}})}));

  // Blue leaves to the left; red moves into the cell blue vacated.
  out.push_back(entry("replace_previous_location", R"(scene_parse
set_color_attn(blue)
top_down_attend
fixate_object
move_hand_to_attended_object
grab_object
move_hand_left
release_object
reset_attn
set_color_attn(red)
top_down_attend
move_hand_to_attended_object
grab_object
move_hand_to_fixation
release_object
)",
                      {grid({{S::square, C::blue, 5, 5}, {S::circle, C::red, 8, 8}}),
                       grid({{S::triangle, C::blue, 3, 6},
                             {S::square, C::red, 7, 2},
                             {S::circle, C::green, 1, 1}}),
                       grid({{S::star, C::blue, 6, 3},
                             {S::triangle, C::red, 2, 8},
                             {S::square, C::yellow, 0, 3}})}));

  // Two, three and four red objects dropped into a stack.
  out.push_back(entry("stack_red", R"(scene_parse
set_color_attn(red)
top_down_attend
loop_start
move_hand_to_attended_object
grab_object
move_hand_down
release_object
next_object
loop_end
)",
                      {grid({{S::square, C::red, 3, 1},
                             {S::circle, C::red, 3, 3},
                             {S::circle, C::blue, 7, 7}}),
                       grid({{S::triangle, C::red, 6, 0},
                             {S::square, C::red, 6, 2},
                             {S::star, C::red, 6, 4},
                             {S::square, C::green, 2, 6}}),
                       grid({{S::circle, C::red, 1, 0},
                             {S::square, C::red, 1, 1},
                             {S::star, C::red, 1, 3},
                             {S::triangle, C::red, 1, 4},
                             {S::triangle, C::blue, 8, 2}})}));
  return out;
}

CatalogEntry fixture(std::string_view name) {
  for (auto& e : fixtures())
    if (e.name == name) return e;
  throw std::out_of_range("no fixture named " + std::string(name));
}

std::vector<ConceptTemplate> training_templates() {
  std::vector<ConceptTemplate> out;
  auto recolor = [&](std::string filter, int rank, std::uint64_t seed) {
    ConceptTemplate t;
    t.kind = TemplateKind::recolor_by_color;
    t.filter = std::move(filter);
    t.rank = rank;
    t.seed = seed;
    out.push_back(t);
  };
  auto edge = [&](std::uint64_t seed) {
    ConceptTemplate t;
    t.kind = TemplateKind::move_to_corner;
    t.filter = "none";
    t.directions = 1;
    t.seed = seed;
    out.push_back(t);
  };
  // Distinct seeds keep the generated concept names distinct.
  for (std::uint64_t s = 1; s <= 4; ++s) recolor("color", 0, s);
  recolor("shape", 0, 5);
  recolor("shape", 0, 6);
  recolor("both", 0, 7);
  recolor("none", 0, 8);
  recolor("none", 0, 9);
  recolor("none", 1, 10);
  recolor("color", 1, 11);
  recolor("none", 2, 12);
  for (std::uint64_t s = 1; s <= 4; ++s) edge(s);
  for (std::uint64_t s = 1; s <= 2; ++s) {
    ConceptTemplate t;
    t.kind = TemplateKind::move_and_replace;
    t.seed = s;
    out.push_back(t);
  }
  return out;
}

std::vector<Program> training_programs() {
  std::vector<Program> out;
  for (const auto& t : training_templates()) out.push_back(generate(t).ground_truth);
  return out;
}

std::vector<ConceptTemplate> mask_templates() {
  std::vector<ConceptTemplate> out;
  for (int kind = 0; kind <= static_cast<int>(TemplateKind::k_independent_moves); ++kind) {
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
      ConceptTemplate t;
      t.kind = TemplateKind(kind);
      t.seed = seed;
      if (t.kind == TemplateKind::k_independent_moves) t.k = 2 + static_cast<int>(seed % 2);
      if (t.kind == TemplateKind::move_to_corner) t.directions = 1 + static_cast<int>(seed % 2);
      out.push_back(t);
    }
  }
  return out;
}

TransitionMask build_dependency_mask() {
  bool ops[kOpcodeCount + 1][kOpcodeCount + 1] = {};  // row/column 0 is <start>
  auto note = [&](int from, int to) { ops[from][to] = true; };
  auto add = [&](const Program& p, const Concept& c) {
    if (p.empty()) return;
    note(0, static_cast<int>(p[0].op) + 1);
    for (std::size_t i = 1; i < p.size(); ++i)
      note(static_cast<int>(p[i - 1].op) + 1, static_cast<int>(p[i].op) + 1);
    for (const auto& ex : c.examples) {
      auto r = execute(p, ex.input, {.record_trace = true});
      for (std::size_t i = 1; i < r.trace.size(); ++i)
        note(static_cast<int>(r.trace[i - 1].instruction.op) + 1,
             static_cast<int>(r.trace[i].instruction.op) + 1);
    }
  };
  for (const auto& e : fixtures()) add(e.ground_truth, e.definition);
  for (const auto& t : training_templates()) {
    auto g = generate(t);
    add(g.ground_truth, g.definition);
  }
  for (const auto& t : mask_templates()) {
    auto g = generate(t);
    add(g.ground_truth, g.definition);
  }

  TransitionMask mask = TransitionMask::none_allowed();
  auto op_of = [](int state) {
    return state == kStartState ? 0 : static_cast<int>(variant(state - 1).op) + 1;
  };
  for (int from = 0; from < kStateCount; ++from)
    for (int to = 1; to < kStateCount; ++to) mask.set(from, to, ops[op_of(from)][op_of(to)]);
  return mask;
}

TransitionModel build_default_model(const TransitionMask& mask) {
  return train(training_programs(), kDefaultAlpha, mask);
}

std::vector<ConceptTemplate> ablation_templates(int n) {
  std::vector<ConceptTemplate> out;
  for (int i = 0; i < n; ++i) {
    ConceptTemplate t;
    t.kind = TemplateKind::k_independent_moves;
    t.k = 2 + i % 2;
    t.seed = 100 + static_cast<std::uint64_t>(i);
    t.min_objects = t.k;
    t.max_objects = t.k + 1;
    t.min_length = 10;
    t.max_length = 18;
    out.push_back(t);
  }
  return out;
}

std::vector<ConceptTemplate> stack_templates(int n) {
  static const std::vector<std::vector<int>> counts = {{2, 3, 4}, {3, 2, 4}, {4, 2, 3}, {2, 4, 3}};
  std::vector<ConceptTemplate> out;
  for (int i = 0; i < n; ++i) {
    ConceptTemplate t;
    t.kind = TemplateKind::stack_variable;
    t.seed = 200 + static_cast<std::uint64_t>(i);
    t.counts = counts[i % counts.size()];
    t.min_objects = 1;
    t.max_objects = 6;
    out.push_back(t);
  }
  return out;
}

}  // namespace cogscript
