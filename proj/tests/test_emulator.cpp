#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

using O = Opcode;

// Unfiltered attention from the centre (5,5) visits 2, 0, 1, 3: object 2 is
// nearest, and 0 and 1 tie at distance 3 with 0 on the upper row.
Scene base() {
  return scene(10, 10, {obj(0, Shape::square, Color::red, 5, 2),
                        obj(1, Shape::circle, Color::blue, 2, 5),
                        obj(2, Shape::triangle, Color::green, 7, 7),
                        obj(3, Shape::star, Color::red, 0, 0)});
}

// A held object at the centre with a neighbour two cells away on each side.
Scene boxed() {
  return scene(10, 10, {obj(0, Shape::circle, Color::green, 5, 5),
                        obj(1, Shape::square, Color::blue, 5, 1),
                        obj(2, Shape::square, Color::blue, 5, 8),
                        obj(3, Shape::square, Color::blue, 1, 5),
                        obj(4, Shape::square, Color::blue, 8, 5)});
}

Program P(std::initializer_list<Instruction> rest) {
  Program p{{I(O::scene_parse)}};
  p.instructions.insert(p.instructions.end(), rest.begin(), rest.end());
  return p;
}

VmState ok(const Program& p, const Scene& s = base()) { return run_ok(p, s); }

ExecError fails(const Program& p, const Scene& s = base()) {
  auto r = execute(p, s, {.check_invariants = true});
  REQUIRE_FALSE(r.ok());
  return *r.error;
}

int attended(const VmState& s) {
  const auto* o = s.attended_object();
  return o ? o->id : -1;
}

}  // namespace

TEST_SUITE("emulator") {

TEST_CASE("scene_parse") {
  auto s = ok(P({}));
  CHECK(s.parsed);
  CHECK(s.hand == GridPos{5, 5});
  CHECK(s.fixation == GridPos{5, 5});
  CHECK(s.working == base());
  CHECK(s.fixation_history.empty());

  auto odd = ok(P({}), scene(7, 5, {obj(0, Shape::star, Color::red, 0, 0)}));
  CHECK(odd.hand == GridPos{3, 2});

  auto e = fails(make_program({I(O::scene_parse), I(O::scene_parse)}));
  CHECK(e.kind == ErrorKind::invalid_transition);
  CHECK(e.program_index == 1);
  CHECK(fails(make_program({I(O::top_down_attend)})).program_index == 0);
}

TEST_CASE("set_color_attn") {
  CHECK(attended(ok(P({I(O::set_color_attn, Color::red), I(O::top_down_attend)}))) == 0);
  CHECK(fails(P({I(O::set_color_attn, Color::yellow), I(O::top_down_attend)})).program_index ==
        2);
  CHECK(attended(ok(P({I(O::set_color_attn, Color::blue), I(O::set_color_attn, Color::green),
                       I(O::top_down_attend)}))) == 2);
  CHECK(attended(ok(P({I(O::set_color_attn, Color::red), I(O::set_shape_attn, Shape::star),
                       I(O::top_down_attend)}))) == 3);
}

TEST_CASE("set_shape_attn") {
  CHECK(attended(ok(P({I(O::set_shape_attn, Shape::circle), I(O::top_down_attend)}))) == 1);
  CHECK(attended(ok(P({I(O::set_shape_attn, Shape::star), I(O::top_down_attend)}))) == 3);
  fails(P({I(O::set_shape_attn, Shape::square), I(O::set_color_attn, Color::blue),
           I(O::top_down_attend)}));
}

TEST_CASE("top_down_attend") {
  auto s = ok(P({I(O::top_down_attend)}));
  CHECK(s.attended == std::vector<int>{2, 0, 1, 3});
  CHECK(s.attended_index == 0);

  // Same distance and row: the smaller x comes first.
  auto row = ok(P({I(O::top_down_attend)}), scene(10, 10, {obj(0, Shape::star, Color::red, 6, 5),
                                                          obj(1, Shape::star, Color::red, 4, 5)}));
  CHECK(row.attended == std::vector<int>{1, 0});

  // Distances are measured from the current fixation.
  auto moved = ok(P({I(O::set_shape_attn, Shape::star), I(O::top_down_attend),
                     I(O::fixate_object), I(O::reset_attn), I(O::top_down_attend)}));
  CHECK(moved.attended == std::vector<int>{3, 0, 1, 2});

  // The held object stays attendable.
  auto held = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                    I(O::grab_object), I(O::top_down_attend)}));
  CHECK(held.held == 2);
  CHECK(attended(held) == 2);
}

TEST_CASE("reset_attn") {
  CHECK(attended(ok(P({I(O::set_color_attn, Color::yellow), I(O::reset_attn),
                       I(O::top_down_attend)}))) == 2);
  CHECK(fails(P({I(O::top_down_attend), I(O::reset_attn), I(O::fill_color, Color::red)}))
            .program_index == 3);
  auto s = ok(P({I(O::set_shape_attn, Shape::star), I(O::top_down_attend), I(O::fixate_object),
                 I(O::reset_attn), I(O::top_down_attend)}));
  CHECK(s.fixation == GridPos{0, 0});
  CHECK_FALSE(s.shape_filter);
  CHECK(attended(s) == 3);
}

TEST_CASE("next_object") {
  CHECK(attended(ok(P({I(O::top_down_attend), I(O::next_object)}))) == 0);
  auto last = ok(P({I(O::top_down_attend), I(O::next_object), I(O::next_object),
                    I(O::next_object)}));
  CHECK(attended(last) == 3);
  CHECK(fails(P({I(O::top_down_attend), I(O::next_object), I(O::next_object), I(O::next_object),
                 I(O::next_object)}))
            .program_index == 5);
  fails(P({I(O::next_object)}));

  // Running out inside a loop leaves it past its loop_end.
  auto r = execute(P({I(O::set_color_attn, Color::red), I(O::top_down_attend), I(O::loop_start),
                      I(O::fill_color, Color::yellow), I(O::next_object), I(O::loop_end),
                      I(O::reset_attn)}),
                   base(), {.record_trace = true});
  REQUIRE(r.ok());
  CHECK(r.final.working.find(0)->color == Color::yellow);
  CHECK(r.final.working.find(3)->color == Color::yellow);
  CHECK(r.final.working.find(1)->color == Color::blue);
  CHECK(r.final.loop_stack.empty());
  CHECK(r.trace.back().instruction == I(O::reset_attn));
  CHECK(r.steps == 10);
}

TEST_CASE("fixate_object") {
  auto s = ok(P({I(O::top_down_attend), I(O::fixate_object)}));
  CHECK(s.fixation == GridPos{7, 7});
  CHECK(s.fixation_history == std::vector<GridPos>{{7, 7}});
  CHECK(s.fixation_cursor == 0);
  fails(P({I(O::fixate_object)}));
  auto two = ok(P({I(O::top_down_attend), I(O::fixate_object), I(O::next_object),
                   I(O::fixate_object)}));
  CHECK(two.fixation_history == std::vector<GridPos>{{7, 7}, {5, 2}});
  CHECK(two.fixation_cursor == 1);
  CHECK(two.fixation == GridPos{5, 2});
}

TEST_CASE("fixate_previous") {
  auto s = ok(P({I(O::top_down_attend), I(O::fixate_object), I(O::next_object),
                 I(O::fixate_object), I(O::fixate_previous)}));
  CHECK(s.fixation == GridPos{7, 7});
  CHECK(s.fixation_cursor == 0);
  fails(P({I(O::top_down_attend), I(O::fixate_object), I(O::fixate_previous)}));
  fails(P({I(O::fixate_previous)}));
}

TEST_CASE("fixate_next") {
  auto s = ok(P({I(O::top_down_attend), I(O::fixate_object), I(O::next_object),
                 I(O::fixate_object), I(O::fixate_previous), I(O::fixate_next)}));
  CHECK(s.fixation == GridPos{5, 2});
  CHECK(s.fixation_cursor == 1);
  fails(P({I(O::top_down_attend), I(O::fixate_object), I(O::fixate_next)}));
  fails(P({I(O::fixate_next)}));
}

TEST_CASE("move_hand_to_attended_object") {
  auto free = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object)}));
  CHECK(free.hand == GridPos{7, 7});
  CHECK_FALSE(free.held);

  // Carrying: along x first, then y, stopping next to the target.
  auto carry = ok(P({I(O::set_shape_attn, Shape::star), I(O::top_down_attend),
                     I(O::move_hand_to_attended_object), I(O::grab_object), I(O::reset_attn),
                     I(O::top_down_attend), I(O::move_hand_to_attended_object)}));
  CHECK(pos_of(carry, 3) == GridPos{7, 6});
  CHECK(carry.hand == GridPos{7, 6});

  fails(P({I(O::top_down_attend), I(O::move_hand_to_attended_object), I(O::grab_object),
           I(O::move_hand_to_attended_object)}));

  // An object in the way ends the slide early.
  Scene lane = scene(10, 10, {obj(0, Shape::star, Color::red, 0, 5),
                              obj(1, Shape::square, Color::blue, 3, 5),
                              obj(2, Shape::circle, Color::green, 6, 5)});
  auto blocked = ok(P({I(O::set_shape_attn, Shape::star), I(O::top_down_attend),
                       I(O::move_hand_to_attended_object), I(O::grab_object), I(O::reset_attn),
                       I(O::set_shape_attn, Shape::circle), I(O::top_down_attend),
                       I(O::move_hand_to_attended_object)}),
                    lane);
  CHECK(pos_of(blocked, 0) == GridPos{2, 5});
}

TEST_CASE("move_hand_to_fixation") {
  auto empty = ok(P({I(O::set_shape_attn, Shape::star), I(O::top_down_attend),
                     I(O::fixate_object), I(O::move_hand_to_fixation)}));
  CHECK(empty.hand == GridPos{0, 0});
  CHECK_FALSE(empty.held);

  auto enter = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                     I(O::grab_object), I(O::move_hand_to_fixation)}));
  CHECK(pos_of(enter, 2) == GridPos{5, 5});

  // Attention now starts from the circle, so the filter picks the triangle.
  auto beside = ok(P({I(O::set_shape_attn, Shape::circle), I(O::top_down_attend),
                      I(O::fixate_object), I(O::reset_attn),
                      I(O::set_color_attn, Color::green), I(O::top_down_attend),
                      I(O::move_hand_to_attended_object), I(O::grab_object),
                      I(O::move_hand_to_fixation)}));
  CHECK(pos_of(beside, 2) == GridPos{2, 6});
}

TEST_CASE("move_hand_up") {
  CHECK(ok(P({I(O::move_hand_up)})).hand == GridPos{5, 0});
  auto held = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                    I(O::grab_object), I(O::move_hand_up)}));
  CHECK(pos_of(held, 2) == GridPos{7, 0});
  auto blocked = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                       I(O::grab_object), I(O::move_hand_up)}),
                    boxed());
  CHECK(pos_of(blocked, 0) == GridPos{5, 2});
}

TEST_CASE("move_hand_down") {
  CHECK(ok(P({I(O::move_hand_down)})).hand == GridPos{5, 9});
  auto held = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                    I(O::grab_object), I(O::move_hand_down)}));
  CHECK(pos_of(held, 2) == GridPos{7, 9});
  auto blocked = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                       I(O::grab_object), I(O::move_hand_down)}),
                    boxed());
  CHECK(pos_of(blocked, 0) == GridPos{5, 7});
}

TEST_CASE("move_hand_left") {
  CHECK(ok(P({I(O::move_hand_left)})).hand == GridPos{0, 5});
  auto held = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                    I(O::grab_object), I(O::move_hand_left)}));
  CHECK(pos_of(held, 2) == GridPos{0, 7});
  auto blocked = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                       I(O::grab_object), I(O::move_hand_left)}),
                    boxed());
  CHECK(pos_of(blocked, 0) == GridPos{2, 5});
}

TEST_CASE("move_hand_right") {
  CHECK(ok(P({I(O::move_hand_right)})).hand == GridPos{9, 5});
  auto held = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                    I(O::grab_object), I(O::move_hand_right)}));
  CHECK(pos_of(held, 2) == GridPos{9, 7});
  auto blocked = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                       I(O::grab_object), I(O::move_hand_right)}),
                    boxed());
  CHECK(pos_of(blocked, 0) == GridPos{7, 5});
}

TEST_CASE("grab_object") {
  auto s = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object), I(O::grab_object)}));
  CHECK(s.held == 2);
  fails(P({I(O::grab_object)}));
  fails(P({I(O::top_down_attend), I(O::move_hand_to_attended_object), I(O::grab_object),
           I(O::grab_object)}));
}

TEST_CASE("release_object") {
  auto s = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object), I(O::grab_object),
                 I(O::move_hand_up), I(O::release_object)}));
  CHECK_FALSE(s.held);
  CHECK(pos_of(s, 2) == GridPos{7, 0});
  fails(P({I(O::release_object)}));
  auto again = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                     I(O::grab_object), I(O::release_object), I(O::grab_object)}));
  CHECK(again.held == 2);
}

TEST_CASE("fill_color") {
  auto s = ok(P({I(O::top_down_attend), I(O::fill_color, Color::blue)}));
  CHECK(s.working.find(2)->color == Color::blue);
  for (int id : {0, 1, 3}) CHECK(*s.working.find(id) == *base().find(id));
  fails(P({I(O::fill_color, Color::blue)}));
  auto held = ok(P({I(O::top_down_attend), I(O::move_hand_to_attended_object),
                    I(O::grab_object), I(O::fill_color, Color::yellow)}));
  CHECK(held.working.find(2)->color == Color::yellow);
}

TEST_CASE("loop_start and loop_end") {
  auto all = ok(P({I(O::top_down_attend), I(O::loop_start), I(O::fill_color, Color::yellow),
                   I(O::next_object), I(O::loop_end)}));
  for (const auto& o : all.working.objects) CHECK(o.color == Color::yellow);

  fails(P({I(O::loop_end)}));

  // Without next_object the loop runs until its count passes n + 1 = 5,
  // so the body runs six times: 3 + 6 * 2 steps.
  auto r = execute(P({I(O::top_down_attend), I(O::loop_start), I(O::fill_color, Color::red),
                      I(O::loop_end)}),
                   base());
  REQUIRE(r.ok());
  CHECK(r.steps == 15);
  CHECK(r.final.loop_stack.empty());

  auto open = ok(P({I(O::loop_start), I(O::top_down_attend)}));
  CHECK(open.loop_stack.size() == 1);
}

TEST_CASE("matching_loop_end skips nested loops") {
  auto p = P({I(O::loop_start), I(O::loop_start), I(O::loop_end), I(O::loop_end)});
  CHECK(matching_loop_end(p, 1) == 4);
  CHECK(matching_loop_end(p, 2) == 3);
  CHECK_FALSE(matching_loop_end(P({I(O::loop_start)}), 1));
}

TEST_CASE("step cap") {
  // Four nested loops over four objects run 6^4 inner iterations.
  auto p = P({I(O::loop_start), I(O::loop_start), I(O::loop_start), I(O::loop_start),
              I(O::loop_end), I(O::loop_end), I(O::loop_end), I(O::loop_end)});
  auto r = execute(p, base());
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->kind == ErrorKind::step_cap_exceeded);
  CHECK(r.steps == kStepCap);
  CHECK(to_string(r.error->kind) == "StepCapExceeded");
}

TEST_CASE("step reports errors without touching the input state") {
  auto s0 = initial_state(base());
  auto parsed = step(s0, I(O::scene_parse), 0);
  REQUIRE(std::holds_alternative<StepOutcome>(parsed));
  CHECK(std::get<StepOutcome>(parsed).state.parsed);
  CHECK_FALSE(s0.parsed);
  auto bad = step(std::get<StepOutcome>(parsed).state, I(O::grab_object), 1);
  REQUIRE(std::holds_alternative<ExecError>(bad));
  CHECK(std::get<ExecError>(bad).program_index == 1);
}

TEST_CASE("invariants hold on 10000 random programs") {
  std::mt19937_64 rng(20240601);
  int errored = 0;
  for (int i = 0; i < 10000; ++i) {
    Scene in = random_scene(rng, 10, 10, 1 + static_cast<int>(rng() % 6));
    Program p = random_program(rng, 2 + static_cast<int>(rng() % 13));
    REQUIRE(p.violation().empty());
    // check_invariants throws on any intermediate violation.
    ExecResult r;
    REQUIRE_NOTHROW(r = execute(p, in, {.check_invariants = true}));
    errored += !r.ok();
    const Scene& out = r.final.working;
    REQUIRE(out.objects.size() == in.objects.size());
    for (const auto& o : in.objects) {
      const auto* f = out.find(o.id);
      REQUIRE(f);
      CHECK(f->shape == o.shape);
      CHECK(out.in_bounds(f->pos));
    }
    CHECK(out.violation().empty());
    CHECK(r.steps <= kStepCap);
    if (r.final.held) CHECK(out.find(*r.final.held)->pos == r.final.hand);
  }
  // Sanity: the sample contains both clean and failing runs.
  CHECK(errored > 0);
  CHECK(errored < 10000);
}

TEST_CASE("prefix consistency on 1000 random programs") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 1000; ++i) {
    Scene in = random_scene(rng, 10, 10, 2 + static_cast<int>(rng() % 5));
    // Loop-free, so step k of the run is instruction k of the program.
    Program p{{I(O::scene_parse)}};
    const int len = 2 + static_cast<int>(rng() % 12);
    while (static_cast<int>(p.size()) < len) {
      auto v = variant(1 + static_cast<int>(rng() % (kVariantCount - 1)));
      if (v.op != O::loop_start && v.op != O::loop_end) p.instructions.push_back(v);
    }
    auto full = execute(p, in, {.record_trace = true});
    for (std::size_t k = 1; k <= p.size(); ++k) {
      Program prefix{{p.instructions.begin(), p.instructions.begin() + k}};
      auto r = execute(prefix, in);
      if (k <= full.trace.size()) {
        REQUIRE(r.ok());
        CHECK(r.final == full.trace[k - 1].state);
      } else {
        REQUIRE_FALSE(r.ok());
        CHECK(r.error->program_index == full.error->program_index);
        CHECK(r.error->message == full.error->message);
        break;
      }
    }
  }
}

TEST_CASE("single steps replay a traced run, loops included") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    Scene in = random_scene(rng, 8, 8, 1 + static_cast<int>(rng() % 5));
    Program p = random_program(rng, 2 + static_cast<int>(rng() % 10));
    auto r = execute(p, in, {.record_trace = true});
    VmState s = initial_state(in);
    for (const auto& t : r.trace) {
      auto out = step(s, t.instruction, t.program_index);
      REQUIRE(std::holds_alternative<StepOutcome>(out));
      auto& next = std::get<StepOutcome>(out).state;
      CHECK(next == t.state);
      // execute() pops an exhausted loop frame after recording the step.
      if (std::get<StepOutcome>(out).flow == Flow::loop_exhausted) next.loop_stack.pop_back();
      s = next;
    }
  }
}

}
