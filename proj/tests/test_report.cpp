#include <cstdlib>
#include <fstream>

#include "cogscript/catalog.hpp"
#include "cogscript/render.hpp"
#include "cogscript/report.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

using O = Opcode;

// Set COGSCRIPT_UPDATE_GOLDEN=1 to rewrite the files after an intended change.
void check_golden(const std::string& name, const std::string& actual) {
  const auto path = source_dir() / "tests" / "golden" / name;
  if (std::getenv("COGSCRIPT_UPDATE_GOLDEN")) {
    write_file(path, actual);
    return;
  }
  REQUIRE(std::filesystem::exists(path));
  CHECK(read_file(path) == actual);
}

Scene small() {
  return scene(5, 4, {obj(0, Shape::square, Color::red, 1, 1), obj(1, Shape::star, Color::blue, 3, 2)});
}

std::string trace_of(const Program& p, const Scene& s) {
  return render_trace(p, execute(p, s, {.record_trace = true}));
}

const TransitionModel& default_model() {
  static const TransitionModel m = build_default_model(build_dependency_mask());
  return m;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("trace of a bare parse") {
  check_golden("trace_scene_parse.txt", trace_of(make_program({I(O::scene_parse)}), small()));
}

TEST_CASE("trace of the mistaken-identity opening") {
  auto e = fixture("mistaken_identity");
  Program prefix{{e.ground_truth.instructions.begin(), e.ground_truth.instructions.begin() + 8}};
  check_golden("trace_mistaken_identity_prefix.txt",
               trace_of(prefix, e.definition.examples[0].input));
}

TEST_CASE("trace of a failing program names the error") {
  auto text = trace_of(make_program({I(O::scene_parse), I(O::top_down_attend), I(O::grab_object)}),
                       small());
  CHECK(text.find("InvalidTransition") != std::string::npos);
  CHECK(text.find("grab_object") != std::string::npos);
  check_golden("trace_invalid.txt", text);
}

TEST_CASE("state rendering marks attention and fixation") {
  auto st = run_ok(make_program({I(O::scene_parse), I(O::top_down_attend), I(O::fixate_object)}),
                   small());
  auto text = render_state(st);
  CHECK(text.find("Rb*") != std::string::npos);
  CHECK(text.find("sr ") != std::string::npos);
  CHECK(text.find("attended=1") != std::string::npos);
  check_golden("state_fixated.svg", render_svg(st));
}

TEST_CASE("solve report and search log") {
  auto e = fixture("stack_red");
  SearchConfig cfg;
  cfg.n_progs = 4000;
  auto r = induce(e.definition, default_model(), cfg);
  auto report = format_solve_report(e.definition, cfg, r);
  CHECK(report == format_solve_report(e.definition, cfg, induce(e.definition, default_model(), cfg)));
  check_golden("solve_stack_red.txt", report);
  check_golden("search_log_stack_red.jsonl", format_search_log(r));
}

TEST_CASE("unsolved report shows the best partial solution") {
  auto e = fixture("wrong_order");
  SearchConfig cfg;
  cfg.n_progs = 4000;
  auto r = induce(e.definition, default_model(), cfg);
  auto report = format_solve_report(e.definition, cfg, r);
  CHECK(report.find("budget_exhausted") != std::string::npos);
  CHECK(report.find("best partial solution") != std::string::npos);
  check_golden("solve_wrong_order.txt", report);
}

TEST_CASE("median") {
  CHECK(median({}) == 0.0);
  CHECK(median({3.0}) == 3.0);
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
}

TEST_CASE("bench keeps every row and aggregates per mode") {
  const auto dir = source_dir() / "data" / "corpus";
  auto entries = parse_manifest("training/recolor_by_color-1.concept\nmissing.concept\n"
                                "training/recolor_by_color-2.concept 50\n",
                                dir);
  SearchConfig naive, fact;
  naive.mode = SearchMode::naive;
  auto report = run_bench(entries, default_model(), {{"naive", naive}, {"factorized", fact}}, 2000);
  REQUIRE(report.rows.size() == 6);
  int errors = 0;
  for (const auto& row : report.rows) {
    if (!row.status) {
      ++errors;
      CHECK(row.name.find("missing") != std::string::npos);
      CHECK_FALSE(row.error.empty());
      continue;
    }
    CHECK(row.visited <= row.budget);
  }
  CHECK(errors == 2);
  CHECK(report.rows[4].budget == 50);
  CHECK(report.rows[5].budget == 50);
  auto agg = report.aggregates();
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].mode == "naive");
  CHECK(agg[0].concepts == 3);
  CHECK(agg[0].solve_rate == doctest::Approx(agg[0].solved / 3.0));

  auto jsonl = format_bench_jsonl(report);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 8);
  auto csv = format_bench_histogram(report);
  CHECK(csv.rfind("mode,name,visited,seconds\n", 0) == 0);
  CHECK(format_bench_table(report).find("factorized") != std::string::npos);
}

}
