#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cogscript/catalog.hpp"
#include "cogscript/corpus.hpp"
#include "cogscript/render.hpp"
#include "cogscript/report.hpp"
#include "cogscript/search.hpp"

namespace fs = std::filesystem;
using namespace cogscript;

namespace {

enum Exit { kSolved = 0, kUsage = 1, kBudget = 2, kFrontier = 3, kUnsatisfiable = 4 };

struct ModelFlags {
  std::string model;
  std::string mask;
};

struct SearchFlags {
  long budget = 4000;
  std::string mode = "factorized";
  bool no_mutation = false;
  bool match_by_id = false;
  bool order_retry = false;
  bool prune_parent = false;
  double epsilon_arg = 0.01;
  std::vector<std::string> suppress;
  std::uint64_t seed = 0;
  int workers = 1;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--model", f.model, "Model file (default: $COGSCRIPT_MODEL_DIR/default.model)");
  cmd->add_option("--mask", f.mask, "Dependency mask; trains the default model under it");
}

void add_search_flags(CLI::App* cmd, SearchFlags& f) {
  cmd->add_option("--budget", f.budget, "Program budget")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_flag("--no-mutation", f.no_mutation, "Disable program mutation");
  cmd->add_flag("--match-by-id", f.match_by_id, "Match objects by id as well as properties");
  cmd->add_flag("--order-retry", f.order_retry, "Retry with a different first sub-goal");
  cmd->add_flag("--prune-parent", f.prune_parent, "Prune against the parent's matches");
  cmd->add_option("--epsilon-arg", f.epsilon_arg, "Argument prior floor")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--suppress-arg", f.suppress, "Color or shape the argument prior misses");
  cmd->add_option("--seed", f.seed, "Seed for order-retry tie breaking");
  cmd->add_option("--workers", f.workers, "Parallel evaluation workers")->capture_default_str()
      ->check(CLI::PositiveNumber);
}

SearchConfig make_config(const SearchFlags& f, SearchMode mode) {
  SearchConfig c;
  c.n_progs = f.budget;
  c.mode = mode;
  c.mutation_enabled = !f.no_mutation;
  c.match_mode = f.match_by_id ? MatchMode::by_id : MatchMode::by_property;
  c.order_retry = f.order_retry;
  c.prune_against_parent = f.prune_parent;
  c.arg_options.epsilon = f.epsilon_arg;
  for (const auto& name : f.suppress) {
    if (auto col = parse_color(name)) c.arg_options.suppressed_colors.insert(*col);
    else if (auto sh = parse_shape(name)) c.arg_options.suppressed_shapes.insert(*sh);
    else throw CLI::ValidationError("--suppress-arg", "unknown color or shape '" + name + "'");
  }
  c.seed = f.seed;
  c.parallel_workers = f.workers;
  return c;
}

SearchMode parse_mode(const std::string& name) {
  if (name == "naive") return SearchMode::naive;
  if (name == "factorized") return SearchMode::factorized;
  throw CLI::ValidationError("--mode", "expected naive or factorized, got '" + name + "'");
}

TransitionModel load_model(const ModelFlags& f) {
  if (!f.model.empty()) {
    auto m = parse_model(read_file(f.model));
    return m;
  }
  if (!f.mask.empty()) return build_default_model(parse_mask(read_file(f.mask)));
  if (const char* dir = std::getenv("COGSCRIPT_MODEL_DIR"); dir && *dir) {
    fs::path d(dir);
    if (fs::exists(d / "default.model")) return parse_model(read_file(d / "default.model"));
    if (fs::exists(d / "dependency.mask"))
      return build_default_model(parse_mask(read_file(d / "dependency.mask")));
  }
  return build_default_model(build_dependency_mask());
}

int exit_for(Status s) {
  switch (s) {
    case Status::solved: return kSolved;
    case Status::budget_exhausted: return kBudget;
    case Status::frontier_exhausted: return kFrontier;
  }
  return kUsage;
}

int cmd_solve(const std::string& concept_path, const std::string& out, const std::string& log,
              const SearchFlags& sf, const ModelFlags& mf) {
  Concept c = load_concept(concept_path);
  TransitionModel model = load_model(mf);
  SearchConfig cfg = make_config(sf, parse_mode(sf.mode));
  InductionResult r = induce(c, model, cfg);
  std::cout << format_solve_report(c, cfg, r);
  if (!log.empty()) write_file(log, format_search_log(r));
  if (r.program) {
    fs::path dest = out.empty() ? fs::path(concept_path).replace_extension(".found.program")
                                : fs::path(out);
    save_program(*r.program, dest);
  }
  return exit_for(r.status);
}

std::vector<std::string> split_modes(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_bench(const std::string& manifest, const std::string& modes_text,
              const std::string& jsonl, const std::string& histogram, bool quiet,
              const SearchFlags& sf, const ModelFlags& mf) {
  auto entries = load_manifest(manifest);
  TransitionModel model = load_model(mf);
  std::vector<BenchMode> modes;
  for (const auto& name : split_modes(modes_text)) {
    SearchConfig cfg = make_config(sf, parse_mode(name));
    std::string label = name;
    if (cfg.mode == SearchMode::factorized && !cfg.mutation_enabled) label += "-nomut";
    modes.push_back({label, cfg});
  }
  auto report = run_bench(entries, model, modes, sf.budget, [&](const BenchRow& row) {
    if (!quiet)
      std::cerr << row.name << " " << row.mode << " "
                << (row.status ? std::string(to_string(*row.status)) : "error: " + row.error)
                << " visited=" << row.visited << "\n";
  });
  std::cout << format_bench_table(report);
  if (!jsonl.empty()) write_file(jsonl, format_bench_jsonl(report));
  if (!histogram.empty()) write_file(histogram, format_bench_histogram(report));
  return kSolved;
}

int cmd_trace(const std::string& program_path, const std::string& concept_path,
              const std::string& scene_path, int example, const std::string& svg_dir) {
  Program p = load_program(program_path);
  Scene scene;
  if (!scene_path.empty()) {
    scene = parse_scene(read_file(scene_path));
  } else if (!concept_path.empty()) {
    Concept c = load_concept(concept_path);
    if (example < 0 || example >= static_cast<int>(c.examples.size()))
      throw CLI::ValidationError("--example", "out of range");
    scene = c.examples[example].input;
  } else {
    throw CLI::RequiredError("--concept or --scene");
  }
  ExecResult r = execute(p, scene, {.record_trace = true});
  std::cout << render_trace(p, r);
  if (!svg_dir.empty()) {
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%03zu.svg", i + 1);
      write_file(fs::path(svg_dir) / name, render_svg(r.trace[i].state));
    }
  }
  return r.ok() ? kSolved : kUsage;
}

void write_new(const fs::path& path, const std::string& content, bool force) {
  write_file(path, content, force);
}

void write_generated(const GeneratedConcept& g, const fs::path& dir, bool force) {
  write_new(dir / (g.definition.name + ".concept"), format_concept(g.definition), force);
  write_new(dir / (g.definition.name + ".program"), format_program(g.ground_truth), force);
}

int cmd_gen(const std::string& template_path, const std::string& kind, std::uint64_t seed,
            int count, int k, const std::string& out_dir, bool force) {
  ConceptTemplate t;
  if (!template_path.empty()) {
    t = parse_template(read_file(template_path));
  } else {
    auto parsed = parse_template_kind(kind);
    if (!parsed) throw CLI::ValidationError("--kind", "unknown template kind '" + kind + "'");
    t.kind = *parsed;
    if (k > 0) t.k = k;
    t.seed = seed;
  }
  std::vector<GeneratedConcept> made;
  const std::uint64_t first = t.seed;
  for (int i = 0; i < count; ++i) {
    t.seed = first + static_cast<std::uint64_t>(i);
    made.push_back(generate(t));
  }
  // Refuse before writing anything so a clash leaves the directory untouched.
  if (!force) {
    for (const auto& g : made)
      for (const char* ext : {".concept", ".program"})
        if (fs::exists(fs::path(out_dir) / (g.definition.name + ext)))
          throw IoError((fs::path(out_dir) / (g.definition.name + ext)).string() +
                        " already exists (use --force)");
  }
  for (const auto& g : made) {
    write_generated(g, out_dir, true);
    std::cout << (fs::path(out_dir) / (g.definition.name + ".concept")).string() << "\n";
  }
  return kSolved;
}

void write_corpus(const std::vector<ConceptTemplate>& templates, const fs::path& root,
                  const std::string& name, bool force) {
  std::string manifest;
  for (const auto& t : templates) {
    auto g = generate(t);
    write_generated(g, root / name, force);
    manifest += name + "/" + g.definition.name + ".concept\n";
  }
  write_new(root / (name + ".manifest"), manifest, force);
}

int cmd_catalog(const std::string& out_dir, bool force) {
  const fs::path root(out_dir);
  TransitionMask mask = build_dependency_mask();
  write_new(root / "dependency.mask", format_mask(mask), force);
  write_new(root / "default.model", format_model(build_default_model(mask)), force);
  for (const auto& e : fixtures()) {
    write_new(root / "fixtures" / (e.name + ".concept"), format_concept(e.definition), force);
    write_new(root / "fixtures" / (e.name + ".program"), format_program(e.ground_truth), force);
  }
  write_corpus(training_templates(), root / "corpus", "training", force);
  write_corpus(ablation_templates(), root / "corpus", "ablation", force);
  write_corpus(stack_templates(), root / "corpus", "stack", force);
  std::cout << "catalog written to " << root.string() << "\n";
  return kSolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognitive program induction over symbolic scenes"};
  app.require_subcommand(1);

  SearchFlags sf;
  ModelFlags mf;

  auto* solve = app.add_subcommand("solve", "Induce a program for a concept");
  std::string concept_path, out_path, log_path;
  solve->add_option("--concept", concept_path, "Concept file")->required();
  solve->add_option("--mode", sf.mode, "naive or factorized")->capture_default_str();
  solve->add_option("--out", out_path, "Where to write the found program");
  solve->add_option("--log", log_path, "Write the search log (JSON lines)");
  add_search_flags(solve, sf);
  add_model_flags(solve, mf);

  auto* bench = app.add_subcommand("bench", "Run a manifest of concepts under several modes");
  std::string manifest, modes = "naive,factorized", jsonl, histogram;
  bool quiet = false;
  bench->add_option("--manifest", manifest, "Manifest file")->required();
  bench->add_option("--modes", modes, "Comma-separated modes")->capture_default_str();
  bench->add_option("--jsonl", jsonl, "Write row and aggregate records");
  bench->add_option("--histogram", histogram, "Write (visited, seconds) CSV");
  bench->add_flag("--quiet", quiet, "No per-row progress on stderr");
  add_search_flags(bench, sf);
  add_model_flags(bench, mf);

  auto* trace = app.add_subcommand("trace", "Render a program's execution step by step");
  std::string program_path, scene_path, svg_dir;
  int example = 0;
  trace->add_option("--program", program_path, "Program file")->required();
  trace->add_option("--concept", concept_path, "Concept supplying the input scene");
  trace->add_option("--example", example, "Example index within the concept");
  trace->add_option("--scene", scene_path, "Scene file");
  trace->add_option("--svg-dir", svg_dir, "Also write one SVG per step");

  auto* gen = app.add_subcommand("gen", "Generate concepts from a template");
  std::string template_path, kind, gen_dir = ".";
  std::uint64_t gen_seed = 0;
  int count = 1, k = 0;
  bool force = false;
  auto* tmpl_opt = gen->add_option("--template", template_path, "Template file");
  gen->add_option("--kind", kind, "Template kind")->excludes(tmpl_opt);
  gen->add_option("--seed", gen_seed, "First seed");
  gen->add_option("--k", k, "Objects for k_independent_moves");
  gen->add_option("--count", count, "Consecutive seeds to generate")->check(CLI::PositiveNumber);
  gen->add_option("--out-dir", gen_dir, "Output directory");
  gen->add_flag("--force", force, "Overwrite existing files");

  auto* catalog = app.add_subcommand("catalog", "Write the mask, model, fixtures and corpora");
  std::string catalog_dir = "data";
  bool catalog_force = false;
  catalog->add_option("--out-dir", catalog_dir, "Output directory")->capture_default_str();
  catalog->add_flag("--force", catalog_force, "Overwrite existing files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(concept_path, out_path, log_path, sf, mf);
    if (*bench) return cmd_bench(manifest, modes, jsonl, histogram, quiet, sf, mf);
    if (*trace) return cmd_trace(program_path, concept_path, scene_path, example, svg_dir);
    if (*gen) {
      if (template_path.empty() && kind.empty())
        throw CLI::RequiredError("--template or --kind");
      return cmd_gen(template_path, kind, gen_seed, count, k, gen_dir, force);
    }
    if (*catalog) return cmd_catalog(catalog_dir, catalog_force);
  } catch (const UnsatisfiableTemplate& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnsatisfiable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
