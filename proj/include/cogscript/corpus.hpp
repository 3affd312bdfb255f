#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogscript/concept.hpp"
#include "cogscript/instruction.hpp"

namespace cogscript {

enum class TemplateKind {
  recolor_by_color,
  move_to_corner,
  touch,
  touch_and_recolor,
  move_and_replace,
  swap_locations,
  stack_variable,
  k_independent_moves,
};

std::string_view to_string(TemplateKind kind);
std::optional<TemplateKind> parse_template_kind(std::string_view name);

/// Family plus parameters. Unset choices (colors, directions, block kinds)
/// are drawn from the seed.
struct ConceptTemplate {
  TemplateKind kind = TemplateKind::recolor_by_color;
  std::uint64_t seed = 0;
  int width = 10;
  int height = 10;
  int examples = 3;
  int min_objects = 3;  // total per example, targets included
  int max_objects = 5;
  /// stack_variable: objects to stack in each example (cycled).
  std::vector<int> counts = {2, 3, 4};
  /// k_independent_moves: number of independently handled objects.
  int k = 2;
  /// k_independent_moves: "move" or "recolor" per object; drawn when empty.
  std::vector<std::string> blocks;
  int min_length = 0;  // k_independent_moves ground-truth length window
  int max_length = 99;
  /// recolor_by_color / move_to_corner: "color", "shape", "both" or "none".
  std::string filter = "color";
  /// recolor_by_color: attention rank of the recolored object.
  int rank = 0;
  /// move_to_corner: 1 moves to an edge, 2 to a corner.
  int directions = 2;
};

class InvalidTemplate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsatisfiableTemplate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratedConcept {
  Concept definition;
  Program ground_truth;
};

/// Deterministic in the template. Each example output is the ground truth's
/// final scene on the example input, and generation fails if 1000 sampled
/// inputs in a row are rejected for an example.
GeneratedConcept generate(const ConceptTemplate& tmpl);

/// Empty when the ground truth runs without error on every input and leaves
/// exactly the example output with the hand empty.
std::string verify_ground_truth(const Concept& c, const Program& program);

// --- Files ------------------------------------------------------------------

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Concept container: {name, examples: [{input: Scene, output: Scene}]} where
/// a scene is {width, height, objects: [{id, shape, color, x, y}]}.
std::string format_concept(const Concept& c);
/// Throws SchemaError naming the offending field (or line for syntax errors).
Concept parse_concept(std::string_view text);
/// A bare scene document, as used inside concept files.
Scene parse_scene(std::string_view text);

ConceptTemplate parse_template(std::string_view text);
std::string format_template(const ConceptTemplate& tmpl);

std::string read_file(const std::filesystem::path& path);
/// Refuses to replace an existing file unless `overwrite` is set.
void write_file(const std::filesystem::path& path, std::string_view content,
                bool overwrite = true);

Concept load_concept(const std::filesystem::path& path);
void save_concept(const Concept& c, const std::filesystem::path& path);
Program load_program(const std::filesystem::path& path);
void save_program(const Program& program, const std::filesystem::path& path);

struct ManifestEntry {
  std::filesystem::path concept_path;
  std::optional<long> budget;
};

/// One concept path per line, optionally followed by a budget override.
/// Relative paths resolve against `base`.
std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          const std::filesystem::path& base = {});
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

}  // namespace cogscript
