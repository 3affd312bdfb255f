#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cogscript/corpus.hpp"
#include "cogscript/model.hpp"

namespace cogscript {

struct CatalogEntry {
  std::string name;
  Concept definition;
  Program ground_truth;
};

/// Hand-authored regression concepts: the four failure cases (wrong order,
/// mistaken identity, faulty argument, swap locations) and the replace and
/// stacking illustrations. Outputs come from running the ground truth.
std::vector<CatalogEntry> fixtures();
/// Throws std::out_of_range for an unknown name.
CatalogEntry fixture(std::string_view name);

/// Concepts whose ground truths train the default transition model: short
/// recolors and edge moves plus two move-and-replace programs, the only ones
/// that exercise fixation.
std::vector<ConceptTemplate> training_templates();
std::vector<Program> training_programs();

/// Templates whose ground truths, together with the fixtures and training
/// programs, define the dependency mask.
std::vector<ConceptTemplate> mask_templates();

/// Opcode-level mask: a transition is allowed when some ground truth contains
/// it, either textually or along its execution on an example (loop jumps
/// included), plus start -> scene_parse.
TransitionMask build_dependency_mask();

inline constexpr double kDefaultAlpha = 0.1;
TransitionModel build_default_model(const TransitionMask& mask);

/// Benchmark corpora: k in {2, 3} independent objects with ground truths of
/// 10 to 18 instructions, and stacking concepts with varying object counts.
std::vector<ConceptTemplate> ablation_templates(int n = 30);
std::vector<ConceptTemplate> stack_templates(int n = 10);

}  // namespace cogscript
