#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cogscript/concept.hpp"
#include "cogscript/emulator.hpp"
#include "cogscript/instruction.hpp"
#include "cogscript/search.hpp"
#include "cogscript/world.hpp"

namespace testing {

using namespace cogscript;

inline std::filesystem::path source_dir() { return COGSCRIPT_SOURCE_DIR; }

inline Instruction I(Opcode op) { return {op, 0}; }
inline Instruction I(Opcode op, Color c) { return Instruction::color(op, c); }
inline Instruction I(Opcode op, Shape s) { return Instruction::shape(op, s); }

inline Scene scene(int w, int h, std::vector<SceneObject> objects) {
  Scene s;
  s.width = w;
  s.height = h;
  s.objects = std::move(objects);
  return s;
}

inline SceneObject obj(int id, Shape sh, Color c, int x, int y) { return {id, sh, c, {x, y}}; }

/// n objects on distinct cells with ids 0..n-1.
inline Scene random_scene(std::mt19937_64& rng, int w, int h, int n) {
  std::vector<GridPos> cells;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) cells.push_back({x, y});
  std::shuffle(cells.begin(), cells.end(), rng);
  Scene s;
  s.width = w;
  s.height = h;
  for (int i = 0; i < n; ++i)
    s.objects.push_back({i, static_cast<Shape>(rng() % kShapeCount),
                         static_cast<Color>(rng() % kColorCount), cells[i]});
  return s;
}

/// scene_parse followed by `len - 1` random variants other than scene_parse.
inline Program random_program(std::mt19937_64& rng, int len) {
  Program p{{I(Opcode::scene_parse)}};
  for (int i = 1; i < len; ++i) {
    int v = 1 + static_cast<int>(rng() % (kVariantCount - 1));
    p.instructions.push_back(variant(v));
  }
  return p;
}

inline bool admissible(const SceneObject& w, const SceneObject& t, MatchMode mode) {
  return w.shape == t.shape && w.color == t.color && w.pos == t.pos &&
         (mode == MatchMode::by_property || w.id == t.id);
}

/// Maximum matching size by exhaustive assignment: every work object is
/// either left out or paired with any still-free admissible target.
inline int brute_force_match_size(const Scene& work, const Scene& target,
                                  std::optional<int> held, MatchMode mode) {
  std::vector<const SceneObject*> ws;
  for (const auto& o : work.objects)
    if (!held || o.id != *held) ws.push_back(&o);
  std::vector<bool> used(target.objects.size(), false);
  int best = 0;
  auto rec = [&](auto& self, std::size_t i, int count) -> void {
    if (i == ws.size()) {
      best = std::max(best, count);
      return;
    }
    self(self, i + 1, count);
    for (std::size_t t = 0; t < target.objects.size(); ++t) {
      if (used[t] || !admissible(*ws[i], target.objects[t], mode)) continue;
      used[t] = true;
      self(self, i + 1, count + 1);
      used[t] = false;
    }
  };
  rec(rec, 0, 0);
  return best;
}

inline VmState run_ok(const Program& p, const Scene& in) {
  auto r = execute(p, in, {.check_invariants = true});
  if (!r.ok()) throw std::runtime_error("unexpected error: " + r.error->message);
  return r.final;
}

inline GridPos pos_of(const VmState& s, int id) { return s.working.find(id)->pos; }

/// Each restart adds at least one object in every example to the baseline it
/// grew from: the previous root, or an earlier root for a pending mutant.
inline bool baselines_increase(const std::vector<SubgoalRecord>& history) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& rec = history[i];
    std::vector<std::vector<int>> base;
    for (std::size_t e = 0; e < rec.matched.size(); ++e) {
      if (rec.newly_matched[e].empty()) return false;
      std::vector<int> rest;
      for (int id : rec.matched[e])
        if (std::find(rec.newly_matched[e].begin(), rec.newly_matched[e].end(), id) ==
            rec.newly_matched[e].end())
          rest.push_back(id);
      if (rest.size() + rec.newly_matched[e].size() != rec.matched[e].size()) return false;
      base.push_back(std::move(rest));
    }
    const bool first = i == 0 || history[i - 1].attempt != rec.attempt;
    if (first) continue;
    bool found = false;
    for (std::size_t j = i; j-- > 0 && history[j].attempt == rec.attempt;)
      found |= history[j].matched == base;
    if (!found) return false;
  }
  return true;
}

}  // namespace testing
