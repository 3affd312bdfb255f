#include "cogscript/world.hpp"

#include <algorithm>
#include <array>

namespace cogscript {

namespace {

constexpr std::array<std::string_view, kShapeCount> kShapeNames = {
    "square", "circle", "triangle", "star"};
constexpr std::array<std::string_view, kColorCount> kColorNames = {
    "red", "green", "blue", "yellow"};

bool admissible(const SceneObject& w, const SceneObject& t, MatchMode mode) {
  if (w.pos != t.pos || w.shape != t.shape || w.color != t.color) return false;
  return mode == MatchMode::by_property || w.id == t.id;
}

}  // namespace

std::string_view to_string(Shape s) {
  return kShapeNames[static_cast<std::size_t>(s)];
}
std::string_view to_string(Color c) {
  return kColorNames[static_cast<std::size_t>(c)];
}

std::optional<Shape> parse_shape(std::string_view name) {
  for (std::size_t i = 0; i < kShapeNames.size(); ++i)
    if (kShapeNames[i] == name) return static_cast<Shape>(i);
  return std::nullopt;
}

std::optional<Color> parse_color(std::string_view name) {
  for (std::size_t i = 0; i < kColorNames.size(); ++i)
    if (kColorNames[i] == name) return static_cast<Color>(i);
  return std::nullopt;
}

const SceneObject* Scene::at(GridPos p) const {
  for (const auto& o : objects)
    if (o.pos == p) return &o;
  return nullptr;
}

const SceneObject* Scene::find(int id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

SceneObject* Scene::find(int id) {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

std::string Scene::violation() const {
  if (width < 1 || height < 1) return "scene dimensions must be positive";
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& a = objects[i];
    if (a.id < 0 || a.id > kMaxObjectId)
      return "object id " + std::to_string(a.id) + " out of range";
    if (!in_bounds(a.pos))
      return "object " + std::to_string(a.id) + " out of bounds";
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      const auto& b = objects[j];
      if (a.id == b.id) return "duplicate object id " + std::to_string(a.id);
      if (a.pos == b.pos)
        return "objects " + std::to_string(a.id) + " and " +
               std::to_string(b.id) + " share cell (" +
               std::to_string(a.pos.x) + "," + std::to_string(a.pos.y) + ")";
    }
  }
  return {};
}

std::uint64_t MatchReport::work_mask() const {
  std::uint64_t m = 0;
  for (int id : matched_work_ids) m |= std::uint64_t{1} << id;
  return m;
}

// Admissible pairs share a cell, and cells are exclusive in both scenes, so
// each work object has at most one admissible partner. Scanning work objects
// by ascending id and taking the lowest free target id is therefore a maximum
// matching and already obeys the (work id, target id) tie-break.
MatchReport match_objects(const Scene& work, const Scene& target,
                          std::optional<int> held_id, MatchMode mode) {
  if (work.width != target.width || work.height != target.height)
    throw DimensionMismatch("work and target grids differ in size");

  std::vector<const SceneObject*> ws;
  for (const auto& o : work.objects)
    if (!held_id || o.id != *held_id) ws.push_back(&o);
  std::sort(ws.begin(), ws.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });

  std::vector<const SceneObject*> ts;
  for (const auto& o : target.objects) ts.push_back(&o);
  std::sort(ts.begin(), ts.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });

  MatchReport report;
  for (const auto* w : ws) {
    for (const auto* t : ts) {
      if (report.matched_target_ids.count(t->id)) continue;
      if (!admissible(*w, *t, mode)) continue;
      report.matched_work_ids.insert(w->id);
      report.matched_target_ids.insert(t->id);
      report.pairing.emplace(w->id, t->id);
      break;
    }
  }
  return report;
}

std::uint64_t matched_mask(const Scene& work, const Scene& target,
                           std::optional<int> held_id, MatchMode mode) {
  if (work.width != target.width || work.height != target.height)
    throw DimensionMismatch("work and target grids differ in size");
  std::uint64_t mask = 0;
  for (const auto& w : work.objects) {
    if (held_id && w.id == *held_id) continue;
    for (const auto& t : target.objects) {
      if (admissible(w, t, mode)) {
        mask |= std::uint64_t{1} << w.id;
        break;
      }
    }
  }
  return mask;
}

bool is_solved(const Scene& work, const Scene& target,
               std::optional<int> held_id) {
  if (held_id) {
    if (work.width != target.width || work.height != target.height)
      throw DimensionMismatch("work and target grids differ in size");
    return false;
  }
  if (work.objects.size() != target.objects.size()) {
    if (work.width != target.width || work.height != target.height)
      throw DimensionMismatch("work and target grids differ in size");
    return false;
  }
  return match_objects(work, target, std::nullopt, MatchMode::by_property)
             .size() == work.objects.size();
}

}  // namespace cogscript
