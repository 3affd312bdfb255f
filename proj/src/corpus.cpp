#include "cogscript/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "cogscript/emulator.hpp"
#include "json.hpp"

namespace cogscript {

namespace {

using json = nlohmann::json;

constexpr int kAttempts = 1000;

Instruction op(Opcode o) { return {o, 0}; }
Instruction col(Opcode o, Color c) { return Instruction::color(o, c); }
Instruction shp(Opcode o, Shape s) { return Instruction::shape(o, s); }

constexpr Opcode kDirections[] = {Opcode::move_hand_up, Opcode::move_hand_down,
                                  Opcode::move_hand_left, Opcode::move_hand_right};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  int below(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }
  int between(int lo, int hi) { return lo + below(hi - lo + 1); }
  Color color() { return static_cast<Color>(below(kColorCount)); }
  Shape shape() { return static_cast<Shape>(below(kShapeCount)); }
  Color color_except(std::initializer_list<Color> avoid) {
    std::vector<Color> pool;
    for (int i = 0; i < kColorCount; ++i)
      if (std::find(avoid.begin(), avoid.end(), Color(i)) == avoid.end()) pool.push_back(Color(i));
    return pool[below(static_cast<int>(pool.size()))];
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[below(i + 1)]);
  }

 private:
  std::mt19937_64 eng_;
};

class Builder {
 public:
  Builder(int w, int h, Rng& rng) : rng_(rng) {
    scene_.width = w;
    scene_.height = h;
  }

  /// Places a new object on a random free cell accepted by `ok`.
  bool add(Shape s, Color c, const std::function<bool(GridPos)>& ok = {}) {
    for (int t = 0; t < 200; ++t) {
      GridPos p{rng_.below(scene_.width), rng_.below(scene_.height)};
      if (scene_.at(p) || (ok && !ok(p))) continue;
      return add_at(s, c, p);
    }
    return false;
  }
  bool add_at(Shape s, Color c, GridPos p) {
    if (scene_.at(p)) return false;
    scene_.objects.push_back({static_cast<int>(scene_.objects.size()), s, c, p});
    return true;
  }
  int size() const { return static_cast<int>(scene_.objects.size()); }
  Scene take() { return std::move(scene_); }

 private:
  Scene scene_;
  Rng& rng_;
};

struct Plan {
  Program program;
  std::function<std::optional<Scene>(Rng&, int example)> sample;
  std::function<bool(const Scene& in, const Scene& out)> accept;
};

bool adjacent(GridPos a, GridPos b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1; }

std::vector<int> changed_ids(const Scene& in, const Scene& out) {
  std::vector<int> ids;
  for (const auto& o : in.objects) {
    const auto* p = out.find(o.id);
    if (!p || !(*p == o)) ids.push_back(o.id);
  }
  return ids;
}

bool at_edges(GridPos p, const std::vector<Opcode>& dirs, const Scene& s) {
  for (auto d : dirs) {
    if (d == Opcode::move_hand_up && p.y != 0) return false;
    if (d == Opcode::move_hand_down && p.y != s.height - 1) return false;
    if (d == Opcode::move_hand_left && p.x != 0) return false;
    if (d == Opcode::move_hand_right && p.x != s.width - 1) return false;
  }
  return true;
}

struct Filter {
  bool by_color = false;
  bool by_shape = false;
  Color color = Color::red;
  Shape shape = Shape::square;

  bool passes(Color c, Shape s) const {
    return (!by_color || c == color) && (!by_shape || s == shape);
  }
  void emit(std::vector<Instruction>& out) const {
    if (by_color) out.push_back(col(Opcode::set_color_attn, color));
    if (by_shape) out.push_back(shp(Opcode::set_shape_attn, shape));
  }
  bool any() const { return by_color || by_shape; }
};

Filter make_filter(const std::string& name, Rng& rng) {
  Filter f;
  f.by_color = name == "color" || name == "both";
  f.by_shape = name == "shape" || name == "both";
  f.color = rng.color();
  f.shape = rng.shape();
  return f;
}

int object_count(const ConceptTemplate& t, Rng& rng, int targets) {
  return rng.between(std::max(t.min_objects, targets), std::max(t.max_objects, targets));
}

// Adds `targets` objects passing the filter, then distractors that fail it.
std::optional<Scene> filtered_scene(const ConceptTemplate& t, const Filter& f, int targets,
                                    Rng& rng) {
  Builder b(t.width, t.height, rng);
  const int n = object_count(t, rng, targets);
  for (int i = 0; i < targets; ++i) {
    Color c = f.by_color ? f.color : rng.color();
    Shape s = f.by_shape ? f.shape : rng.shape();
    if (!b.add(s, c)) return std::nullopt;
  }
  for (int i = targets; i < n; ++i) {
    Color c;
    Shape s;
    do {
      c = rng.color();
      s = rng.shape();
    } while (f.any() && f.passes(c, s));
    if (!b.add(s, c)) return std::nullopt;
  }
  return b.take();
}

Plan recolor_plan(const ConceptTemplate& t, Rng& rng) {
  Filter f = make_filter(t.filter, rng);
  Color fresh = rng.color_except({f.color});
  std::vector<Instruction> p{op(Opcode::scene_parse)};
  f.emit(p);
  p.push_back(op(Opcode::top_down_attend));
  for (int i = 0; i < t.rank; ++i) p.push_back(op(Opcode::next_object));
  p.push_back(col(Opcode::fill_color, fresh));
  const int targets = f.any() ? t.rank + 1 : 0;
  return {Program{p},
          [=](Rng& r, int) { return filtered_scene(t, f, targets, r); },
          [](const Scene& in, const Scene& out) { return changed_ids(in, out).size() == 1; }};
}

Plan corner_plan(const ConceptTemplate& t, Rng& rng) {
  Filter f = make_filter(t.filter, rng);
  std::vector<Opcode> dirs;
  if (t.directions == 2) {
    dirs.push_back(rng.below(2) ? Opcode::move_hand_down : Opcode::move_hand_up);
    dirs.push_back(rng.below(2) ? Opcode::move_hand_right : Opcode::move_hand_left);
  } else {
    dirs.push_back(kDirections[rng.below(4)]);
  }
  std::vector<Instruction> p{op(Opcode::scene_parse)};
  f.emit(p);
  for (auto o : {Opcode::top_down_attend, Opcode::move_hand_to_attended_object,
                 Opcode::grab_object})
    p.push_back(op(o));
  for (auto d : dirs) p.push_back(op(d));
  p.push_back(op(Opcode::release_object));
  const int targets = f.any() ? 1 : 0;
  return {Program{p},
          [=](Rng& r, int) { return filtered_scene(t, f, targets, r); },
          [=](const Scene& in, const Scene& out) {
            auto ids = changed_ids(in, out);
            return ids.size() == 1 && at_edges(out.find(ids[0])->pos, dirs, out);
          }};
}

// Objects 0 and 1 carry unique colors a and b; distractors avoid both.
std::optional<Scene> pair_scene(const ConceptTemplate& t, Color a, Color b, Rng& rng) {
  Builder bld(t.width, t.height, rng);
  if (!bld.add(rng.shape(), a) || !bld.add(rng.shape(), b)) return std::nullopt;
  const int n = object_count(t, rng, 2);
  for (int i = 2; i < n; ++i)
    if (!bld.add(rng.shape(), rng.color_except({a, b}))) return std::nullopt;
  return bld.take();
}

Plan touch_plan(const ConceptTemplate& t, Rng& rng, bool recolor) {
  Color a = rng.color();
  Color b = rng.color_except({a});
  Color fresh = rng.color_except({b});
  std::vector<Instruction> p{
      op(Opcode::scene_parse),          col(Opcode::set_color_attn, a),
      op(Opcode::top_down_attend),      op(Opcode::move_hand_to_attended_object),
      op(Opcode::grab_object),          op(Opcode::reset_attn),
      col(Opcode::set_color_attn, b),   op(Opcode::top_down_attend),
      op(Opcode::move_hand_to_attended_object), op(Opcode::release_object)};
  if (recolor) p.push_back(col(Opcode::fill_color, fresh));
  return {Program{p},
          [=](Rng& r, int) { return pair_scene(t, a, b, r); },
          [=](const Scene& in, const Scene& out) {
            const auto& a0 = *in.find(0);
            const auto& a1 = *out.find(0);
            const auto& b1 = *out.find(1);
            if (a0.pos == a1.pos || !adjacent(a1.pos, b1.pos)) return false;
            return !recolor || in.find(1)->color != b1.color;
          }};
}

Plan replace_plan(const ConceptTemplate& t, Rng& rng) {
  Color a = rng.color();
  Color b = rng.color_except({a});
  Opcode dir = kDirections[rng.below(4)];
  std::vector<Instruction> p{
      op(Opcode::scene_parse),        col(Opcode::set_color_attn, a),
      op(Opcode::top_down_attend),    op(Opcode::fixate_object),
      op(Opcode::move_hand_to_attended_object), op(Opcode::grab_object),
      op(dir),                        op(Opcode::release_object),
      op(Opcode::reset_attn),         col(Opcode::set_color_attn, b),
      op(Opcode::top_down_attend),    op(Opcode::move_hand_to_attended_object),
      op(Opcode::grab_object),        op(Opcode::move_hand_to_fixation),
      op(Opcode::release_object)};
  return {Program{p},
          [=](Rng& r, int) { return pair_scene(t, a, b, r); },
          [](const Scene& in, const Scene& out) {
            return in.find(0)->pos != out.find(0)->pos && out.find(1)->pos == in.find(0)->pos;
          }};
}

Program swap_program() {
  using O = Opcode;
  std::vector<Instruction> p;
  for (auto o : {O::scene_parse, O::top_down_attend, O::move_hand_to_attended_object,
                 O::grab_object, O::fixate_object, O::move_hand_down, O::release_object,
                 O::next_object, O::top_down_attend, O::move_hand_to_attended_object,
                 O::grab_object, O::fixate_object, O::fixate_previous,
                 O::move_hand_to_fixation, O::release_object, O::reset_attn,
                 O::top_down_attend, O::next_object, O::move_hand_to_attended_object,
                 O::grab_object, O::fixate_next, O::move_hand_to_fixation,
                 O::release_object})
    p.push_back(op(o));
  return Program{p};
}

Plan swap_plan(const ConceptTemplate& t, Rng&) {
  return {swap_program(),
          [=](Rng& r, int) -> std::optional<Scene> {
            Builder b(t.width, t.height, r);
            const int n = object_count(t, r, 2);
            for (int i = 0; i < n; ++i)
              if (!b.add(r.shape(), r.color())) return std::nullopt;
            return b.take();
          },
          [](const Scene& in, const Scene& out) {
            auto ids = changed_ids(in, out);
            if (ids.size() != 2) return false;
            const auto &x0 = *in.find(ids[0]), &y0 = *in.find(ids[1]);
            const auto &x1 = *out.find(ids[0]), &y1 = *out.find(ids[1]);
            if (x0.shape == y0.shape && x0.color == y0.color) return false;
            return x1.pos == y0.pos && y1.pos == x0.pos;
          }};
}

Plan stack_plan(const ConceptTemplate& t, Rng& rng) {
  Color c = rng.color();
  std::vector<Instruction> p{
      op(Opcode::scene_parse),  col(Opcode::set_color_attn, c),
      op(Opcode::top_down_attend), op(Opcode::loop_start),
      op(Opcode::move_hand_to_attended_object), op(Opcode::grab_object),
      op(Opcode::move_hand_down), op(Opcode::release_object),
      op(Opcode::next_object),  op(Opcode::loop_end)};
  return {Program{p},
          [=](Rng& r, int example) -> std::optional<Scene> {
            const int m = t.counts[example % t.counts.size()];
            const int rows = t.height / 2;  // rows above the parse-time fixation
            if (m > rows) return std::nullopt;
            Builder b(t.width, t.height, r);
            const int x = r.below(t.width);
            std::vector<int> ys(rows);
            for (int i = 0; i < rows; ++i) ys[i] = i;
            r.shuffle(ys);
            for (int i = 0; i < m; ++i)
              if (!b.add_at(r.shape(), c, {x, ys[i]})) return std::nullopt;
            const int n = object_count(t, r, m);
            for (int i = m; i < n; ++i)
              if (!b.add(r.shape(), r.color_except({c}))) return std::nullopt;
            return b.take();
          },
          [=](const Scene& in, const Scene& out) {
            for (const auto& o : in.objects) {
              if (o.color != c) continue;
              const auto& f = *out.find(o.id);
              if (f.pos == o.pos) return false;
              GridPos below{f.pos.x, f.pos.y + 1};
              if (out.in_bounds(below) && !out.at(below)) return false;
            }
            return true;
          }};
}

Plan k_independent_plan(const ConceptTemplate& t, Rng& rng) {
  std::vector<Color> palette{Color::red, Color::green, Color::blue, Color::yellow};
  rng.shuffle(palette);
  std::vector<Color> colors(palette.begin(), palette.begin() + t.k);

  // Each recolor gets its own color that no target carries, so every
  // changed object stays identifiable by color alone.
  std::vector<Color> spare(palette.begin() + t.k, palette.end());
  const auto n_spare = static_cast<std::ptrdiff_t>(spare.size());
  std::vector<std::string> kinds = t.blocks;
  if (std::count(kinds.begin(), kinds.end(), "recolor") > n_spare)
    throw UnsatisfiableTemplate("each recolor block needs a color no target carries");
  auto fits = [&](const std::vector<std::string>& ks) {
    int length = 1;
    for (const auto& k : ks) length += k == "move" ? 6 : 3;
    return length >= t.min_length && length <= t.max_length;
  };
  if (!kinds.empty() && !fits(kinds))
    throw UnsatisfiableTemplate("the listed blocks do not fit the length window");
  if (kinds.empty()) {
    bool found = false;
    for (int attempt = 0; attempt < kAttempts && !found; ++attempt) {
      kinds.clear();
      for (int i = 0; i < t.k; ++i) {
        const bool can_recolor =
            std::count(kinds.begin(), kinds.end(), "recolor") < n_spare;
        kinds.push_back(can_recolor && rng.below(2) ? "recolor" : "move");
      }
      found = fits(kinds);
    }
    if (!found)
      throw UnsatisfiableTemplate("no block mix of k=" + std::to_string(t.k) +
                                  " fits the length window");
  }

  std::vector<std::vector<Instruction>> blocks;
  std::vector<Color> fresh = spare;
  for (int i = 0; i < t.k; ++i) {
    std::vector<Instruction> blk{col(Opcode::set_color_attn, colors[i]),
                                 op(Opcode::top_down_attend)};
    if (kinds[i] == "move") {
      for (auto o : {Opcode::move_hand_to_attended_object, Opcode::grab_object,
                     kDirections[rng.below(4)], Opcode::release_object})
        blk.push_back(op(o));
    } else {
      const int pick = rng.below(static_cast<int>(fresh.size()));
      blk.push_back(col(Opcode::fill_color, fresh[pick]));
      fresh.erase(fresh.begin() + pick);
    }
    blocks.push_back(std::move(blk));
  }
  auto assemble = [](const std::vector<std::vector<Instruction>>& bl,
                     const std::vector<int>& order) {
    Program p{{op(Opcode::scene_parse)}};
    for (int i : order) p.instructions.insert(p.instructions.end(), bl[i].begin(), bl[i].end());
    return p;
  };
  std::vector<int> identity(t.k);
  for (int i = 0; i < t.k; ++i) identity[i] = i;

  return {assemble(blocks, identity),
          [=](Rng& r, int) -> std::optional<Scene> {
            Builder b(t.width, t.height, r);
            for (auto c : colors)
              if (!b.add(r.shape(), c)) return std::nullopt;
            const int n = spare.empty() ? t.k : object_count(t, r, t.k);
            for (int i = t.k; i < n; ++i)
              if (!b.add(r.shape(), spare[r.below(static_cast<int>(spare.size()))]))
                return std::nullopt;
            return b.take();
          },
          [=](const Scene& in, const Scene& out) {
            auto ids = changed_ids(in, out);
            if (static_cast<int>(ids.size()) != t.k) return false;
            // Every block order must produce the same output.
            std::vector<int> order = identity;
            while (std::next_permutation(order.begin(), order.end())) {
              auto r = execute(assemble(blocks, order), in);
              if (!r.ok() || r.final.held || r.final.working != out) return false;
            }
            return true;
          }};
}

void check_template(const ConceptTemplate& t) {
  auto fail = [](const std::string& m) { throw InvalidTemplate(m); };
  if (t.width < 3 || t.width > 16 || t.height < 3 || t.height > 16)
    fail("grid must be between 3x3 and 16x16");
  if (t.examples < 2 || t.examples > 10) fail("examples must be between 2 and 10");
  if (t.min_objects < 1 || t.max_objects > 8 || t.min_objects > t.max_objects)
    fail("object counts must satisfy 1 <= min <= max <= 8");
  if (t.filter != "color" && t.filter != "shape" && t.filter != "both" && t.filter != "none")
    fail("filter must be color, shape, both or none");
  if (t.rank < 0 || t.rank > 2) fail("rank must be between 0 and 2");
  if (t.directions != 1 && t.directions != 2) fail("directions must be 1 or 2");
  if (t.k < 1 || t.k > kColorCount) fail("k must be between 1 and 4");
  if (!t.blocks.empty()) {
    if (static_cast<int>(t.blocks.size()) != t.k) fail("blocks must list k entries");
    for (const auto& b : t.blocks)
      if (b != "move" && b != "recolor") fail("block kinds are move and recolor");
  }
  if (t.counts.empty()) fail("counts must not be empty");
  for (int c : t.counts)
    if (c < 1 || c > 8) fail("counts must be between 1 and 8");
}

Plan make_plan(const ConceptTemplate& t, Rng& rng) {
  switch (t.kind) {
    case TemplateKind::recolor_by_color: return recolor_plan(t, rng);
    case TemplateKind::move_to_corner: return corner_plan(t, rng);
    case TemplateKind::touch: return touch_plan(t, rng, false);
    case TemplateKind::touch_and_recolor: return touch_plan(t, rng, true);
    case TemplateKind::move_and_replace: return replace_plan(t, rng);
    case TemplateKind::swap_locations: return swap_plan(t, rng);
    case TemplateKind::stack_variable: return stack_plan(t, rng);
    case TemplateKind::k_independent_moves: return k_independent_plan(t, rng);
  }
  throw InvalidTemplate("unknown template kind");
}

// --- JSON helpers -------------------------------------------------------------

// nlohmann sorts object keys; the container is written by hand so fields keep
// a readable order and each object sits on one line.
std::string object_line(const SceneObject& o) {
  std::ostringstream os;
  os << "{\"id\": " << o.id << ", \"shape\": \"" << to_string(o.shape) << "\", \"color\": \""
     << to_string(o.color) << "\", \"x\": " << o.pos.x << ", \"y\": " << o.pos.y << "}";
  return os.str();
}

void write_scene(std::ostringstream& os, const Scene& s, const std::string& pad) {
  os << "{\n"
     << pad << "  \"width\": " << s.width << ",\n"
     << pad << "  \"height\": " << s.height << ",\n"
     << pad << "  \"objects\": [";
  for (std::size_t i = 0; i < s.objects.size(); ++i)
    os << (i ? ",\n" : "\n") << pad << "    " << object_line(s.objects[i]);
  os << (s.objects.empty() ? "]\n" : "\n" + pad + "  ]\n") << pad << "}";
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key + ": missing field");
  return *it;
}

int int_field(const json& obj, const char* key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string string_field(const json& obj, const char* key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

Scene scene_from_json(const json& j, const std::string& path) {
  Scene s;
  s.width = int_field(j, "width", path);
  s.height = int_field(j, "height", path);
  const auto& objs = field(j, "objects", path);
  if (!objs.is_array()) throw SchemaError(path + ".objects: expected an array");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string p = path + ".objects[" + std::to_string(i) + "]";
    SceneObject o;
    o.id = int_field(objs[i], "id", p);
    auto sh = parse_shape(string_field(objs[i], "shape", p));
    if (!sh) throw SchemaError(p + ".shape: unknown shape");
    auto co = parse_color(string_field(objs[i], "color", p));
    if (!co) throw SchemaError(p + ".color: unknown color");
    o.shape = *sh;
    o.color = *co;
    o.pos = {int_field(objs[i], "x", p), int_field(objs[i], "y", p)};
    s.objects.push_back(o);
  }
  if (auto v = s.violation(); !v.empty()) throw SchemaError(path + ": " + v);
  return s;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw SchemaError("line " + std::to_string(line) + ": malformed document");
  }
}

}  // namespace

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::recolor_by_color: return "recolor_by_color";
    case TemplateKind::move_to_corner: return "move_to_corner";
    case TemplateKind::touch: return "touch";
    case TemplateKind::touch_and_recolor: return "touch_and_recolor";
    case TemplateKind::move_and_replace: return "move_and_replace";
    case TemplateKind::swap_locations: return "swap_locations";
    case TemplateKind::stack_variable: return "stack_variable";
    case TemplateKind::k_independent_moves: return "k_independent_moves";
  }
  return "?";
}

std::optional<TemplateKind> parse_template_kind(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(TemplateKind::k_independent_moves); ++i)
    if (to_string(TemplateKind(i)) == name) return TemplateKind(i);
  return std::nullopt;
}

std::string verify_ground_truth(const Concept& c, const Program& program) {
  for (std::size_t i = 0; i < c.examples.size(); ++i) {
    const std::string where = "example " + std::to_string(i) + ": ";
    auto r = execute(program, c.examples[i].input);
    if (!r.ok()) return where + r.error->message;
    if (r.final.held) return where + "program ends holding an object";
    if (r.final.working != c.examples[i].output) return where + "final scene differs from output";
  }
  return {};
}

GeneratedConcept generate(const ConceptTemplate& tmpl) {
  check_template(tmpl);
  Rng rng(tmpl.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(tmpl.kind) + 1);
  Plan plan = make_plan(tmpl, rng);

  GeneratedConcept out;
  out.definition.name = std::string(to_string(tmpl.kind)) + "-" + std::to_string(tmpl.seed);
  out.ground_truth = plan.program;
  for (int e = 0; e < tmpl.examples; ++e) {
    bool done = false;
    for (int attempt = 0; attempt < kAttempts && !done; ++attempt) {
      auto input = plan.sample(rng, e);
      if (!input) continue;
      auto r = execute(plan.program, *input);
      if (!r.ok() || r.final.held || !plan.accept(*input, r.final.working)) continue;
      out.definition.examples.push_back({std::move(*input), std::move(r.final.working)});
      done = true;
    }
    if (!done)
      throw UnsatisfiableTemplate(std::string(to_string(tmpl.kind)) + ": no valid placement for example " +
                                  std::to_string(e) + " in " + std::to_string(kAttempts) +
                                  " attempts");
  }
  if (auto v = verify_ground_truth(out.definition, out.ground_truth); !v.empty())
    throw std::logic_error("generated ground truth does not hold: " + v);
  return out;
}

std::string format_concept(const Concept& c) {
  std::ostringstream os;
  os << "{\n  \"name\": " << json(c.name).dump() << ",\n  \"examples\": [";
  for (std::size_t i = 0; i < c.examples.size(); ++i) {
    os << (i ? ",\n" : "\n") << "    {\n      \"input\": ";
    write_scene(os, c.examples[i].input, "      ");
    os << ",\n      \"output\": ";
    write_scene(os, c.examples[i].output, "      ");
    os << "\n    }";
  }
  os << (c.examples.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

Concept parse_concept(std::string_view text) {
  json j = parse_json(text);
  Concept c;
  c.name = string_field(j, "name", "concept");
  const auto& exs = field(j, "examples", "concept");
  if (!exs.is_array()) throw SchemaError("concept.examples: expected an array");
  for (std::size_t i = 0; i < exs.size(); ++i) {
    const std::string p = "examples[" + std::to_string(i) + "]";
    Example ex;
    ex.input = scene_from_json(field(exs[i], "input", p), p + ".input");
    ex.output = scene_from_json(field(exs[i], "output", p), p + ".output");
    c.examples.push_back(std::move(ex));
  }
  if (auto v = c.violation(); !v.empty()) throw SchemaError(v);
  return c;
}

Scene parse_scene(std::string_view text) { return scene_from_json(parse_json(text), "scene"); }

ConceptTemplate parse_template(std::string_view text) {
  json j = parse_json(text);
  if (!j.is_object()) throw SchemaError("template: expected an object");
  ConceptTemplate t;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    auto need_int = [&]() {
      if (!v.is_number_integer()) throw SchemaError("template." + key + ": expected an integer");
      return v.get<long long>();
    };
    auto need_pair = [&](int& lo, int& hi) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw SchemaError("template." + key + ": expected [min, max]");
      lo = v[0].get<int>();
      hi = v[1].get<int>();
    };
    if (key == "kind") {
      if (!v.is_string()) throw SchemaError("template.kind: expected a string");
      auto k = parse_template_kind(v.get<std::string>());
      if (!k) throw SchemaError("template.kind: unknown kind '" + v.get<std::string>() + "'");
      t.kind = *k;
    } else if (key == "seed") {
      t.seed = static_cast<std::uint64_t>(need_int());
    } else if (key == "width") {
      t.width = static_cast<int>(need_int());
    } else if (key == "height") {
      t.height = static_cast<int>(need_int());
    } else if (key == "examples") {
      t.examples = static_cast<int>(need_int());
    } else if (key == "objects") {
      need_pair(t.min_objects, t.max_objects);
    } else if (key == "length") {
      need_pair(t.min_length, t.max_length);
    } else if (key == "k") {
      t.k = static_cast<int>(need_int());
    } else if (key == "rank") {
      t.rank = static_cast<int>(need_int());
    } else if (key == "directions") {
      t.directions = static_cast<int>(need_int());
    } else if (key == "filter") {
      if (!v.is_string()) throw SchemaError("template.filter: expected a string");
      t.filter = v.get<std::string>();
    } else if (key == "counts") {
      if (!v.is_array()) throw SchemaError("template.counts: expected an array");
      t.counts.clear();
      for (const auto& c : v) {
        if (!c.is_number_integer()) throw SchemaError("template.counts: expected integers");
        t.counts.push_back(c.get<int>());
      }
    } else if (key == "blocks") {
      if (!v.is_array()) throw SchemaError("template.blocks: expected an array");
      t.blocks.clear();
      for (const auto& b : v) {
        if (!b.is_string()) throw SchemaError("template.blocks: expected strings");
        t.blocks.push_back(b.get<std::string>());
      }
    } else {
      throw SchemaError("template." + key + ": unknown field");
    }
  }
  if (!j.contains("kind")) throw SchemaError("template.kind: missing field");
  return t;
}

std::string format_template(const ConceptTemplate& t) {
  json j = {{"kind", std::string(to_string(t.kind))},
            {"seed", t.seed},
            {"width", t.width},
            {"height", t.height},
            {"examples", t.examples},
            {"objects", {t.min_objects, t.max_objects}},
            {"counts", t.counts},
            {"k", t.k},
            {"blocks", t.blocks},
            {"length", {t.min_length, t.max_length}},
            {"filter", t.filter},
            {"rank", t.rank},
            {"directions", t.directions}};
  return j.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content, bool overwrite) {
  std::error_code ec;
  if (!overwrite && std::filesystem::exists(path, ec))
    throw IoError(path.string() + " already exists");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

Concept load_concept(const std::filesystem::path& path) {
  try {
    return parse_concept(read_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_concept(const Concept& c, const std::filesystem::path& path) {
  write_file(path, format_concept(c));
}

Program load_program(const std::filesystem::path& path) {
  return parse_program(read_file(path));
}

void save_program(const Program& program, const std::filesystem::path& path) {
  write_file(path, format_program(program));
}

std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          const std::filesystem::path& base) {
  std::vector<ManifestEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string path;
    if (!(ls >> path)) continue;
    ManifestEntry e;
    e.concept_path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base / path;
    std::string budget;
    if (ls >> budget) {
      try {
        std::size_t used = 0;
        long b = std::stol(budget, &used);
        if (used != budget.size() || b < 1) throw std::invalid_argument("budget");
        e.budget = b;
      } catch (const std::exception&) {
        throw SchemaError("line " + std::to_string(lineno) + ": invalid budget '" + budget + "'");
      }
    }
    std::string extra;
    if (ls >> extra) throw SchemaError("line " + std::to_string(lineno) + ": unexpected '" + extra + "'");
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

}  // namespace cogscript
