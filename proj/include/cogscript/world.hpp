#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cogscript {

enum class Shape : std::uint8_t { square, circle, triangle, star };
enum class Color : std::uint8_t { red, green, blue, yellow };

inline constexpr int kShapeCount = 4;
inline constexpr int kColorCount = 4;
// Object ids index 64-bit masks in the matcher and the search.
inline constexpr int kMaxObjectId = 63;

std::string_view to_string(Shape s);
std::string_view to_string(Color c);
std::optional<Shape> parse_shape(std::string_view name);
std::optional<Color> parse_color(std::string_view name);

struct GridPos {
  int x = 0;
  int y = 0;

  friend bool operator==(const GridPos&, const GridPos&) = default;
  friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

struct SceneObject {
  int id = 0;
  Shape shape = Shape::square;
  Color color = Color::red;
  GridPos pos;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidScene : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A width x height grid holding at most one object per cell.
struct Scene {
  int width = 1;
  int height = 1;
  std::vector<SceneObject> objects;

  bool in_bounds(GridPos p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height;
  }
  const SceneObject* at(GridPos p) const;
  const SceneObject* find(int id) const;
  SceneObject* find(int id);

  /// Empty string when every invariant holds, else the first violation.
  std::string violation() const;
  void validate() const {
    if (auto v = violation(); !v.empty()) throw InvalidScene(v);
  }

  friend bool operator==(const Scene&, const Scene&) = default;
};

enum class MatchMode : std::uint8_t { by_property, by_id };

struct MatchReport {
  std::set<int> matched_work_ids;
  std::set<int> matched_target_ids;
  std::map<int, int> pairing;  // work id -> target id

  std::size_t size() const { return pairing.size(); }
  /// Bit i set iff work object i is matched.
  std::uint64_t work_mask() const;

  friend bool operator==(const MatchReport&, const MatchReport&) = default;
};

/// Maximum matching of work objects onto target objects. A pair is admissible
/// when shape, color and position agree (and ids too in by_id mode). The held
/// object never matches.
MatchReport match_objects(const Scene& work, const Scene& target,
                          std::optional<int> held_id, MatchMode mode);

/// Bitmask form of match_objects(...).work_mask() without building sets.
std::uint64_t matched_mask(const Scene& work, const Scene& target,
                           std::optional<int> held_id, MatchMode mode);

bool is_solved(const Scene& work, const Scene& target,
               std::optional<int> held_id);

}  // namespace cogscript
