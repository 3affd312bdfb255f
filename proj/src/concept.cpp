#include "cogscript/concept.hpp"

#include <algorithm>

namespace cogscript {

namespace {

std::vector<int> sorted_ids(const Scene& s) {
  std::vector<int> ids;
  for (const auto& o : s.objects) ids.push_back(o.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::string Concept::violation() const {
  if (examples.empty()) return "concept has no examples";
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    const std::string where = "examples[" + std::to_string(i) + "]";
    if (auto v = ex.input.violation(); !v.empty()) return where + ".input: " + v;
    if (auto v = ex.output.violation(); !v.empty()) return where + ".output: " + v;
    if (ex.input.width != ex.output.width || ex.input.height != ex.output.height)
      return where + ": input and output grid sizes differ";
    if (sorted_ids(ex.input) != sorted_ids(ex.output))
      return where + ": input and output object ids differ";
  }
  return {};
}

}  // namespace cogscript
