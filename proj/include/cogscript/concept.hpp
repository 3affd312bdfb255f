#pragma once

#include <string>
#include <vector>

#include "cogscript/world.hpp"

namespace cogscript {

struct Example {
  Scene input;
  Scene output;

  friend bool operator==(const Example&, const Example&) = default;
};

/// Input/output scene pairs that one program should map in every case.
struct Concept {
  std::string name;
  std::vector<Example> examples;

  /// Empty when every example is valid: scenes satisfy their invariants,
  /// dimensions agree within a pair, and input/output hold the same id set.
  std::string violation() const;

  friend bool operator==(const Concept&, const Concept&) = default;
};

}  // namespace cogscript
