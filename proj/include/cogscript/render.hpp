#pragma once

#include <string>

#include "cogscript/emulator.hpp"

namespace cogscript {

/// ASCII grid of a VM state. Each cell is three characters: shape initial
/// (s square, c circle, t triangle, r star; uppercase when attended), color
/// initial, and '*' on the fixation cell. An `H` row follows with hand, held
/// object, attention and fixation history.
std::string render_state(const VmState& state);

/// Numbered frames for every executed step; an erroring run ends with a line
/// naming the error kind and the failing instruction.
std::string render_trace(const Program& program, const ExecResult& result);

/// One SVG image of a state: attended object highlighted in blue, fixation
/// marked with a red X.
std::string render_svg(const VmState& state);

}  // namespace cogscript
