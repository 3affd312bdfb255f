#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cogscript/world.hpp"

namespace cogscript {

enum class Opcode : std::uint8_t {
  scene_parse,
  set_color_attn,
  set_shape_attn,
  top_down_attend,
  reset_attn,
  next_object,
  fixate_object,
  fixate_previous,
  fixate_next,
  move_hand_to_attended_object,
  move_hand_to_fixation,
  move_hand_up,
  move_hand_down,
  move_hand_left,
  move_hand_right,
  grab_object,
  release_object,
  fill_color,
  loop_start,
  loop_end,
};

enum class ArgKind : std::uint8_t { none, color, shape };

struct OpcodeInfo {
  Opcode opcode;
  std::string_view name;
  ArgKind arg;
};

/// The opcode table. Argumented variants are derived from it, so adding a row
/// here is all a new primitive needs on the registry side.
std::span<const OpcodeInfo> opcode_table();
const OpcodeInfo& info(Opcode op);
inline constexpr int kOpcodeCount = 20;

struct Instruction {
  Opcode op = Opcode::scene_parse;
  std::uint8_t arg = 0;  // palette index; 0 when the opcode takes no argument

  static Instruction color(Opcode op, Color c) {
    return {op, static_cast<std::uint8_t>(c)};
  }
  static Instruction shape(Opcode op, Shape s) {
    return {op, static_cast<std::uint8_t>(s)};
  }

  Color color_arg() const { return static_cast<Color>(arg); }
  Shape shape_arg() const { return static_cast<Shape>(arg); }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

std::string to_string(const Instruction& inst);

// Every (opcode, argument) pair gets a dense variant index in registry order.
inline constexpr int kVariantCount = 29;
int variant_index(const Instruction& inst);
Instruction variant(int index);

struct Program {
  std::vector<Instruction> instructions;

  std::size_t size() const { return instructions.size(); }
  bool empty() const { return instructions.empty(); }
  const Instruction& operator[](std::size_t i) const { return instructions[i]; }

  /// Empty when scene_parse leads and appears nowhere else.
  std::string violation() const;

  /// One byte per instruction (variant index); the key of the seen-set.
  std::string encode() const;
  static Program decode(std::string_view bytes);

  /// Lexicographic comparison over variant indices.
  friend bool lexicographic_less(const Program& a, const Program& b);
  friend bool operator==(const Program&, const Program&) = default;
};

Program make_program(std::initializer_list<Instruction> insts);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

Instruction parse_instruction(std::string_view text, int line = 1);

/// One instruction per line; blank lines and '#' comments are skipped.
Program parse_program(std::string_view text);

/// Inverse of parse_program: one instruction per line, trailing newline.
std::string format_program(const Program& program);

}  // namespace cogscript
