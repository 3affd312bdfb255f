#include "cogscript/instruction.hpp"

#include <algorithm>
#include <array>

namespace cogscript {

namespace {

constexpr std::array<OpcodeInfo, kOpcodeCount> kOpcodes = {{
    {Opcode::scene_parse, "scene_parse", ArgKind::none},
    {Opcode::set_color_attn, "set_color_attn", ArgKind::color},
    {Opcode::set_shape_attn, "set_shape_attn", ArgKind::shape},
    {Opcode::top_down_attend, "top_down_attend", ArgKind::none},
    {Opcode::reset_attn, "reset_attn", ArgKind::none},
    {Opcode::next_object, "next_object", ArgKind::none},
    {Opcode::fixate_object, "fixate_object", ArgKind::none},
    {Opcode::fixate_previous, "fixate_previous", ArgKind::none},
    {Opcode::fixate_next, "fixate_next", ArgKind::none},
    {Opcode::move_hand_to_attended_object, "move_hand_to_attended_object",
     ArgKind::none},
    {Opcode::move_hand_to_fixation, "move_hand_to_fixation", ArgKind::none},
    {Opcode::move_hand_up, "move_hand_up", ArgKind::none},
    {Opcode::move_hand_down, "move_hand_down", ArgKind::none},
    {Opcode::move_hand_left, "move_hand_left", ArgKind::none},
    {Opcode::move_hand_right, "move_hand_right", ArgKind::none},
    {Opcode::grab_object, "grab_object", ArgKind::none},
    {Opcode::release_object, "release_object", ArgKind::none},
    {Opcode::fill_color, "fill_color", ArgKind::color},
    {Opcode::loop_start, "loop_start", ArgKind::none},
    {Opcode::loop_end, "loop_end", ArgKind::none},
}};

int arg_arity(ArgKind k) {
  switch (k) {
    case ArgKind::none: return 1;
    case ArgKind::color: return kColorCount;
    case ArgKind::shape: return kShapeCount;
  }
  return 1;
}

struct VariantTable {
  std::array<int, kOpcodeCount> first{};
  std::array<Instruction, kVariantCount> variants{};

  constexpr VariantTable() {
    int next = 0;
    for (int op = 0; op < kOpcodeCount; ++op) {
      first[op] = next;
      for (int a = 0; a < arg_arity(kOpcodes[op].arg); ++a)
        variants[next++] = {kOpcodes[op].opcode, static_cast<std::uint8_t>(a)};
    }
  }
};

const VariantTable& variant_table() {
  static const VariantTable table;
  return table;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::span<const OpcodeInfo> opcode_table() { return kOpcodes; }

const OpcodeInfo& info(Opcode op) {
  return kOpcodes[static_cast<std::size_t>(op)];
}

std::string to_string(const Instruction& inst) {
  const auto& i = info(inst.op);
  std::string out(i.name);
  if (i.arg == ArgKind::color)
    out += "(" + std::string(to_string(inst.color_arg())) + ")";
  else if (i.arg == ArgKind::shape)
    out += "(" + std::string(to_string(inst.shape_arg())) + ")";
  return out;
}

int variant_index(const Instruction& inst) {
  return variant_table().first[static_cast<std::size_t>(inst.op)] + inst.arg;
}

Instruction variant(int index) { return variant_table().variants.at(index); }

std::string Program::violation() const {
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    bool parse = instructions[i].op == Opcode::scene_parse;
    if (i == 0 && !parse) return "program must begin with scene_parse";
    if (i > 0 && parse)
      return "scene_parse at index " + std::to_string(i) + " (only legal first)";
  }
  return {};
}

std::string Program::encode() const {
  std::string out;
  out.reserve(instructions.size());
  for (const auto& inst : instructions)
    out.push_back(static_cast<char>(variant_index(inst)));
  return out;
}

Program Program::decode(std::string_view bytes) {
  Program p;
  p.instructions.reserve(bytes.size());
  for (char c : bytes) p.instructions.push_back(variant(static_cast<unsigned char>(c)));
  return p;
}

bool lexicographic_less(const Program& a, const Program& b) {
  return std::lexicographical_compare(
      a.instructions.begin(), a.instructions.end(), b.instructions.begin(),
      b.instructions.end(), [](const Instruction& x, const Instruction& y) {
        return variant_index(x) < variant_index(y);
      });
}

Program make_program(std::initializer_list<Instruction> insts) {
  return Program{std::vector<Instruction>(insts)};
}

Instruction parse_instruction(std::string_view text, int line) {
  text = trim(text);
  std::string_view name = text;
  std::string_view arg;
  bool has_parens = false;
  if (auto open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') throw ParseError(line, "unterminated argument list");
    name = trim(text.substr(0, open));
    arg = trim(text.substr(open + 1, text.size() - open - 2));
    has_parens = true;
  }

  // Aliases used in the published program listings.
  if (name == "move_hand_to_object") name = "move_hand_to_attended_object";
  if (name == "reset_attention") name = "reset_attn";

  const auto it = std::find_if(kOpcodes.begin(), kOpcodes.end(),
                               [&](const auto& o) { return o.name == name; });
  if (it == kOpcodes.end())
    throw ParseError(line, "unknown opcode '" + std::string(name) + "'");

  switch (it->arg) {
    case ArgKind::none:
      if (has_parens)
        throw ParseError(line, std::string(name) + " takes no argument");
      return {it->opcode, 0};
    case ArgKind::color: {
      if (!has_parens) throw ParseError(line, std::string(name) + " needs a color");
      auto c = parse_color(arg);
      if (!c) throw ParseError(line, "unknown color '" + std::string(arg) + "'");
      return Instruction::color(it->opcode, *c);
    }
    case ArgKind::shape: {
      if (!has_parens) throw ParseError(line, std::string(name) + " needs a shape");
      auto s = parse_shape(arg);
      if (!s) throw ParseError(line, "unknown shape '" + std::string(arg) + "'");
      return Instruction::shape(it->opcode, *s);
    }
  }
  throw ParseError(line, "unreachable");
}

Program parse_program(std::string_view text) {
  Program program;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    program.instructions.push_back(parse_instruction(line, line_no));
  }
  return program;
}

std::string format_program(const Program& program) {
  std::string out;
  for (const auto& inst : program.instructions) {
    out += to_string(inst);
    out += '\n';
  }
  return out;
}

}  // namespace cogscript
