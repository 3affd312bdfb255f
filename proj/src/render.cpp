#include "cogscript/render.hpp"

#include <cctype>
#include <sstream>

namespace cogscript {

namespace {

char shape_char(Shape s) {
  switch (s) {
    case Shape::square: return 's';
    case Shape::circle: return 'c';
    case Shape::triangle: return 't';
    case Shape::star: return 'r';
  }
  return '?';
}

const char* svg_color(Color c) {
  switch (c) {
    case Color::red: return "#d62728";
    case Color::green: return "#2ca02c";
    case Color::blue: return "#1f77b4";
    case Color::yellow: return "#e6c229";
  }
  return "#000";
}

std::string pos_text(GridPos p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

}  // namespace

std::string render_state(const VmState& s) {
  std::ostringstream os;
  const Scene& sc = s.working;
  const SceneObject* attended = s.attended_object();
  os << "   ";
  for (int x = 0; x < sc.width; ++x) os << ' ' << (x % 10) << ' ';
  os << '\n';
  for (int y = 0; y < sc.height; ++y) {
    os << (y < 10 ? " " : "") << y << ' ';
    for (int x = 0; x < sc.width; ++x) {
      GridPos p{x, y};
      const SceneObject* o = sc.at(p);
      if (o) {
        char c = shape_char(o->shape);
        if (attended && attended->id == o->id) c = static_cast<char>(std::toupper(c));
        os << c << to_string(o->color)[0];
      } else {
        os << "..";
      }
      os << (s.parsed && s.fixation == p ? '*' : ' ');
    }
    os << '\n';
  }
  os << "H hand=" << pos_text(s.hand) << " held=";
  if (s.held) os << *s.held; else os << '-';
  os << " attended=";
  if (attended) os << attended->id; else os << '-';
  os << " fixation=" << pos_text(s.fixation) << " history=[";
  for (std::size_t i = 0; i < s.fixation_history.size(); ++i) {
    if (i) os << ' ';
    if (static_cast<int>(i) == s.fixation_cursor) os << '>';
    os << pos_text(s.fixation_history[i]);
  }
  os << "]\n";
  return os.str();
}

std::string render_trace(const Program& program, const ExecResult& result) {
  std::ostringstream os;
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& t = result.trace[i];
    os << "step " << i + 1 << " [" << t.program_index << "] " << to_string(t.instruction)
       << '\n'
       << render_state(t.state) << '\n';
  }
  if (result.error) {
    const auto& e = *result.error;
    os << "error " << to_string(e.kind) << " at step " << e.at_step + 1 << " [" << e.program_index
       << "]";
    if (e.program_index >= 0 && e.program_index < static_cast<int>(program.size()))
      os << ' ' << to_string(program[e.program_index]);
    os << ": " << e.message << '\n';
  }
  return os.str();
}

std::string render_svg(const VmState& s) {
  constexpr int kCell = 40;
  const Scene& sc = s.working;
  const SceneObject* attended = s.attended_object();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << sc.width * kCell
     << "\" height=\"" << sc.height * kCell << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& o : sc.objects) {
    const int cx = o.pos.x * kCell + kCell / 2, cy = o.pos.y * kCell + kCell / 2;
    if (attended && attended->id == o.id)
      os << "<rect x=\"" << o.pos.x * kCell << "\" y=\"" << o.pos.y * kCell << "\" width=\""
         << kCell << "\" height=\"" << kCell << "\" fill=\"#9ecae1\"/>\n";
    const char* fill = svg_color(o.color);
    switch (o.shape) {
      case Shape::square:
        os << "<rect x=\"" << cx - 12 << "\" y=\"" << cy - 12
           << "\" width=\"24\" height=\"24\" fill=\"" << fill << "\"/>\n";
        break;
      case Shape::circle:
        os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"13\" fill=\"" << fill
           << "\"/>\n";
        break;
      case Shape::triangle:
        os << "<polygon points=\"" << cx << ',' << cy - 13 << ' ' << cx - 13 << ',' << cy + 12
           << ' ' << cx + 13 << ',' << cy + 12 << "\" fill=\"" << fill << "\"/>\n";
        break;
      case Shape::star:
        os << "<polygon points=\"" << cx << ',' << cy - 14 << ' ' << cx + 4 << ',' << cy - 4
           << ' ' << cx + 14 << ',' << cy - 4 << ' ' << cx + 6 << ',' << cy + 3 << ' ' << cx + 9
           << ',' << cy + 14 << ' ' << cx << ',' << cy + 7 << ' ' << cx - 9 << ',' << cy + 14
           << ' ' << cx - 6 << ',' << cy + 3 << ' ' << cx - 14 << ',' << cy - 4 << ' ' << cx - 4
           << ',' << cy - 4 << "\" fill=\"" << fill << "\"/>\n";
        break;
    }
  }
  if (s.parsed) {
    const int fx = s.fixation.x * kCell + kCell / 2, fy = s.fixation.y * kCell + kCell / 2;
    os << "<path d=\"M" << fx - 8 << ' ' << fy - 8 << " L" << fx + 8 << ' ' << fy + 8 << " M"
       << fx + 8 << ' ' << fy - 8 << " L" << fx - 8 << ' ' << fy + 8
       << "\" stroke=\"red\" stroke-width=\"3\"/>\n";
    os << "<circle cx=\"" << s.hand.x * kCell + kCell / 2 << "\" cy=\""
       << s.hand.y * kCell + kCell / 2 << "\" r=\"17\" fill=\"none\" stroke=\"black\""
       << (s.held ? " stroke-width=\"3\"" : " stroke-dasharray=\"4 3\"") << "/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cogscript
