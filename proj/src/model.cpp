#include "cogscript/model.hpp"

#include <cmath>
#include <deque>
#include "json.hpp"

namespace cogscript {

namespace {

using nlohmann::json;

// Variant states covered by a mask token.
std::vector<int> token_states(std::string_view token, int line) {
  if (token == "<start>") return {kStartState};
  if (token.find('(') != std::string_view::npos)
    return {state_of(parse_instruction(token, line))};
  for (int v = 0; v < kVariantCount; ++v) {
    if (info(variant(v).op).name == token) {
      std::vector<int> states;
      for (int w = v; w < kVariantCount && variant(w).op == variant(v).op; ++w)
        states.push_back(w + 1);
      return states;
    }
  }
  throw ParseError(line, "unknown mask token '" + std::string(token) + "'");
}

std::vector<std::vector<int>> opcode_groups() {
  std::vector<std::vector<int>> groups(kOpcodeCount);
  for (int v = 0; v < kVariantCount; ++v)
    groups[static_cast<int>(variant(v).op)].push_back(v + 1);
  return groups;
}

std::vector<bool> reachable_rows(const TransitionMask& mask) {
  std::vector<bool> seen(kStateCount, false);
  std::deque<int> queue{kStartState};
  seen[kStartState] = true;
  while (!queue.empty()) {
    int from = queue.front();
    queue.pop_front();
    for (int to = 1; to < kStateCount; ++to) {
      if (mask.allowed(from, to) && !seen[to]) {
        seen[to] = true;
        queue.push_back(to);
      }
    }
  }
  return seen;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string state_name(int state) {
  if (state == kStartState) return "<start>";
  return to_string(variant(state - 1));
}

TransitionMask TransitionMask::all_allowed() {
  TransitionMask m;
  for (int from = 0; from < kStateCount; ++from)
    for (int to = 1; to < kStateCount; ++to) m.set(from, to, true);
  return m;
}

TransitionMask TransitionMask::none_allowed() {
  TransitionMask m;
  m.set(kStartState, state_of({Opcode::scene_parse, 0}), true);
  return m;
}

TransitionMask TransitionMask::restricted_to(const std::vector<int>& variants) const {
  std::vector<bool> keep(kStateCount, false);
  keep[kStartState] = true;
  for (int v : variants) keep[v + 1] = true;
  TransitionMask out = *this;
  for (int from = 0; from < kStateCount; ++from)
    for (int to = 0; to < kStateCount; ++to)
      if (!keep[from] || !keep[to]) out.set(from, to, false);
  return out;
}

TransitionModel::TransitionModel(std::vector<double> probs, TransitionMask mask)
    : probs_(std::move(probs)), mask_(mask) {
  if (probs_.size() != static_cast<std::size_t>(kStateCount * kStateCount))
    throw ModelError("probability table has wrong size");
}

std::string TransitionModel::violation(double tol) const {
  auto reach = reachable_rows(mask_);
  for (int from = 0; from < kStateCount; ++from) {
    double sum = 0.0;
    bool any = false;
    for (int to = 0; to < kStateCount; ++to) {
      double p = prob(from, to);
      if (!mask_.allowed(from, to)) {
        if (p != 0.0) return "masked cell " + state_name(from) + " -> " +
                             state_name(to) + " is nonzero";
        continue;
      }
      if (p < 0.0) return "negative probability in row " + state_name(from);
      any = true;
      sum += p;
    }
    if (!any && !reach[from]) continue;
    if (std::abs(sum - 1.0) > tol)
      return "row " + state_name(from) + " sums to " + std::to_string(sum);
  }
  return {};
}

TransitionModel train(const std::vector<Program>& programs, double alpha,
                      const TransitionMask& mask) {
  if (programs.empty()) throw ModelError("EmptyTrainingSet: no training programs");
  if (alpha < 0.0) throw ModelError("smoothing weight must be nonnegative");

  std::vector<double> counts(kStateCount * kStateCount, 0.0);
  for (const auto& program : programs) {
    if (auto v = program.violation(); !v.empty() || program.empty())
      throw ModelError("invalid training program: " + (v.empty() ? "empty" : v));
    int prev = kStartState;
    for (const auto& inst : program.instructions) {
      int next = state_of(inst);
      if (mask.allowed(prev, next)) counts[prev * kStateCount + next] += 1.0;
      prev = next;
    }
  }

  auto reach = reachable_rows(mask);
  std::vector<double> probs(kStateCount * kStateCount, 0.0);
  for (int from = 0; from < kStateCount; ++from) {
    double total = 0.0;
    int allowed = 0;
    for (int to = 0; to < kStateCount; ++to) {
      if (!mask.allowed(from, to)) continue;
      ++allowed;
      total += counts[from * kStateCount + to] + alpha;
    }
    if (allowed == 0) {
      if (reach[from])
        throw ModelError("AllMaskedRow: no allowed successor for " + state_name(from));
      continue;
    }
    if (total == 0.0) {
      // alpha = 0 and no observations: fall back to uniform over allowed cells.
      for (int to = 0; to < kStateCount; ++to)
        if (mask.allowed(from, to)) probs[from * kStateCount + to] = 1.0 / allowed;
      continue;
    }
    for (int to = 0; to < kStateCount; ++to)
      if (mask.allowed(from, to))
        probs[from * kStateCount + to] =
            (counts[from * kStateCount + to] + alpha) / total;
  }
  return TransitionModel(std::move(probs), mask);
}

ArgumentPrior::ArgumentPrior() {
  colors_.fill(1.0 / kColorCount);
  shapes_.fill(1.0 / kShapeCount);
}

ArgumentPrior::ArgumentPrior(std::array<double, kColorCount> colors,
                             std::array<double, kShapeCount> shapes)
    : colors_(colors), shapes_(shapes) {}

double ArgumentPrior::factor(const Instruction& inst) const {
  switch (info(inst.op).arg) {
    case ArgKind::none: return 1.0;
    case ArgKind::color: return colors_[inst.arg];
    case ArgKind::shape: return shapes_[inst.arg];
  }
  return 1.0;
}

namespace {

template <std::size_t N>
std::array<double, N> spread(const std::array<bool, N>& support,
                             const std::array<bool, N>& suppressed, bool any_change,
                             double epsilon) {
  std::array<double, N> p{};
  if (!any_change) {
    p.fill(1.0 / N);
    return p;
  }
  std::array<bool, N> s{};
  int count = 0;
  for (std::size_t i = 0; i < N; ++i) {
    s[i] = support[i] && !suppressed[i];
    count += s[i];
  }
  if (count == 0) {
    // The predictor's mass lands on the entries it did not suppress.
    for (std::size_t i = 0; i < N; ++i) {
      s[i] = !suppressed[i];
      count += s[i];
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    p[i] = s[i] ? 1.0 / count : epsilon;
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace

ArgumentPrior argument_prior(const Concept& cpt,
                             const ArgumentPriorOptions& options) {
  std::array<bool, kColorCount> colors{};
  std::array<bool, kShapeCount> shapes{};
  bool any_change = false;
  for (const auto& ex : cpt.examples) {
    for (const auto& in : ex.input.objects) {
      const auto* out = ex.output.find(in.id);
      if (!out || *out == in) continue;
      any_change = true;
      colors[static_cast<int>(in.color)] = true;
      colors[static_cast<int>(out->color)] = true;
      shapes[static_cast<int>(in.shape)] = true;
      shapes[static_cast<int>(out->shape)] = true;
    }
  }
  std::array<bool, kColorCount> sup_colors{};
  std::array<bool, kShapeCount> sup_shapes{};
  for (auto c : options.suppressed_colors) sup_colors[static_cast<int>(c)] = true;
  for (auto s : options.suppressed_shapes) sup_shapes[static_cast<int>(s)] = true;
  return ArgumentPrior(spread(colors, sup_colors, any_change, options.epsilon),
                       spread(shapes, sup_shapes, any_change, options.epsilon));
}

double description_length(const Program& program, const TransitionModel& model,
                          const ArgumentPrior& prior) {
  double dl = 0.0;
  int prev = kStartState;
  for (const auto& inst : program.instructions) {
    double f = transition_factor(model, prior, prev, inst);
    if (f <= 0.0) return kInfinity;
    dl += -std::log(f);
    prev = state_of(inst);
  }
  return dl;
}

TransitionMask parse_mask(std::string_view text) {
  TransitionMask mask = TransitionMask::all_allowed();
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
    auto arrow = line.find("->");
    if (arrow == std::string_view::npos)
      throw ParseError(line_no, "expected '<from> -> <to>'");
    auto from = token_states(trim(line.substr(0, arrow)), line_no);
    auto to = token_states(trim(line.substr(arrow + 2)), line_no);
    for (int f : from)
      for (int t : to) mask.set(f, t, false);
  }
  return mask;
}

std::string format_mask(const TransitionMask& mask) {
  std::string out = "# forbidden transitions, one '<from> -> <to>' per line\n";
  auto groups = opcode_groups();
  std::vector<std::vector<int>> from_groups = {{kStartState}};
  std::vector<std::string> from_names = {"<start>"};
  for (int op = 0; op < kOpcodeCount; ++op) {
    from_groups.push_back(groups[op]);
    from_names.emplace_back(opcode_table()[op].name);
  }
  for (std::size_t fg = 0; fg < from_groups.size(); ++fg) {
    for (int op = 0; op < kOpcodeCount; ++op) {
      bool all = true;
      for (int f : from_groups[fg])
        for (int t : groups[op]) all = all && !mask.allowed(f, t);
      if (all) {
        out += from_names[fg] + " -> " + std::string(opcode_table()[op].name) + "\n";
        continue;
      }
      for (int f : from_groups[fg])
        for (int t : groups[op])
          if (!mask.allowed(f, t))
            out += state_name(f) + " -> " + state_name(t) + "\n";
    }
  }
  return out;
}

std::string format_model(const TransitionModel& model) {
  json doc;
  json states = json::array();
  for (int s = 0; s < kStateCount; ++s) states.push_back(state_name(s));
  doc["states"] = states;
  doc["probs"] = model.table();
  std::vector<int> mask(kStateCount * kStateCount);
  for (int f = 0; f < kStateCount; ++f)
    for (int t = 0; t < kStateCount; ++t)
      mask[f * kStateCount + t] = model.mask().allowed(f, t) ? 1 : 0;
  doc["mask"] = mask;
  return doc.dump(1) + "\n";
}

TransitionModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model file: ") + e.what());
  }
  try {
    const auto& states = doc.at("states");
    if (states.size() != static_cast<std::size_t>(kStateCount))
      throw ModelError("model file: expected " + std::to_string(kStateCount) + " states");
    for (int s = 0; s < kStateCount; ++s)
      if (states[s].get<std::string>() != state_name(s))
        throw ModelError("model file: state " + std::to_string(s) + " is '" +
                         states[s].get<std::string>() + "', expected '" +
                         state_name(s) + "'");
    auto probs = doc.at("probs").get<std::vector<double>>();
    auto cells = doc.at("mask").get<std::vector<int>>();
    if (cells.size() != static_cast<std::size_t>(kStateCount * kStateCount))
      throw ModelError("model file: mask has wrong size");
    TransitionMask mask = TransitionMask::none_allowed();
    for (int f = 0; f < kStateCount; ++f)
      for (int t = 0; t < kStateCount; ++t)
        mask.set(f, t, cells[f * kStateCount + t] != 0);
    TransitionModel model(std::move(probs), mask);
    if (auto v = model.violation(); !v.empty()) throw ModelError("model file: " + v);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model file: ") + e.what());
  }
}

}  // namespace cogscript
