#include "sepalg/models.hpp"

#include <algorithm>
#include <charconv>

namespace sepalg {

namespace {

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

ModelConfig canonical_config(ModelConfig cfg) {
  sort_unique(cfg.locations);
  sort_unique(cfg.values);
  sort_unique(cfg.variables);
  return cfg;
}

template <typename T, typename Fn>
std::string join(const std::vector<T>& items, const char* sep, Fn&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += fmt(items[i]);
  }
  return out;
}

std::string int_text(int v) { return std::to_string(v); }

std::string config_origin(const char* kind, const ModelConfig& cfg, bool with_vars) {
  std::string out = kind;
  out += "(L=[" + join(cfg.locations, ",", int_text) + "]; Val=[" +
         join(cfg.values, ",", int_text) + "]";
  if (with_vars)
    out += "; Var=[" + join(cfg.variables, ",", [](const std::string& s) { return s; }) + "]";
  return out + ")";
}

void require_heap_config(const ModelConfig& cfg, bool needs_addresses, const char* kind) {
  if (cfg.locations.empty()) throw ModelError(std::string(kind) + ": no locations");
  if (cfg.values.empty()) throw ModelError(std::string(kind) + ": no values");
  if (needs_addresses) {
    for (int l : cfg.locations)
      if (!std::binary_search(cfg.values.begin(), cfg.values.end(), l))
        throw ModelError(std::string(kind) + ": values must contain every location (missing " +
                         std::to_string(l) + ")");
  }
}

/// Maps over locations-then-variables in mixed radix, first key least
/// significant, digit 0 = absent; the all-absent map is index 0.
std::vector<HeapState> enumerate_maps(const ModelConfig& cfg, bool with_variables,
                                      std::size_t max_elements) {
  const std::size_t radix = cfg.values.size() + 1;
  std::size_t total = 1;
  const std::size_t keys = cfg.locations.size() + (with_variables ? cfg.variables.size() : 0);
  for (std::size_t k = 0; k < keys; ++k) {
    if (total > max_elements / radix) throw SizeGuardError("model exceeds the element limit");
    total *= radix;
  }

  std::vector<HeapState> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    HeapState s;
    std::size_t rest = idx;
    for (int loc : cfg.locations) {
      const std::size_t d = rest % radix;
      rest /= radix;
      if (d) s.heap.emplace_back(loc, cfg.values[d - 1]);
    }
    if (with_variables) {
      for (const std::string& var : cfg.variables) {
        const std::size_t d = rest % radix;
        rest /= radix;
        if (d) s.stack.emplace_back(var, cfg.values[d - 1]);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

BuiltModel finish_model(ModelKind kind, ModelConfig cfg, std::vector<HeapState> states,
                        std::string origin, std::size_t max_elements) {
  RawTable t;
  t.origin = std::move(origin);
  t.unit = "u";
  t.elements.reserve(states.size());
  for (const HeapState& s : states) t.elements.push_back(state_label(s));

  std::map<HeapState, std::uint32_t> index;
  for (std::uint32_t i = 0; i < states.size(); ++i) index.emplace(states[i], i);

  for (std::uint32_t i = 0; i < states.size(); ++i) {
    for (std::uint32_t j = 0; j < states.size(); ++j) {
      auto composed = compose_states(states[i], states[j]);
      if (!composed) continue;
      auto it = index.find(*composed);
      if (it == index.end()) throw std::logic_error("composition left the enumerated carrier");
      t.compose.push_back({t.elements[i], t.elements[j], t.elements[it->second]});
    }
  }

  auto built = SeparationAlgebra::validate(t, max_elements);
  if (!built.report.passed)
    throw std::logic_error("generated model failed validation: " + t.origin);

  BuiltModel m;
  m.algebra = std::move(built.algebra);
  m.kind = kind;
  m.config = std::move(cfg);
  m.states = std::move(states);
  m.state_index = std::move(index);
  return m;
}

bool is_location(const ModelConfig& cfg, int v) {
  return std::binary_search(cfg.locations.begin(), cfg.locations.end(), v);
}

const int* heap_value(const HeapState& s, int loc) {
  for (const auto& [l, v] : s.heap)
    if (l == loc) return &v;
  return nullptr;
}

const int* stack_value(const HeapState& s, const std::string& var) {
  for (const auto& [x, v] : s.stack)
    if (x == var) return &v;
  return nullptr;
}

void erase_heap(HeapState& s, int loc) {
  std::erase_if(s.heap, [&](const auto& cell) { return cell.first == loc; });
}

void set_heap(HeapState& s, int loc, int value) {
  for (auto& [l, v] : s.heap) {
    if (l == loc) {
      v = value;
      return;
    }
  }
  s.heap.emplace_back(loc, value);
  std::sort(s.heap.begin(), s.heap.end());
}

void set_stack(HeapState& s, const std::string& var, int value) {
  for (auto& [x, v] : s.stack) {
    if (x == var) {
      v = value;
      return;
    }
  }
  s.stack.emplace_back(var, value);
  std::sort(s.stack.begin(), s.stack.end());
}

}  // namespace

void HeapState::normalize() {
  std::sort(heap.begin(), heap.end());
  std::sort(stack.begin(), stack.end());
  if (free_locations) std::sort(free_locations->begin(), free_locations->end());
}

std::string state_label(const HeapState& s) {
  if (s.is_unit()) return "u";
  std::vector<std::string> parts;
  for (const auto& [x, v] : s.stack) parts.push_back(x + "->" + std::to_string(v));
  for (const auto& [l, v] : s.heap) parts.push_back(std::to_string(l) + "->" + std::to_string(v));
  if (s.free_locations) parts.push_back("F{" + join(*s.free_locations, ",", int_text) + "}");
  return join(parts, " * ", [](const std::string& p) { return p; });
}

std::optional<HeapState> compose_states(const HeapState& a, const HeapState& b) {
  if (a.free_locations && b.free_locations) return std::nullopt;
  HeapState out;
  out.heap.reserve(a.heap.size() + b.heap.size());
  std::merge(a.heap.begin(), a.heap.end(), b.heap.begin(), b.heap.end(),
             std::back_inserter(out.heap));
  for (std::size_t i = 1; i < out.heap.size(); ++i)
    if (out.heap[i].first == out.heap[i - 1].first) return std::nullopt;
  out.stack.reserve(a.stack.size() + b.stack.size());
  std::merge(a.stack.begin(), a.stack.end(), b.stack.begin(), b.stack.end(),
             std::back_inserter(out.stack));
  for (std::size_t i = 1; i < out.stack.size(); ++i)
    if (out.stack[i].first == out.stack[i - 1].first) return std::nullopt;
  const auto& free = a.free_locations ? a.free_locations : b.free_locations;
  if (free) {
    for (int l : *free)
      if (heap_value(out, l)) return std::nullopt;
    out.free_locations = *free;
  }
  return out;
}

std::optional<ElementId> BuiltModel::find_state(const HeapState& s) const {
  auto it = state_index.find(s);
  if (it == state_index.end()) return std::nullopt;
  return algebra->element(it->second);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<HeapState> parse_state(std::string_view text) {
  HeapState s;
  bool saw_free = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find('*', pos);
    std::string_view part =
        trim(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
    if (part.empty() || part == "u") continue;
    if (part.starts_with("F{")) {
      if (!part.ends_with('}') || saw_free) return std::nullopt;
      saw_free = true;
      s.free_locations.emplace();
      std::string_view body = part.substr(2, part.size() - 3);
      std::size_t p = 0;
      while (p <= body.size() && !body.empty()) {
        const std::size_t comma = body.find(',', p);
        std::string_view item =
            trim(body.substr(p, comma == std::string_view::npos ? comma : comma - p));
        p = comma == std::string_view::npos ? body.size() + 1 : comma + 1;
        auto v = parse_int(item);
        if (!v) return std::nullopt;
        s.free_locations->push_back(*v);
      }
      continue;
    }
    const std::size_t arrow = part.find("->");
    if (arrow == std::string_view::npos) return std::nullopt;
    std::string_view key = trim(part.substr(0, arrow));
    auto value = parse_int(trim(part.substr(arrow + 2)));
    if (key.empty() || !value) return std::nullopt;
    if (auto loc = parse_int(key)) {
      if (heap_value(s, *loc)) return std::nullopt;
      s.heap.emplace_back(*loc, *value);
    } else {
      if (stack_value(s, std::string(key))) return std::nullopt;
      s.stack.emplace_back(std::string(key), *value);
    }
  }
  s.normalize();
  if (s.free_locations) {
    auto& f = *s.free_locations;
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  return s;
}

}  // namespace

std::optional<ElementId> BuiltModel::parse_element(std::string_view text) const {
  const std::string_view trimmed = trim(text);
  if (trimmed.empty()) return std::nullopt;  // blank text must not alias the unit
  if (auto direct = algebra->find(trimmed)) return direct;
  switch (kind) {
    case ModelKind::zmod: {
      auto v = parse_int(trimmed);
      if (!v) return std::nullopt;
      const int k = ((*v % modulus) + modulus) % modulus;
      return algebra->find(std::to_string(k));
    }
    case ModelKind::plain_heap:
    case ModelKind::stack_heap:
    case ModelKind::freeset_heap: {
      auto s = parse_state(trimmed);
      if (!s) return std::nullopt;
      return find_state(*s);
    }
    case ModelKind::table:
      return std::nullopt;
  }
  return std::nullopt;
}

BuiltModel build_plain_heap(const ModelConfig& raw_cfg, std::size_t max_elements) {
  ModelConfig cfg = canonical_config(raw_cfg);
  require_heap_config(cfg, false, "plain heap");
  if (!cfg.variables.empty()) throw ModelError("plain heap: model takes no variables");
  auto states = enumerate_maps(cfg, false, max_elements);
  std::string origin = config_origin("plain_heap", cfg, false);
  return finish_model(ModelKind::plain_heap, std::move(cfg), std::move(states), std::move(origin),
                      max_elements);
}

BuiltModel build_stack_heap(const ModelConfig& raw_cfg, std::size_t max_elements) {
  ModelConfig cfg = canonical_config(raw_cfg);
  require_heap_config(cfg, true, "stack heap");
  auto states = enumerate_maps(cfg, true, max_elements);
  std::string origin = config_origin("stack_heap", cfg, true);
  return finish_model(ModelKind::stack_heap, std::move(cfg), std::move(states), std::move(origin),
                      max_elements);
}

BuiltModel build_freeset_heap(const ModelConfig& raw_cfg, std::size_t max_elements) {
  ModelConfig cfg = canonical_config(raw_cfg);
  require_heap_config(cfg, true, "free-set heap");
  if (cfg.locations.size() >= 20) throw SizeGuardError("model exceeds the element limit");
  auto maps = enumerate_maps(cfg, true, max_elements);

  std::size_t total = 0;
  for (const HeapState& h : maps) {
    total += 1 + (std::size_t{1} << (cfg.locations.size() - h.heap.size()));
    if (total > max_elements) throw SizeGuardError("model exceeds the element limit");
  }

  // Map-major order; per map: no free set, then subsets of the unallocated
  // locations by ascending bitmask over the sorted location list.
  std::vector<HeapState> states;
  states.reserve(total);
  for (const HeapState& h : maps) {
    states.push_back(h);
    for (std::size_t mask = 0; mask < (std::size_t{1} << cfg.locations.size()); ++mask) {
      HeapState s = h;
      s.free_locations.emplace();
      bool ok = true;
      for (std::size_t bit = 0; bit < cfg.locations.size(); ++bit) {
        if (!(mask & (std::size_t{1} << bit))) continue;
        if (heap_value(h, cfg.locations[bit])) {
          ok = false;
          break;
        }
        s.free_locations->push_back(cfg.locations[bit]);
      }
      if (ok) states.push_back(std::move(s));
    }
  }

  std::string origin = config_origin("freeset_heap", cfg, true);
  return finish_model(ModelKind::freeset_heap, std::move(cfg), std::move(states),
                      std::move(origin), max_elements);
}

BuiltModel build_zmod(int n, std::size_t max_elements) {
  if (n < 2) throw ModelError("modular model: modulus must be at least 2");
  if (static_cast<std::size_t>(n) > max_elements)
    throw SizeGuardError("model exceeds the element limit");
  RawTable t;
  t.origin = "zmod(" + std::to_string(n) + ")";
  t.unit = "0";
  for (int i = 0; i < n; ++i) t.elements.push_back(std::to_string(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      t.compose.push_back({t.elements[i], t.elements[j], t.elements[(i + j) % n]});
  auto built = SeparationAlgebra::validate(t, max_elements);
  if (!built.report.passed) throw std::logic_error("generated model failed validation: zmod");
  BuiltModel m;
  m.algebra = std::move(built.algebra);
  m.kind = ModelKind::zmod;
  m.modulus = n;
  return m;
}

TableBuild build_table(const RawTable& table, std::size_t max_elements) {
  auto built = SeparationAlgebra::validate(table, max_elements);
  TableBuild result;
  result.report = std::move(built.report);
  if (built.algebra) {
    BuiltModel m;
    m.algebra = std::move(built.algebra);
    m.kind = ModelKind::table;
    result.model = std::move(m);
  }
  return result;
}

std::string CommandDescriptor::text() const {
  switch (kind) {
    case Kind::dispose_loc:
      return "dispose_loc[" + std::to_string(location) + "]";
    case Kind::alloc:
      return "new[" + var + "]";
    case Kind::dispose_var:
      return "dispose[" + var + "]";
    case Kind::mutate:
      return "mutate[" + var + "," + std::to_string(value) + "]";
    case Kind::lookup:
      return "lookup[" + var + "," + var2 + "]";
    case Kind::adder:
      return "adder[" + std::to_string(constant) + "]";
    case Kind::multiplier:
      return "multiplier[" + std::to_string(constant) + "]";
  }
  return "?";
}

namespace {

void require_variable(const ModelConfig& cfg, const std::string& var) {
  if (!std::binary_search(cfg.variables.begin(), cfg.variables.end(), var))
    throw ModelError("unknown variable '" + var + "'");
}

RawAction heap_command(const BuiltModel& model, const CommandDescriptor& cmd) {
  const ModelConfig& cfg = model.config;
  const bool freeset = model.kind == ModelKind::freeset_heap;
  RawAction action{model.algebra, {}, cmd.text()};
  action.outcomes.reserve(model.states.size());

  auto must_find = [&](const HeapState& s) {
    auto e = model.find_state(s);
    if (!e) throw std::logic_error("command output left the carrier");
    return *e;
  };

  for (const HeapState& s : model.states) {
    switch (cmd.kind) {
      case CommandDescriptor::Kind::dispose_loc: {
        if (!heap_value(s, cmd.location)) break;
        HeapState t = s;
        erase_heap(t, cmd.location);
        action.outcomes.push_back(Outcome::single(must_find(t)));
        continue;
      }
      case CommandDescriptor::Kind::alloc: {
        if (!stack_value(s, cmd.var)) break;
        if (freeset && !s.free_locations) break;
        Outcome o = Outcome::diverge(model.algebra);
        const std::vector<int>& candidates =
            freeset ? *s.free_locations : cfg.locations;
        for (int l : candidates) {
          if (!freeset && heap_value(s, l)) continue;
          for (int w : cfg.values) {
            HeapState t = s;
            set_stack(t, cmd.var, l);
            set_heap(t, l, w);
            if (freeset) std::erase(*t.free_locations, l);
            o.mutable_states().insert_index(must_find(t).index);
          }
        }
        action.outcomes.push_back(std::move(o));
        continue;
      }
      case CommandDescriptor::Kind::dispose_var: {
        const int* l = stack_value(s, cmd.var);
        if (!l || !is_location(cfg, *l) || !heap_value(s, *l)) break;
        if (freeset && !s.free_locations) break;
        HeapState t = s;
        erase_heap(t, *l);
        if (freeset) {
          t.free_locations->push_back(*l);
          std::sort(t.free_locations->begin(), t.free_locations->end());
        }
        action.outcomes.push_back(Outcome::single(must_find(t)));
        continue;
      }
      case CommandDescriptor::Kind::mutate: {
        const int* l = stack_value(s, cmd.var);
        if (!l || !is_location(cfg, *l) || !heap_value(s, *l)) break;
        HeapState t = s;
        set_heap(t, *l, cmd.value);
        action.outcomes.push_back(Outcome::single(must_find(t)));
        continue;
      }
      case CommandDescriptor::Kind::lookup: {
        if (cmd.var == cmd.var2) break;  // needs two separate variable cells
        const int* l = stack_value(s, cmd.var);
        if (!l || !is_location(cfg, *l)) break;
        const int* v = heap_value(s, *l);
        if (!v || !stack_value(s, cmd.var2)) break;
        HeapState t = s;
        set_stack(t, cmd.var2, *v);
        action.outcomes.push_back(Outcome::single(must_find(t)));
        continue;
      }
      default:
        throw std::logic_error("not a heap command");
    }
    action.outcomes.push_back(Outcome::fault(model.algebra));
  }
  return action;
}

RawAction modular_command(const BuiltModel& model, const CommandDescriptor& cmd) {
  const long long m = model.modulus;
  const long long c = ((cmd.constant % m) + m) % m;
  RawAction action{model.algebra, {}, cmd.text()};
  for (long long k = 0; k < m; ++k) {
    const long long out =
        cmd.kind == CommandDescriptor::Kind::adder ? (k + c) % m : (k * c) % m;
    action.outcomes.push_back(
        Outcome::single(model.algebra->element(static_cast<std::uint32_t>(out))));
  }
  return action;
}

}  // namespace

RawAction primitive_action(const BuiltModel& model, const CommandDescriptor& cmd) {
  switch (cmd.kind) {
    case CommandDescriptor::Kind::dispose_loc:
      if (model.kind != ModelKind::plain_heap)
        throw ModelError(cmd.text() + " requires the plain heap model");
      if (!is_location(model.config, cmd.location))
        throw ModelError("unknown location " + std::to_string(cmd.location));
      return heap_command(model, cmd);
    case CommandDescriptor::Kind::alloc:
    case CommandDescriptor::Kind::dispose_var:
    case CommandDescriptor::Kind::mutate:
    case CommandDescriptor::Kind::lookup:
      if (model.kind != ModelKind::stack_heap && model.kind != ModelKind::freeset_heap)
        throw ModelError(cmd.text() + " requires a stack-heap or free-set model");
      require_variable(model.config, cmd.var);
      if (cmd.kind == CommandDescriptor::Kind::lookup) require_variable(model.config, cmd.var2);
      if (cmd.kind == CommandDescriptor::Kind::mutate &&
          !std::binary_search(model.config.values.begin(), model.config.values.end(), cmd.value))
        throw ModelError("unknown value " + std::to_string(cmd.value));
      return heap_command(model, cmd);
    case CommandDescriptor::Kind::adder:
    case CommandDescriptor::Kind::multiplier:
      if (model.kind != ModelKind::zmod)
        throw ModelError(cmd.text() + " requires a modular model");
      return modular_command(model, cmd);
  }
  throw ModelError("unknown command");
}

LocalFunction primitive(const BuiltModel& model, const CommandDescriptor& cmd) {
  return LocalFunction::seal(primitive_action(model, cmd));
}

}  // namespace sepalg
