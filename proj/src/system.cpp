#include "gnf/system.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace gnf {

namespace {

constexpr std::uint64_t kSaturated = UINT64_MAX;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

}  // namespace

std::uint64_t CostFn::eval(std::uint64_t arg_size_sum) const {
  std::uint64_t base = sat_add(c0, sat_mul(c1, arg_size_sum));
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < degree; ++i) out = sat_mul(out, base);
  return out;
}

std::string CostFn::text() const {
  std::string inner = std::to_string(c0);
  if (c1 != 0) inner += " + " + std::to_string(c1) + "*sum";
  if (degree != 1) return "(" + inner + ")^" + std::to_string(degree);
  return inner;
}

std::string SizeBound::text() const {
  switch (kind) {
    case Kind::Additive:
      return "additive " + std::to_string(c);
    case Kind::Selective:
      return "selective";
    case Kind::Constant:
      return "constant " + std::to_string(c);
  }
  return {};
}

const std::vector<BaseOpDecl>& builtin_base_ops() {
  static const std::vector<BaseOpDecl> registry = {
      {"mklist", -1, CostFn{1, 1, 1}, SizeBound{SizeBound::Kind::Additive, 1}},
      {"conc", 2, CostFn{1, 1, 1}, SizeBound{SizeBound::Kind::Additive, 0}},
      {"head", 1, CostFn{1, 0, 1}, SizeBound{SizeBound::Kind::Selective, 0}},
      {"tail", 1, CostFn{1, 1, 1}, SizeBound{SizeBound::Kind::Selective, 0}},
      {"cons", 2, CostFn{1, 1, 1}, SizeBound{SizeBound::Kind::Additive, 0}},
  };
  return registry;
}

Element apply_base_op(const BaseOpDecl& op, std::vector<Element>&& args) {
  if (op.name == "mklist") {
    return Element::list(std::move(args));
  }
  if (op.name == "conc") {
    if (!args[0].is_list() || !args[1].is_list()) {
      throw EvalError("conc: both arguments must be lists");
    }
    std::vector<Element> kids = args[0].components();
    kids.insert(kids.end(), args[1].components().begin(),
                args[1].components().end());
    return Element::list(std::move(kids));
  }
  if (op.name == "head") {
    if (!args[0].is_list() || args[0].components().empty()) {
      throw EvalError("head: argument must be a non-empty list");
    }
    return args[0].components().front();
  }
  if (op.name == "tail") {
    if (!args[0].is_list() || args[0].components().empty()) {
      throw EvalError("tail: argument must be a non-empty list");
    }
    std::vector<Element> kids(args[0].components().begin() + 1,
                              args[0].components().end());
    return Element::list(std::move(kids));
  }
  if (op.name == "cons") {
    if (!args[1].is_list()) {
      throw EvalError("cons: second argument must be a list");
    }
    std::vector<Element> kids;
    kids.reserve(1 + args[1].components().size());
    kids.push_back(std::move(args[0]));
    kids.insert(kids.end(), args[1].components().begin(),
                args[1].components().end());
    return Element::list(std::move(kids));
  }
  throw EvalError("no implementation for base op '" + op.name + "'");
}

std::optional<Element> InitialFn::lookup(const Element& w) const {
  if (auto it = table.find(w); it != table.end()) return it->second;
  if (atoms_identity && w.is_atom() && w.atom_name() != kFalseAtom) return w;
  return std::nullopt;
}

bool GuardPrim::holds(const Element& w) const {
  switch (kind) {
    case GuardKind::IsAtom:
      return w.is_atom();
    case GuardKind::IsList:
      return w.is_list();
    case GuardKind::ArityEq:
      return w.is_list() && static_cast<int>(w.components().size()) == k;
    case GuardKind::ArityGe:
      return w.is_list() && static_cast<int>(w.components().size()) >= k;
    case GuardKind::HeadIs:
      return w.is_list() && !w.components().empty() &&
             w.components().front().is_atom() &&
             w.components().front().atom_name() == atom;
  }
  return false;
}

std::string GuardPrim::text() const {
  switch (kind) {
    case GuardKind::IsAtom:
      return "is_atom";
    case GuardKind::IsList:
      return "is_list";
    case GuardKind::ArityEq:
      return "arity = " + std::to_string(k);
    case GuardKind::ArityGe:
      return "arity >= " + std::to_string(k);
    case GuardKind::HeadIs:
      return "head_is " + atom;
  }
  return {};
}

int GammaRule::arity_for(const Element& w) const {
  if (pinned_arity) return *pinned_arity;
  if (variadic) return static_cast<int>(w.components().size());
  return max_x_index;
}

TermSignature GNFSystem::signature() const {
  TermSignature sig;
  sig.alphabet = universe_atoms();
  for (const BaseOpDecl& op : base_ops) {
    sig.base_ops.push_back({op.name, op.arity});
    if (op.name == "mklist") sig.mklist_id = static_cast<int>(sig.base_ops.size()) - 1;
  }
  sig.recursive_count = static_cast<int>(functions.size());
  return sig;
}

std::vector<std::string> GNFSystem::universe_atoms() const {
  std::vector<std::string> out;
  for (const std::string& a : alphabet) {
    if (a != kFalseAtom) out.push_back(a);
  }
  return out;
}

namespace {

bool contains_reserved(const Element& e) {
  if (e.is_atom()) return e.atom_name() == kFalseAtom;
  return std::any_of(e.components().begin(), e.components().end(),
                     contains_reserved);
}

// ---------------------------------------------------------------------------
// .gnf reader

struct Line {
  int number;
  std::string text;  // comment-stripped, trimmed
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++number;
    if (std::size_t hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    if (e > b) out.push_back({number, std::string(raw.substr(b, e - b))});
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_ident(std::string_view s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    if (v > (kSaturated - (c - '0')) / 10) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

// f<digits> -> index, 1-based
std::optional<int> fn_index_of(std::string_view name) {
  if (name.size() < 2 || name[0] != 'f') return std::nullopt;
  auto v = parse_uint(name.substr(1));
  if (!v || *v == 0 || *v > 1000000) return std::nullopt;
  return static_cast<int>(*v);
}

struct RawFunction {
  std::string name;
  int header_line = 0;
  std::optional<std::uint64_t> C, p;
  std::vector<Line> initial_entries;
  std::vector<Line> rule_entries;
};

struct RawFile {
  std::vector<Line> atom_entries;
  std::vector<Line> baseop_entries;
  std::vector<Line> meta_entries;
  std::vector<RawFunction> functions;
};

enum class Section { None, Atoms, BaseOps, Meta, FnBody, FnInitial, FnRules };

RawFile split_sections(const std::vector<Line>& lines) {
  RawFile raw;
  Section section = Section::None;

  for (const Line& ln : lines) {
    const std::string& s = ln.text;

    if (s == "atoms:" || s.rfind("atoms:", 0) == 0) {
      section = Section::Atoms;
      std::string rest = trim(std::string_view(s).substr(6));
      if (!rest.empty()) raw.atom_entries.push_back({ln.number, rest});
      continue;
    }
    if (s == "baseops:") {
      section = Section::BaseOps;
      continue;
    }
    if (s == "meta:") {
      section = Section::Meta;
      continue;
    }
    if (s.rfind("function", 0) == 0 &&
        (s.size() == 8 || std::isspace(static_cast<unsigned char>(s[8])))) {
      std::string rest = trim(std::string_view(s).substr(8));
      if (rest.empty() || rest.back() != ':') {
        throw SystemError("malformed function header", ln.number);
      }
      rest.pop_back();
      rest = trim(rest);
      if (!is_ident(rest)) {
        throw SystemError("malformed function header", ln.number);
      }
      raw.functions.push_back(RawFunction{rest, ln.number, {}, {}, {}, {}});
      section = Section::FnBody;
      continue;
    }

    if (section == Section::FnBody || section == Section::FnInitial ||
        section == Section::FnRules) {
      if (s == "initial:") {
        section = Section::FnInitial;
        continue;
      }
      if (s == "rules:") {
        section = Section::FnRules;
        continue;
      }
    }

    switch (section) {
      case Section::None:
        if (s.back() == ':' && is_ident(std::string_view(s).substr(0, s.size() - 1))) {
          throw SystemError("unknown section '" + s.substr(0, s.size() - 1) + "'",
                            ln.number);
        }
        throw SystemError("content before any section", ln.number);
      case Section::Atoms:
        raw.atom_entries.push_back(ln);
        break;
      case Section::BaseOps:
        raw.baseop_entries.push_back(ln);
        break;
      case Section::Meta:
        raw.meta_entries.push_back(ln);
        break;
      case Section::FnBody: {
        RawFunction& fn = raw.functions.back();
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
          if (s.back() == ':') {
            throw SystemError("unknown section '" + s.substr(0, s.size() - 1) +
                                  "' in function " + fn.name,
                              ln.number);
          }
          throw SystemError("expected 'C = ...', 'p = ...', 'initial:' or 'rules:'",
                            ln.number);
        }
        std::string key = trim(std::string_view(s).substr(0, eq));
        auto value = parse_uint(trim(std::string_view(s).substr(eq + 1)));
        if (!value) throw SystemError("expected a non-negative integer", ln.number);
        if (key == "C") {
          if (fn.C) throw SystemError("duplicate C", ln.number);
          fn.C = *value;
        } else if (key == "p") {
          if (fn.p) throw SystemError("duplicate p", ln.number);
          fn.p = *value;
        } else {
          throw SystemError("unknown constant '" + key + "' (expected C or p)",
                            ln.number);
        }
        break;
      }
      case Section::FnInitial:
        raw.functions.back().initial_entries.push_back(ln);
        break;
      case Section::FnRules:
        raw.functions.back().rule_entries.push_back(ln);
        break;
    }
  }
  return raw;
}

std::vector<std::string> parse_atom_list(const std::vector<Line>& entries) {
  std::vector<std::string> atoms;
  for (const Line& ln : entries) {
    std::stringstream ss(ln.text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      piece = trim(piece);
      if (piece.empty()) throw SystemError("empty atom name", ln.number);
      if (!is_ident(piece)) {
        throw SystemError("bad atom name '" + piece + "'", ln.number);
      }
      if (std::find(atoms.begin(), atoms.end(), piece) != atoms.end()) {
        throw SystemError("duplicate atom '" + piece + "'", ln.number);
      }
      atoms.push_back(piece);
    }
  }
  return atoms;
}

CostFn parse_cost_expr(std::string spec, int line_no) {
  spec = trim(spec);
  CostFn fn;
  std::string inner = spec;
  if (!spec.empty() && spec.front() == '(') {
    std::size_t close = spec.rfind(')');
    std::size_t caret = spec.find('^', close == std::string::npos ? 0 : close);
    if (close == std::string::npos || caret == std::string::npos) {
      throw SystemError("malformed cost expression '" + spec + "'", line_no);
    }
    auto d = parse_uint(trim(std::string_view(spec).substr(caret + 1)));
    if (!d || *d == 0) {
      throw SystemError("cost degree must be a positive integer", line_no);
    }
    fn.degree = *d;
    inner = trim(spec.substr(1, close - 1));
  }
  std::size_t plus = inner.find('+');
  if (plus == std::string::npos) {
    auto c0 = parse_uint(trim(inner));
    if (!c0) throw SystemError("malformed cost expression '" + spec + "'", line_no);
    fn.c0 = *c0;
    fn.c1 = 0;
    return fn;
  }
  auto c0 = parse_uint(trim(inner.substr(0, plus)));
  std::string rest = trim(inner.substr(plus + 1));
  std::size_t star = rest.find('*');
  if (!c0 || star == std::string::npos ||
      trim(rest.substr(star + 1)) != "sum") {
    throw SystemError("malformed cost expression '" + spec + "'", line_no);
  }
  auto c1 = parse_uint(trim(rest.substr(0, star)));
  if (!c1) throw SystemError("malformed cost expression '" + spec + "'", line_no);
  fn.c0 = *c0;
  fn.c1 = *c1;
  return fn;
}

SizeBound parse_size_spec(std::string spec, int line_no) {
  spec = trim(spec);
  if (spec == "selective") return {SizeBound::Kind::Selective, 0};
  if (spec.rfind("additive", 0) == 0) {
    auto c = parse_uint(trim(std::string_view(spec).substr(8)));
    if (!c) throw SystemError("malformed size bound '" + spec + "'", line_no);
    return {SizeBound::Kind::Additive, *c};
  }
  if (spec.rfind("constant", 0) == 0) {
    auto c = parse_uint(trim(std::string_view(spec).substr(8)));
    if (!c) throw SystemError("malformed size bound '" + spec + "'", line_no);
    return {SizeBound::Kind::Constant, *c};
  }
  throw SystemError("malformed size bound '" + spec + "'", line_no);
}

std::vector<BaseOpDecl> parse_baseops(const std::vector<Line>& entries) {
  std::vector<BaseOpDecl> ops;
  for (const Line& ln : entries) {
    std::size_t colon = ln.text.find(':');
    if (colon == std::string::npos) {
      throw SystemError("expected 'name: arity ..., cost ..., size ...'", ln.number);
    }
    BaseOpDecl op;
    op.name = trim(ln.text.substr(0, colon));
    if (!is_ident(op.name)) {
      throw SystemError("bad op name '" + op.name + "'", ln.number);
    }
    if (fn_index_of(op.name)) {
      throw SystemError("op name '" + op.name +
                            "' collides with recursive-symbol names",
                        ln.number);
    }

    // Three comma-separated fields in fixed order; the cost expression
    // contains no commas, so a flat split is safe.
    std::vector<std::string> fields;
    std::stringstream ss(ln.text.substr(colon + 1));
    std::string piece;
    while (std::getline(ss, piece, ',')) fields.push_back(trim(piece));
    if (fields.size() != 3 || fields[0].rfind("arity", 0) != 0 ||
        fields[1].rfind("cost", 0) != 0 || fields[2].rfind("size", 0) != 0) {
      throw SystemError("expected 'name: arity ..., cost ..., size ...'", ln.number);
    }

    std::string arity_spec = trim(std::string_view(fields[0]).substr(5));
    if (arity_spec == "variadic") {
      op.arity = -1;
    } else if (auto a = parse_uint(arity_spec)) {
      op.arity = static_cast<int>(*a);
    } else {
      throw SystemError("malformed arity '" + arity_spec + "'", ln.number);
    }
    op.cost = parse_cost_expr(fields[1].substr(4), ln.number);
    op.size_bound = parse_size_spec(fields[2].substr(4), ln.number);

    const auto& registry = builtin_base_ops();
    auto reg = std::find_if(registry.begin(), registry.end(),
                            [&](const BaseOpDecl& r) { return r.name == op.name; });
    if (reg == registry.end()) {
      throw SystemError("unknown base op '" + op.name +
                            "' (this build implements: mklist, conc, head, tail, cons)",
                        ln.number);
    }
    if (op.arity != reg->arity || !(op.cost == reg->cost) ||
        !(op.size_bound == reg->size_bound)) {
      std::string arity_text =
          reg->arity < 0 ? "variadic" : std::to_string(reg->arity);
      throw SystemError("declaration of '" + op.name +
                            "' does not match its implementation: expected arity " +
                            arity_text + ", cost " + reg->cost.text() + ", size " +
                            reg->size_bound.text(),
                        ln.number);
    }
    for (const BaseOpDecl& seen : ops) {
      if (seen.name == op.name) {
        throw SystemError("duplicate base op '" + op.name + "'", ln.number);
      }
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

std::vector<GuardPrim> parse_guards(std::string_view text, int line_no) {
  std::vector<GuardPrim> prims;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(" and ", pos);
    std::string piece = trim(text.substr(
        pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    pos = next == std::string_view::npos ? text.size() : next + 5;
    if (piece.empty()) throw SystemError("empty guard", line_no);
    if (piece == "is_atom") {
      prims.push_back({GuardKind::IsAtom, 0, ""});
    } else if (piece == "is_list") {
      prims.push_back({GuardKind::IsList, 0, ""});
    } else if (piece.rfind("arity", 0) == 0) {
      std::string rest = trim(std::string_view(piece).substr(5));
      GuardKind kind;
      if (rest.rfind(">=", 0) == 0) {
        kind = GuardKind::ArityGe;
        rest = trim(std::string_view(rest).substr(2));
      } else if (!rest.empty() && rest[0] == '=') {
        kind = GuardKind::ArityEq;
        rest = trim(std::string_view(rest).substr(1));
      } else {
        throw SystemError("malformed arity guard '" + piece + "'", line_no);
      }
      auto k = parse_uint(rest);
      if (!k || *k > 1000000) {
        throw SystemError("malformed arity guard '" + piece + "'", line_no);
      }
      prims.push_back({kind, static_cast<int>(*k), ""});
    } else if (piece.rfind("head_is", 0) == 0) {
      std::string atom = trim(std::string_view(piece).substr(7));
      if (!is_ident(atom)) {
        throw SystemError("malformed head_is guard '" + piece + "'", line_no);
      }
      prims.push_back({GuardKind::HeadIs, 0, atom});
    } else {
      throw SystemError("unknown guard primitive '" + piece + "'", line_no);
    }
  }
  if (prims.empty()) throw SystemError("empty guard", line_no);
  return prims;
}

bool mentions_y(const Term& t) {
  switch (t.kind()) {
    case TermKind::YVar:
    case TermKind::YIndexed:
      return true;
    case TermKind::App:
      return std::any_of(t.args().begin(), t.args().end(), mentions_y);
    case TermKind::Listof:
      return mentions_y(t.body());
    default:
      return false;
  }
}

void scan_template(const Term& t, bool& variadic, int& max_x) {
  switch (t.kind()) {
    case TermKind::XVar:
      max_x = std::max(max_x, t.var_index());
      return;
    case TermKind::App:
      for (const Term& a : t.args()) scan_template(a, variadic, max_x);
      return;
    case TermKind::Listof:
      variadic = true;
      scan_template(t.body(), variadic, max_x);
      return;
    default:
      return;
  }
}

GammaRule parse_rule(const Line& ln, const TermSignature& sig) {
  std::size_t arrow = ln.text.find("=>");
  if (arrow == std::string::npos) {
    throw SystemError("expected 'guard => template'", ln.number);
  }
  GammaRule rule;
  rule.source = ln.text;
  rule.guards = parse_guards(std::string_view(ln.text).substr(0, arrow), ln.number);
  std::string tmpl_text = trim(std::string_view(ln.text).substr(arrow + 2));
  try {
    rule.tmpl = parse_term(tmpl_text, sig);
  } catch (const ParseError& e) {
    throw SystemError("bad template: " + std::string(e.what()), ln.number);
  }
  if (mentions_y(rule.tmpl)) {
    throw SystemError("templates may not mention y-variables", ln.number);
  }

  scan_template(rule.tmpl, rule.variadic, rule.max_x_index);
  for (const GuardPrim& g : rule.guards) {
    if (g.kind == GuardKind::ArityEq) {
      if (rule.pinned_arity && *rule.pinned_arity != g.k) {
        throw SystemError("conflicting arity guards", ln.number);
      }
      rule.pinned_arity = g.k;
      rule.min_arity = std::max(rule.min_arity, g.k);
    } else if (g.kind == GuardKind::ArityGe) {
      rule.min_arity = std::max(rule.min_arity, g.k);
    }
  }

  if (rule.variadic && rule.max_x_index > 0 &&
      rule.min_arity < rule.max_x_index) {
    throw SystemError("variadic template uses x" +
                          std::to_string(rule.max_x_index) +
                          " without a guard pinning arity >= " +
                          std::to_string(rule.max_x_index),
                      ln.number);
  }
  if (!rule.variadic && rule.pinned_arity &&
      rule.max_x_index > *rule.pinned_arity) {
    throw SystemError("template uses x" + std::to_string(rule.max_x_index) +
                          " but the guard pins arity = " +
                          std::to_string(*rule.pinned_arity),
                      ln.number);
  }
  if (!rule.variadic && !rule.pinned_arity &&
      rule.min_arity > rule.max_x_index) {
    throw SystemError(
        "rule can never fire: template arity " +
            std::to_string(rule.max_x_index) + " is below the guard minimum " +
            std::to_string(rule.min_arity),
        ln.number);
  }
  return rule;
}

Element parse_initial_element(const std::string& text,
                              const std::vector<std::string>& alphabet,
                              int line_no) {
  try {
    return parse_element(text, alphabet);
  } catch (const ParseError& e) {
    throw SystemError("bad element '" + text + "': " + e.what(), line_no);
  }
}

}  // namespace

GNFSystem parse_system(std::string_view text, std::string name) {
  GNFSystem sys;
  sys.name = std::move(name);

  RawFile raw = split_sections(split_lines(text));

  sys.alphabet = parse_atom_list(raw.atom_entries);
  if (std::find(sys.alphabet.begin(), sys.alphabet.end(),
                std::string(kFalseAtom)) == sys.alphabet.end()) {
    sys.alphabet.push_back(std::string(kFalseAtom));
  }
  if (sys.alphabet.size() < 2) {
    throw SystemError("alphabet must declare at least one atom");
  }

  sys.base_ops = parse_baseops(raw.baseop_entries);

  for (const Line& ln : raw.meta_entries) {
    std::size_t colon = ln.text.find(':');
    if (colon == std::string::npos) {
      throw SystemError("expected 'key: value'", ln.number);
    }
    sys.meta.emplace_back(trim(ln.text.substr(0, colon)),
                          trim(ln.text.substr(colon + 1)));
  }

  if (raw.functions.empty()) {
    throw SystemError("no functions declared");
  }
  for (std::size_t i = 0; i < raw.functions.size(); ++i) {
    const std::string expected = "f" + std::to_string(i + 1);
    if (raw.functions[i].name != expected) {
      throw SystemError("functions must be named f1..fn in order; expected '" +
                            expected + "', got '" + raw.functions[i].name + "'",
                        raw.functions[i].header_line);
    }
  }

  TermSignature sig;
  sig.alphabet = sys.universe_atoms();
  for (const BaseOpDecl& op : sys.base_ops) {
    sig.base_ops.push_back({op.name, op.arity});
    if (op.name == "mklist") {
      sig.mklist_id = static_cast<int>(sig.base_ops.size()) - 1;
    }
  }
  sig.recursive_count = static_cast<int>(raw.functions.size());

  for (const RawFunction& rf : raw.functions) {
    GnfFunction fn;
    fn.name = rf.name;
    if (!rf.C) throw SystemError("function " + rf.name + " is missing C", rf.header_line);
    if (!rf.p) throw SystemError("function " + rf.name + " is missing p", rf.header_line);
    fn.C = *rf.C;
    fn.p = *rf.p;
    if (fn.C == 0) throw SystemError("C must be positive", rf.header_line);
    if (fn.p == 0) throw SystemError("p must be positive", rf.header_line);

    for (const Line& ln : rf.initial_entries) {
      std::size_t arrow = ln.text.find("->");
      if (arrow == std::string::npos) {
        throw SystemError("expected 'element -> element'", ln.number);
      }
      std::string lhs = trim(std::string_view(ln.text).substr(0, arrow));
      std::string rhs = trim(std::string_view(ln.text).substr(arrow + 2));
      if (lhs == "atoms") {
        if (rhs != "identity") {
          throw SystemError("the atoms rule must be 'atoms -> identity'", ln.number);
        }
        if (fn.initial.atoms_identity) {
          throw SystemError("duplicate atoms rule", ln.number);
        }
        fn.initial.atoms_identity = true;
        continue;
      }
      Element key = parse_initial_element(lhs, sys.alphabet, ln.number);
      Element value = parse_initial_element(rhs, sys.alphabet, ln.number);
      if (contains_reserved(key) || contains_reserved(value)) {
        throw SystemError("initial entries may not mention the reserved atom '" +
                              std::string(kFalseAtom) + "'",
                          ln.number);
      }
      if (!fn.initial.table.emplace(std::move(key), value).second) {
        throw SystemError("duplicate initial entry for '" + lhs + "'", ln.number);
      }
    }

    for (const Line& ln : rf.rule_entries) {
      fn.rules.push_back(parse_rule(ln, sig));
      if (fn.rules.back().variadic && sig.mklist_id < 0) {
        throw SystemError("listof templates require the 'mklist' base op",
                          ln.number);
      }
    }

    // Load-time domination: the family constants must absorb every charge the
    // evaluator makes besides the template's own op costs (those are C4's).
    //   - initial lookup and memo traffic cost 1+|w|  =>  C >= 2
    //   - worst-case guard scan G plus emission a + b*(|w|-1)  =>  G+a <= C, b <= C
    //   - a declared op of degree d costs (c0+c1*S)^d  =>  d <= p, (c0+c1)^d <= C
    if (fn.C < 2) {
      throw SystemError("function " + fn.name + ": C = " + std::to_string(fn.C) +
                            " cannot dominate the lookup cost 1+|w| (needs C >= 2)",
                        rf.header_line);
    }
    for (const BaseOpDecl& op : sys.base_ops) {
      if (op.cost.degree > fn.p) {
        throw SystemError("function " + fn.name + ": declared cost of '" +
                              op.name + "' has degree " +
                              std::to_string(op.cost.degree) +
                              " > p = " + std::to_string(fn.p),
                          rf.header_line);
      }
      if (op.cost.eval(1) > fn.C) {
        throw SystemError("function " + fn.name + ": (C,p) does not dominate the "
                              "declared cost of '" + op.name + "' (cost at unit size is " +
                              std::to_string(op.cost.eval(1)) + " > C)",
                          rf.header_line);
      }
    }
    std::uint64_t scan = 0;
    for (const GammaRule& r : fn.rules) scan += 1 + r.guards.size();
    std::uint64_t emit_a = 0, emit_b = 0;
    for (const GammaRule& r : fn.rules) {
      auto [a, b] = emission_envelope(r, sig);
      emit_a = std::max(emit_a, a);
      emit_b = std::max(emit_b, b);
    }
    if (scan + emit_a > fn.C || emit_b > fn.C) {
      throw SystemError(
          "function " + fn.name + ": (C,p) does not dominate the rule-scan and "
              "emission cost (worst case " + std::to_string(scan) + " + " +
              std::to_string(emit_a) + " + " + std::to_string(emit_b) +
              "*(|w|-1) against C = " + std::to_string(fn.C) + ")",
          rf.header_line);
    }

    sys.functions.push_back(std::move(fn));
  }

  return sys;
}

GNFSystem load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SystemError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (std::size_t slash = stem.find_last_of('/'); slash != std::string::npos) {
    stem = stem.substr(slash + 1);
  }
  if (std::size_t dot = stem.find_last_of('.'); dot != std::string::npos) {
    stem = stem.substr(0, dot);
  }
  return parse_system(buf.str(), stem);
}

std::pair<std::uint64_t, std::uint64_t> emission_envelope(const GammaRule& rule,
                                                          const TermSignature& sig) {
  if (rule.pinned_arity) {
    Term t = expand_listof(rule.tmpl, *rule.pinned_arity, sig);
    return {t.node_count(), 0};
  }
  if (rule.variadic) {
    std::uint64_t n0 = expand_listof(rule.tmpl, 0, sig).node_count();
    std::uint64_t n1 = expand_listof(rule.tmpl, 1, sig).node_count();
    return {n0, n1 - n0};
  }
  return {rule.tmpl.node_count(), 0};
}

std::optional<GammaResult> apply_gamma(const GNFSystem& sys, int i,
                                       const Element& w,
                                       const TermSignature& sig,
                                       CostMeter& meter) {
  const GnfFunction& fn = sys.fn(i);
  for (std::size_t r = 0; r < fn.rules.size(); ++r) {
    const GammaRule& rule = fn.rules[r];
    meter.charge(1);  // rule scanned
    bool ok = true;
    for (const GuardPrim& g : rule.guards) {
      meter.charge(1);  // guard primitive
      if (!g.holds(w)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    int arity = rule.arity_for(w);
    Term emitted =
        rule.variadic ? expand_listof(rule.tmpl, arity, sig) : rule.tmpl;
    meter.charge(emitted.node_count());
    return GammaResult{std::move(emitted), static_cast<int>(r), arity};
  }
  return std::nullopt;
}

std::optional<GammaResult> apply_gamma(const GNFSystem& sys, int i,
                                       const Element& w, CostMeter& meter) {
  return apply_gamma(sys, i, w, sys.signature(), meter);
}

std::optional<Element> initial_lookup(const GNFSystem& sys, int i,
                                      const Element& w, CostMeter& meter) {
  meter.charge(1 + w.size());
  return sys.fn(i).initial.lookup(w);
}

}  // namespace gnf
