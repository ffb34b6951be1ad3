#include "gnf/term.hpp"

#include <algorithm>
#include <cctype>

namespace gnf {

Term Term::x_var(int index) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::XVar;
  n->var_index = index;
  return Term(std::move(n));
}

Term Term::y_var(int index) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::YVar;
  n->var_index = index;
  return Term(std::move(n));
}

Term Term::x_indexed() {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::XIndexed;
  n->concrete = false;
  return Term(std::move(n));
}

Term Term::y_indexed() {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::YIndexed;
  n->concrete = false;
  return Term(std::move(n));
}

Term Term::constant(std::string atom_name) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Const;
  n->name = std::move(atom_name);
  return Term(std::move(n));
}

Term Term::literal(Element value) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Lit;
  n->value = std::move(value);
  return Term(std::move(n));
}

Term Term::app(SymbolRef symbol, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::App;
  n->has_recursive = symbol.recursive;
  n->symbol = std::move(symbol);
  for (const Term& a : args) {
    n->concrete = n->concrete && a.is_concrete();
    n->has_recursive = n->has_recursive || a.contains_recursive();
    n->node_count += a.node_count();
  }
  n->children = std::move(args);
  return Term(std::move(n));
}

Term Term::listof(Term body, ListofOrder order) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Listof;
  n->order = order;
  n->concrete = false;
  n->has_recursive = body.contains_recursive();
  n->node_count = 1 + body.node_count();
  n->children.push_back(std::move(body));
  return Term(std::move(n));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::XVar:
    case TermKind::YVar:
      return a.var_index() == b.var_index();
    case TermKind::XIndexed:
    case TermKind::YIndexed:
      return true;
    case TermKind::Const:
      return a.const_name() == b.const_name();
    case TermKind::Lit:
      return a.literal_value() == b.literal_value();
    case TermKind::App:
      if (a.symbol().recursive != b.symbol().recursive ||
          a.symbol().name != b.symbol().name ||
          a.args().size() != b.args().size()) {
        return false;
      }
      return std::equal(a.args().begin(), a.args().end(), b.args().begin());
    case TermKind::Listof:
      return a.order() == b.order() && a.body() == b.body();
  }
  return false;
}

int TermSignature::find_base(std::string_view name) const {
  for (std::size_t i = 0; i < base_ops.size(); ++i) {
    if (base_ops[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

struct TermParser {
  std::string_view text;
  std::size_t pos = 0;
  const TermSignature& sig;
  bool in_listof = false;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(pos, what); }

  bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  }

  std::string read_ident() {
    std::size_t start = pos;
    if (pos >= text.size() || !(text[pos] >= 'a' && text[pos] <= 'z')) {
      fail("expected identifier");
    }
    while (pos < text.size() && ident_char(text[pos])) ++pos;
    return std::string(text.substr(start, pos - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  // x<INT> / y<INT>, or nullopt when the identifier is not of that shape.
  static std::optional<int> var_suffix(const std::string& id) {
    if (id.size() < 2 || (id[0] != 'x' && id[0] != 'y')) return std::nullopt;
    int value = 0;
    for (std::size_t i = 1; i < id.size(); ++i) {
      if (id[i] < '0' || id[i] > '9') return std::nullopt;
      value = value * 10 + (id[i] - '0');
    }
    if (value <= 0) return std::nullopt;
    return value;
  }

  static std::optional<int> recursive_index(const std::string& id) {
    if (id.size() < 2 || id[0] != 'f') return std::nullopt;
    int value = 0;
    for (std::size_t i = 1; i < id.size(); ++i) {
      if (id[i] < '0' || id[i] > '9') return std::nullopt;
      value = value * 10 + (id[i] - '0');
    }
    return value;
  }

  std::vector<Term> parse_args() {
    expect('(');
    std::vector<Term> args;
    skip_ws();
    if (pos < text.size() && text[pos] == ')') {
      ++pos;
      return args;
    }
    while (true) {
      args.push_back(parse());
      skip_ws();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      expect(')');
      return args;
    }
  }

  Term parse_listof() {
    if (in_listof) fail("nested listof is not supported");
    expect('(');
    in_listof = true;
    Term body = parse();
    in_listof = false;
    expect(',');
    skip_ws();
    std::string dir = read_ident();
    ListofOrder order;
    if (dir == "asc") {
      order = ListofOrder::Ascending;
    } else if (dir == "desc") {
      order = ListofOrder::Descending;
    } else {
      fail("expected 'asc' or 'desc'");
    }
    expect(')');
    return Term::listof(std::move(body), order);
  }

  Term parse() {
    skip_ws();
    if (pos >= text.size()) fail("expected term");
    if (text[pos] == '<') return parse_literal();
    std::size_t ident_pos = pos;
    std::string id = read_ident();
    skip_ws();

    if ((id == "x" || id == "y") && pos < text.size() && text[pos] == '[') {
      ++pos;
      skip_ws();
      if (pos >= text.size() || text[pos] != 'i') fail("expected 'i'");
      ++pos;
      expect(']');
      if (!in_listof) {
        pos = ident_pos;
        fail("indexed variable outside listof");
      }
      return id == "x" ? Term::x_indexed() : Term::y_indexed();
    }

    if (auto idx = var_suffix(id)) {
      return id[0] == 'x' ? Term::x_var(*idx) : Term::y_var(*idx);
    }

    if (id == "listof") return parse_listof();

    if (pos < text.size() && text[pos] == '(') {
      if (auto fi = recursive_index(id);
          fi && *fi >= 1 && *fi <= sig.recursive_count) {
        std::vector<Term> args = parse_args();
        if (args.size() != 1) {
          pos = ident_pos;
          fail("recursive symbol '" + id + "' takes exactly one argument");
        }
        return Term::app(SymbolRef{true, *fi, id}, std::move(args));
      }
      int op = sig.find_base(id);
      if (op < 0) {
        pos = ident_pos;
        fail("unknown symbol '" + id + "'");
      }
      std::vector<Term> args = parse_args();
      int arity = sig.base_ops[op].arity;
      if (arity >= 0 && static_cast<int>(args.size()) != arity) {
        pos = ident_pos;
        fail("op '" + id + "' expects " + std::to_string(arity) + " arguments, got " +
             std::to_string(args.size()));
      }
      return Term::app(SymbolRef{false, op, id}, std::move(args));
    }

    if (std::find(sig.alphabet.begin(), sig.alphabet.end(), id) == sig.alphabet.end()) {
      pos = ident_pos;
      fail("unknown symbol '" + id + "'");
    }
    return Term::constant(id);
  }

  // '<'-prefixed input is an element literal; hand the balanced
  // angle-bracket prefix to the element grammar.
  Term parse_literal() {
    std::size_t start = pos;
    int depth = 0;
    std::size_t end = pos;
    for (; end < text.size(); ++end) {
      if (text[end] == '<') ++depth;
      if (text[end] == '>') {
        --depth;
        if (depth == 0) {
          ++end;
          break;
        }
      }
    }
    if (depth != 0) fail("unterminated element literal");
    Element e;
    try {
      e = parse_element(text.substr(start, end - start), sig.alphabet);
    } catch (const ParseError& err) {
      throw ParseError(start + err.position, err.what());
    }
    pos = end;
    return Term::literal(std::move(e));
  }

  Term parse_full() {
    Term t = parse();
    skip_ws();
    if (pos != text.size()) fail("trailing input after term");
    return t;
  }
};

}  // namespace

Term parse_term(std::string_view text, const TermSignature& sig) {
  TermParser p{text, 0, sig};
  return p.parse_full();
}

std::string render_term(const Term& t) {
  switch (t.kind()) {
    case TermKind::XVar:
      return "x" + std::to_string(t.var_index());
    case TermKind::YVar:
      return "y" + std::to_string(t.var_index());
    case TermKind::XIndexed:
      return "x[i]";
    case TermKind::YIndexed:
      return "y[i]";
    case TermKind::Const:
      return t.const_name();
    case TermKind::Lit:
      return render_element(t.literal_value());
    case TermKind::App: {
      std::string out = t.symbol().name + "(";
      bool first = true;
      for (const Term& a : t.args()) {
        if (!first) out += ',';
        first = false;
        out += render_term(a);
      }
      return out + ")";
    }
    case TermKind::Listof:
      return "listof(" + render_term(t.body()) + "," +
             (t.order() == ListofOrder::Ascending ? "asc" : "desc") + ")";
  }
  return {};
}

namespace {

void collect_vars(const Term& t, std::set<Var>& out) {
  switch (t.kind()) {
    case TermKind::XVar:
      out.insert(Var{false, t.var_index()});
      return;
    case TermKind::YVar:
      out.insert(Var{true, t.var_index()});
      return;
    case TermKind::XIndexed:
    case TermKind::YIndexed:
    case TermKind::Listof:
      throw TermError("free_vars requires a concrete term");
    case TermKind::Const:
    case TermKind::Lit:
      return;
    case TermKind::App:
      for (const Term& a : t.args()) collect_vars(a, out);
      return;
  }
}

}  // namespace

std::set<Var> free_vars(const Term& t) {
  std::set<Var> out;
  collect_vars(t, out);
  return out;
}

std::pair<std::set<int>, std::set<int>> split_vars(const Term& t) {
  std::set<int> xs, ys;
  for (const Var& v : free_vars(t)) (v.is_y ? ys : xs).insert(v.index);
  return {std::move(xs), std::move(ys)};
}

namespace {

Term expand_at(const Term& t, int index_value) {
  switch (t.kind()) {
    case TermKind::XIndexed:
      return Term::x_var(index_value);
    case TermKind::YIndexed:
      return Term::y_var(index_value);
    case TermKind::App: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(expand_at(a, index_value));
      return Term::app(t.symbol(), std::move(args));
    }
    default:
      return t;
  }
}

}  // namespace

Term expand_listof(const Term& t, int arity, const TermSignature& sig) {
  switch (t.kind()) {
    case TermKind::Listof: {
      if (sig.mklist_id < 0) {
        throw TermError("listof expansion requires the 'mklist' base op");
      }
      std::vector<Term> args;
      args.reserve(arity);
      if (t.order() == ListofOrder::Ascending) {
        for (int i = 1; i <= arity; ++i) args.push_back(expand_at(t.body(), i));
      } else {
        for (int i = arity; i >= 1; --i) args.push_back(expand_at(t.body(), i));
      }
      return Term::app(
          SymbolRef{false, sig.mklist_id, sig.base_ops[sig.mklist_id].name},
          std::move(args));
    }
    case TermKind::App: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(expand_listof(a, arity, sig));
      return Term::app(t.symbol(), std::move(args));
    }
    case TermKind::XIndexed:
    case TermKind::YIndexed:
      throw TermError("indexed variable outside listof");
    default:
      return t;
  }
}

namespace {

Term strip_walk(const Term& t, CallMap& map, std::string& path) {
  switch (t.kind()) {
    case TermKind::App: {
      if (t.symbol().recursive) {
        if (t.args().size() != 1) {
          throw TermError("recursive symbol applied to " +
                              std::to_string(t.args().size()) + " arguments",
                          path);
        }
        const Term& arg = t.args().front();
        if (arg.kind() == TermKind::XVar) {
          int xi = arg.var_index();
          auto [it, inserted] = map.calls.emplace(xi, t.symbol().index);
          if (!inserted && it->second != t.symbol().index) {
            throw TermError("x" + std::to_string(xi) +
                                " is recursed on by two different symbols",
                            path);
          }
          return Term::y_var(xi);
        }
        if (arg.kind() == TermKind::XIndexed) {
          if (map.indexed_call && *map.indexed_call != t.symbol().index) {
            throw TermError("x[i] is recursed on by two different symbols", path);
          }
          map.indexed_call = t.symbol().index;
          return Term::y_indexed();
        }
        throw TermError("recursive symbol applied to a non-variable term", path);
      }
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        std::size_t mark = path.size();
        path += "/" + std::to_string(i);
        args.push_back(strip_walk(t.args()[i], map, path));
        path.resize(mark);
      }
      return Term::app(t.symbol(), std::move(args));
    }
    case TermKind::Listof: {
      std::size_t mark = path.size();
      path += "/0";
      Term body = strip_walk(t.body(), map, path);
      path.resize(mark);
      return Term::listof(std::move(body), t.order());
    }
    default:
      return t;
  }
}

}  // namespace

std::pair<Term, CallMap> strip_recursive(const Term& t) {
  CallMap map;
  std::string path;
  Term stripped = strip_walk(t, map, path);
  return {std::move(stripped), std::move(map)};
}

std::uint64_t ground_size(const Term& t) {
  switch (t.kind()) {
    case TermKind::Lit:
      return t.literal_value().size();
    case TermKind::App: {
      std::uint64_t total = 1;
      for (const Term& a : t.args()) total += ground_size(a);
      return total;
    }
    case TermKind::Listof:
      return 1 + ground_size(t.body());
    default:
      return 1;
  }
}

namespace {

Term substitute_walk(const Term& t, const Binding& b) {
  switch (t.kind()) {
    case TermKind::XVar: {
      auto it = b.x_values.find(t.var_index());
      if (it == b.x_values.end()) {
        throw TermError("unbound variable x" + std::to_string(t.var_index()));
      }
      return Term::literal(it->second);
    }
    case TermKind::YVar: {
      auto it = b.y_values.find(t.var_index());
      if (it == b.y_values.end()) {
        throw TermError("unbound variable y" + std::to_string(t.var_index()));
      }
      return Term::literal(it->second);
    }
    case TermKind::Const:
    case TermKind::Lit:
      return t;
    case TermKind::App: {
      if (t.symbol().recursive) {
        throw TermError("substitute requires a stripped term");
      }
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(substitute_walk(a, b));
      return Term::app(t.symbol(), std::move(args));
    }
    default:
      throw TermError("substitute requires a concrete term");
  }
}

}  // namespace

Term substitute(const Term& t, const Binding& b, CostMeter& meter) {
  Term ground = substitute_walk(t, b);
  meter.charge(ground_size(ground));
  return ground;
}

Element eval_ground(const Term& t, const BaseOpContext& ops, CostMeter& meter) {
  switch (t.kind()) {
    case TermKind::Lit:
      return t.literal_value();
    case TermKind::Const:
      return Element::atom(t.const_name());
    case TermKind::App: {
      if (t.symbol().recursive) {
        throw TermError("eval_ground: unexpected recursive symbol");
      }
      std::vector<Element> args;
      std::vector<std::uint64_t> sizes;
      args.reserve(t.args().size());
      sizes.reserve(t.args().size());
      for (const Term& a : t.args()) {
        args.push_back(eval_ground(a, ops, meter));
        sizes.push_back(args.back().size());
      }
      meter.charge(ops.cost(t.symbol().index, sizes));
      return ops.apply(t.symbol().index, std::move(args));
    }
    case TermKind::XVar:
    case TermKind::YVar:
      throw TermError("eval_ground: unbound variable");
    default:
      throw TermError("eval_ground requires a concrete term");
  }
}

}  // namespace gnf
