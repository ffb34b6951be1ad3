#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gnf/complexity.hpp"
#include "gnf/element.hpp"

namespace gnf {

struct TermError : std::runtime_error {
  TermError(std::string what, std::string subterm_path = "")
      : std::runtime_error(std::move(what)), path(std::move(subterm_path)) {}
  std::string path;  // child-index path of the offending subterm, e.g. "/0/1"
};

enum class TermKind {
  XVar,      // x<k>
  YVar,      // y<k>, appears in stripped terms only
  XIndexed,  // x[i], inside a listof body
  YIndexed,  // y[i], inside a listof body
  Const,     // atom constant
  Lit,       // element value written in by substitution
  App,       // base or recursive symbol application
  Listof,    // arity-indexed list template: one term per expansion arity
};

enum class ListofOrder { Ascending, Descending };

struct SymbolRef {
  bool recursive = false;
  int index = -1;  // recursive: 1-based function index; base: signature op id
  std::string name;
};

struct Var {
  bool is_y = false;
  int index = 0;
  friend bool operator<(const Var& a, const Var& b) {
    return a.is_y != b.is_y ? a.is_y < b.is_y : a.index < b.index;
  }
  friend bool operator==(const Var& a, const Var& b) {
    return a.is_y == b.is_y && a.index == b.index;
  }
};

class Term {
 public:
  // Default: the literal empty list (a harmless ground term).
  Term() : Term(literal(Element())) {}

  static Term x_var(int index);
  static Term y_var(int index);
  static Term x_indexed();
  static Term y_indexed();
  static Term constant(std::string atom_name);
  static Term literal(Element value);
  static Term app(SymbolRef symbol, std::vector<Term> args);
  static Term listof(Term body, ListofOrder order);

  TermKind kind() const { return node_->kind; }
  int var_index() const { return node_->var_index; }
  const std::string& const_name() const { return node_->name; }
  const Element& literal_value() const { return node_->value; }
  const SymbolRef& symbol() const { return node_->symbol; }
  const std::vector<Term>& args() const { return node_->children; }
  const Term& body() const { return node_->children.front(); }
  ListofOrder order() const { return node_->order; }

  // True when the term contains no Listof/indexed nodes.
  bool is_concrete() const { return node_->concrete; }
  bool contains_recursive() const { return node_->has_recursive; }

  // Structural node count (a Lit counts 1).
  std::uint64_t node_count() const { return node_->node_count; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node {
    TermKind kind;
    int var_index = 0;
    std::string name;
    Element value;
    SymbolRef symbol;
    std::vector<Term> children;
    ListofOrder order = ListofOrder::Ascending;
    bool concrete = true;
    bool has_recursive = false;
    std::uint64_t node_count = 1;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Which symbols a term may mention. Base op ids are positions in `base_ops`;
// recursive symbols are f1..f<recursive_count>, all unary.
struct TermSignature {
  std::vector<std::string> alphabet;
  struct BaseOp {
    std::string name;
    int arity;  // -1 = variadic
  };
  std::vector<BaseOp> base_ops;
  int recursive_count = 0;
  int mklist_id = -1;  // base op a listof expands into; -1 when undeclared

  int find_base(std::string_view name) const;
};

// Term grammar:
//   term := VAR | ATOM | SYM '(' term (',' term)* ')'
//         | 'listof' '(' term ',' ('asc'|'desc') ')' | element-literal
//   VAR  := 'x' INT | 'y' INT | 'x' '[' 'i' ']' | 'y' '[' 'i' ']'
// Identifiers of the shape x<INT>/y<INT> always read as variables.
Term parse_term(std::string_view text, const TermSignature& sig);
std::string render_term(const Term& t);

// Exact set of variables occurring in a concrete term.
std::set<Var> free_vars(const Term& t);

// Partition of free_vars by kind: (x-indices, y-indices).
std::pair<std::set<int>, std::set<int>> split_vars(const Term& t);

// Instantiates every Listof at the given arity: the body is emitted once per
// index value (1..k ascending or k..1 descending) under the signature's
// mklist op, and x[i]/y[i] become concrete variables.
Term expand_listof(const Term& t, int arity, const TermSignature& sig);

// Records the recursive calls removed by stripping: y<i> stands for f<j>(x<i>).
struct CallMap {
  std::map<int, int> calls;              // y-index -> recursive symbol index
  std::optional<int> indexed_call;       // f<j> applied to x[i] in a listof body
  bool empty() const { return calls.empty() && !indexed_call.has_value(); }
};

// Replaces each recursive-call subterm f<j>(x<i>) with y<i>. The input must
// apply recursive symbols only to single x-variables (condition C1); anything
// else throws TermError with the offending subterm path.
std::pair<Term, CallMap> strip_recursive(const Term& t);

struct Binding {
  std::map<int, Element> x_values;
  std::map<int, Element> y_values;
};

// Ground-term size: what substitution is charged for. Lit nodes count their
// element's size, every other node counts 1.
std::uint64_t ground_size(const Term& t);

// Simultaneous substitution of values for variables. The term must be
// stripped (no recursive symbols) and concrete; the binding must cover its
// free variables. Charges the size of the ground result.
Term substitute(const Term& t, const Binding& b, CostMeter& meter);

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Base-op implementations and cost declarations, supplied by the system.
struct BaseOpContext {
  virtual Element apply(int op_id, std::vector<Element>&& args) const = 0;
  virtual std::uint64_t cost(int op_id,
                             const std::vector<std::uint64_t>& arg_sizes) const = 0;
  virtual ~BaseOpContext() = default;
};

// Bottom-up left-to-right evaluation of a ground term. Each base op charges
// its declared cost applied to its argument sizes. Domain errors (EvalError)
// are distinct from the `false` value.
Element eval_ground(const Term& t, const BaseOpContext& ops, CostMeter& meter);

}  // namespace gnf
