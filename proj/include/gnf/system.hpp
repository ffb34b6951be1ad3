#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gnf/complexity.hpp"
#include "gnf/element.hpp"
#include "gnf/term.hpp"

namespace gnf {

struct SystemError : std::runtime_error {
  SystemError(const std::string& what, int line_no = 0)
      : std::runtime_error(line_no > 0
                               ? "line " + std::to_string(line_no) + ": " + what
                               : what),
        line(line_no) {}
  int line;
};

// Declared op cost: (c0 + c1*sum of argument sizes)^degree.
struct CostFn {
  std::uint64_t c0 = 1;
  std::uint64_t c1 = 0;
  std::uint64_t degree = 1;

  std::uint64_t eval(std::uint64_t arg_size_sum) const;  // saturating
  std::string text() const;
  friend bool operator==(const CostFn&, const CostFn&) = default;
};

// Declared envelope on an op's output size.
struct SizeBound {
  enum class Kind {
    Additive,   // |result| <= c + sum of argument sizes
    Selective,  // |result| <= max argument size
    Constant,   // |result| <= c
  };
  Kind kind = Kind::Additive;
  std::uint64_t c = 0;

  std::string text() const;
  friend bool operator==(const SizeBound&, const SizeBound&) = default;
};

struct BaseOpDecl {
  std::string name;
  int arity = 0;  // -1 = variadic
  CostFn cost;
  SizeBound size_bound;
};

// The fixed registry of ops this build implements. System files must declare
// ops with exactly these descriptors; the declaration is the file's readable
// contract, the registry is the ground truth.
const std::vector<BaseOpDecl>& builtin_base_ops();

// Executes a registry op. Throws EvalError on domain errors (head/tail/conc/
// cons applied outside their domain); these abort evaluation and are distinct
// from the `false` value.
Element apply_base_op(const BaseOpDecl& op, std::vector<Element>&& args);

// Finite initial function: explicit table plus an optional rule mapping every
// alphabet atom (except the reserved one) to itself.
struct InitialFn {
  std::map<Element, Element> table;
  bool atoms_identity = false;

  std::optional<Element> lookup(const Element& w) const;
};

enum class GuardKind { IsAtom, IsList, ArityEq, ArityGe, HeadIs };

struct GuardPrim {
  GuardKind kind = GuardKind::IsAtom;
  int k = 0;          // ArityEq / ArityGe
  std::string atom;   // HeadIs

  bool holds(const Element& w) const;
  std::string text() const;
};

struct GammaRule {
  std::vector<GuardPrim> guards;  // conjunction, left to right
  Term tmpl;
  std::string source;  // "guard => template" as written

  // Derived at load time:
  std::optional<int> pinned_arity;  // from `arity = k`
  int min_arity = 0;                // strongest lower bound the guards imply
  bool variadic = false;            // template contains a listof
  int max_x_index = 0;              // highest concrete x-variable index

  // Arity the template is emitted at for input w; the evaluation step
  // separately requires it to equal w's component count.
  int arity_for(const Element& w) const;
};

struct GnfFunction {
  std::string name;  // f1, f2, ...
  std::uint64_t C = 0;
  std::uint64_t p = 0;
  InitialFn initial;
  std::vector<GammaRule> rules;
};

struct GNFSystem {
  std::string name = "<memory>";
  std::vector<std::string> alphabet;  // includes the reserved atom
  std::vector<BaseOpDecl> base_ops;
  std::vector<GnfFunction> functions;
  std::vector<std::pair<std::string, std::string>> meta;

  TermSignature signature() const;
  // Atoms that populate the value universe (the reserved atom is not one).
  std::vector<std::string> universe_atoms() const;
  const GnfFunction& fn(int i) const { return functions.at(i - 1); }
  int fn_count() const { return static_cast<int>(functions.size()); }
};

// Parses the .gnf system format (docs/system-format.md). Enforces load-time
// invariants: registry-exact op declarations, positive family constants that
// dominate lookup, guard-scan, and emission costs, initial tables free of the
// reserved atom, and templates whose x-indices are covered by their guards.
GNFSystem parse_system(std::string_view text, std::string name = "<memory>");
GNFSystem load_system_file(const std::string& path);

// Emitted-size envelope of a rule: node count of the emitted term at arity k
// is exactly a + b*k for variadic templates (b = 0 otherwise). Used by the
// load-time domination check.
std::pair<std::uint64_t, std::uint64_t> emission_envelope(const GammaRule& rule,
                                                          const TermSignature& sig);

struct GammaResult {
  Term term;       // concrete template, listof expanded
  int rule_index;  // 0-based rule that fired
  int arity;       // expansion arity
};

// γ for function i (1-based): scans rules in order, first guard match wins.
// Charges 1 per rule scanned, 1 per guard primitive evaluated, plus the
// emitted term's node count. nullopt means γ(w) = false. The first overload
// takes a precomputed sys.signature() for callers in a loop.
std::optional<GammaResult> apply_gamma(const GNFSystem& sys, int i,
                                       const Element& w,
                                       const TermSignature& sig,
                                       CostMeter& meter);
std::optional<GammaResult> apply_gamma(const GNFSystem& sys, int i,
                                       const Element& w, CostMeter& meter);

// Initial-function probe for function i (1-based). Charges 1 + |w|.
std::optional<Element> initial_lookup(const GNFSystem& sys, int i,
                                      const Element& w, CostMeter& meter);

}  // namespace gnf
