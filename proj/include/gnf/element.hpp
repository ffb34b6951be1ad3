#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gnf {

// Name of the reserved atom that encodes "undefined" as a value.
inline constexpr std::string_view kFalseAtom = "false";

struct ParseError : std::runtime_error {
  ParseError(std::size_t pos, const std::string& what)
      : std::runtime_error(what), position(pos) {}
  std::size_t position;
};

/// An element of the hereditarily finite list universe: an atom drawn from a
// declared alphabet, or a finite ordered list of elements. Immutable; copies
// share the underlying node, so passing elements around is cheap.
class Element {
 public:
  Element() : Element(list({})) {}

  static Element atom(std::string name);
  static Element list(std::vector<Element> children);

  bool is_atom() const { return node_->is_atom; }
  bool is_list() const { return !node_->is_atom; }

  // Valid only for atoms.
  const std::string& atom_name() const { return node_->name; }

  // Component decomposition: children in order for lists, empty for atoms.
  const std::vector<Element>& components() const { return node_->children; }

  // Node count: atoms and list nodes each cost 1.
  std::uint64_t size() const { return node_->size; }

  // Nesting depth: atoms 0, a list is one deeper than its deepest child
  // (the empty list has rank 1).
  std::uint32_t rank() const { return node_->rank; }

  friend bool operator==(const Element& a, const Element& b) {
    return a.node_ == b.node_ || compare(a, b) == 0;
  }
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }
  friend bool operator<(const Element& a, const Element& b) { return compare(a, b) < 0; }

  // Canonical total order: by size, then atoms before lists, then atom name,
  // then children lexicographically. This is also the universe enumeration
  // order, so maps keyed by Element iterate in enumeration order.
  static int compare(const Element& a, const Element& b);

 private:
  struct Node {
    bool is_atom;
    std::string name;                // atoms only
    std::vector<Element> children;   // lists only
    std::uint64_t size;
    std::uint32_t rank;
  };

  explicit Element(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Element grammar: element := ATOM | '<' (element (',' element)*)? '>'
// with ATOM := [a-z][a-z0-9_]*. Whitespace between tokens is ignored.
// When `alphabet` is given, atom names outside it are rejected.
Element parse_element(std::string_view text);
Element parse_element(std::string_view text, const std::vector<std::string>& alphabet);

std::string render_element(const Element& e);

}  // namespace gnf
