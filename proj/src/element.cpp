#include "gnf/element.hpp"

#include <algorithm>
#include <sstream>

namespace gnf {

Element Element::atom(std::string name) {
  auto node = std::make_shared<Node>();
  node->is_atom = true;
  node->name = std::move(name);
  node->size = 1;
  node->rank = 0;
  return Element(std::move(node));
}

Element Element::list(std::vector<Element> children) {
  auto node = std::make_shared<Node>();
  node->is_atom = false;
  std::uint64_t size = 1;
  std::uint32_t max_child_rank = 0;
  for (const Element& c : children) {
    size += c.size();
    max_child_rank = std::max(max_child_rank, c.rank());
  }
  node->size = size;
  node->rank = 1 + (children.empty() ? 0 : max_child_rank);
  node->children = std::move(children);
  return Element(std::move(node));
}

int Element::compare(const Element& a, const Element& b) {
  if (a.node_ == b.node_) return 0;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.is_atom() != b.is_atom()) return a.is_atom() ? -1 : 1;
  if (a.is_atom()) return a.atom_name().compare(b.atom_name());
  const auto& ca = a.components();
  const auto& cb = b.components();
  for (std::size_t i = 0; i < std::min(ca.size(), cb.size()); ++i) {
    if (int c = compare(ca[i], cb[i]); c != 0) return c;
  }
  if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
  return 0;
}

namespace {

struct ElementParser {
  std::string_view text;
  std::size_t pos = 0;
  const std::vector<std::string>* alphabet;  // nullptr = accept any atom

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                 text[pos] == '\n' || text[pos] == '\r')) {
      ++pos;
    }
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(pos, what); }

  bool atom_start(char c) { return c >= 'a' && c <= 'z'; }
  bool atom_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  }

  std::string parse_atom_name() {
    std::size_t start = pos;
    if (pos >= text.size() || !atom_start(text[pos])) fail("expected atom name");
    while (pos < text.size() && atom_char(text[pos])) ++pos;
    std::string name(text.substr(start, pos - start));
    if (alphabet && std::find(alphabet->begin(), alphabet->end(), name) ==
                        alphabet->end()) {
      pos = start;
      fail("unknown atom '" + name + "'");
    }
    return name;
  }

  Element parse() {
    skip_ws();
    if (pos >= text.size()) fail("expected element");
    if (text[pos] == '<') {
      ++pos;
      std::vector<Element> children;
      skip_ws();
      if (pos < text.size() && text[pos] == '>') {
        ++pos;
        return Element::list({});
      }
      while (true) {
        children.push_back(parse());
        skip_ws();
        if (pos >= text.size()) fail("expected ',' or '>'");
        if (text[pos] == ',') {
          ++pos;
          continue;
        }
        if (text[pos] == '>') {
          ++pos;
          return Element::list(std::move(children));
        }
        fail("expected ',' or '>'");
      }
    }
    return Element::atom(parse_atom_name());
  }

  Element parse_all() {
    Element e = parse();
    skip_ws();
    if (pos != text.size()) fail("trailing input after element");
    return e;
  }
};

}  // namespace

Element parse_element(std::string_view text) {
  ElementParser p{text, 0, nullptr};
  return p.parse_all();
}

Element parse_element(std::string_view text, const std::vector<std::string>& alphabet) {
  ElementParser p{text, 0, &alphabet};
  return p.parse_all();
}

std::string render_element(const Element& e) {
  if (e.is_atom()) return e.atom_name();
  std::string out = "<";
  bool first = true;
  for (const Element& c : e.components()) {
    if (!first) out += ',';
    first = false;
    out += render_element(c);
  }
  out += '>';
  return out;
}

}  // namespace gnf
