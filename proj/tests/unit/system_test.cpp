#include <doctest.h>

#include <string>

#include "gnf/system.hpp"

using namespace gnf;

namespace {

std::string fixture(const char* name) {
  return std::string(GNF_FIXTURE_DIR) + "/" + name;
}

// Loads from text and returns the failure message ("" when it loads fine).
std::string load_error(const std::string& text) {
  try {
    parse_system(text, "t");
  } catch (const SystemError& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& hay, const char* needle) {
  return hay.find(needle) != std::string::npos;
}

const std::string kMirrorish = R"(atoms: a, b

baseops:
  mklist: arity variadic, cost 1 + 1*sum, size additive 1

function f1:
  C = 4
  p = 1
  initial:
    atoms -> identity
  rules:
    is_list => listof(f1(x[i]), desc)
)";

}  // namespace

TEST_CASE("the mirror fixture loads with the declared shape") {
  GNFSystem sys = load_system_file(fixture("mirror.gnf"));
  CHECK(sys.name == "mirror");
  CHECK(sys.universe_atoms() == std::vector<std::string>{"a", "b", "c"});
  // the undefined marker is always part of the alphabet
  CHECK(sys.alphabet.size() == 4);
  CHECK(sys.fn_count() == 1);
  CHECK(sys.fn(1).C == 4);
  CHECK(sys.fn(1).p == 1);
  CHECK(sys.fn(1).initial.atoms_identity);
  REQUIRE(sys.fn(1).rules.size() == 1);
  CHECK(sys.fn(1).rules[0].variadic);
}

TEST_CASE("system files fail with line-tagged messages") {
  CHECK(mentions(load_error("atomz:\n  a\n"), "unknown section"));
  CHECK(mentions(load_error("atomz:\n  a\n"), "line 1"));
  CHECK(mentions(load_error("atomz: a\n"), "content before any section"));
  CHECK(mentions(load_error("atoms: a, a\n"), "duplicate atom"));
  CHECK(mentions(load_error("atoms: a\n"), "no functions declared"));

  CHECK(mentions(load_error("atoms: a\n\nfunction f2:\n  C = 2\n  p = 1\n"),
                 "functions must be named f1..fn in order"));
  CHECK(mentions(load_error("atoms: a\n\nfunction f1:\n  C = 0\n  p = 1\n"),
                 "C must be positive"));
  CHECK(mentions(load_error("atoms: a\n\nfunction f1:\n  p = 1\n"),
                 "missing C"));
  CHECK(mentions(
      load_error("atoms: a\n\nfunction f1:\n  C = 2\n  p = 1\n  C = 3\n"),
      "duplicate"));
}

TEST_CASE("base op declarations must match this build's registry") {
  std::string mismatch = R"(atoms: a

baseops:
  mklist: arity 2, cost 1 + 1*sum, size additive 1

function f1:
  C = 2
  p = 1
)";
  CHECK(mentions(load_error(mismatch), "does not match its implementation"));

  std::string unknown = R"(atoms: a

baseops:
  zip: arity 2, cost 1 + 1*sum, size additive 0

function f1:
  C = 2
  p = 1
)";
  CHECK(mentions(load_error(unknown), "unknown base op 'zip'"));
}

TEST_CASE("templates are validated against the guard at load time") {
  std::string with_y = R"(atoms: a

baseops:
  mklist: arity variadic, cost 1 + 1*sum, size additive 1

function f1:
  C = 4
  p = 1
  rules:
    is_list => mklist(y1)
)";
  CHECK(mentions(load_error(with_y), "may not mention y-variables"));

  std::string uncovered = R"(atoms: a

baseops:
  mklist: arity variadic, cost 1 + 1*sum, size additive 1

function f1:
  C = 6
  p = 1
  rules:
    is_list => mklist(x1, listof(x[i], asc))
)";
  CHECK(mentions(load_error(uncovered), "pinning arity >= 1"));

  std::string no_mklist = R"(atoms: a

function f1:
  C = 4
  p = 1
  rules:
    is_list => listof(x[i], asc)
)";
  CHECK(mentions(load_error(no_mklist), "mklist"));

  std::string false_in_initial = R"(atoms: a

function f1:
  C = 2
  p = 1
  initial:
    false -> a
)";
  CHECK(mentions(load_error(false_in_initial), "reserved atom"));
}

TEST_CASE("declared constants must dominate the machinery costs") {
  std::string tiny_c = kMirrorish;
  tiny_c.replace(tiny_c.find("C = 4"), 5, "C = 1");
  CHECK(mentions(load_error(tiny_c), "lookup cost"));

  std::string small_c = kMirrorish;
  small_c.replace(small_c.find("C = 4"), 5, "C = 2");
  CHECK(mentions(load_error(small_c), "does not dominate"));

  CHECK(load_error(kMirrorish) == "");
}

TEST_CASE("gamma matches the first rule whose guard holds") {
  GNFSystem sys = parse_system(kMirrorish, "t");
  TermSignature sig = sys.signature();

  CostMeter meter;
  auto hit = apply_gamma(sys, 1, parse_element("<a,b>"), sig, meter);
  REQUIRE(hit.has_value());
  CHECK(hit->rule_index == 0);
  CHECK(hit->arity == 2);
  // desc: indices come out highest first
  CHECK(render_term(hit->term) == "mklist(f1(x2),f1(x1))");
  // one rule scanned + one primitive + five emitted nodes
  CHECK(meter.total == 7);

  CostMeter m2;
  CHECK_FALSE(apply_gamma(sys, 1, parse_element("a"), sig, m2).has_value());
  CHECK(m2.total == 2);  // rule scanned, is_list failed

  CostMeter m3;
  auto empty = apply_gamma(sys, 1, parse_element("<>"), sig, m3);
  REQUIRE(empty.has_value());
  CHECK(render_term(empty->term) == "mklist()");
  CHECK(empty->arity == 0);
}

TEST_CASE("guard primitives see atoms and lists the documented way") {
  std::string guarded = R"(atoms: a, b

baseops:
  mklist: arity variadic, cost 1 + 1*sum, size additive 1

function f1:
  C = 7
  p = 1
  rules:
    is_list and arity >= 2 and head_is a => mklist(x1, x2)
)";
  GNFSystem sys = parse_system(guarded, "t");
  TermSignature sig = sys.signature();

  CostMeter meter;
  CHECK(apply_gamma(sys, 1, parse_element("<a,b>"), sig, meter).has_value());
  // atoms fail every list-shaped primitive, including arity and head_is
  CHECK_FALSE(apply_gamma(sys, 1, parse_element("a"), sig, meter).has_value());
  CHECK_FALSE(apply_gamma(sys, 1, parse_element("<b,a>"), sig, meter).has_value());
  CHECK_FALSE(apply_gamma(sys, 1, parse_element("<a>"), sig, meter).has_value());

  // arity = 0 holds exactly on the empty list, and implies is_list
  std::string empty_guard = R"(atoms: a, b

baseops:
  mklist: arity variadic, cost 1 + 1*sum, size additive 1

function f1:
  C = 4
  p = 1
  rules:
    arity = 0 => mklist()
)";
  GNFSystem sys2 = parse_system(empty_guard, "t");
  TermSignature sig2 = sys2.signature();
  CostMeter m2;
  CHECK(apply_gamma(sys2, 1, parse_element("<>"), sig2, m2).has_value());
  CHECK_FALSE(apply_gamma(sys2, 1, parse_element("a"), sig2, m2).has_value());
  CHECK_FALSE(apply_gamma(sys2, 1, parse_element("<a>"), sig2, m2).has_value());
}

TEST_CASE("the initial table answers before any rule is tried") {
  GNFSystem sys = load_system_file(fixture("doubling.gnf"));

  CostMeter meter;
  auto hit = initial_lookup(sys, 1, parse_element("a"), meter);
  REQUIRE(hit.has_value());
  CHECK(render_element(*hit) == "a");
  CHECK(meter.total == 2);  // 1 + |w|

  auto seeded = initial_lookup(sys, 1, parse_element("<a>"), meter);
  REQUIRE(seeded.has_value());
  CHECK(render_element(*seeded) == "<a,a>");

  CHECK_FALSE(initial_lookup(sys, 1, parse_element("<a,a>"), meter).has_value());
  // atoms->identity never defines the undefined marker itself
  CostMeter m2;
  CHECK_FALSE(initial_lookup(sys, 1, Element::atom("false"), m2).has_value());
}

TEST_CASE("every shipped fixture loads") {
  for (const char* name : {"mirror.gnf", "identity.gnf", "doubling.gnf",
                           "empty.gnf", "bad_c1.gnf", "bad_c2.gnf",
                           "bad_c3.gnf"}) {
    CHECK_NOTHROW(load_system_file(fixture(name)));
  }
  CHECK_THROWS_AS(load_system_file(fixture("nosuch.gnf")), SystemError);
}
