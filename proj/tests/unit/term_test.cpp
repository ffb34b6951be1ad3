#include <doctest.h>

#include "gnf/system.hpp"
#include "gnf/term.hpp"

using namespace gnf;

namespace {

TermSignature test_signature() {
  TermSignature sig;
  sig.alphabet = {"a", "b"};
  sig.base_ops = {{"mklist", -1}, {"conc", 2}, {"head", 1}};
  sig.mklist_id = 0;
  sig.recursive_count = 2;
  return sig;
}

// Base-op context over the built-in registry, for ground evaluation tests.
struct RegistryOps final : BaseOpContext {
  std::vector<BaseOpDecl> decls;
  RegistryOps() {
    for (const char* name : {"mklist", "conc", "head"}) {
      for (const BaseOpDecl& d : builtin_base_ops()) {
        if (d.name == name) decls.push_back(d);
      }
    }
  }
  Element apply(int op_id, std::vector<Element>&& args) const override {
    return apply_base_op(decls[static_cast<std::size_t>(op_id)],
                         std::move(args));
  }
  std::uint64_t cost(int op_id,
                     const std::vector<std::uint64_t>& sizes) const override {
    std::uint64_t sum = 0;
    for (auto s : sizes) sum += s;
    return decls[static_cast<std::size_t>(op_id)].cost.eval(sum);
  }
};

}  // namespace

TEST_CASE("terms parse and render back") {
  TermSignature sig = test_signature();
  for (const char* text :
       {"x1", "conc(x1,x2)", "f1(x1)", "conc(f1(x1),f2(x2))",
        "listof(f1(x[i]),desc)", "listof(x[i],asc)", "mklist()",
        "mklist(a,<a,b>)", "head(conc(<a>,<b>))"}) {
    CHECK(render_term(parse_term(text, sig)) == text);
  }
  // whitespace around arguments is accepted on the way in
  CHECK(render_term(parse_term("conc( x1 , x2 )", sig)) == "conc(x1,x2)");
}

TEST_CASE("the term grammar rejects what the shape rules forbid") {
  TermSignature sig = test_signature();
  // recursive symbols are unary
  CHECK_THROWS_AS(parse_term("f1(x1, x2)", sig), ParseError);
  // f3 is not in a two-function signature
  CHECK_THROWS_AS(parse_term("f3(x1)", sig), ParseError);
  // conc is binary
  CHECK_THROWS_AS(parse_term("conc(x1)", sig), ParseError);
  // unknown symbol
  CHECK_THROWS_AS(parse_term("zip(x1, x2)", sig), ParseError);
  // indexed variables only make sense under a listof
  CHECK_THROWS_AS(parse_term("f1(x[i])", sig), ParseError);
  // one listof may not contain another
  CHECK_THROWS_AS(parse_term("listof(listof(x[i], asc), asc)", sig),
                  ParseError);
  // atom constants come from the alphabet
  CHECK_THROWS_AS(parse_term("mklist(zz)", sig), ParseError);
  CHECK_THROWS_AS(parse_term("mklist(<a,zz>)", sig), ParseError);
  // variable indices start at 1
  CHECK_THROWS_AS(parse_term("x0", sig), ParseError);
  CHECK_THROWS_AS(parse_term("x1 x2", sig), ParseError);
}

TEST_CASE("stripping replaces recursive calls by y-variables") {
  TermSignature sig = test_signature();

  auto [t1, m1] = strip_recursive(parse_term("f1(x1)", sig));
  CHECK(render_term(t1) == "y1");
  CHECK(m1.calls == std::map<int, int>{{1, 1}});

  auto [t2, m2] = strip_recursive(parse_term("conc(f1(x1), f2(x2))", sig));
  CHECK(render_term(t2) == "conc(y1,y2)");
  CHECK(m2.calls == std::map<int, int>{{1, 1}, {2, 2}});

  // the same call twice collapses to one y-variable
  auto [t3, m3] = strip_recursive(parse_term("conc(f1(x1), f1(x1))", sig));
  CHECK(render_term(t3) == "conc(y1,y1)");
  CHECK(m3.calls == std::map<int, int>{{1, 1}});

  // a template with no calls strips to itself
  auto [t4, m4] = strip_recursive(parse_term("conc(x1, x2)", sig));
  CHECK(render_term(t4) == "conc(x1,x2)");
  CHECK(m4.empty());

  // indexed call inside a listof body
  auto [t5, m5] = strip_recursive(parse_term("listof(f1(x[i]), asc)", sig));
  CHECK(render_term(t5) == "listof(y[i],asc)");
  CHECK(m5.indexed_call == 1);
}

TEST_CASE("stripping rejects ill-shaped recursive calls") {
  TermSignature sig = test_signature();
  // nested recursive application
  CHECK_THROWS_AS(strip_recursive(parse_term("f1(f1(x1))", sig)), TermError);
  // recursive call on a non-variable
  CHECK_THROWS_AS(strip_recursive(parse_term("f1(conc(x1, x2))", sig)),
                  TermError);
  CHECK_THROWS_AS(strip_recursive(parse_term("f1(a)", sig)), TermError);
  // one component recursed on by two symbols
  CHECK_THROWS_AS(strip_recursive(parse_term("conc(f1(x1), f2(x1))", sig)),
                  TermError);

  try {
    strip_recursive(parse_term("conc(x1, f1(f2(x2)))", sig));
    FAIL("expected TermError");
  } catch (const TermError& e) {
    CHECK(e.path == "/1");  // the offending call is conc's second argument
  }
}

TEST_CASE("free variables and the x/y split") {
  TermSignature sig = test_signature();
  Term t = strip_recursive(parse_term("conc(f1(x1), conc(x2, x2))", sig)).first;
  auto [xs, ys] = split_vars(t);
  CHECK(xs == std::set<int>{2});
  CHECK(ys == std::set<int>{1});
}

TEST_CASE("listof expansion emits the body once per index") {
  TermSignature sig = test_signature();
  Term t = parse_term("listof(f1(x[i]), asc)", sig);
  CHECK(render_term(expand_listof(t, 3, sig)) ==
        "mklist(f1(x1),f1(x2),f1(x3))");
  CHECK(render_term(expand_listof(t, 0, sig)) == "mklist()");

  Term d = parse_term("listof(f1(x[i]), desc)", sig);
  CHECK(render_term(expand_listof(d, 3, sig)) ==
        "mklist(f1(x3),f1(x2),f1(x1))");

  // expansion leaves concrete subterms alone
  Term mixed = parse_term("conc(x1, listof(x[i], asc))", sig);
  CHECK(render_term(expand_listof(mixed, 2, sig)) ==
        "conc(x1,mklist(x1,x2))");
}

TEST_CASE("substitution grounds a stripped template and charges its size") {
  TermSignature sig = test_signature();
  Term t = strip_recursive(parse_term("conc(f1(x1), x2)", sig)).first;

  Binding b;
  b.x_values[1] = parse_element("<a>");  // unused after stripping
  b.x_values[2] = parse_element("<b,b>");
  b.y_values[1] = parse_element("<a,a>");

  CostMeter meter;
  Term ground = substitute(t, b, meter);
  CHECK(render_term(ground) == "conc(<a,a>,<b,b>)");
  CHECK(meter.total == ground_size(ground));
  CHECK(ground_size(ground) == 1 + 3 + 3);  // the op node plus two literals

  Binding missing;
  CostMeter m2;
  CHECK_THROWS_AS(substitute(t, missing, m2), TermError);
}

TEST_CASE("ground evaluation applies ops bottom-up and charges their costs") {
  TermSignature sig = test_signature();
  RegistryOps ops;

  CostMeter meter;
  Element v = eval_ground(parse_term("conc(<a>, <b>)", sig), ops, meter);
  CHECK(render_element(v) == "<a,b>");
  CHECK(meter.total == 1 + 2 + 2);  // conc is 1 + sum of argument sizes

  CostMeter m2;
  CHECK(render_element(eval_ground(parse_term("mklist(a, <a,b>)", sig), ops, m2)) ==
        "<a,<a,b>>");

  CostMeter m3;
  CHECK(render_element(eval_ground(
            parse_term("head(conc(<a>, <b>))", sig), ops, m3)) == "a");

  // domain errors are errors, not `false`
  CostMeter m4;
  CHECK_THROWS_AS(eval_ground(parse_term("head(<>)", sig), ops, m4), EvalError);
  CHECK_THROWS_AS(eval_ground(parse_term("conc(a, <b>)", sig), ops, m4),
                  EvalError);

  // non-ground input is a caller bug
  CHECK_THROWS_AS(eval_ground(parse_term("conc(x1, <a>)", sig), ops, m4),
                  TermError);
}
