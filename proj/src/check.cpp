#include "gnf/check.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace gnf {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Skip:
      return "skip";
  }
  return {};
}

const ConditionReport& CheckReport::condition(int i) const {
  switch (i) {
    case 1:
      return c1;
    case 2:
      return c2;
    case 3:
      return c3;
    case 4:
      return c4;
    case 5:
      return c5;
  }
  throw std::out_of_range("condition index must be 1..5");
}

namespace {

// ---------------------------------------------------------------------------
// C1/C2: raw-template scans

struct C1Violation {
  std::string path;
  std::string detail;
};

// First recursive application that is not f_j(x_i) / f_j(x[i]).
std::optional<C1Violation> scan_c1(const Term& t, std::string& path) {
  switch (t.kind()) {
    case TermKind::App: {
      if (t.symbol().recursive) {
        const Term& arg = t.args().front();
        if (arg.kind() != TermKind::XVar && arg.kind() != TermKind::XIndexed) {
          std::string what =
              arg.kind() == TermKind::App && arg.symbol().recursive
                  ? "nested recursive application " + render_term(t)
                  : t.symbol().name + " applied to the non-variable term " +
                        render_term(arg);
          return C1Violation{path, what};
        }
        return std::nullopt;
      }
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        std::size_t mark = path.size();
        path += "/" + std::to_string(i);
        if (auto v = scan_c1(t.args()[i], path)) return v;
        path.resize(mark);
      }
      return std::nullopt;
    }
    case TermKind::Listof: {
      std::size_t mark = path.size();
      path += "/0";
      auto v = scan_c1(t.body(), path);
      path.resize(mark);
      return v;
    }
    default:
      return std::nullopt;
  }
}

struct CallSites {
  std::map<int, std::set<int>> by_index;  // x-index -> recursive symbols used
  std::set<int> indexed_symbols;          // symbols applied to x[i]
};

void scan_calls(const Term& t, CallSites& out) {
  switch (t.kind()) {
    case TermKind::App:
      if (t.symbol().recursive) {
        const Term& arg = t.args().front();
        if (arg.kind() == TermKind::XVar) {
          out.by_index[arg.var_index()].insert(t.symbol().index);
        } else if (arg.kind() == TermKind::XIndexed) {
          out.indexed_symbols.insert(t.symbol().index);
        }
        return;
      }
      for (const Term& a : t.args()) scan_calls(a, out);
      return;
    case TermKind::Listof:
      scan_calls(t.body(), out);
      return;
    default:
      return;
  }
}

// nullopt, or a human-readable description of the first C2 conflict.
std::optional<std::string> scan_c2(const Term& t) {
  CallSites sites;
  scan_calls(t, sites);
  if (sites.indexed_symbols.size() > 1) {
    return "x[i] is recursed on by f" + std::to_string(*sites.indexed_symbols.begin()) +
           " and f" + std::to_string(*std::next(sites.indexed_symbols.begin()));
  }
  for (const auto& [index, symbols] : sites.by_index) {
    if (symbols.size() > 1) {
      return "x" + std::to_string(index) + " is recursed on by f" +
             std::to_string(*symbols.begin()) + " and f" +
             std::to_string(*std::next(symbols.begin()));
    }
    // x[i] ranges over every index, so a same-index clash with a concrete
    // call is a conflict whenever the symbols differ.
    if (!sites.indexed_symbols.empty() &&
        !sites.indexed_symbols.count(*symbols.begin())) {
      return "x" + std::to_string(index) + " is recursed on by f" +
             std::to_string(*symbols.begin()) + " and, via x[i], by f" +
             std::to_string(*sites.indexed_symbols.begin());
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// C3: free variables of a (possibly symbolic) stripped template

struct FreeVars {
  std::set<int> xs, ys;
  bool has_xi = false, has_yi = false;
};

void scan_free(const Term& t, FreeVars& out) {
  switch (t.kind()) {
    case TermKind::XVar:
      out.xs.insert(t.var_index());
      return;
    case TermKind::YVar:
      out.ys.insert(t.var_index());
      return;
    case TermKind::XIndexed:
      out.has_xi = true;
      return;
    case TermKind::YIndexed:
      out.has_yi = true;
      return;
    case TermKind::App:
      for (const Term& a : t.args()) scan_free(a, out);
      return;
    case TermKind::Listof:
      scan_free(t.body(), out);
      return;
    default:
      return;
  }
}

std::optional<std::string> scan_c3(const Term& stripped) {
  FreeVars fv;
  scan_free(stripped, fv);
  for (int i : fv.xs) {
    if (fv.ys.count(i)) {
      return "x" + std::to_string(i) + " and y" + std::to_string(i) +
             " are both free in the stripped template";
    }
  }
  if (fv.has_xi && (fv.has_yi || !fv.ys.empty())) {
    return "x[i] overlaps a y-variable in the stripped template";
  }
  if (fv.has_yi && !fv.xs.empty()) {
    return "y[i] ranges over every index, including free x" +
           std::to_string(*fv.xs.begin());
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// C4/C5: symbolic size and cost composition
//
// Value sizes are tracked as linear forms over the input sizes; op costs as
// univariate polynomials in S = sum of all input sizes. Both use exact
// unbounded integers.

using Poly = std::vector<BigInt>;  // coefficient i multiplies S^i; empty = 0

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly poly_pow(Poly base, std::uint64_t d) {
  Poly out = {1};
  for (std::uint64_t i = 0; i < d; ++i) out = poly_mul(out, base);
  return out;
}

std::size_t poly_degree(const Poly& a) {
  for (std::size_t i = a.size(); i > 0; --i) {
    if (a[i - 1] != 0) return i - 1;
  }
  return 0;
}

BigInt poly_coeff_sum(const Poly& a) {
  BigInt s = 0;
  for (const BigInt& c : a) s += c;
  return s;
}

// Upper bound on a value size, linear in the individual input sizes and the
// expansion arity k:
//   constant + arity_coeff*k + sum_v var_coeff[v]*|v|
//            + sum_v var_arity_coeff[v]*k*|v|
//            + indexed_x * (|x_1|+...+|x_k|) + indexed_y * (|y_1|+...+|y_k|)
struct SizeForm {
  BigInt constant = 0;
  BigInt arity_coeff = 0;
  std::map<Var, BigInt> var_coeff;
  std::map<Var, BigInt> var_arity_coeff;
  BigInt indexed_x = 0;
  BigInt indexed_y = 0;
};

SizeForm form_add(const SizeForm& a, const SizeForm& b) {
  SizeForm out = a;
  out.constant += b.constant;
  out.arity_coeff += b.arity_coeff;
  for (const auto& [v, c] : b.var_coeff) out.var_coeff[v] += c;
  for (const auto& [v, c] : b.var_arity_coeff) out.var_arity_coeff[v] += c;
  out.indexed_x += b.indexed_x;
  out.indexed_y += b.indexed_y;
  return out;
}

SizeForm form_max(const SizeForm& a, const SizeForm& b) {
  SizeForm out = a;
  out.constant = std::max(out.constant, b.constant);
  out.arity_coeff = std::max(out.arity_coeff, b.arity_coeff);
  for (const auto& [v, c] : b.var_coeff) {
    auto it = out.var_coeff.find(v);
    if (it == out.var_coeff.end()) {
      out.var_coeff[v] = c;
    } else {
      it->second = std::max(it->second, c);
    }
  }
  for (const auto& [v, c] : b.var_arity_coeff) {
    auto it = out.var_arity_coeff.find(v);
    if (it == out.var_arity_coeff.end()) {
      out.var_arity_coeff[v] = c;
    } else {
      it->second = std::max(it->second, c);
    }
  }
  out.indexed_x = std::max(out.indexed_x, b.indexed_x);
  out.indexed_y = std::max(out.indexed_y, b.indexed_y);
  return out;
}

// Sum of k per-index instances of a listof body's form.
SizeForm form_sum_over_indices(const SizeForm& body) {
  SizeForm out;
  out.arity_coeff = body.constant;
  for (const auto& [v, c] : body.var_coeff) out.var_arity_coeff[v] = c;
  out.indexed_x = body.indexed_x;
  out.indexed_y = body.indexed_y;
  // body cannot contain a nested listof, so its arity fields are zero
  return out;
}

// Univariate bridge: every individual size and the arity are at most S, the
// sum of all input sizes; a sum of distinct sizes is at most S once.
Poly form_to_poly(const SizeForm& f) {
  BigInt max_var = 0, max_var_arity = 0;
  for (const auto& [v, c] : f.var_coeff) max_var = std::max(max_var, c);
  for (const auto& [v, c] : f.var_arity_coeff) {
    max_var_arity = std::max(max_var_arity, c);
  }
  Poly out = {f.constant, f.arity_coeff + max_var + f.indexed_x + f.indexed_y,
              max_var_arity};
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

struct Analysis {
  Poly cost;      // op charges incurred evaluating the ground template
  SizeForm size;  // bound on the resulting value's size
};

Analysis analyze(const Term& t, const GNFSystem& sys);

Analysis analyze_app(const Term& t, const GNFSystem& sys) {
  Analysis out;
  SizeForm arg_sum;
  std::vector<SizeForm> arg_sizes;
  for (const Term& a : t.args()) {
    Analysis sub = analyze(a, sys);
    out.cost = poly_add(out.cost, sub.cost);
    arg_sum = form_add(arg_sum, sub.size);
    arg_sizes.push_back(std::move(sub.size));
  }

  const BaseOpDecl& op = sys.base_ops.at(t.symbol().index);
  Poly inner = poly_add({op.cost.c0}, poly_mul({op.cost.c1}, form_to_poly(arg_sum)));
  out.cost = poly_add(out.cost, poly_pow(inner, op.cost.degree));

  switch (op.size_bound.kind) {
    case SizeBound::Kind::Additive:
      out.size = arg_sum;
      out.size.constant += op.size_bound.c;
      break;
    case SizeBound::Kind::Selective:
      for (const SizeForm& s : arg_sizes) out.size = form_max(out.size, s);
      break;
    case SizeBound::Kind::Constant:
      out.size.constant = op.size_bound.c;
      break;
  }
  return out;
}

Analysis analyze(const Term& t, const GNFSystem& sys) {
  Analysis out;
  switch (t.kind()) {
    case TermKind::XVar:
      out.size.var_coeff[Var{false, t.var_index()}] = 1;
      return out;
    case TermKind::YVar:
      out.size.var_coeff[Var{true, t.var_index()}] = 1;
      return out;
    case TermKind::XIndexed:
      out.size.indexed_x = 1;
      return out;
    case TermKind::YIndexed:
      out.size.indexed_y = 1;
      return out;
    case TermKind::Const:
      out.size.constant = 1;
      return out;
    case TermKind::Lit:
      out.size.constant = t.literal_value().size();
      return out;
    case TermKind::App:
      if (t.symbol().recursive) {
        throw TermError("analysis requires a stripped template");
      }
      return analyze_app(t, sys);
    case TermKind::Listof: {
      Analysis body = analyze(t.body(), sys);
      // k bodies evaluated, then one list-builder application over them.
      out.cost = poly_mul(body.cost, {0, 1});  // k <= S
      SizeForm total = form_sum_over_indices(body.size);
      const BaseOpDecl& mk = sys.base_ops.at(
          static_cast<std::size_t>(sys.signature().mklist_id));
      Poly inner =
          poly_add({mk.cost.c0}, poly_mul({mk.cost.c1}, form_to_poly(total)));
      out.cost = poly_add(out.cost, poly_pow(inner, mk.cost.degree));
      out.size = total;
      out.size.constant += mk.size_bound.c;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-rule pipeline

struct RuleOutcome {
  // verdicts[0..4] correspond to C1..C5
  Verdict verdict[5] = {Verdict::Pass, Verdict::Pass, Verdict::Pass,
                        Verdict::Pass, Verdict::Pass};
  std::string path[5];
  std::string detail[5];
};

void block_from(RuleOutcome& out, int first_blocked) {
  for (int i = first_blocked; i < 5; ++i) out.verdict[i] = Verdict::Skip;
}

RuleOutcome check_rule(const GNFSystem& sys, const GnfFunction& fn,
                       const GammaRule& rule, const TermSignature& sig) {
  RuleOutcome out;

  // Rules pinned to a fixed arity are checked on the concrete expansion;
  // open-arity rules are checked symbolically in k.
  Term t = rule.pinned_arity ? expand_listof(rule.tmpl, *rule.pinned_arity, sig)
                             : rule.tmpl;

  if (auto v = [&] {
        std::string path;
        return scan_c1(t, path);
      }()) {
    out.verdict[0] = Verdict::Fail;
    out.path[0] = v->path;
    out.detail[0] = v->detail;
    block_from(out, 1);
    return out;
  }

  if (auto conflict = scan_c2(t)) {
    out.verdict[1] = Verdict::Fail;
    out.detail[1] = *conflict;
    block_from(out, 2);
    return out;
  }

  auto [stripped, calls] = strip_recursive(t);

  if (auto conflict = scan_c3(stripped)) {
    out.verdict[2] = Verdict::Fail;
    out.detail[2] = *conflict;
    block_from(out, 3);
    return out;
  }

  Analysis a = analyze(stripped, sys);

  // C4: cost(S) <= C*S^p for all S >= 1. For polynomials with non-negative
  // coefficients this is exactly degree <= p and coefficient sum <= C.
  std::size_t deg = poly_degree(a.cost);
  BigInt coeff_sum = poly_coeff_sum(a.cost);
  if (deg > fn.p) {
    out.verdict[3] = Verdict::Fail;
    out.detail[3] = render_term(stripped) + ": composed op cost grows like S^" +
                    std::to_string(deg) + " but p = " + std::to_string(fn.p);
  } else if (coeff_sum > fn.C) {
    out.verdict[3] = Verdict::Fail;
    out.detail[3] = render_term(stripped) +
                    ": composed op cost at unit sizes is " + coeff_sum.str() +
                    " but C = " + std::to_string(fn.C);
  }

  // C5: |value| <= sum of input sizes, for every arity the rule can fire at
  // and all input sizes >= 1. Linear forms with non-negative coefficients
  // reduce this to per-variable coefficients <= 1 plus the all-ones instance.
  FreeVars fv;
  scan_free(stripped, fv);
  bool has_y = !fv.ys.empty() || fv.has_yi;
  if (!has_y) return out;  // vacuous: no recursive values are consumed

  const SizeForm& f = a.size;
  auto fail_c5 = [&](std::string why) {
    out.verdict[4] = Verdict::Fail;
    out.detail[4] = render_term(stripped) + ": " + std::move(why);
  };

  if (!f.var_arity_coeff.empty()) {
    // Only reachable symbolically (pinned rules were expanded): a concrete
    // variable summed across an open arity cannot stay within its single
    // contribution to the input.
    const Var v = f.var_arity_coeff.begin()->first;
    fail_c5(std::string(v.is_y ? "y" : "x") + std::to_string(v.index) +
            " is repeated once per list index, but contributes to the input "
            "sum only once");
    return out;
  }
  if (f.indexed_x > 1 || f.indexed_y > 1) {
    fail_c5("an indexed variable is used " +
            (f.indexed_x > f.indexed_y ? f.indexed_x : f.indexed_y).str() +
            " times per index");
    return out;
  }
  for (const auto& [v, c] : f.var_coeff) {
    BigInt total = c + (v.is_y ? f.indexed_y : f.indexed_x);
    if (total > 1) {
      fail_c5(std::string(v.is_y ? "y" : "x") + std::to_string(v.index) +
              " contributes " + total.str() +
              " times its size to the value, but only once to the input sum");
      return out;
    }
  }

  // All-ones instance, linear in the arity k: the value bound's slope and
  // smallest-arity intercept must stay within the input sum's.
  BigInt var_units = 0;
  for (const auto& [v, c] : f.var_coeff) var_units += c;
  BigInt lhs_slope = f.arity_coeff + f.indexed_x + f.indexed_y;
  BigInt rhs_slope = 1 + (calls.indexed_call ? 1 : 0);
  BigInt m0 = static_cast<std::uint64_t>(calls.calls.size());

  std::int64_t k_min = std::max<std::int64_t>(
      {1, rule.min_arity, rule.pinned_arity ? *rule.pinned_arity : 0,
       rule.max_x_index});
  BigInt lhs_at_min = f.constant + var_units + lhs_slope * k_min;
  BigInt rhs_at_min = m0 + rhs_slope * k_min;
  bool open_arity = !rule.pinned_arity;
  if (open_arity && lhs_slope > rhs_slope) {
    fail_c5("the value bound grows by " + lhs_slope.str() +
            " per list index, the input sum only by " + rhs_slope.str());
    return out;
  }
  if (lhs_at_min > rhs_at_min) {
    fail_c5("at arity " + std::to_string(k_min) +
            " the value bound is " + lhs_at_min.str() +
            " at unit sizes, exceeding the input sum " + rhs_at_min.str());
    return out;
  }
  return out;
}

CheckReport run_checks(const GNFSystem& sys) {
  CheckReport report;
  TermSignature sig = sys.signature();

  ConditionReport* conditions[5] = {&report.c1, &report.c2, &report.c3,
                                    &report.c4, &report.c5};
  bool any_skip[5] = {false, false, false, false, false};

  for (const GnfFunction& fn : sys.functions) {
    for (std::size_t r = 0; r < fn.rules.size(); ++r) {
      RuleOutcome out = check_rule(sys, fn, fn.rules[r], sig);
      for (int c = 0; c < 5; ++c) {
        if (out.verdict[c] == Verdict::Skip) any_skip[c] = true;
        if (out.verdict[c] == Verdict::Fail &&
            conditions[c]->verdict != Verdict::Fail) {
          conditions[c]->verdict = Verdict::Fail;
          conditions[c]->function = fn.name;
          conditions[c]->rule_index = static_cast<int>(r);
          conditions[c]->rule_source = fn.rules[r].source;
          conditions[c]->subterm_path = out.path[c];
          conditions[c]->detail = out.detail[c];
        }
      }
    }
  }
  for (int c = 0; c < 5; ++c) {
    if (conditions[c]->verdict == Verdict::Pass && any_skip[c]) {
      conditions[c]->verdict = Verdict::Skip;
      conditions[c]->detail = "blocked by an earlier failing condition";
    }
  }
  return report;
}

}  // namespace

ConditionReport check_c1(const GNFSystem& sys) { return run_checks(sys).c1; }
ConditionReport check_c2(const GNFSystem& sys) { return run_checks(sys).c2; }
ConditionReport check_c3(const GNFSystem& sys) { return run_checks(sys).c3; }
ConditionReport check_c4_static(const GNFSystem& sys) {
  return run_checks(sys).c4;
}
ConditionReport check_c5_static(const GNFSystem& sys) {
  return run_checks(sys).c5;
}

CheckReport check_system(const GNFSystem& sys) { return run_checks(sys); }

}  // namespace gnf
