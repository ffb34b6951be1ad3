// Acceptance battery for the recursion engine: eight end-to-end criteria,
// one verdict line each, exit code = number of failures. Tolerances and
// budgets are pinned here, not configurable.

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gnf/audit.hpp"
#include "gnf/check.hpp"
#include "gnf/cli.hpp"
#include "gnf/engine.hpp"

using namespace gnf;

namespace {

std::string fixture(const std::string& name) {
  return std::string(GNF_FIXTURE_DIR) + "/" + name;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& label, const Outcome& o, double secs) {
  std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  "
            << label << "  (" << std::fixed << std::setprecision(2) << secs
            << "s)\n";
  if (!o.detail.empty()) std::cout << "    " << o.detail << "\n";
  std::cout.flush();
  if (!o.pass) ++failures;
}

template <typename Fn>
void run(int id, const std::string& label, Fn fn) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("unexpected exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
  report(id, label, o, secs);
}

// ---- criterion 1: the static checker accepts and rejects precisely --------

Outcome checker_precision() {
  auto t0 = std::chrono::steady_clock::now();

  for (const char* name : {"mirror.gnf", "identity.gnf", "empty.gnf"}) {
    auto r = check_system(load_system_file(fixture(name)));
    if (!r.accepted())
      return {false, std::string(name) + " should be accepted but fails " +
                         std::string(verdict_name(r.c1.verdict))};
  }

  struct Rejection {
    const char* name;
    int condition;
  };
  for (const Rejection& want :
       {Rejection{"bad_c1.gnf", 1}, Rejection{"bad_c2.gnf", 2},
        Rejection{"bad_c3.gnf", 3}, Rejection{"doubling.gnf", 5}}) {
    auto r = check_system(load_system_file(fixture(want.name)));
    if (r.accepted()) return {false, std::string(want.name) + " was accepted"};
    for (int i = 1; i <= 5; ++i) {
      bool should_fail = (i == want.condition);
      bool failed = r.condition(i).verdict == Verdict::Fail;
      if (should_fail && !failed)
        return {false, std::string(want.name) + " does not fail C" +
                           std::to_string(want.condition)};
      if (!should_fail && failed)
        return {false, std::string(want.name) + " unexpectedly fails C" +
                           std::to_string(i)};
    }
  }

  // cost-only rejection: six selective tails overrun C = 11 while the value
  // bound stays fine
  std::string c4_only = R"(atoms: a

baseops:
  tail: arity 1, cost 1 + 1*sum, size selective

function f1:
  C = 11
  p = 1
  initial:
    atoms -> identity
  rules:
    is_list and arity = 1 => tail(tail(tail(tail(tail(tail(f1(x1)))))))
)";
  auto r = check_system(parse_system(c4_only, "tails"));
  if (r.c4.verdict != Verdict::Fail || r.c5.verdict != Verdict::Pass)
    return {false, "the cost-only system should fail C4 and pass C5"};

  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 1.0)
    return {false, "battery took " + std::to_string(secs) + "s, budget is 1s"};
  return {true, "3 accepted and 5 rejected systems, each for the right condition"};
}

// ---- criterion 2: stagewise iteration on a quarter-million-element slice --

Outcome fixpoint_slice() {
  auto t0 = std::chrono::steady_clock::now();
  auto slice = UniverseSlice::build({"a", "b"}, 9, 3, 300'000);
  if (slice.size() != 252'930)
    return {false, "slice holds " + std::to_string(slice.size()) +
                       " elements, expected 252930"};

  for (const char* name : {"mirror.gnf", "identity.gnf"}) {
    auto sys = load_system_file(fixture(name));
    auto run = run_to_fixpoint(sys, slice, 16);
    if (!run.stabilized())
      return {false, std::string(name) + " did not stabilize in 16 stages"};
    if (run.stabilization_stage > 4)
      return {false, std::string(name) + " stabilized at stage " +
                         std::to_string(run.stabilization_stage) +
                         ", required <= 4"};
    auto mono = verify_monotone(run.stages, slice);
    if (!mono.ok) return {false, std::string(name) + ": " + mono.detail};
    auto cross = crosscheck_fixpoint(sys, run.stages, slice);
    if (!cross.ok) return {false, std::string(name) + ": " + cross.detail};
  }

  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 10.0)
    return {false, "run took " + std::to_string(secs) + "s, budget is 10s"};
  std::ostringstream d;
  d << "252930 elements per system, stabilized by stage 4, monotone and "
       "crosschecked";
  return {true, d.str()};
}

// ---- criterion 3: memoized == naive over the full size-12 slice -----------

Outcome memo_naive_agreement() {
  const BigInt full = count_universe({"a", "b"}, 12, 12);
  auto mirror = load_system_file(fixture("mirror.gnf"));
  auto identity = load_system_file(fixture("identity.gnf"));

  std::uint64_t mismatches = 0;
  std::string first_mismatch;
  WalkLimits limits;
  limits.deadline_seconds = 55.0;  // leave headroom inside the 60s budget
  limits.max_pool_elements = 12'000'000;

  auto stats = for_each_element(
      {"a", "b"}, 12,
      [&](const Element& w) {
        for (const GNFSystem* sys : {&mirror, &identity}) {
          auto memod = evaluate(*sys, 1, w);
          auto naive = evaluate_naive(*sys, 1, w);
          bool same = memod.defined() == naive.defined() &&
                      (!memod.defined() || *memod.result == *naive.result);
          if (!same) {
            if (mismatches == 0)
              first_mismatch = sys->name + " disagrees at " + render_element(w);
            ++mismatches;
          }
        }
        return true;
      },
      limits);

  if (mismatches > 0)
    return {false, std::to_string(mismatches) + " mismatches; first: " +
                       first_mismatch};
  if (!stats.finished) {
    std::ostringstream d;
    d << "agreement held on all " << stats.visited
      << " elements visited (complete through size " << stats.last_completed_size
      << "), but the walk stopped early: " << stats.stop_reason
      << "; the full slice holds " << full << " elements";
    return {false, d.str()};
  }
  return {true, "both systems agree on all " + std::to_string(stats.visited) +
                    " elements"};
}

// ---- criteria 4 and 5: audited bounds over generated inputs up to size 20 -

AuditReport bounds_report;

Outcome size_bound() {
  auto sys = load_system_file(fixture("mirror.gnf"));
  bounds_report = audit(sys, 1, generated_inputs({"a", "b"}, 20), false);
  int size_violations = 0, other = 0;
  for (const auto& v : bounds_report.violations)
    (v.kind == "size-bound" ? size_violations : other)++;
  if (size_violations > 0 || other > 0)
    return {false, std::to_string(size_violations) + " size-bound and " +
                       std::to_string(other) + " other violations; first: " +
                       bounds_report.violations[0].kind + " at " +
                       bounds_report.violations[0].input};
  std::ostringstream d;
  d << bounds_report.inputs.size() << " inputs, max |f(w)| / bound ratio "
    << std::setprecision(3) << bounds_report.max_size_ratio;
  return {true, d.str()};
}

Outcome time_bound() {
  for (const auto& v : bounds_report.violations)
    if (v.kind == "time-bound")
      return {false, "time-bound violation at " + v.input + ": " + v.detail};
  std::ostringstream d;
  d << bounds_report.inputs.size() << " inputs, max steps / bound ratio "
    << std::setprecision(3) << bounds_report.max_time_ratio;
  return {true, d.str()};
}

// ---- criterion 6: the measured growth exponent stays near the model -------

Outcome fitted_exponent() {
  auto sys = load_system_file(fixture("mirror.gnf"));
  auto report = audit(sys, 1, flat_list_inputs("a", {4, 8, 16, 32, 64}), true);
  if (!report.fit.has_value()) return {false, "no fit produced"};
  const double limit = 2.25;  // p^2 + 1 for p = 1, plus 0.25 slack
  std::ostringstream d;
  d << "exponent " << std::setprecision(3) << report.fit->exponent
    << " (residual " << report.fit->residual << "), limit " << limit;
  return {report.fit->exponent <= limit, d.str()};
}

// ---- criterion 7: the runtime net catches a forced value-size violation ---

Outcome forced_violation() {
  std::ostringstream out, err;
  int code = run_cli({"eval", fixture("doubling.gnf"), "f1", "<<<a>>>", "--force"},
                     out, err);
  if (code != 1)
    return {false, "exit code " + std::to_string(code) + ", expected 1"};
  std::string msg = err.str();
  for (const char* needle : {"runtime violation (C5)", "conc(<a,a,a,a>,<a,a,a,a>)",
                             "value size 9", "input-size sum 8"}) {
    if (msg.find(needle) == std::string::npos)
      return {false, std::string("violation text lacks \"") + needle +
                         "\": " + msg};
  }
  return {true, "rank-3 input, exit 1, names the instantiated template and "
                "both sides of the inequality"};
}

// ---- criterion 8: byte-identical output across repeated runs --------------

Outcome determinism() {
  std::vector<std::vector<std::string>> commands = {
      {"eval", fixture("mirror.gnf"), "f1", "<a,<b,c>>", "--trace"},
      {"audit", fixture("mirror.gnf"), "--gen-max-size", "6", "--fit"},
      {"iterate", fixture("mirror.gnf"), "--atoms", "a,b", "--max-size", "4",
       "--max-rank", "3", "--verify"},
  };
  for (const auto& cmd : commands) {
    std::string first;
    for (int round = 0; round < 3; ++round) {
      std::ostringstream out, err;
      int code = run_cli(cmd, out, err);
      if (code != 0)
        return {false, cmd[0] + " exited " + std::to_string(code)};
      if (round == 0)
        first = out.str();
      else if (out.str() != first)
        return {false, cmd[0] + " output differs between runs"};
    }
  }
  return {true, "eval, audit and iterate each byte-identical across 3 runs"};
}

}  // namespace

int main() {
  std::cout << "acceptance battery\n";
  run(1, "static checker precision across the fixture battery",
      checker_precision);
  run(2, "stagewise fixed point on the size<=9 rank<=3 two-atom slice",
      fixpoint_slice);
  run(3, "memoized and naive evaluation agree on every element up to size 12",
      memo_naive_agreement);
  run(4, "value sizes stay within C*|w|^p on generated inputs up to size 20",
      size_bound);
  run(5, "step counts stay within 36*C^(p+1)*(r+1)*|w|^(p^2+1) on the same inputs",
      time_bound);
  run(6, "fitted step-growth exponent on flat lists stays at most 2.25",
      fitted_exponent);
  run(7, "a forced run of the doubling system trips the value-size net",
      forced_violation);
  run(8, "evaluation, audit and iteration output is deterministic",
      determinism);
  std::cout << (8 - failures) << " of 8 criteria passed\n";
  return failures;
}
