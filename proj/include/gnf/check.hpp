#pragma once

#include <string>
#include <string_view>

#include "gnf/system.hpp"

namespace gnf {

enum class Verdict { Pass, Fail, Skip };

std::string_view verdict_name(Verdict v);

// Outcome of one condition across the whole system. On failure, the location
// fields identify the first offending rule.
struct ConditionReport {
  Verdict verdict = Verdict::Pass;
  std::string function;       // f1, f2, ... (empty when passing)
  int rule_index = -1;        // 0-based within the function
  std::string rule_source;    // the rule line as written
  std::string subterm_path;   // child-index path into the template, if known
  std::string detail;

  bool passed() const { return verdict == Verdict::Pass; }
};

struct CheckReport {
  ConditionReport c1, c2, c3, c4, c5;

  // Accepted systems are the ones the evaluator will run without --force.
  bool accepted() const {
    return c1.passed() && c2.passed() && c3.passed() && c4.passed() &&
           c5.passed();
  }
  const ConditionReport& condition(int i) const;
};

// The five static conditions, checked per rule in order; a rule that fails an
// earlier condition blocks the later ones (their verdict reports Skip rather
// than a judgement on a template that has no well-defined stripped form).
//
//   C1  recursive symbols appear only as f_j(x_i)
//   C2  no x_i is recursed on by two different symbols
//   C3  no index i has both x_i and y_i free after stripping
//   C4  composed op costs stay within C·(sum of input sizes)^p
//   C5  composed value-size bounds stay within (sum of input sizes)
//
// C4/C5 are conservative static approximations; the evaluator re-checks both
// on every instance at runtime.
ConditionReport check_c1(const GNFSystem& sys);
ConditionReport check_c2(const GNFSystem& sys);
ConditionReport check_c3(const GNFSystem& sys);
ConditionReport check_c4_static(const GNFSystem& sys);
ConditionReport check_c5_static(const GNFSystem& sys);

CheckReport check_system(const GNFSystem& sys);

}  // namespace gnf
