#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnf/complexity.hpp"
#include "gnf/engine.hpp"
#include "gnf/system.hpp"

namespace gnf {

// One audited input: what was measured and whether every promise held.
struct AuditEntry {
  Element w;
  Measurement m;
  bool defined = false;
  bool ok = false;
  std::string error;  // evaluation/runtime failure text, empty when clean
};

struct AuditViolation {
  std::string kind;   // size-bound | time-bound | runtime-c4 | runtime-c5 |
                      // evaluation-error
  std::string input;  // rendered element
  std::string detail;
};

struct AuditReport {
  std::string system;
  int symbol = 1;
  std::vector<AuditEntry> inputs;
  std::vector<AuditViolation> violations;
  double max_size_ratio = 0.0;  // max output_size / bound_size
  double max_time_ratio = 0.0;  // max steps / bound_time
  std::optional<ExponentFit> fit;

  bool clean() const { return violations.empty(); }
};

// Evaluates each input under the cost model and flags every measurement whose
// bound inequality fails. Per-input evaluation failures are recorded, not
// fatal. Deterministic: inputs are audited in the given order.
AuditReport audit(const GNFSystem& sys, int symbol,
                  const std::vector<Element>& inputs, bool with_fit);

// Serializations documented in docs/report-schema.md. Both deterministic.
std::string report_json(const AuditReport& report);
std::string report_csv(const AuditReport& report);

// Deterministic input families for audits at sizes where exhaustive
// enumeration is out of reach.
std::vector<Element> flat_list_inputs(const std::string& atom,
                                      const std::vector<int>& sizes);
// Exhaustive small elements, then per size: a flat list, a nesting chain, a
// right comb, and seeded random samples. Sizes 1..max_size, canonical where
// exhaustive.
std::vector<Element> generated_inputs(const std::vector<std::string>& alphabet,
                                      int max_size);

}  // namespace gnf
