#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnf/check.hpp"
#include "gnf/complexity.hpp"
#include "gnf/system.hpp"

namespace gnf {

// A condition violated by an actual evaluation instance (the runtime safety
// net behind the static checks). Distinct from EvalError: a violation is a
// judgement about the system, a domain error is a broken evaluation.
struct RuntimeViolation : std::runtime_error {
  RuntimeViolation(int condition_no, const std::string& what)
      : std::runtime_error(what), condition(condition_no) {}
  int condition;  // 4 or 5
};

struct EvalOptions {
  bool memo = true;
  bool trace = false;
  // Set when the caller deliberately runs a system that failed the static
  // checks; recorded for reporting. Runtime checks never switch off.
  bool force = false;
};

struct Outcome {
  std::optional<Element> result;  // nullopt encodes the `false` value
  Measurement measurement;
  std::vector<std::string> trace;  // populated when options.trace

  bool defined() const { return result.has_value(); }
};

// Evaluates the least-fixed-point function i (1-based) at w on demand:
// initial table first, then the matched rule's template with recursive
// sub-calls on w's components, else `false`. Sub-calls evaluate in ascending
// y-index order; any `false` sub-value makes the result `false`.
Outcome evaluate(const GNFSystem& sys, int i, const Element& w,
                 const EvalOptions& options = {});

// Same semantics, no memo table: the recursion transcribed directly from the
// defining equation. Oracle for the memoized path.
Outcome evaluate_naive(const GNFSystem& sys, int i, const Element& w);

// Element-count cap for universe materialization: GNF_MAX_UNIVERSE, default
// 100000.
std::uint64_t universe_cap_from_env();

// Number of elements over the alphabet with size <= max_size and
// rank <= max_rank (exact, unbounded integer).
BigInt count_universe(const std::vector<std::string>& alphabet, int max_size,
                      int max_rank);

// All elements over the alphabet within the bounds, in canonical order
// (size, then atoms before lists, then lexicographic). Throws SystemError if
// the count exceeds `cap` or the bounds are < 1.
std::vector<Element> enumerate_universe(const std::vector<std::string>& alphabet,
                                        int max_size, int max_rank,
                                        std::uint64_t cap);

// A finite downward-closed universe slice with interned elements: ids are
// positions in canonical order, and every component of a slice element is in
// the slice.
struct UniverseSlice {
  std::vector<std::string> alphabet;
  int max_size = 0;
  int max_rank = 0;
  std::vector<Element> elements;
  std::vector<std::vector<std::uint32_t>> component_ids;
  std::map<Element, std::uint32_t> index;  // element -> id

  static UniverseSlice build(const std::vector<std::string>& alphabet,
                             int max_size, int max_rank, std::uint64_t cap);

  std::int64_t id_of(const Element& e) const;  // -1 when absent
  std::size_t size() const { return elements.size(); }
};

// One simultaneous approximation stage: per symbol, per slice element, the
// value so far. False is permanent (the rule program said `false`, the arity
// guard failed, or a sub-value is permanently `false`); Undefined entries may
// still fill in at later stages.
struct StageTable {
  enum class State : std::uint8_t { Undefined, False, Value };
  struct Slot {
    State state = State::Undefined;
    Element value;  // meaningful only when state == Value
  };

  int stage = 0;
  std::vector<std::vector<Slot>> entries;  // [symbol-1][element id]

  const Slot& at(int symbol, std::uint32_t id) const {
    return entries[static_cast<std::size_t>(symbol) - 1][id];
  }
  friend bool operator==(const StageTable& a, const StageTable& b);
};

// Stage 0: the initial functions restricted to the slice.
StageTable initial_stage(const GNFSystem& sys, const UniverseSlice& slice);

// One simultaneous step: defined entries are copied; undefined entries are
// recomputed with sub-calls reading `table` (never the stage under
// construction).
StageTable iterate_stage(const GNFSystem& sys, const UniverseSlice& slice,
                         const StageTable& table);

// Test-only corruption hook for the verification negative paths: after the
// given stage is produced, the slot (symbol, element_id) has its value
// wrapped in an extra list layer.
struct FaultInjection {
  int after_stage = 0;
  int symbol = 1;
  std::uint32_t element_id = 0;
};

struct FixpointRun {
  std::vector<StageTable> stages;  // stages[k] is stage k
  int stabilization_stage = -1;    // first k with stage k == stage k-1; -1 if none
  bool stabilized() const { return stabilization_stage >= 0; }
};

FixpointRun run_to_fixpoint(const GNFSystem& sys, const UniverseSlice& slice,
                            int max_stages,
                            const FaultInjection* fault = nullptr);

struct VerifyResult {
  bool ok = true;
  int symbol = -1;              // offending function (1-based)
  std::int64_t element_id = -1; // offending slice element
  std::string detail;
};

// Every defined entry persists with an equal value from each stage to the
// next (and permanent `false` entries never flip back).
VerifyResult verify_monotone(const std::vector<StageTable>& stages,
                             const UniverseSlice& slice);

// The final table agrees with on-demand evaluation on every (symbol, element)
// in the slice; Undefined and False both mean `false`.
VerifyResult crosscheck_fixpoint(const GNFSystem& sys,
                                 const std::vector<StageTable>& stages,
                                 const UniverseSlice& slice);

// Streaming walk of all elements over the alphabet in canonical order,
// unbounded rank, sizes ascending up to max_size. Stops early when the
// callback returns false, the deadline passes, or retaining the pools needed
// to keep generating would exceed the element budget.
struct WalkLimits {
  double deadline_seconds = 0;             // 0 = no deadline
  std::uint64_t max_pool_elements = 12'000'000;
};

struct WalkStats {
  std::uint64_t visited = 0;
  int last_completed_size = 0;
  bool finished = false;
  std::string stop_reason;  // empty when finished
};

WalkStats for_each_element(const std::vector<std::string>& alphabet,
                           int max_size,
                           const std::function<bool(const Element&)>& fn,
                           const WalkLimits& limits = {});

}  // namespace gnf
