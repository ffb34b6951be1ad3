#include "gnf/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <variant>

namespace gnf {

namespace {

struct SystemOps final : BaseOpContext {
  const GNFSystem* sys;
  explicit SystemOps(const GNFSystem& s) : sys(&s) {}

  Element apply(int op_id, std::vector<Element>&& args) const override {
    return apply_base_op(sys->base_ops[static_cast<std::size_t>(op_id)],
                         std::move(args));
  }
  std::uint64_t cost(int op_id,
                     const std::vector<std::uint64_t>& arg_sizes) const override {
    std::uint64_t sum = 0;
    for (std::uint64_t s : arg_sizes) sum += s;
    return sys->base_ops[static_cast<std::size_t>(op_id)].cost.eval(sum);
  }
};

// The rule branch of one evaluation step, up to (but not including) the
// recursive sub-calls: matched rule, stripped template, call map.
struct RuleStep {
  Term stripped;
  CallMap calls;
  int rule_index;
  int arity;
};

// monostate: the result is `false`. Element: initial-table hit.
using StepResult = std::variant<std::monostate, Element, RuleStep>;

struct EvalCore {
  const GNFSystem& sys;
  TermSignature sig;
  SystemOps ops;

  explicit EvalCore(const GNFSystem& s) : sys(s), sig(s.signature()), ops(s) {}

  StepResult step(int i, const Element& w, CostMeter& meter,
                  std::vector<std::string>* trace) const {
    if (auto hit = initial_lookup(sys, i, w, meter)) {
      if (trace) {
        trace->push_back("EVAL f" + std::to_string(i) + " " +
                         render_element(w) + " => initial");
      }
      return std::move(*hit);
    }

    std::uint64_t gamma_start = meter.total;
    auto gamma = apply_gamma(sys, i, w, sig, meter);
    std::uint64_t gamma_cost = meter.total - gamma_start;
    const GnfFunction& fn = sys.fn(i);
    BigInt gamma_bound = bound_value_size(fn.C, fn.p, w);
    if (BigInt(gamma_cost) > gamma_bound) {
      throw RuntimeViolation(
          4, "rule scan and emission for " + fn.name + "(" + render_element(w) +
                 ") cost " + std::to_string(gamma_cost) +
                 " steps, exceeding C*|w|^p = " + gamma_bound.str());
    }

    if (!gamma) {
      if (trace) {
        trace->push_back("EVAL f" + std::to_string(i) + " " +
                         render_element(w) + " => false");
      }
      return std::monostate{};
    }
    if (trace) {
      trace->push_back("EVAL f" + std::to_string(i) + " " + render_element(w) +
                       " => rule#" + std::to_string(gamma->rule_index + 1));
    }
    if (gamma->arity != static_cast<int>(w.components().size())) {
      return std::monostate{};  // the template's tuple does not fit w
    }

    RuleStep step;
    step.rule_index = gamma->rule_index;
    step.arity = gamma->arity;
    try {
      std::tie(step.stripped, step.calls) = strip_recursive(gamma->term);
    } catch (const TermError& e) {
      throw EvalError(
          std::string("internal: emitted template violates the call shape: ") +
          e.what());
    }
    meter.charge(step.stripped.node_count());

    // Instance form of the static C3 check on the emitted term.
    for (const Var& v : free_vars(step.stripped)) {
      if (!v.is_y && step.calls.calls.count(v.index)) {
        throw EvalError("internal: emitted template has x" +
                        std::to_string(v.index) + " and y" +
                        std::to_string(v.index) + " free");
      }
    }
    return step;
  }

  // Substitution, ground evaluation, and the C4/C5 instance checks. All
  // sub-values must be defined.
  Element finish(int i, const Element& w, const RuleStep& step,
                 std::map<int, Element> sub_values, CostMeter& meter) const {
    Binding binding;
    const std::vector<Element>& comps = w.components();
    for (int x = 1; x <= step.arity; ++x) {
      binding.x_values.emplace(x, comps[static_cast<std::size_t>(x) - 1]);
    }
    binding.y_values = std::move(sub_values);

    std::uint64_t input_sum = 0;
    for (const Element& c : comps) input_sum += c.size();
    for (const auto& [yi, v] : binding.y_values) input_sum += v.size();

    Term ground = substitute(step.stripped, binding, meter);
    std::uint64_t ops_start = meter.total;
    Element value = eval_ground(ground, ops, meter);
    std::uint64_t op_cost = meter.total - ops_start;

    const GnfFunction& fn = sys.fn(i);
    BigInt c4_bound =
        bound_value_size_raw(fn.C, fn.p, std::max<std::uint64_t>(input_sum, 1));
    if (BigInt(op_cost) > c4_bound) {
      throw RuntimeViolation(
          4, "op-cost condition violated at " + fn.name + "(" +
                 render_element(w) + "): evaluating " + render_term(ground) +
                 " cost " + std::to_string(op_cost) +
                 " steps, exceeding C*(sum of input sizes)^p = " +
                 c4_bound.str());
    }
    if (!step.calls.calls.empty() && value.size() > input_sum) {
      throw RuntimeViolation(
          5, "value-size condition violated at " + fn.name + "(" +
                 render_element(w) + "): instantiated template " +
                 render_term(ground) + " has value size " +
                 std::to_string(value.size()) +
                 ", exceeding the input-size sum " + std::to_string(input_sum));
    }
    return value;
  }
};

struct MemoSession {
  const EvalCore& core;
  const EvalOptions& opts;
  CostMeter meter;
  std::vector<std::string> trace;
  std::map<std::pair<int, Element>, std::optional<Element>> memo;

  MemoSession(const EvalCore& c, const EvalOptions& o) : core(c), opts(o) {}

  std::optional<Element> run(int i, const Element& w) {
    if (opts.memo) {
      meter.charge(1 + w.size());
      if (auto it = memo.find({i, w}); it != memo.end()) return it->second;
    }

    StepResult sr =
        core.step(i, w, meter, opts.trace ? &trace : nullptr);
    std::optional<Element> result;
    if (std::holds_alternative<Element>(sr)) {
      result = std::move(std::get<Element>(sr));
    } else if (std::holds_alternative<RuleStep>(sr)) {
      RuleStep& step = std::get<RuleStep>(sr);
      std::map<int, Element> ys;
      bool all_defined = true;
      for (const auto& [yi, fj] : step.calls.calls) {
        const Element& wi = w.components()[static_cast<std::size_t>(yi) - 1];
        if (wi.rank() >= w.rank()) {
          throw EvalError("internal: recursive call does not descend in rank");
        }
        meter.charge(1);  // call dispatch
        std::optional<Element> v = run(fj, wi);
        if (!v) {
          all_defined = false;
          break;
        }
        ys.emplace(yi, std::move(*v));
      }
      if (all_defined) {
        result = core.finish(i, w, step, std::move(ys), meter);
      }
    }

    if (opts.memo) {
      meter.charge(1 + w.size());
      memo.emplace(std::make_pair(i, w), result);
    }
    return result;
  }
};

Measurement make_measurement(const GNFSystem& sys, int i, const Element& w,
                             const std::optional<Element>& result,
                             std::uint64_t steps) {
  const GnfFunction& fn = sys.fn(i);
  Measurement m;
  m.input_size = w.size();
  m.input_rank = w.rank();
  m.output_size = result ? result->size() : 0;
  m.steps = steps;
  m.family_c = fn.C;
  m.family_p = fn.p;
  m.bound_size = bound_value_size(fn.C, fn.p, w);
  m.bound_time = bound_time(fn.C, fn.p, w);
  return m;
}

void require_symbol(const GNFSystem& sys, int i) {
  if (i < 1 || i > sys.fn_count()) {
    throw EvalError("no function f" + std::to_string(i) + " in this system");
  }
}

}  // namespace

Outcome evaluate(const GNFSystem& sys, int i, const Element& w,
                 const EvalOptions& options) {
  require_symbol(sys, i);
  EvalCore core(sys);
  MemoSession session(core, options);
  std::optional<Element> result = session.run(i, w);
  Outcome out;
  out.result = std::move(result);
  out.measurement = make_measurement(sys, i, w, out.result, session.meter.total);
  out.trace = std::move(session.trace);
  return out;
}

Outcome evaluate_naive(const GNFSystem& sys, int i, const Element& w) {
  require_symbol(sys, i);
  EvalCore core(sys);
  CostMeter meter;

  // The defining recursion, word for word: initial table, else the matched
  // template with sub-calls on components, else `false`.
  auto rec = [&core, &meter](auto&& self, int fi,
                             const Element& v) -> std::optional<Element> {
    StepResult sr = core.step(fi, v, meter, nullptr);
    if (std::holds_alternative<std::monostate>(sr)) return std::nullopt;
    if (std::holds_alternative<Element>(sr)) {
      return std::move(std::get<Element>(sr));
    }
    RuleStep& step = std::get<RuleStep>(sr);
    std::map<int, Element> ys;
    for (const auto& [yi, fj] : step.calls.calls) {
      meter.charge(1);
      std::optional<Element> sub =
          self(self, fj, v.components()[static_cast<std::size_t>(yi) - 1]);
      if (!sub) return std::nullopt;
      ys.emplace(yi, std::move(*sub));
    }
    return core.finish(fi, v, step, std::move(ys), meter);
  };

  std::optional<Element> result = rec(rec, i, w);
  Outcome out;
  out.result = std::move(result);
  out.measurement = make_measurement(sys, i, w, out.result, meter.total);
  return out;
}

// ---------------------------------------------------------------------------
// Universe enumeration

std::uint64_t universe_cap_from_env() {
  const char* raw = std::getenv("GNF_MAX_UNIVERSE");
  if (!raw || !*raw) return 100000;
  char* end = nullptr;
  unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) {
    throw SystemError("GNF_MAX_UNIVERSE must be a positive integer, got '" +
                      std::string(raw) + "'");
  }
  return v;
}

BigInt count_universe(const std::vector<std::string>& alphabet, int max_size,
                      int max_rank) {
  if (max_size < 1 || max_rank < 1) {
    throw SystemError("universe bounds must be >= 1");
  }
  const int S = max_size;
  const int levels = std::min(max_rank, max_size);  // rank never exceeds size
  const BigInt atoms = static_cast<std::uint64_t>(alphabet.size());

  // by_size[s] = number of elements of size s at the current rank level
  std::vector<BigInt> by_size(static_cast<std::size_t>(S) + 1, 0);
  by_size[1] = atoms;
  for (int level = 1; level <= levels; ++level) {
    // seq[n] = ordered sequences over the previous level with total size n
    std::vector<BigInt> seq(static_cast<std::size_t>(S), 0);
    seq[0] = 1;
    for (int n = 1; n < S; ++n) {
      for (int k = 1; k <= n; ++k) {
        seq[static_cast<std::size_t>(n)] +=
            by_size[static_cast<std::size_t>(k)] *
            seq[static_cast<std::size_t>(n - k)];
      }
    }
    std::vector<BigInt> next(static_cast<std::size_t>(S) + 1, 0);
    next[1] = atoms;
    for (int s = 1; s <= S; ++s) {
      next[static_cast<std::size_t>(s)] += seq[static_cast<std::size_t>(s - 1)];
    }
    by_size = std::move(next);
  }

  BigInt total = 0;
  for (int s = 1; s <= S; ++s) total += by_size[static_cast<std::size_t>(s)];
  return total;
}

namespace {

std::vector<Element> sorted_atom_elements(const std::vector<std::string>& alphabet) {
  std::vector<std::string> names = alphabet;
  std::sort(names.begin(), names.end());
  std::vector<Element> out;
  out.reserve(names.size());
  for (std::string& n : names) out.push_back(Element::atom(std::move(n)));
  return out;
}

// Appends, in canonical order, every list of the given size whose children
// come from `pool` (pool[s] = elements of size s, canonically ordered).
void fill_lists(int size, const std::vector<std::vector<Element>>& pool,
                std::vector<Element>& out) {
  std::vector<Element> stack;
  auto rec = [&](auto&& self, int remaining) -> void {
    for (int k = 1; k <= remaining; ++k) {
      for (const Element& e : pool[static_cast<std::size_t>(k)]) {
        stack.push_back(e);
        if (k == remaining) {
          out.push_back(Element::list(stack));
        } else {
          self(self, remaining - k);
        }
        stack.pop_back();
      }
    }
  };
  rec(rec, size - 1);
}

}  // namespace

std::vector<Element> enumerate_universe(const std::vector<std::string>& alphabet,
                                        int max_size, int max_rank,
                                        std::uint64_t cap) {
  BigInt total = count_universe(alphabet, max_size, max_rank);
  if (total > BigInt(cap)) {
    throw SystemError("universe slice holds " + total.str() +
                      " elements, exceeding the cap of " + std::to_string(cap) +
                      " (set GNF_MAX_UNIVERSE to raise it)");
  }

  const int S = max_size;
  const int levels = std::min(max_rank, max_size);
  std::vector<Element> atoms = sorted_atom_elements(alphabet);

  // pool[s] = elements of size s at the current rank level, canonical order.
  std::vector<std::vector<Element>> pool(static_cast<std::size_t>(S) + 1);
  pool[1] = atoms;
  for (int level = 1; level <= levels; ++level) {
    std::vector<std::vector<Element>> next(static_cast<std::size_t>(S) + 1);
    next[1] = atoms;
    next[1].push_back(Element::list({}));
    for (int s = 2; s <= S; ++s) {
      fill_lists(s, pool, next[static_cast<std::size_t>(s)]);
    }
    // size-1 lists: only the empty list, already appended
    pool = std::move(next);
  }

  std::vector<Element> out;
  for (int s = 1; s <= S; ++s) {
    for (Element& e : pool[static_cast<std::size_t>(s)]) {
      out.push_back(std::move(e));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slices and stages

UniverseSlice UniverseSlice::build(const std::vector<std::string>& alphabet,
                                   int max_size, int max_rank,
                                   std::uint64_t cap) {
  UniverseSlice slice;
  slice.alphabet = alphabet;
  slice.max_size = max_size;
  slice.max_rank = max_rank;
  slice.elements = enumerate_universe(alphabet, max_size, max_rank, cap);
  for (std::uint32_t id = 0; id < slice.elements.size(); ++id) {
    slice.index.emplace(slice.elements[id], id);
  }
  slice.component_ids.resize(slice.elements.size());
  for (std::uint32_t id = 0; id < slice.elements.size(); ++id) {
    const Element& e = slice.elements[id];
    std::vector<std::uint32_t>& comps = slice.component_ids[id];
    comps.reserve(e.components().size());
    for (const Element& c : e.components()) {
      auto it = slice.index.find(c);
      if (it == slice.index.end()) {
        throw SystemError("internal: slice is not downward closed");
      }
      comps.push_back(it->second);
    }
  }
  return slice;
}

std::int64_t UniverseSlice::id_of(const Element& e) const {
  auto it = index.find(e);
  return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
}

bool operator==(const StageTable& a, const StageTable& b) {
  // Content equality; the stage number is a label, not part of the table.
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& ea = a.entries[i];
    const auto& eb = b.entries[i];
    if (ea.size() != eb.size()) return false;
    for (std::size_t j = 0; j < ea.size(); ++j) {
      if (ea[j].state != eb[j].state) return false;
      if (ea[j].state == StageTable::State::Value && ea[j].value != eb[j].value) {
        return false;
      }
    }
  }
  return true;
}

StageTable initial_stage(const GNFSystem& sys, const UniverseSlice& slice) {
  StageTable table;
  table.stage = 0;
  table.entries.assign(static_cast<std::size_t>(sys.fn_count()),
                       std::vector<StageTable::Slot>(slice.size()));
  for (int i = 1; i <= sys.fn_count(); ++i) {
    auto& row = table.entries[static_cast<std::size_t>(i) - 1];
    for (std::uint32_t id = 0; id < slice.size(); ++id) {
      if (auto v = sys.fn(i).initial.lookup(slice.elements[id])) {
        row[id] = {StageTable::State::Value, std::move(*v)};
      }
    }
  }
  return table;
}

StageTable iterate_stage(const GNFSystem& sys, const UniverseSlice& slice,
                         const StageTable& table) {
  EvalCore core(sys);
  StageTable next;
  next.stage = table.stage + 1;
  next.entries = table.entries;  // defined entries persist unchanged

  CostMeter meter;  // stage iteration is not what the audit measures
  for (int i = 1; i <= sys.fn_count(); ++i) {
    auto& row = next.entries[static_cast<std::size_t>(i) - 1];
    for (std::uint32_t id = 0; id < slice.size(); ++id) {
      if (table.at(i, id).state != StageTable::State::Undefined) continue;
      const Element& w = slice.elements[id];

      StepResult sr = core.step(i, w, meter, nullptr);
      if (std::holds_alternative<std::monostate>(sr)) {
        row[id].state = StageTable::State::False;
        continue;
      }
      if (std::holds_alternative<Element>(sr)) {
        row[id] = {StageTable::State::Value, std::move(std::get<Element>(sr))};
        continue;
      }

      RuleStep& step = std::get<RuleStep>(sr);
      std::map<int, Element> ys;
      bool pending = false, dead = false;
      for (const auto& [yi, fj] : step.calls.calls) {
        std::uint32_t sub_id =
            slice.component_ids[id][static_cast<std::size_t>(yi) - 1];
        const StageTable::Slot& sub = table.at(fj, sub_id);
        if (sub.state == StageTable::State::Undefined) {
          pending = true;  // not yet: leave this entry for a later stage
          break;
        }
        if (sub.state == StageTable::State::False) {
          dead = true;  // permanently false sub-value
          break;
        }
        ys.emplace(yi, sub.value);
      }
      if (pending) continue;
      if (dead) {
        row[id].state = StageTable::State::False;
        continue;
      }
      row[id] = {StageTable::State::Value,
                 core.finish(i, w, step, std::move(ys), meter)};
    }
  }
  return next;
}

namespace {

void inject_fault(StageTable& table, const FaultInjection& fault) {
  auto& slot = table.entries.at(static_cast<std::size_t>(fault.symbol) - 1)
                   .at(fault.element_id);
  if (slot.state == StageTable::State::Value) {
    slot.value = Element::list({slot.value});
  } else {
    slot = {StageTable::State::Value, Element::list({})};
  }
}

}  // namespace

FixpointRun run_to_fixpoint(const GNFSystem& sys, const UniverseSlice& slice,
                            int max_stages, const FaultInjection* fault) {
  if (max_stages < 1) throw SystemError("max_stages must be >= 1");
  FixpointRun run;
  run.stages.push_back(initial_stage(sys, slice));
  if (fault && fault->after_stage == 0) inject_fault(run.stages.back(), *fault);

  for (int k = 1; k <= max_stages; ++k) {
    StageTable next = iterate_stage(sys, slice, run.stages.back());
    if (fault && fault->after_stage == k) inject_fault(next, *fault);
    bool fixed = next == run.stages.back();
    run.stages.push_back(std::move(next));
    if (fixed) {
      run.stabilization_stage = k;
      break;
    }
  }
  return run;
}

VerifyResult verify_monotone(const std::vector<StageTable>& stages,
                             const UniverseSlice& slice) {
  for (std::size_t k = 0; k + 1 < stages.size(); ++k) {
    const StageTable& cur = stages[k];
    const StageTable& nxt = stages[k + 1];
    for (std::size_t i = 0; i < cur.entries.size(); ++i) {
      for (std::uint32_t id = 0; id < cur.entries[i].size(); ++id) {
        const auto& a = cur.entries[i][id];
        const auto& b = nxt.entries[i][id];
        if (a.state == StageTable::State::Undefined) continue;
        bool same = a.state == b.state &&
                    (a.state != StageTable::State::Value || a.value == b.value);
        if (!same) {
          return {false, static_cast<int>(i) + 1, id,
                  "stage " + std::to_string(stages[k].stage) + " defines f" +
                      std::to_string(i + 1) + "(" +
                      render_element(slice.elements[id]) +
                      ") but stage " + std::to_string(stages[k + 1].stage) +
                      " changes it"};
        }
      }
    }
  }
  return {};
}

VerifyResult crosscheck_fixpoint(const GNFSystem& sys,
                                 const std::vector<StageTable>& stages,
                                 const UniverseSlice& slice) {
  const StageTable& final_table = stages.back();
  for (int i = 1; i <= sys.fn_count(); ++i) {
    for (std::uint32_t id = 0; id < slice.size(); ++id) {
      const StageTable::Slot& slot = final_table.at(i, id);
      Outcome onDemand = evaluate(sys, i, slice.elements[id]);
      bool table_defined = slot.state == StageTable::State::Value;
      if (table_defined != onDemand.defined() ||
          (table_defined && slot.value != *onDemand.result)) {
        std::string table_text =
            table_defined ? render_element(slot.value) : "false";
        std::string eval_text =
            onDemand.defined() ? render_element(*onDemand.result) : "false";
        return {false, i, id,
                "f" + std::to_string(i) + "(" +
                    render_element(slice.elements[id]) + "): table has " +
                    table_text + ", on-demand evaluation gives " + eval_text};
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Streaming walk (unbounded rank)

WalkStats for_each_element(const std::vector<std::string>& alphabet,
                           int max_size,
                           const std::function<bool(const Element&)>& fn,
                           const WalkLimits& limits) {
  if (max_size < 1) throw SystemError("max_size must be >= 1");
  WalkStats stats;
  auto start = std::chrono::steady_clock::now();
  std::uint64_t stored = 0;
  bool stop = false;

  auto expired = [&] {
    if (limits.deadline_seconds <= 0) return false;
    std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    return elapsed.count() >= limits.deadline_seconds;
  };

  std::vector<std::vector<Element>> pool(static_cast<std::size_t>(max_size) + 1);

  auto visit = [&](Element e, int size) {
    if (stop) return;
    ++stats.visited;
    if (!fn(e)) {
      stats.stop_reason = "stopped by caller";
      stop = true;
      return;
    }
    if ((stats.visited & 0xFFF) == 0 && expired()) {
      stats.stop_reason = "deadline reached";
      stop = true;
      return;
    }
    if (size < max_size) {
      if (stored >= limits.max_pool_elements) {
        stats.stop_reason = "element budget exhausted";
        stop = true;
        return;
      }
      pool[static_cast<std::size_t>(size)].push_back(std::move(e));
      ++stored;
    }
  };

  std::vector<Element> stack;
  auto gen_lists = [&](auto&& self, int remaining, int list_size) -> void {
    for (int k = 1; k <= remaining && !stop; ++k) {
      for (const Element& e : pool[static_cast<std::size_t>(k)]) {
        if (stop) return;
        stack.push_back(e);
        if (k == remaining) {
          visit(Element::list(stack), list_size);
        } else {
          self(self, remaining - k, list_size);
        }
        stack.pop_back();
      }
    }
  };

  for (int s = 1; s <= max_size && !stop; ++s) {
    if (s == 1) {
      for (const Element& a : sorted_atom_elements(alphabet)) {
        visit(a, 1);
        if (stop) break;
      }
      if (!stop) visit(Element::list({}), 1);
    } else {
      gen_lists(gen_lists, s - 1, s);
    }
    if (!stop) stats.last_completed_size = s;
  }
  stats.finished = !stop;
  return stats;
}

}  // namespace gnf
