#include "gnf/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnf/audit.hpp"
#include "gnf/check.hpp"
#include "gnf/engine.hpp"

namespace gnf {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string verdict_text(Verdict v) { return std::string(verdict_name(v)); }

// "f2" or "2" -> 2; throws SystemError on anything else.
int parse_symbol(const std::string& text, const GNFSystem& sys) {
  std::string digits = text;
  if (!digits.empty() && digits.front() == 'f') digits.erase(0, 1);
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(digits, &used);
    if (used != digits.size()) throw std::invalid_argument(digits);
  } catch (const std::exception&) {
    throw SystemError("'" + text + "' is not a function symbol (expected f1.." +
                      "f" + std::to_string(sys.fn_count()) + ")");
  }
  if (value < 1 || value > sys.fn_count()) {
    throw SystemError("no function f" + std::to_string(value) +
                      " in this system (it has f1..f" +
                      std::to_string(sys.fn_count()) + ")");
  }
  return value;
}

std::string first_failure(const CheckReport& report) {
  for (int i = 1; i <= 5; ++i) {
    const ConditionReport& c = report.condition(i);
    if (c.verdict == Verdict::Fail) {
      return "C" + std::to_string(i) + ": " + c.detail;
    }
  }
  return "unknown condition";
}

int require_accepted(const GNFSystem& sys, bool force, std::ostream& err) {
  CheckReport report = check_system(sys);
  if (report.accepted()) return 0;
  if (force) return 0;  // static gate bypassed; runtime checks stay on
  err << "error: system '" << sys.name
      << "' is rejected by the static checks (" << first_failure(report)
      << "); rerun `check` for the full report or pass --force\n";
  return 1;
}

int cmd_check(const std::string& path, const std::string& format,
              std::ostream& out) {
  GNFSystem sys = load_system_file(path);
  CheckReport report = check_system(sys);

  if (format == "json") {
    ordered_json doc;
    doc["system"] = sys.name;
    doc["accepted"] = report.accepted();
    ordered_json conditions = ordered_json::array();
    for (int i = 1; i <= 5; ++i) {
      const ConditionReport& c = report.condition(i);
      ordered_json row;
      row["id"] = "C" + std::to_string(i);
      row["verdict"] = verdict_text(c.verdict);
      row["function"] = c.function;
      if (c.rule_index >= 0) {
        row["rule"] = c.rule_index + 1;
      } else {
        row["rule"] = nullptr;
      }
      row["source"] = c.rule_source;
      row["subterm"] = c.subterm_path;
      row["detail"] = c.detail;
      conditions.push_back(std::move(row));
    }
    doc["conditions"] = std::move(conditions);
    out << doc.dump(2) << "\n";
  } else {
    for (int i = 1; i <= 5; ++i) {
      const ConditionReport& c = report.condition(i);
      out << "C" << i << " " << verdict_text(c.verdict);
      if (c.verdict != Verdict::Pass) {
        if (!c.function.empty()) {
          out << " [" << c.function << " rule " << (c.rule_index + 1);
          if (!c.rule_source.empty()) out << ": " << c.rule_source;
          out << "]";
        }
        if (!c.detail.empty()) out << " " << c.detail;
      }
      out << "\n";
    }
    out << (report.accepted() ? "accepted" : "rejected") << "\n";
  }
  return report.accepted() ? 0 : 1;
}

int cmd_eval(const std::string& path, const std::string& symbol_text,
             const std::string& element_text, bool trace, bool no_memo,
             bool force, std::ostream& out, std::ostream& err) {
  GNFSystem sys = load_system_file(path);
  if (int rc = require_accepted(sys, force, err)) return rc;
  int symbol = parse_symbol(symbol_text, sys);
  Element w = parse_element(element_text, sys.universe_atoms());

  EvalOptions options;
  options.trace = trace;
  options.memo = !no_memo;
  options.force = force;

  Outcome o;
  try {
    o = evaluate(sys, symbol, w, options);
  } catch (const RuntimeViolation& e) {
    for (const std::string& line : o.trace) out << line << "\n";
    err << "runtime violation (C" << e.condition << "): " << e.what() << "\n";
    return 1;
  } catch (const EvalError& e) {
    err << "evaluation error: " << e.what() << "\n";
    return 3;
  }

  for (const std::string& line : o.trace) out << line << "\n";
  out << (o.defined() ? render_element(*o.result) : "false") << "\n";
  const Measurement& m = o.measurement;
  out << "measure: size=" << m.input_size << " rank=" << m.input_rank
      << " steps=" << m.steps << " output_size=" << m.output_size
      << " bound_size=" << m.bound_size.str() << " bound_time="
      << m.bound_time.str() << " ok="
      << ((m.within_size_bound() && m.within_time_bound()) ? "true" : "false")
      << "\n";
  return 0;
}

int cmd_iterate(const std::string& path, std::string atoms_csv, int max_size,
                int max_rank, int max_stages, bool verify,
                std::uint64_t cap_flag, int fault_stage, std::ostream& out,
                std::ostream& err) {
  GNFSystem sys = load_system_file(path);
  if (int rc = require_accepted(sys, false, err)) return rc;

  std::vector<std::string> atoms;
  if (atoms_csv.empty()) {
    atoms = sys.universe_atoms();
  } else {
    std::vector<std::string> universe = sys.universe_atoms();
    std::stringstream ss(atoms_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(std::remove_if(item.begin(), item.end(), ::isspace),
                 item.end());
      if (item.empty()) continue;
      if (std::find(universe.begin(), universe.end(), item) == universe.end()) {
        throw SystemError("atom '" + item +
                          "' is not in this system's alphabet");
      }
      atoms.push_back(item);
    }
    if (atoms.empty()) throw SystemError("--atoms names no atoms");
  }

  std::uint64_t cap = cap_flag ? cap_flag : universe_cap_from_env();
  UniverseSlice slice = UniverseSlice::build(atoms, max_size, max_rank, cap);

  std::string alphabet_text;
  for (const std::string& a : atoms) {
    if (!alphabet_text.empty()) alphabet_text += ",";
    alphabet_text += a;
  }
  out << "universe: " << slice.size() << " elements (alphabet {"
      << alphabet_text << "}, size<=" << max_size << ", rank<=" << max_rank
      << ")\n";

  FaultInjection fault;
  bool with_fault = fault_stage >= 0;
  if (with_fault) fault.after_stage = fault_stage;

  FixpointRun run =
      run_to_fixpoint(sys, slice, max_stages, with_fault ? &fault : nullptr);
  for (const StageTable& table : run.stages) {
    std::size_t defined = 0, dead = 0;
    for (const auto& row : table.entries) {
      for (const auto& slot : row) {
        if (slot.state == StageTable::State::Value) ++defined;
        if (slot.state == StageTable::State::False) ++dead;
      }
    }
    std::size_t total = slice.size() * static_cast<std::size_t>(sys.fn_count());
    out << "stage " << table.stage << ": " << defined << " defined, " << dead
        << " false, " << (total - defined - dead) << " undefined\n";
  }

  int rc = 0;
  if (run.stabilized()) {
    out << "stabilized at stage " << run.stabilization_stage << "\n";
  } else {
    out << "no fixed point within " << max_stages << " stages\n";
    rc = 1;
  }

  if (verify) {
    VerifyResult monotone = verify_monotone(run.stages, slice);
    out << "monotone: " << (monotone.ok ? "pass" : "FAIL " + monotone.detail)
        << "\n";
    if (!monotone.ok) rc = 1;
    if (run.stabilized()) {
      VerifyResult cross = crosscheck_fixpoint(sys, run.stages, slice);
      out << "crosscheck: " << (cross.ok ? "pass" : "FAIL " + cross.detail)
          << "\n";
      if (!cross.ok) rc = 1;
    }
  }
  return rc;
}

int cmd_audit(const std::string& path, const std::string& symbol_text,
              const std::string& inputs_file, int gen_max_size,
              const std::string& out_base, bool fit, bool force,
              std::ostream& out, std::ostream& err) {
  GNFSystem sys = load_system_file(path);
  if (int rc = require_accepted(sys, force, err)) return rc;
  int symbol = parse_symbol(symbol_text, sys);

  if (inputs_file.empty() == (gen_max_size == 0)) {
    err << "error: pass exactly one of --inputs FILE or --gen-max-size N\n";
    return 2;
  }

  std::vector<Element> inputs;
  if (!inputs_file.empty()) {
    std::ifstream in(inputs_file);
    if (!in) {
      err << "error: cannot open input file '" << inputs_file << "'\n";
      return 2;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      auto last = line.find_last_not_of(" \t\r");
      try {
        inputs.push_back(parse_element(line.substr(first, last - first + 1),
                                       sys.universe_atoms()));
      } catch (const ParseError& e) {
        err << "error: " << inputs_file << ":" << line_no << ": " << e.what()
            << "\n";
        return 2;
      }
    }
  } else {
    inputs = generated_inputs(sys.universe_atoms(), gen_max_size);
  }

  AuditReport report;
  try {
    report = audit(sys, symbol, inputs, fit);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::string json = report_json(report);
  if (out_base.empty()) {
    out << json;
  } else {
    std::string json_path = out_base + ".json";
    std::string csv_path = out_base + ".csv";
    std::ofstream jf(json_path, std::ios::binary);
    std::ofstream cf(csv_path, std::ios::binary);
    if (!jf || !cf) {
      err << "error: cannot write report files at '" << out_base << "'\n";
      return 2;
    }
    jf << json;
    cf << report_csv(report);
    if (!jf.flush() || !cf.flush()) {
      err << "error: cannot write report files at '" << out_base << "'\n";
      return 2;
    }
    out << "audit: " << report.inputs.size() << " inputs, "
        << report.violations.size() << " violations\n";
    out << "max_size_ratio=" << report.max_size_ratio
        << " max_time_ratio=" << report.max_time_ratio << "\n";
    if (report.fit) {
      out << "fitted_exponent=" << report.fit->exponent
          << " residual=" << report.fit->residual << "\n";
    }
    out << "wrote " << json_path << " and " << csv_path << "\n";
  }
  return report.clean() ? 0 : 1;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"verifiable recursion over hereditarily finite lists"};
  app.name("gnf");
  app.require_subcommand(1);

  std::string path, format = "text";
  CLI::App* check = app.add_subcommand(
      "check", "run the five static acceptance conditions");
  check->add_option("path", path, "system file (.gnf)")->required();
  check->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string symbol = "f1", element_text;
  bool trace = false, no_memo = false, force = false;
  CLI::App* eval =
      app.add_subcommand("eval", "evaluate the fixed point at one element");
  eval->add_option("path", path, "system file (.gnf)")->required();
  eval->add_option("symbol", symbol, "function symbol, e.g. f1")->required();
  eval->add_option("element", element_text, "input element, e.g. <a,<b>>")
      ->required();
  eval->add_flag("--trace", trace, "print one line per evaluation step");
  eval->add_flag("--no-memo", no_memo, "disable the memo table");
  eval->add_flag("--force", force,
                 "run even if the static checks reject the system");

  int max_size = 4, max_rank = 4, max_stages = 32, fault_stage = -1;
  std::uint64_t cap_flag = 0;
  std::string atoms_csv;
  bool verify = false;
  CLI::App* iterate = app.add_subcommand(
      "iterate", "run the stagewise approximation over a universe slice");
  iterate->add_option("path", path, "system file (.gnf)")->required();
  iterate->add_option("--atoms", atoms_csv,
                      "comma-separated slice alphabet (default: all)");
  iterate->add_option("--max-size", max_size, "largest element size")
      ->check(CLI::PositiveNumber);
  iterate->add_option("--max-rank", max_rank, "largest element rank")
      ->check(CLI::PositiveNumber);
  iterate->add_option("--max-stages", max_stages, "iteration budget")
      ->check(CLI::PositiveNumber);
  iterate->add_flag("--verify", verify,
                    "check monotonicity and crosscheck the fixed point");
  iterate->add_option("--max-universe", cap_flag,
                      "override the slice element cap (GNF_MAX_UNIVERSE)");
  iterate->add_option("--inject-fault-after", fault_stage)->group("");

  std::string inputs_file, out_base, audit_symbol = "f1";
  int gen_max_size = 0;
  bool fit = false, audit_force = false;
  CLI::App* audit_cmd = app.add_subcommand(
      "audit", "evaluate a family of inputs and check both bounds");
  audit_cmd->add_option("path", path, "system file (.gnf)")->required();
  audit_cmd->add_option("--symbol", audit_symbol, "function symbol to audit");
  audit_cmd->add_option("--inputs", inputs_file,
                        "file with one element per line");
  audit_cmd->add_option("--gen-max-size", gen_max_size,
                        "audit the generated input family up to this size")
      ->check(CLI::PositiveNumber);
  audit_cmd->add_option("--out", out_base,
                        "write BASE.json and BASE.csv instead of stdout");
  audit_cmd->add_flag("--fit", fit, "fit the log-log steps/size exponent");
  audit_cmd->add_flag("--force", audit_force,
                      "audit even if the static checks reject the system");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(path, format, out);
    if (eval->parsed()) {
      return cmd_eval(path, symbol, element_text, trace, no_memo, force, out,
                      err);
    }
    if (iterate->parsed()) {
      return cmd_iterate(path, atoms_csv, max_size, max_rank, max_stages,
                         verify, cap_flag, fault_stage, out, err);
    }
    if (audit_cmd->parsed()) {
      return cmd_audit(path, audit_symbol, inputs_file, gen_max_size, out_base,
                       fit, audit_force, out, err);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SystemError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const RuntimeViolation& e) {
    err << "runtime violation (C" << e.condition << "): " << e.what() << "\n";
    return 1;
  } catch (const EvalError& e) {
    err << "evaluation error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace gnf
