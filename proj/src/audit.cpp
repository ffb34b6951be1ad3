#include "gnf/audit.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

namespace gnf {

namespace {

using ordered_json = nlohmann::ordered_json;

double ratio(const BigInt& num, const BigInt& den) {
  if (den == 0) return 0.0;
  return num.convert_to<double>() / den.convert_to<double>();
}

std::string csv_quote(const std::string& raw) {
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

AuditReport audit(const GNFSystem& sys, int symbol,
                  const std::vector<Element>& inputs, bool with_fit) {
  AuditReport report;
  report.system = sys.name;
  report.symbol = symbol;
  const GnfFunction& fn = sys.fn(symbol);

  for (const Element& w : inputs) {
    AuditEntry entry;
    entry.w = w;
    std::string text = render_element(w);
    try {
      Outcome out = evaluate(sys, symbol, w);
      entry.m = out.measurement;
      entry.defined = out.defined();
      entry.ok = entry.m.within_size_bound() && entry.m.within_time_bound();
      if (!entry.m.within_size_bound()) {
        report.violations.push_back(
            {"size-bound", text,
             "output size " + std::to_string(entry.m.output_size) +
                 " exceeds C*|w|^p = " + entry.m.bound_size.str()});
      }
      if (!entry.m.within_time_bound()) {
        report.violations.push_back(
            {"time-bound", text,
             "steps " + std::to_string(entry.m.steps) +
                 " exceed 36*C^(p+1)*(r+1)*|w|^(p^2+1) = " +
                 entry.m.bound_time.str()});
      }
      report.max_size_ratio =
          std::max(report.max_size_ratio,
                   ratio(BigInt(entry.m.output_size), entry.m.bound_size));
      report.max_time_ratio =
          std::max(report.max_time_ratio,
                   ratio(BigInt(entry.m.steps), entry.m.bound_time));
    } catch (const RuntimeViolation& e) {
      entry.error = e.what();
      report.violations.push_back(
          {e.condition == 5 ? "runtime-c5" : "runtime-c4", text, e.what()});
      entry.m.input_size = w.size();
      entry.m.input_rank = w.rank();
      entry.m.family_c = fn.C;
      entry.m.family_p = fn.p;
      entry.m.bound_size = bound_value_size(fn.C, fn.p, w);
      entry.m.bound_time = bound_time(fn.C, fn.p, w);
    } catch (const EvalError& e) {
      entry.error = e.what();
      report.violations.push_back({"evaluation-error", text, e.what()});
      entry.m.input_size = w.size();
      entry.m.input_rank = w.rank();
      entry.m.family_c = fn.C;
      entry.m.family_p = fn.p;
      entry.m.bound_size = bound_value_size(fn.C, fn.p, w);
      entry.m.bound_time = bound_time(fn.C, fn.p, w);
    }
    report.inputs.push_back(std::move(entry));
  }

  if (with_fit) {
    std::vector<Measurement> ms;
    for (const AuditEntry& e : report.inputs) {
      if (e.error.empty()) ms.push_back(e.m);
    }
    report.fit = fit_exponent(ms);  // throws std::invalid_argument if degenerate
  }
  return report;
}

std::string report_json(const AuditReport& report) {
  ordered_json doc;
  doc["system"] = report.system;
  doc["symbol"] = "f" + std::to_string(report.symbol);
  doc["cost_model_version"] = "1";

  ordered_json rows = ordered_json::array();
  for (const AuditEntry& e : report.inputs) {
    ordered_json row;
    row["w"] = render_element(e.w);
    row["size"] = e.m.input_size;
    row["rank"] = e.m.input_rank;
    row["steps"] = std::to_string(e.m.steps);
    row["output_size"] = e.m.output_size;
    row["bound_size"] = e.m.bound_size.str();
    row["bound_time"] = e.m.bound_time.str();
    row["defined"] = e.defined;
    row["ok"] = e.ok;
    row["error"] = e.error;
    rows.push_back(std::move(row));
  }
  doc["inputs"] = std::move(rows);

  ordered_json violations = ordered_json::array();
  for (const AuditViolation& v : report.violations) {
    violations.push_back(ordered_json{
        {"kind", v.kind}, {"input", v.input}, {"detail", v.detail}});
  }
  doc["violations"] = std::move(violations);

  doc["summary"] = ordered_json{{"inputs", report.inputs.size()},
                                {"violations", report.violations.size()},
                                {"max_size_ratio", report.max_size_ratio},
                                {"max_time_ratio", report.max_time_ratio}};
  if (report.fit) {
    doc["fitted_exponent"] = ordered_json{{"exponent", report.fit->exponent},
                                          {"residual", report.fit->residual}};
  } else {
    doc["fitted_exponent"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

std::string report_csv(const AuditReport& report) {
  std::ostringstream out;
  out << "\"w\",\"size\",\"rank\",\"steps\",\"output_size\",\"bound_size\","
         "\"bound_time\",\"defined\",\"ok\",\"error\"\n";
  for (const AuditEntry& e : report.inputs) {
    out << csv_quote(render_element(e.w)) << ','
        << csv_quote(std::to_string(e.m.input_size)) << ','
        << csv_quote(std::to_string(e.m.input_rank)) << ','
        << csv_quote(std::to_string(e.m.steps)) << ','
        << csv_quote(std::to_string(e.m.output_size)) << ','
        << csv_quote(e.m.bound_size.str()) << ','
        << csv_quote(e.m.bound_time.str()) << ','
        << csv_quote(e.defined ? "true" : "false") << ','
        << csv_quote(e.ok ? "true" : "false") << ','
        << csv_quote(e.error) << '\n';
  }
  return out.str();
}

std::vector<Element> flat_list_inputs(const std::string& atom,
                                      const std::vector<int>& sizes) {
  std::vector<Element> out;
  out.reserve(sizes.size());
  for (int s : sizes) {
    if (s < 2) throw SystemError("flat list inputs need size >= 2");
    std::vector<Element> children(static_cast<std::size_t>(s) - 1,
                                  Element::atom(atom));
    out.push_back(Element::list(std::move(children)));
  }
  return out;
}

namespace {

Element nesting_chain(const std::string& atom, int size) {
  Element e = Element::atom(atom);
  for (int i = 1; i < size; ++i) e = Element::list({std::move(e)});
  return e;
}

Element right_comb(const std::string& atom, int pairs) {
  Element e = Element::list({Element::atom(atom)});
  for (int i = 1; i < pairs; ++i) {
    e = Element::list({Element::atom(atom), std::move(e)});
  }
  return e;
}

Element random_element(std::mt19937_64& rng,
                       const std::vector<std::string>& alphabet, int size) {
  if (size == 1) {
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size());
    std::size_t i = pick(rng);
    if (i == alphabet.size()) return Element::list({});
    return Element::atom(alphabet[i]);
  }
  int remaining = size - 1;
  std::vector<Element> children;
  while (remaining > 0) {
    std::uniform_int_distribution<int> pick(1, remaining);
    int k = pick(rng);
    children.push_back(random_element(rng, alphabet, k));
    remaining -= k;
  }
  return Element::list(std::move(children));
}

}  // namespace

std::vector<Element> generated_inputs(const std::vector<std::string>& alphabet,
                                      int max_size) {
  if (max_size < 1) throw SystemError("max_size must be >= 1");
  std::vector<std::string> atoms = alphabet;
  std::sort(atoms.begin(), atoms.end());
  const std::string& a0 = atoms.front();

  const int exhaustive = std::min(max_size, 7);
  std::vector<Element> out =
      enumerate_universe(atoms, exhaustive, exhaustive, 10'000'000);

  for (int s = exhaustive + 1; s <= max_size; ++s) {
    out.push_back(Element::list(std::vector<Element>(
        static_cast<std::size_t>(s) - 1, Element::atom(a0))));
    out.push_back(nesting_chain(a0, s));
    if (s % 2 == 0) out.push_back(right_comb(a0, s / 2));
    std::mt19937_64 rng(0xC0FFEEull + static_cast<std::uint64_t>(s));
    for (int i = 0; i < 3; ++i) {
      out.push_back(random_element(rng, atoms, s));
    }
  }
  return out;
}

}  // namespace gnf
