#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gnf/audit.hpp"
#include "gnf/check.hpp"
#include "gnf/engine.hpp"
#include "gnf/system.hpp"

namespace py = pybind11;

namespace {

py::dict condition_dict(int i, const gnf::ConditionReport& c) {
  py::dict d;
  d["id"] = "C" + std::to_string(i);
  d["verdict"] = std::string(gnf::verdict_name(c.verdict));
  d["function"] = c.function;
  if (c.rule_index >= 0) {
    d["rule"] = c.rule_index + 1;
  } else {
    d["rule"] = py::none();
  }
  d["detail"] = c.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "verifiable recursion over a hereditarily finite list universe";

  py::class_<gnf::GNFSystem>(m, "System")
      .def_readonly("name", &gnf::GNFSystem::name)
      .def_property_readonly("functions", &gnf::GNFSystem::fn_count)
      .def_property_readonly("atoms", &gnf::GNFSystem::universe_atoms)
      .def("__repr__", [](const gnf::GNFSystem& sys) {
        return "<gnf.System '" + sys.name + "', " +
               std::to_string(sys.fn_count()) + " function(s)>";
      });

  m.def("load_system", &gnf::load_system_file, py::arg("path"),
        "Load a .gnf system file.");
  m.def(
      "parse_system",
      [](const std::string& text, const std::string& name) {
        return gnf::parse_system(text, name);
      },
      py::arg("text"), py::arg("name") = "<memory>",
      "Parse a system from source text.");

  m.def(
      "check",
      [](const gnf::GNFSystem& sys) {
        gnf::CheckReport r = gnf::check_system(sys);
        py::list conditions;
        for (int i = 1; i <= 5; ++i) {
          conditions.append(condition_dict(i, r.condition(i)));
        }
        py::dict out;
        out["accepted"] = r.accepted();
        out["conditions"] = conditions;
        return out;
      },
      py::arg("system"), "Run the five static acceptance conditions.");

  m.def(
      "evaluate",
      [](const gnf::GNFSystem& sys, int symbol, const std::string& element,
         bool trace, bool memo) {
        gnf::Element w = gnf::parse_element(element, sys.universe_atoms());
        gnf::EvalOptions options;
        options.trace = trace;
        options.memo = memo;
        gnf::Outcome o = gnf::evaluate(sys, symbol, w, options);
        py::dict out;
        out["defined"] = o.defined();
        out["value"] =
            o.defined() ? py::cast(gnf::render_element(*o.result)) : py::none();
        out["steps"] = o.measurement.steps;
        out["output_size"] = o.measurement.output_size;
        out["bound_size"] = o.measurement.bound_size.str();
        out["bound_time"] = o.measurement.bound_time.str();
        out["within_bounds"] = o.measurement.within_size_bound() &&
                               o.measurement.within_time_bound();
        out["trace"] = o.trace;
        return out;
      },
      py::arg("system"), py::arg("symbol"), py::arg("element"),
      py::arg("trace") = false, py::arg("memo") = true,
      "Evaluate f<symbol> at the element; an undefined result has "
      "defined=False.");

  m.def(
      "element_size",
      [](const std::string& text) { return gnf::parse_element(text).size(); },
      py::arg("element"));
  m.def(
      "element_rank",
      [](const std::string& text) { return gnf::parse_element(text).rank(); },
      py::arg("element"));

  m.def(
      "enumerate_universe",
      [](const std::vector<std::string>& atoms, int max_size, int max_rank,
         std::uint64_t cap) {
        std::vector<std::string> out;
        for (const gnf::Element& e :
             gnf::enumerate_universe(atoms, max_size, max_rank, cap)) {
          out.push_back(gnf::render_element(e));
        }
        return out;
      },
      py::arg("atoms"), py::arg("max_size"), py::arg("max_rank"),
      py::arg("cap") = 100000,
      "All universe elements within the bounds, in canonical order.");

  m.def(
      "audit_json",
      [](const gnf::GNFSystem& sys, int symbol,
         const std::vector<std::string>& inputs, bool fit) {
        std::vector<gnf::Element> parsed;
        parsed.reserve(inputs.size());
        for (const std::string& text : inputs) {
          parsed.push_back(gnf::parse_element(text, sys.universe_atoms()));
        }
        return gnf::report_json(gnf::audit(sys, symbol, parsed, fit));
      },
      py::arg("system"), py::arg("symbol"), py::arg("inputs"),
      py::arg("fit") = false, "Audit the inputs and return the JSON report.");
}
