#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xbn/error.hpp"
#include "xbn/format.hpp"
#include "xbn/inference.hpp"
#include "xbn/json_io.hpp"
#include "xbn/query.hpp"

namespace py = pybind11;
using namespace xbn;

namespace {

std::vector<VarId> resolve(const BayesianNetwork& net, const std::vector<std::string>& names) {
    return resolve_variables(net, names);
}

}  // namespace

PYBIND11_MODULE(_xbn, m) {
    m.doc() = "Explainable Bayesian network engine";

    static py::exception<Error> base(m, "XbnError");
    static py::exception<Error> usage(m, "UsageError", base.ptr());
    static py::exception<Error> validation(m, "ValidationError", base.ptr());
    static py::exception<Error> parse(m, "ParseError", base.ptr());
    static py::exception<Error> impossible(m, "ImpossibleEvidenceError", base.ptr());
    static py::exception<Error> degenerate(m, "DegenerateExplanationError", base.ptr());
    static py::exception<Error> guard(m, "GuardExceededError", base.ptr());
    static py::exception<Error> not_found(m, "NotFoundError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            const auto& d = e.diagnostic();
            py::object exc = py::reinterpret_borrow<py::object>(parse.ptr())(e.what());
            exc.attr("line") = d.line;
            exc.attr("column") = d.column;
            PyErr_SetObject(parse.ptr(), exc.ptr());
        } catch (const Error& e) {
            switch (e.kind()) {
                case ErrorKind::Usage: usage(e.what()); break;
                case ErrorKind::Validation: validation(e.what()); break;
                case ErrorKind::Parse: parse(e.what()); break;
                case ErrorKind::ImpossibleEvidence: impossible(e.what()); break;
                case ErrorKind::DegenerateExplanation: degenerate(e.what()); break;
                case ErrorKind::GuardExceeded: guard(e.what()); break;
                case ErrorKind::NotFound: not_found(e.what()); break;
            }
        }
    });

    py::class_<BayesianNetwork>(m, "Network")
        .def_property_readonly("name", &BayesianNetwork::name)
        .def_property_readonly("variables",
                               [](const BayesianNetwork& n) {
                                   std::vector<std::string> out;
                                   for (const auto& v : n.variables()) out.push_back(v.name);
                                   return out;
                               })
        .def("states", [](const BayesianNetwork& n, const std::string& v) { return n.variable(n.index_of(v)).states; })
        .def("parents",
             [](const BayesianNetwork& n, const std::string& v) {
                 std::vector<std::string> out;
                 for (VarId p : n.parents(n.index_of(v))) out.push_back(n.variable(p).name);
                 return out;
             })
        .def_property_readonly("arcs",
                               [](const BayesianNetwork& n) {
                                   std::vector<std::pair<std::string, std::string>> out;
                                   for (auto [p, c] : n.arcs()) out.emplace_back(n.variable(p).name, n.variable(c).name);
                                   return out;
                               })
        .def("to_bif", [](const BayesianNetwork& n) { return write_bif(n); })
        .def("to_json", [](const BayesianNetwork& n) { return write_network_json(n); })
        .def("__len__", &BayesianNetwork::size)
        .def("__repr__", [](const BayesianNetwork& n) {
            return "<xbn.Network '" + n.name() + "' with " + std::to_string(n.size()) + " variables>";
        });

    m.def("builtin_asia", &builtin_asia, "The chest-clinic network.");
    m.def("parse_network", [](const std::string& text) { return parse_network(text); }, py::arg("text"),
          "Parses BIF text or a native JSON document.");
    m.def("load_network", [](const std::string& source) { return load_network(source); }, py::arg("source"),
          "Loads 'builtin:asia' or a .bif/.json file.");
    m.def("approx_equal", &approx_equal, py::arg("a"), py::arg("b"), py::arg("tol") = 1e-12);

    m.def("execute_json",
          [](const BayesianNetwork& net, const std::string& request) {
              const json response = api::execute(net, json::parse(request));
              return canonical_dump(response);
          },
          py::arg("network"), py::arg("request"),
          "Runs a query request (JSON text) and returns the canonical JSON response.");
    m.def("render_table_json", [](const std::string& response) { return api::render_table(json::parse(response)); },
          py::arg("response"));

    m.def("d_separated",
          [](const BayesianNetwork& net, const std::vector<std::string>& x, const std::vector<std::string>& y,
             const std::vector<std::string>& z) {
              return d_separated(net, resolve(net, x), resolve(net, y), resolve(net, z));
          },
          py::arg("network"), py::arg("x"), py::arg("y"), py::arg("z") = std::vector<std::string>{});
    m.def("evidence_probability",
          [](const BayesianNetwork& net, const std::string& evidence) {
              return evidence_probability(net, parse_assignment(net, evidence));
          },
          py::arg("network"), py::arg("evidence") = "");
}
