#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "estcause/report.hpp"

namespace py = pybind11;
using namespace estcause;

namespace {

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

AnalysisOptions options_of(bool collapsed, const std::string& eval, bool proofs, bool models, std::size_t max_space) {
    AnalysisOptions o;
    o.mode = collapsed ? EmissionRules::collapsed : EmissionRules::standard;
    o.only_eval = eval;
    o.proofs = proofs;
    o.models = models;
    o.max_space = max_space;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Causality analysis of instantaneous Esterel programs";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SemanticError>(m, "SemanticError", PyExc_ValueError);
    py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_RuntimeError);

    m.def("pretty", [](const std::string& source) { return pretty(parse(source).program); },
          py::arg("source"), "Canonical text of the program body.");

    m.def(
        "subterms",
        [](const std::string& source) {
            std::vector<std::string> out;
            for (const auto& t : subterms(parse(source).program)) out.push_back(pretty(t));
            return out;
        },
        py::arg("source"));

    m.def(
        "ground",
        [](const std::string& source, bool collapsed_emission, std::size_t max_space) {
            const ParsedProgram parsed = parse(source);
            GroundingOptions g;
            g.emission = collapsed_emission ? EmissionRules::collapsed : EmissionRules::standard;
            g.max_space = max_space;
            const Universe u = ground_space(AnalysisContext{parsed.program, parsed.env}, g);
            py::dict d;
            py::list terms, instances, supportable;
            for (std::size_t t = 0; t < u.term_count(); ++t)
                terms.append(pretty(u.term(TermId{static_cast<std::uint32_t>(t)})));
            for (const auto& f : u.pos_space())
                for (const auto& ri : instances_concluding(u, f)) instances.append(render_instance(u, ri));
            for (const auto& f : u.supportable()) supportable.append(u.render(f));
            d["terms"] = terms;
            d["instances"] = instances;
            d["supportable"] = supportable;
            d["facts_per_evaluation"] = u.facts_per_evaluation();
            return d;
        },
        py::arg("source"), py::arg("collapsed_emission") = false, py::arg("max_space") = 200000);

    m.def(
        "analyze",
        [](const std::string& source, bool collapsed_emission, const std::string& eval, bool proofs, bool models,
           std::size_t max_space) {
            AnalysisReport r;
            {
                py::gil_scoped_release release;
                r = analyze_source(source, options_of(collapsed_emission, eval, proofs, models, max_space));
            }
            nlohmann::json j = r;
            j["exit_code"] = exit_code(r);
            return to_python(j);
        },
        py::arg("source"), py::arg("collapsed_emission") = false, py::arg("eval") = "", py::arg("proofs") = false,
        py::arg("models") = false, py::arg("max_space") = 200000, "Analysis report as a dict.");

    m.def(
        "report_text",
        [](const std::string& source, bool collapsed_emission, bool proofs, bool models) {
            return render_text(analyze_source(source, options_of(collapsed_emission, "", proofs, models, 200000)));
        },
        py::arg("source"), py::arg("collapsed_emission") = false, py::arg("proofs") = false,
        py::arg("models") = false);
}
