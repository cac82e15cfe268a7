#include "estcause/report.hpp"

#include <chrono>
#include <sstream>

#include "estcause/syntax.hpp"

namespace estcause {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON

#define ESTCAUSE_JSON(Type, ...)                                                           \
    void to_json(json& nlohmann_json_j, const Type& nlohmann_json_t) {                    \
        NLOHMANN_JSON_EXPAND(NLOHMANN_JSON_PASTE(NLOHMANN_JSON_TO, __VA_ARGS__))           \
    }                                                                                      \
    void from_json(const json& nlohmann_json_j, Type& nlohmann_json_t) {                  \
        NLOHMANN_JSON_EXPAND(NLOHMANN_JSON_PASTE(NLOHMANN_JSON_FROM, __VA_ARGS__))         \
    }

ESTCAUSE_JSON(EnvView, inputs, outputs, locals)
ESTCAUSE_JSON(UniverseView, terms, residual_terms, facts_per_evaluation, supportable)
ESTCAUSE_JSON(ModelView, facts, residual)
ESTCAUSE_JSON(EvaluationView, eval, status, model_count)
ESTCAUSE_JSON(LogicalView, status, model_count, models, per_evaluation)
ESTCAUSE_JSON(ProofView, role, root, rules, text, tree)
ESTCAUSE_JSON(ObligationView, eval, signal, resolution, target, diagnostic, proofs)
ESTCAUSE_JSON(ConstructiveView, constructive, obligations)
ESTCAUSE_JSON(TheoremView, name, holds, detail)
ESTCAUSE_JSON(TimingView, parse_ms, ground_ms, logical_ms, constructive_ms, theorems_ms)
ESTCAUSE_JSON(AnalysisReport, schema, name, source, ast, env, mode, evaluations, universe, logical,
              constructive, theorems, timing)

#undef ESTCAUSE_JSON

// ---------------------------------------------------------------------------
// Analysis

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> names(const std::vector<SignalId>& signals) {
    std::vector<std::string> out;
    for (const auto& s : signals) out.push_back(s.name);
    return out;
}

ModelView view_of(const Universe& u, const Model& m) {
    ModelView v;
    for (const auto& f : m.facts()) {
        v.facts.push_back(u.render(f));
        if (!u.is_context_subterm(f.source)) v.residual.push_back(v.facts.back());
    }
    return v;
}

ProofView view_of(const Universe& u, std::string role, const ProofTree& tree) {
    ProofView v;
    v.role = std::move(role);
    v.root = u.render(tree.root);
    for (RuleName r : rules_used(tree)) v.rules.emplace_back(to_string(r));
    v.text = render_proof(u, tree, ProofFormat::text);
    v.tree = json::parse(render_proof(u, tree, ProofFormat::json));
    return v;
}

}  // namespace

AnalysisReport analyze_source(const std::string& source, const AnalysisOptions& options) {
    AnalysisReport report;
    report.source = source;
    report.mode = std::string(to_string(options.mode));

    auto start = Clock::now();
    ParsedProgram parsed = parse(source);
    report.ast = pretty(parsed.program);
    report.env = {names(parsed.env.inputs()), names(parsed.env.outputs()), names(parsed.env.locals())};
    GroundingOptions gopts;
    gopts.emission = options.mode;
    gopts.max_space = options.max_space;
    if (!options.only_eval.empty()) gopts.only_evaluation = parse_input_evaluation(options.only_eval, parsed.env);
    report.timing.parse_ms = ms_since(start);

    start = Clock::now();
    const Universe u = ground_space(AnalysisContext{parsed.program, parsed.env}, gopts);
    for (std::size_t e = 0; e < u.evaluation_count(); ++e)
        report.evaluations.push_back(u.symbols().evaluation(EvalIdx{static_cast<std::uint32_t>(e)}).render());
    report.universe.terms = u.term_count();
    for (std::size_t t = 0; t < u.term_count(); ++t)
        if (!u.is_context_subterm(TermId{static_cast<std::uint32_t>(t)})) ++report.universe.residual_terms;
    report.universe.facts_per_evaluation = u.facts_per_evaluation();
    report.universe.supportable = u.supportable().size();
    report.timing.ground_ms = ms_since(start);

    start = Clock::now();
    ModelSearchOptions mopts;
    mopts.max_choice_points = options.max_choice_points;
    const LogicalVerdict logical = classify_logical(u, mopts);
    report.logical.status = std::string(to_string(logical.status));
    report.logical.model_count = logical.model_count;
    if (options.models)
        for (const auto& m : logical.models) report.logical.models.push_back(view_of(u, m));
    for (const auto& pe : logical.per_evaluation)
        report.logical.per_evaluation.push_back(
            {u.symbols().evaluation(pe.eval).render(), std::string(to_string(pe.status)), pe.model_count});
    report.timing.logical_ms = ms_since(start);

    start = Clock::now();
    Prover prover(u);
    const ConstructiveVerdict constructive = classify_constructive(prover);
    report.constructive.constructive = constructive.constructive;
    for (const auto& ob : constructive.obligations) {
        ObligationView v;
        v.eval = u.symbols().evaluation(ob.eval).render();
        if (ob.signal) v.signal = u.symbols().signal(*ob.signal).name;
        v.resolution = std::string(to_string(ob.resolution));
        if (ob.target) v.target = pretty(u.term(*ob.target));
        v.diagnostic = ob.diagnostic;
        if (options.proofs) {
            if (ob.positive) v.proofs.push_back(view_of(u, "positive", *ob.positive));
            if (ob.transition_positive)
                v.proofs.push_back(view_of(u, "transition_positive", *ob.transition_positive));
            if (ob.negative) v.proofs.push_back(view_of(u, "negative", *ob.negative));
            if (ob.transition_negative)
                v.proofs.push_back(view_of(u, "transition_negative", *ob.transition_negative));
        }
        report.constructive.obligations.push_back(std::move(v));
    }
    report.timing.constructive_ms = ms_since(start);

    start = Clock::now();
    for (auto& r : check_theorems(prover, logical, constructive, TheoremOptions{options.sweep_limit}))
        report.theorems.push_back({std::move(r.name), r.holds, std::move(r.detail)});
    report.timing.theorems_ms = ms_since(start);
    return report;
}

int exit_code(const AnalysisReport& report) {
    for (const auto& t : report.theorems)
        if (!t.holds) return exit_codes::property_violation;
    if (report.logical.status == to_string(LogicalStatus::non_reactive)) return exit_codes::non_reactive;
    if (report.logical.status == to_string(LogicalStatus::non_deterministic))
        return exit_codes::non_deterministic;
    return report.constructive.constructive ? exit_codes::constructive : exit_codes::not_constructive;
}

// ---------------------------------------------------------------------------
// Text

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out.empty() ? "-" : out;
}

std::string indent(const std::string& text, const std::string& pad) {
    std::string out = pad;
    for (char c : text) {
        out += c;
        if (c == '\n') out += pad;
    }
    return out;
}

}  // namespace

std::string render_text(const AnalysisReport& r) {
    std::ostringstream os;
    os << "== HEADER\n";
    if (!r.name.empty()) os << "program:      " << r.name << "\n";
    os << "ast:          " << r.ast << "\n"
       << "inputs:       " << join(r.env.inputs, ", ") << "\n"
       << "outputs:      " << join(r.env.outputs, ", ") << "\n"
       << "locals:       " << join(r.env.locals, ", ") << "\n"
       << "mode:         " << r.mode << "\n"
       << "evaluations:  " << join(r.evaluations, " ") << "\n"
       << "universe:     " << r.universe.terms << " terms (" << r.universe.residual_terms
       << " residual), " << r.universe.facts_per_evaluation << " formulae per evaluation, "
       << r.universe.supportable << " supportable\n";

    os << "\n== LOGICAL\n"
       << "status:       " << r.logical.status << " (" << r.logical.model_count << " supported model"
       << (r.logical.model_count == 1 ? "" : "s") << ")\n";
    for (const auto& pe : r.logical.per_evaluation)
        os << "  " << pe.eval << ": " << pe.status << " (" << pe.model_count << ")\n";

    os << "\n== MODELS\n";
    if (r.logical.models.empty()) {
        os << (r.logical.model_count == 0 ? "none\n" : "not listed (use --models)\n");
    } else {
        for (std::size_t i = 0; i < r.logical.models.size(); ++i) {
            const auto& m = r.logical.models[i];
            os << "model " << i + 1 << " (" << m.facts.size() << " facts)\n";
            for (const auto& f : m.facts) os << "  " << f << "\n";
            if (!m.residual.empty()) {
                os << "  residual sources:\n";
                for (const auto& f : m.residual) os << "    " << f << "\n";
            }
        }
        if (r.logical.model_count > r.logical.models.size())
            os << "(" << r.logical.model_count - r.logical.models.size() << " more not shown)\n";
    }

    os << "\n== CONSTRUCTIVE\n"
       << "constructive: " << (r.constructive.constructive ? "yes" : "no") << "\n";
    for (const auto& ob : r.constructive.obligations) {
        os << "  " << ob.eval << " " << (ob.signal.empty() ? "term" : ob.signal) << ": " << ob.resolution;
        if (!ob.target.empty()) os << " (target " << ob.target << ")";
        if (!ob.diagnostic.empty()) os << " [" << ob.diagnostic << "]";
        os << "\n";
    }

    os << "\n== PROOFS\n";
    bool any = false;
    for (const auto& ob : r.constructive.obligations)
        for (const auto& p : ob.proofs) {
            any = true;
            os << "-- " << p.role << ": " << p.root << "\n"
               << "   rules: " << join(p.rules, " ") << "\n"
               << indent(p.text, "   ") << "\n";
        }
    if (!any) os << "not listed (use --proofs)\n";

    os << "\n== THEOREMS\n";
    for (const auto& t : r.theorems)
        os << (t.holds ? "[ok]   " : "[FAIL] ") << t.name << ": " << t.detail << "\n";
    os << "\ntiming (ms): parse " << r.timing.parse_ms << ", ground " << r.timing.ground_ms
       << ", logical " << r.timing.logical_ms << ", constructive " << r.timing.constructive_ms
       << ", theorems " << r.timing.theorems_ms << "\n";
    return os.str();
}

}  // namespace estcause
