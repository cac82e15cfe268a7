#include "estcause/grounding.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>
#include <unordered_set>

namespace estcause {

namespace {

constexpr std::array<std::string_view, kRuleCount> kRuleNames{
    "e0",   "s0",   "s1",   "s2",   "p0",   "p1",   "f0",   "f1",   "f2",   "f3",   "en0",   "nil",
    "em",   "seq0", "seq1", "seq2", "seq3", "seq4", "par0", "par1", "par2", "par3", "par4", "if0",
    "if1",  "if2",  "if3",  "if4",  "if5",  "if6",  "if7",  "enc0", "enc1", "emit*",
};

}  // namespace

std::string_view to_string(RuleName rule) { return kRuleNames.at(static_cast<std::size_t>(rule)); }

std::optional<RuleName> rule_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kRuleNames.size(); ++i)
        if (kRuleNames[i] == name) return static_cast<RuleName>(i);
    return std::nullopt;
}

std::string_view to_string(EmissionRules mode) {
    return mode == EmissionRules::standard ? "standard" : "collapsed-emission";
}

// ---------------------------------------------------------------------------
// Term closure

namespace {

SignalId fresh_for(const SignalEnv& env, const Program& local) {
    return fresh_signal(env, local.signal(), signals_of(local));
}

class Closure {
public:
    explicit Closure(const SignalEnv& env) : env_(env) {}

    const std::vector<Program>& residuals(const Program& p) {
        if (auto it = memo_.find(p); it != memo_.end()) return it->second;
        std::vector<Program> out;
        std::unordered_set<Program, ProgramHash> seen;
        auto push = [&](const Program& r) {
            if (seen.insert(r).second) out.push_back(r);
        };
        switch (p.tag()) {
            case Program::Tag::nil: break;
            case Program::Tag::emit: push(Program::nil()); break;
            case Program::Tag::present:
            case Program::Tag::seq: {
                // present: branch residuals; seq: second's (seq0-2) and first's (seq3)
                const Program& x = p.tag() == Program::Tag::seq ? p.second() : p.then_branch();
                const Program& y = p.tag() == Program::Tag::seq ? p.first() : p.else_branch();
                for (const auto& r : residuals(x)) push(r);
                for (const auto& r : residuals(y)) push(r);
                break;
            }
            case Program::Tag::par: {
                std::vector<Program> left = residuals(p.left());
                std::vector<Program> right = residuals(p.right());
                for (const auto& l : left)
                    for (const auto& r : right) push(Program::par(l, r));
                for (const auto& r : right) push(r);
                for (const auto& l : left) push(l);
                break;
            }
            case Program::Tag::local: {
                SignalId fresh = fresh_for(env_, p);
                std::vector<Program> inner = residuals(substitute(p.body(), p.signal(), fresh));
                for (const auto& r : inner)
                    push(Program::local(p.signal(), rename_signal(r, fresh.name, p.signal())));
                break;
            }
        }
        return memo_.emplace(p, std::move(out)).first->second;
    }

private:
    const SignalEnv& env_;
    std::unordered_map<Program, std::vector<Program>, ProgramHash> memo_;
};

/// Interns p and all its subterms, pre-order.
TermId intern_tree(SymbolTable& symbols, const Program& p) {
    TermId id = symbols.intern(p);
    for (std::size_t i = 0; i < p.arity(); ++i) intern_tree(symbols, p.child(i));
    return id;
}

/// Saturates `symbols` from `root`; calls visit(id) once per term in id order.
template <class Visit>
void saturate(const SignalEnv& env, SymbolTable& symbols, const Program& root, Visit&& visit) {
    Closure closure(env);
    intern_tree(symbols, root);
    for (std::size_t next = 0; next < symbols.term_count(); ++next) {
        TermId id{static_cast<std::uint32_t>(next)};
        Program p = symbols.term(id);
        if (p.tag() == Program::Tag::local) {
            SignalId fresh = fresh_for(env, p);
            intern_tree(symbols, substitute(p.body(), p.signal(), fresh));
        }
        for (const auto& r : closure.residuals(p)) intern_tree(symbols, r);
        visit(id);
    }
}

}  // namespace

std::vector<Program> residual_universe(const AnalysisContext& ctx) {
    SymbolTable symbols;
    std::vector<Program> out;
    saturate(ctx.env, symbols, ctx.context, [&](TermId id) { out.push_back(symbols.term(id)); });
    return out;
}

// ---------------------------------------------------------------------------
// Universe

std::size_t Universe::facts_per_evaluation() const noexcept {
    const std::size_t n = term_count(), k = signal_count();
    return n * k + n + n * k * n;
}

std::size_t Universe::dense_index(const Formula& f) const {
    const std::size_t n = term_count(), k = signal_count();
    switch (f.kind) {
        case FormulaKind::emits: return f.source.idx() * k + f.signal.idx();
        case FormulaKind::terminates: return n * k + f.source.idx();
        case FormulaKind::trans:
            return n * k + n + (f.source.idx() * k + f.signal.idx()) * n + f.target.idx();
    }
    return 0;
}

Formula Universe::fact(EvalIdx e, std::size_t d) const {
    const std::size_t n = term_count(), k = signal_count();
    auto term = [](std::size_t v) { return TermId{static_cast<std::uint32_t>(v)}; };
    auto sig = [](std::size_t v) { return SignalIdx{static_cast<std::uint32_t>(v)}; };
    if (d < n * k) return Formula::emits(e, term(d / k), sig(d % k));
    d -= n * k;
    if (d < n) return Formula::terminates(e, term(d));
    d -= n;
    const std::size_t target = d % n;
    const std::size_t sk = d / n;
    return Formula::trans(e, term(sk / k), sig(sk % k), term(target));
}

std::vector<Formula> Universe::pos_space(EvalIdx e) const {
    std::vector<Formula> out;
    out.reserve(facts_per_evaluation());
    for (std::size_t d = 0; d < facts_per_evaluation(); ++d) out.push_back(fact(e, d));
    return out;
}

std::vector<Formula> Universe::pos_space() const {
    std::vector<Formula> out;
    for (std::size_t e = 0; e < evaluation_count(); ++e) {
        auto part = pos_space(EvalIdx{static_cast<std::uint32_t>(e)});
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

bool Universe::is_supportable(const Formula& f) const {
    return f.positive() && supportable_mask_.at(f.eval.idx())[dense_index(f)];
}

Universe ground_space(const AnalysisContext& ctx, const GroundingOptions& options) {
    Universe u;
    u.ctx_ = ctx;
    u.emission_ = options.emission;
    for (const auto& s : ctx.env.emittable()) u.program_signals_.push_back(u.symbols_.intern_signal(s));

    std::vector<TermId> locals;
    saturate(ctx.env, u.symbols_, ctx.context, [&](TermId id) {
        const Program p = u.symbols_.term(id);
        Universe::Shape sh;
        sh.tag = p.tag();
        if (p.arity() > 0) sh.a = u.symbols_.intern(p.child(0));
        if (p.arity() > 1) sh.b = u.symbols_.intern(p.child(1));
        switch (p.tag()) {
            case Program::Tag::emit: sh.signal = u.symbols_.intern_signal(p.signal()); break;
            case Program::Tag::present:
                if (p.signal().kind == SignalKind::input)
                    sh.input = p.signal().name;
                else
                    sh.signal = u.symbols_.intern_signal(p.signal());
                break;
            case Program::Tag::local: {
                sh.signal = u.symbols_.intern_signal(p.signal());
                SignalId fresh = fresh_for(ctx.env, p);
                sh.fresh = u.symbols_.intern_signal(fresh);
                sh.renamed_body = u.symbols_.intern(substitute(p.body(), p.signal(), fresh));
                locals.push_back(id);
                break;
            }
            default: break;
        }
        if (u.shapes_.size() <= id.idx()) u.shapes_.resize(id.idx() + 1);
        u.shapes_[id.idx()] = std::move(sh);
    });
    u.root_ = *u.symbols_.find(ctx.context);

    u.context_subterm_.assign(u.shapes_.size(), false);
    for (const auto& p : subterms(ctx.context)) u.context_subterm_[u.symbols_.find(p)->idx()] = true;

    if (options.only_evaluation) {
        u.symbols_.add_evaluation(*options.only_evaluation);
    } else {
        for (auto& ev : all_input_evaluations(ctx.env)) u.symbols_.add_evaluation(std::move(ev));
    }

    const std::size_t space = u.facts_per_evaluation() * u.evaluation_count();
    if (space > options.max_space)
        throw ResourceLimit("formula space of " + std::to_string(space) +
                            " positive formulae exceeds the limit of " +
                            std::to_string(options.max_space));

    u.supportable_ = supportable_space(u);
    u.supportable_mask_.assign(u.evaluation_count(),
                               std::vector<bool>(u.facts_per_evaluation(), false));
    for (const auto& f : u.supportable_) u.supportable_mask_[f.eval.idx()][u.dense_index(f)] = true;
    return u;
}

// ---------------------------------------------------------------------------
// Rule instances

namespace {

template <class Out>
void generate(const Universe& u, const Formula& f, Out&& add) {
    using Tag = Program::Tag;
    const EvalIdx e = f.eval;
    const TermId c = u.root();
    const auto& sh = u.shape(f.source);
    const std::size_t n = u.term_count(), k = u.signal_count();
    auto term = [](std::size_t v) { return TermId{static_cast<std::uint32_t>(v)}; };
    auto sig = [](std::size_t v) { return SignalIdx{static_cast<std::uint32_t>(v)}; };
    auto emits = [&](TermId t, SignalIdx x) { return Formula::emits(e, t, x); };
    auto term_ok = [&](TermId t) { return Formula::terminates(e, t); };
    auto trans = [&](TermId t, SignalIdx x, TermId tgt) { return Formula::trans(e, t, x, tgt); };
    auto input_present = [&] {
        auto st = u.symbols().evaluation(e).status(sh.input);
        return st && *st == Presence::present;
    };
    auto input_absent = [&] {
        auto st = u.symbols().evaluation(e).status(sh.input);
        return st && *st == Presence::absent;
    };
    // labels s' with s'[s/s''] == x for a local binding s renamed to s''
    auto local_labels = [&](SignalIdx x) {
        std::vector<SignalIdx> out;
        if (x == sh.signal) {
            out.push_back(sh.fresh);
            out.push_back(sh.signal);
        } else if (x != sh.fresh) {
            out.push_back(x);
        }
        return out;
    };

    switch (f.kind) {
        case FormulaKind::emits: {
            const SignalIdx x = f.signal;
            if (u.emission_rules() == EmissionRules::collapsed) {
                for (std::size_t t = 0; t < n; ++t)
                    add(RuleName::emit_collapsed, {trans(f.source, x, term(t))});
                return;
            }
            switch (sh.tag) {
                case Tag::nil: return;
                case Tag::emit:
                    if (sh.signal == x) add(RuleName::e0, {});
                    return;
                case Tag::seq:
                    add(RuleName::s0, {emits(sh.a, x)});
                    add(RuleName::s1, {term_ok(sh.a), emits(sh.b, x)});
                    for (std::size_t x2 = 0; x2 < k; ++x2)
                        for (std::size_t p2 = 0; p2 < n; ++p2)
                            add(RuleName::s2, {trans(sh.a, sig(x2), term(p2)), term_ok(term(p2)),
                                               emits(sh.b, x)});
                    return;
                case Tag::par:
                    add(RuleName::p0, {emits(sh.a, x)});
                    add(RuleName::p1, {emits(sh.b, x)});
                    return;
                case Tag::present:
                    if (!sh.input.empty()) {
                        if (input_present()) add(RuleName::f2, {emits(sh.a, x)});
                        if (input_absent()) add(RuleName::f3, {emits(sh.b, x)});
                    } else {
                        add(RuleName::f0, {emits(c, sh.signal), emits(sh.a, x)});
                        add(RuleName::f1, {emits(c, sh.signal).negated(), emits(sh.b, x)});
                    }
                    return;
                case Tag::local:
                    for (SignalIdx s2 : local_labels(x))
                        add(RuleName::en0, {emits(sh.renamed_body, s2)});
                    return;
            }
            return;
        }
        case FormulaKind::terminates:
            switch (sh.tag) {
                case Tag::nil: add(RuleName::nil, {}); return;
                case Tag::emit: return;
                case Tag::seq: add(RuleName::seq4, {term_ok(sh.a), term_ok(sh.b)}); return;
                case Tag::par: add(RuleName::par4, {term_ok(sh.a), term_ok(sh.b)}); return;
                case Tag::present:
                    if (!sh.input.empty()) {
                        if (input_present()) add(RuleName::if6, {term_ok(sh.a)});
                        if (input_absent()) add(RuleName::if7, {term_ok(sh.b)});
                    } else {
                        add(RuleName::if4, {emits(c, sh.signal), term_ok(sh.a)});
                        add(RuleName::if5, {emits(c, sh.signal).negated(), term_ok(sh.b)});
                    }
                    return;
                case Tag::local: add(RuleName::enc1, {term_ok(sh.renamed_body)}); return;
            }
            return;
        case FormulaKind::trans: {
            const SignalIdx x = f.signal;
            const TermId tgt = f.target;
            const auto& tsh = u.shape(tgt);
            switch (sh.tag) {
                case Tag::nil: return;
                case Tag::emit:
                    if (sh.signal == x && tgt == SymbolTable::kNil) add(RuleName::em, {});
                    return;
                case Tag::seq:
                    for (std::size_t x2 = 0; x2 < k; ++x2)
                        for (std::size_t p2 = 0; p2 < n; ++p2)
                            add(RuleName::seq0, {trans(sh.a, x, term(p2)), term_ok(term(p2)),
                                                 trans(sh.b, sig(x2), tgt)});
                    for (std::size_t x2 = 0; x2 < k; ++x2)
                        for (std::size_t p2 = 0; p2 < n; ++p2)
                            add(RuleName::seq1, {trans(sh.a, sig(x2), term(p2)), term_ok(term(p2)),
                                                 trans(sh.b, x, tgt)});
                    add(RuleName::seq2, {term_ok(sh.a), trans(sh.b, x, tgt)});
                    add(RuleName::seq3, {trans(sh.a, x, tgt), term_ok(tgt), term_ok(sh.b)});
                    return;
                case Tag::par:
                    if (tsh.tag == Tag::par) {
                        for (std::size_t x2 = 0; x2 < k; ++x2)
                            add(RuleName::par0, {trans(sh.a, x, tsh.a), trans(sh.b, sig(x2), tsh.b)});
                        for (std::size_t x2 = 0; x2 < k; ++x2)
                            add(RuleName::par1, {trans(sh.a, sig(x2), tsh.a), trans(sh.b, x, tsh.b)});
                    }
                    add(RuleName::par2, {term_ok(sh.a), trans(sh.b, x, tgt)});
                    add(RuleName::par3, {trans(sh.a, x, tgt), term_ok(sh.b)});
                    return;
                case Tag::present:
                    if (!sh.input.empty()) {
                        if (input_present()) add(RuleName::if2, {trans(sh.a, x, tgt)});
                        if (input_absent()) add(RuleName::if3, {trans(sh.b, x, tgt)});
                    } else {
                        add(RuleName::if0, {emits(c, sh.signal), trans(sh.a, x, tgt)});
                        add(RuleName::if1, {emits(c, sh.signal).negated(), trans(sh.b, x, tgt)});
                    }
                    return;
                case Tag::local: {
                    if (tsh.tag != Tag::local || tsh.signal != sh.signal) return;
                    const Program& wanted = u.term(tgt).body();
                    const SignalId& bound = u.symbols().signal(sh.signal);
                    const std::string& fresh = u.symbols().signal(sh.fresh).name;
                    const auto labels = local_labels(x);
                    for (std::size_t p2 = 0; p2 < n; ++p2) {
                        if (rename_signal(u.term(term(p2)), fresh, bound) != wanted) continue;
                        for (SignalIdx s2 : labels)
                            add(RuleName::enc0, {trans(sh.renamed_body, s2, term(p2))});
                    }
                    return;
                }
            }
            return;
        }
    }
}

}  // namespace

std::vector<RuleInstance> instances_concluding(const Universe& u, const Formula& f) {
    if (!f.positive()) throw std::invalid_argument("instances_concluding expects a positive formula");
    std::vector<RuleInstance> out;
    generate(u, f, [&](RuleName rule, std::vector<Formula> premises) {
        out.push_back(RuleInstance{rule, std::move(premises), f});
    });
    return out;
}

std::vector<RuleInstance> instances_contradicting(const Universe& u, const Formula& neg) {
    Formula pos = neg;
    pos.polarity = Polarity::positive;
    if (neg.kind != FormulaKind::trans) {
        pos.target = SymbolTable::kNil;
        return instances_concluding(u, pos);
    }
    std::vector<RuleInstance> out;
    for (std::size_t t = 0; t < u.term_count(); ++t) {
        pos.target = TermId{static_cast<std::uint32_t>(t)};
        auto part = instances_concluding(u, pos);
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<Formula> supportable_space(const Universe& u) {
    std::vector<Formula> out;
    const std::size_t m = u.facts_per_evaluation();
    for (std::size_t ev = 0; ev < u.evaluation_count(); ++ev) {
        const EvalIdx e{static_cast<std::uint32_t>(ev)};
        // positive premises of each instance, per fact
        std::vector<std::vector<std::vector<std::size_t>>> support(m);
        std::vector<bool> alive(m, false);
        for (std::size_t d = 0; d < m; ++d) {
            generate(u, u.fact(e, d), [&](RuleName, std::vector<Formula> premises) {
                std::vector<std::size_t> pos;
                for (const auto& p : premises)
                    if (p.positive()) pos.push_back(u.dense_index(p));
                support[d].push_back(std::move(pos));
            });
            alive[d] = !support[d].empty();
        }
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t d = 0; d < m; ++d) {
                if (!alive[d]) continue;
                bool ok = std::any_of(support[d].begin(), support[d].end(), [&](const auto& inst) {
                    return std::all_of(inst.begin(), inst.end(), [&](std::size_t p) { return alive[p]; });
                });
                if (!ok) {
                    alive[d] = false;
                    changed = true;
                }
            }
        }
        for (std::size_t d = 0; d < m; ++d)
            if (alive[d]) out.push_back(u.fact(e, d));
    }
    return out;
}

std::string render_instance(const Universe& u, const RuleInstance& ri) {
    std::string out(to_string(ri.rule));
    out += ":";
    for (std::size_t i = 0; i < ri.premises.size(); ++i) {
        out += i ? ", " : " ";
        out += u.render(ri.premises[i]);
    }
    out += " ⊢ " + u.render(ri.conclusion);
    return out;
}

}  // namespace estcause
