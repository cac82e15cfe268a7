#include "estcause/proofs.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

namespace estcause {

// ---------------------------------------------------------------------------
// Search

const std::vector<RuleInstance>& Prover::instances(const Formula& goal) {
    auto it = instances_.find(goal);
    if (it != instances_.end()) return it->second;
    auto list = goal.positive() ? instances_concluding(u_, goal) : instances_contradicting(u_, goal);
    return instances_.emplace(goal, std::move(list)).first->second;
}

Prover::Outcome Prover::search(const Formula& goal) {
    if (auto it = proved_.find(goal); it != proved_.end()) return {it->second, kNoCut};
    if (refuted_.contains(goal)) return {nullptr, kNoCut};
    if (auto it = on_path_.find(goal); it != on_path_.end()) return {nullptr, it->second};

    const std::size_t depth = on_path_.size();
    on_path_.emplace(goal, depth);
    std::size_t low = kNoCut;
    std::shared_ptr<ProofTree> result;

    // copy: the cache may rehash while subgoals are explored
    const std::vector<RuleInstance> candidates = instances(goal);
    if (goal.positive()) {
        for (const auto& inst : candidates) {
            std::vector<ProofPtr> children;
            bool ok = true;
            for (const auto& prem : inst.premises) {
                Outcome o = search(prem);
                low = std::min(low, o.low);
                if (!o.proof) {
                    ok = false;
                    break;
                }
                children.push_back(std::move(o.proof));
            }
            if (ok) {
                result = std::make_shared<ProofTree>();
                result->root = goal;
                result->rule = inst.rule;
                result->children = std::move(children);
                break;
            }
        }
    } else {
        auto node = std::make_shared<ProofTree>();
        node->root = goal;
        std::map<Formula, std::size_t> child_index;
        bool ok = true;
        for (const auto& inst : candidates) {
            bool refuted = false;
            for (std::size_t k = 0; k < inst.premises.size() && !refuted; ++k) {
                const Formula& prem = inst.premises[k];
                std::vector<Formula> contra;
                if (prem.positive()) {
                    contra.push_back(prem.negated());
                } else {
                    Formula pos = prem;
                    pos.polarity = Polarity::positive;
                    if (prem.kind != FormulaKind::trans) {
                        pos.target = SymbolTable::kNil;
                        contra.push_back(pos);
                    } else {
                        for (std::size_t t = 0; t < u_.term_count(); ++t) {
                            pos.target = TermId{static_cast<std::uint32_t>(t)};
                            contra.push_back(pos);
                        }
                    }
                }
                for (const auto& c : contra) {
                    Outcome o = search(c);
                    low = std::min(low, o.low);
                    if (!o.proof) continue;
                    auto [it, inserted] = child_index.emplace(c, node->children.size());
                    if (inserted) node->children.push_back(std::move(o.proof));
                    node->refutations.push_back(Refutation{inst, k, it->second});
                    refuted = true;
                    break;
                }
            }
            if (!refuted) {
                ok = false;
                break;
            }
        }
        if (ok) result = std::move(node);
    }

    on_path_.erase(goal);
    if (result) {
        proved_.emplace(goal, result);
        return {result, kNoCut};
    }
    if (low >= depth) {
        refuted_.insert(goal);
        return {nullptr, kNoCut};
    }
    return {nullptr, low};
}

ProofPtr Prover::prove(const Formula& goal) { return search(goal).proof; }

ProofPtr Prover::prove(const Formula& goal, std::span<const Formula> path) {
    std::vector<Formula> pushed;
    for (const auto& f : path)
        if (on_path_.emplace(f, on_path_.size()).second) pushed.push_back(f);
    ProofPtr result = search(goal).proof;
    for (const auto& f : pushed) on_path_.erase(f);
    return result;
}

ProofPtr Prover::prove_some_transition(EvalIdx e, TermId source, SignalIdx x) {
    for (std::size_t t = 0; t < u_.term_count(); ++t)
        if (auto p = prove(Formula::trans(e, source, x, TermId{static_cast<std::uint32_t>(t)})))
            return p;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Independent verification

namespace {

class Verifier {
public:
    explicit Verifier(const Universe& u) : u_(u) {}

    std::string check(const ProofTree& node) {
        if (done_.contains(&node)) return {};
        if (!active_.insert(&node).second) return "cycle through " + u_.render(node.root);
        std::string err = check_node(node);
        for (const auto& c : node.children) {
            if (!err.empty()) break;
            if (!c) {
                err = "null child under " + u_.render(node.root);
                break;
            }
            err = check(*c);
        }
        active_.erase(&node);
        done_.insert(&node);
        return err;
    }

private:
    std::string check_node(const ProofTree& node) {
        const std::string where = u_.render(node.root);
        if (node.root.positive()) {
            if (!node.rule) return "positive node without rule: " + where;
            if (!node.refutations.empty()) return "positive node with refutations: " + where;
            for (const auto& ri : instances_concluding(u_, node.root)) {
                if (ri.rule != *node.rule || ri.premises.size() != node.children.size()) continue;
                bool match = true;
                for (std::size_t i = 0; i < ri.premises.size() && match; ++i)
                    match = node.children[i]->root == ri.premises[i];
                if (match) return {};
            }
            return "no instance of " + std::string(to_string(*node.rule)) + " matches " + where;
        }
        if (node.rule) return "negative node with rule: " + where;
        for (const auto& ri : instances_contradicting(u_, node.root)) {
            bool covered = false;
            for (const auto& r : node.refutations) {
                if (!(r.instance == ri) || r.premise >= ri.premises.size() ||
                    r.child >= node.children.size())
                    continue;
                if (contradicts(node.children[r.child]->root, ri.premises[r.premise])) {
                    covered = true;
                    break;
                }
            }
            if (!covered) return "instance not refuted under " + where + ": " + render_instance(u_, ri);
        }
        return {};
    }

    const Universe& u_;
    std::unordered_set<const ProofTree*> done_;
    std::unordered_set<const ProofTree*> active_;
};

}  // namespace

std::string verify_proof(const Universe& u, const ProofTree& tree) { return Verifier(u).check(tree); }

// ---------------------------------------------------------------------------
// Constructiveness

std::string_view to_string(Resolution r) {
    switch (r) {
        case Resolution::proved_positive: return "ProvedPositive";
        case Resolution::proved_negative: return "ProvedNegative";
        case Resolution::unprovable: return "Unprovable";
    }
    return "?";
}

ConstructiveVerdict classify_constructive(Prover& prover) {
    const Universe& u = prover.universe();
    const TermId root = u.root();
    ConstructiveVerdict verdict;
    verdict.constructive = true;
    for (std::size_t ev = 0; ev < u.evaluation_count(); ++ev) {
        const EvalIdx e{static_cast<std::uint32_t>(ev)};
        for (SignalIdx x : u.program_signals()) {
            Obligation ob;
            ob.eval = e;
            ob.signal = x;
            const Formula emits = Formula::emits(e, root, x);
            ob.positive = prover.prove(emits);
            ob.negative = prover.prove(emits.negated());
            ob.transition_positive = prover.prove_some_transition(e, root, x);
            if (ob.transition_positive) ob.target = ob.transition_positive->root.target;
            ob.transition_negative =
                prover.prove(Formula::trans(e, root, x, SymbolTable::kNil).negated());
            if (ob.positive && ob.transition_positive) {
                ob.resolution = Resolution::proved_positive;
            } else if (ob.negative && ob.transition_negative) {
                ob.resolution = Resolution::proved_negative;
            } else {
                ob.resolution = Resolution::unprovable;
                if (ob.positive || ob.transition_positive || ob.negative || ob.transition_negative)
                    ob.diagnostic = std::string("emission ") +
                                    (ob.positive ? "proved" : ob.negative ? "refuted" : "undecided") +
                                    " but transition " +
                                    (ob.transition_positive  ? "proved"
                                     : ob.transition_negative ? "refuted"
                                                              : "undecided");
            }
            verdict.constructive = verdict.constructive && ob.resolution != Resolution::unprovable;
            verdict.obligations.push_back(std::move(ob));
        }
        Obligation term;
        term.eval = e;
        const Formula t = Formula::terminates(e, root);
        term.positive = prover.prove(t);
        term.negative = prover.prove(t.negated());
        term.resolution = term.positive   ? Resolution::proved_positive
                          : term.negative ? Resolution::proved_negative
                                          : Resolution::unprovable;
        verdict.constructive = verdict.constructive && term.resolution != Resolution::unprovable;
        verdict.obligations.push_back(std::move(term));
    }
    return verdict;
}

// ---------------------------------------------------------------------------
// Theorem checks

std::vector<Formula> provable_facts(Prover& prover) {
    std::vector<Formula> out;
    for (const auto& f : prover.universe().pos_space())
        if (prover.prove(f)) out.push_back(f);
    return out;
}

std::vector<PropertyResult> check_theorems(Prover& prover, const LogicalVerdict& logical,
                                           const ConstructiveVerdict& constructive,
                                           const TheoremOptions& options) {
    const Universe& u = prover.universe();
    const bool sweep = u.facts_per_evaluation() <= options.sweep_limit;
    std::vector<PropertyResult> out;

    PropertyResult complete{"constructive-implies-unique-model", true, ""};
    if (!constructive.constructive) {
        complete.detail = "vacuous: program is not constructive";
    } else if (logical.status != LogicalStatus::coherent) {
        complete.holds = false;
        complete.detail = "constructive but logical status is " + std::string(to_string(logical.status));
    } else if (!sweep) {
        complete.detail = "unique model confirmed; provable-set comparison skipped (space too large)";
    } else {
        const Model provable(u, provable_facts(prover));
        const Model& unique = logical.models.front();
        if (provable == unique) {
            complete.detail = "provable positive formulae equal the unique model (" +
                              std::to_string(unique.size()) + " facts)";
        } else {
            complete.holds = false;
            for (const auto& f : unique.facts())
                if (!provable.contains(f)) {
                    complete.detail = "model fact without proof: " + u.render(f);
                    break;
                }
            for (const auto& f : provable.facts())
                if (complete.detail.empty() && !unique.contains(f))
                    complete.detail = "proved fact outside the model: " + u.render(f);
        }
    }
    out.push_back(std::move(complete));

    PropertyResult consistency{"no-formula-provable-in-both-polarities", true, ""};
    std::size_t checked = 0;
    auto both = [&](const Formula& pos) {
        ++checked;
        return prover.prove(pos) && prover.prove(pos.negated());
    };
    for (const auto& ob : constructive.obligations) {
        if ((ob.positive && ob.negative) || (ob.transition_positive && ob.transition_negative)) {
            consistency.holds = false;
            consistency.detail = "obligation proved both ways: " +
                                 u.render(ob.positive ? ob.positive->root : ob.transition_positive->root);
        }
    }
    if (sweep && consistency.holds) {
        for (const auto& f : u.pos_space())
            if (both(f)) {
                consistency.holds = false;
                consistency.detail = "both polarities proved: " + u.render(f);
                break;
            }
    }
    if (consistency.holds)
        consistency.detail = sweep ? "swept " + std::to_string(checked) + " formulae"
                                   : "obligations only (space too large for a sweep)";
    out.push_back(std::move(consistency));

    PropertyResult trees{"obligation-proofs-verify", true, ""};
    std::size_t verified = 0;
    for (const auto& ob : constructive.obligations) {
        for (const auto& p : {ob.positive, ob.negative, ob.transition_positive, ob.transition_negative}) {
            if (!p || !trees.holds) continue;
            if (auto err = verify_proof(u, *p); !err.empty()) {
                trees.holds = false;
                trees.detail = err;
            }
            ++verified;
        }
    }
    if (trees.holds) trees.detail = std::to_string(verified) + " proof trees verified";
    out.push_back(std::move(trees));
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void render_text(const Universe& u, const ProofTree& node, std::size_t indent, std::string& out) {
    const std::string pad(indent, ' ');
    for (const auto& c : node.children) render_text(u, *c, indent + 2, out);
    if (node.rule) {
        out += pad + "─── (" + std::string(to_string(*node.rule)) + ")\n";
    } else if (node.refutations.empty()) {
        // the negative rendering minus its "not " prefix
        out += pad + "─── (no rule concludes " + u.render(node.root).substr(4) + ")\n";
    } else {
        out += pad + "─── (refutation)\n";
        for (const auto& r : node.refutations)
            out += pad + "  " + std::string(to_string(r.instance.rule)) + " blocked at " +
                   u.render(r.instance.premises[r.premise]) + " by #" + std::to_string(r.child) +
                   "\n";
    }
    out += pad + u.render(node.root) + "\n";
}

nlohmann::json render_json(const Universe& u, const ProofTree& node) {
    nlohmann::json j;
    j["root"] = u.render(node.root);
    j["rule"] = node.rule ? nlohmann::json(std::string(to_string(*node.rule))) : nlohmann::json(nullptr);
    j["refutations"] = nlohmann::json::array();
    for (const auto& r : node.refutations)
        j["refutations"].push_back({{"rule", std::string(to_string(r.instance.rule))},
                                    {"instance", render_instance(u, r.instance)},
                                    {"premise", r.premise},
                                    {"child", r.child}});
    j["children"] = nlohmann::json::array();
    for (const auto& c : node.children) j["children"].push_back(render_json(u, *c));
    return j;
}

void collect_rules(const ProofTree& node, std::vector<RuleName>& out) {
    if (node.rule) out.push_back(*node.rule);
    for (const auto& c : node.children) collect_rules(*c, out);
}

}  // namespace

std::string render_proof(const Universe& u, const ProofTree& tree, ProofFormat format) {
    if (format == ProofFormat::json) return render_json(u, tree).dump();
    std::string out;
    render_text(u, tree, 0, out);
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::vector<RuleName> rules_used(const ProofTree& tree) {
    std::vector<RuleName> out;
    collect_rules(tree, out);
    return out;
}

}  // namespace estcause
