#include "estcause/models.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <utility>

namespace estcause {

std::string_view to_string(LogicalStatus status) {
    switch (status) {
        case LogicalStatus::non_reactive: return "NonReactive";
        case LogicalStatus::non_deterministic: return "NonDeterministic";
        case LogicalStatus::coherent: return "Coherent";
    }
    return "?";
}

Model::Model(const Universe& u, std::vector<Formula> facts) {
    std::sort(facts.begin(), facts.end());
    facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
    std::vector<std::pair<std::string, Formula>> keyed;
    keyed.reserve(facts.size());
    for (const auto& f : facts) {
        if (!f.positive()) throw std::invalid_argument("models hold positive formulae only");
        keyed.emplace_back(u.render(f), f);
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, f] : keyed) facts_.push_back(f);
}

bool Model::contains(const Formula& f) const {
    return std::find(facts_.begin(), facts_.end(), f) != facts_.end();
}

std::vector<std::string> Model::rendered(const Universe& u) const {
    std::vector<std::string> out;
    out.reserve(facts_.size());
    for (const auto& f : facts_) out.push_back(u.render(f));
    return out;
}

TermScope TermScope::all(const Universe& u) { return {std::vector<bool>(u.term_count(), true)}; }

LabelScope LabelScope::all(const Universe& u) {
    return {std::vector<bool>(u.evaluation_count(), true)};
}

LabelScope LabelScope::only(const Universe& u, EvalIdx e) {
    LabelScope l{std::vector<bool>(u.evaluation_count(), false)};
    l.member.at(e.idx()) = true;
    return l;
}

bool is_supported_model(const Universe& u, const Model& t, const TermScope& p, const LabelScope& l) {
    const FactSet facts = t.as_set();
    auto derivable = [&](const Formula& f) {
        for (const auto& ri : instances_concluding(u, f))
            if (consistent(facts, ri.premises)) return true;
        return false;
    };
    for (const auto& f : t.facts())
        if (!derivable(f)) return false;
    for (std::size_t ev = 0; ev < u.evaluation_count(); ++ev) {
        const EvalIdx e{static_cast<std::uint32_t>(ev)};
        if (!l.contains(e)) continue;
        for (std::size_t d = 0; d < u.facts_per_evaluation(); ++d) {
            const Formula f = u.fact(e, d);
            if (!p.contains(f.source) || facts.contains(f)) continue;
            if (derivable(f)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Per-evaluation search: backtracking over the supportable facts with
// propagation of both conditions.

namespace {

class EvaluationSearch {
public:
    EvaluationSearch(const Universe& u, EvalIdx e, const ModelSearchOptions& options)
        : u_(u), e_(e), options_(options) {
        std::map<std::size_t, std::size_t> var_of;  // dense index -> variable
        for (const auto& f : u.supportable())
            if (f.eval == e) {
                var_of.emplace(u.dense_index(f), facts_.size());
                facts_.push_back(f);
            }
        // negative premise groups, keyed by the negated formula
        std::map<Formula, std::size_t> group_of;
        auto group_id = [&](const Formula& neg) {
            auto [it, inserted] = group_of.emplace(neg, groups_.size());
            if (inserted) {
                std::vector<std::size_t> members;
                for (std::size_t v = 0; v < facts_.size(); ++v)
                    if (facts_[v].same_group(neg)) members.push_back(v);
                groups_.push_back(std::move(members));
            }
            return it->second;
        };
        instances_.resize(facts_.size());
        for (std::size_t v = 0; v < facts_.size(); ++v) {
            for (const auto& ri : instances_concluding(u, facts_[v])) {
                Instance inst;
                bool possible = true;
                for (const auto& prem : ri.premises) {
                    if (prem.positive()) {
                        auto it = var_of.find(u.dense_index(prem));
                        if (it == var_of.end()) {
                            possible = false;
                            break;
                        }
                        inst.positive.push_back(it->second);
                    } else {
                        inst.negative.push_back(group_id(prem));
                    }
                }
                if (possible) instances_[v].push_back(std::move(inst));
            }
        }
    }

    std::vector<Model> run() {
        std::vector<Value> values(facts_.size(), Value::unknown);
        search(values, 0);
        return std::move(models_);
    }

private:
    enum class Value : std::uint8_t { unknown, in, out };
    struct Instance {
        std::vector<std::size_t> positive;
        std::vector<std::size_t> negative;
    };
    enum class InstanceState : std::uint8_t { satisfied, falsified, open };

    InstanceState state(const Instance& inst, const std::vector<Value>& values) const {
        bool open = false;
        for (std::size_t v : inst.positive) {
            if (values[v] == Value::out) return InstanceState::falsified;
            if (values[v] == Value::unknown) open = true;
        }
        for (std::size_t g : inst.negative)
            for (std::size_t v : groups_[g]) {
                if (values[v] == Value::in) return InstanceState::falsified;
                if (values[v] == Value::unknown) open = true;
            }
        return open ? InstanceState::open : InstanceState::satisfied;
    }

    /// Returns false on conflict.
    bool propagate(std::vector<Value>& values) const {
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t v = 0; v < facts_.size(); ++v) {
                bool any_satisfied = false, all_falsified = true;
                for (const auto& inst : instances_[v]) {
                    InstanceState s = state(inst, values);
                    if (s == InstanceState::satisfied) any_satisfied = true;
                    if (s != InstanceState::falsified) all_falsified = false;
                }
                if (any_satisfied) {
                    if (values[v] == Value::out) return false;
                    if (values[v] == Value::unknown) {
                        values[v] = Value::in;
                        changed = true;
                    }
                } else if (all_falsified) {
                    if (values[v] == Value::in) return false;
                    if (values[v] == Value::unknown) {
                        values[v] = Value::out;
                        changed = true;
                    }
                }
            }
        }
        return true;
    }

    void search(std::vector<Value> values, std::size_t depth) {
        if (!propagate(values)) return;
        auto it = std::find(values.begin(), values.end(), Value::unknown);
        if (it == values.end()) {
            std::vector<Formula> chosen;
            for (std::size_t v = 0; v < facts_.size(); ++v)
                if (values[v] == Value::in) chosen.push_back(facts_[v]);
            models_.emplace_back(u_, std::move(chosen));
            return;
        }
        if (depth >= options_.max_choice_points)
            throw ResourceLimit("model search for evaluation " +
                                u_.symbols().evaluation(e_).render() + " needs more than " +
                                std::to_string(options_.max_choice_points) + " choice points");
        const auto v = static_cast<std::size_t>(it - values.begin());
        for (Value choice : {Value::in, Value::out}) {
            std::vector<Value> next = values;
            next[v] = choice;
            search(std::move(next), depth + 1);
        }
    }

    const Universe& u_;
    EvalIdx e_;
    ModelSearchOptions options_;
    std::vector<Formula> facts_;
    std::vector<std::vector<Instance>> instances_;
    std::vector<std::vector<std::size_t>> groups_;
    std::vector<Model> models_;
};

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

LogicalStatus status_for(std::uint64_t count) {
    if (count == 0) return LogicalStatus::non_reactive;
    return count == 1 ? LogicalStatus::coherent : LogicalStatus::non_deterministic;
}

/// Up to `cap` unions of one model per evaluation, in odometer order.
std::vector<Model> product(const Universe& u, const std::vector<std::vector<Model>>& parts,
                           std::size_t cap) {
    std::vector<Model> out;
    if (parts.empty()) return {Model(u, {})};
    for (const auto& p : parts)
        if (p.empty()) return out;
    std::vector<std::size_t> pick(parts.size(), 0);
    while (out.size() < cap) {
        std::vector<Formula> facts;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto& f = parts[i][pick[i]].facts();
            facts.insert(facts.end(), f.begin(), f.end());
        }
        out.emplace_back(u, std::move(facts));
        std::size_t i = parts.size();
        while (i > 0) {
            --i;
            if (++pick[i] < parts[i].size()) break;
            pick[i] = 0;
            if (i == 0) return out;
        }
    }
    return out;
}

}  // namespace

std::vector<Model> enumerate_models_for_evaluation(const Universe& u, EvalIdx e,
                                                   const ModelSearchOptions& options) {
    auto models = EvaluationSearch(u, e, options).run();
    std::sort(models.begin(), models.end(), [&](const Model& a, const Model& b) {
        return a.rendered(u) < b.rendered(u);
    });
    return models;
}

std::vector<Model> enumerate_supported_models(const Universe& u, const ModelSearchOptions& options) {
    constexpr std::size_t kMaterialiseLimit = 4096;
    std::vector<std::vector<Model>> parts;
    std::uint64_t total = 1;
    for (std::size_t ev = 0; ev < u.evaluation_count(); ++ev) {
        parts.push_back(
            enumerate_models_for_evaluation(u, EvalIdx{static_cast<std::uint32_t>(ev)}, options));
        total = saturating_mul(total, parts.back().size());
    }
    if (total > kMaterialiseLimit)
        throw ResourceLimit(std::to_string(total) + " supported models exceed the limit of " +
                            std::to_string(kMaterialiseLimit));
    return product(u, parts, kMaterialiseLimit);
}

LogicalVerdict classify_logical(const Universe& u, const ModelSearchOptions& options) {
    LogicalVerdict verdict;
    std::vector<std::vector<Model>> parts;
    std::uint64_t total = 1;
    for (std::size_t ev = 0; ev < u.evaluation_count(); ++ev) {
        const EvalIdx e{static_cast<std::uint32_t>(ev)};
        EvaluationVerdict part;
        part.eval = e;
        part.models = enumerate_models_for_evaluation(u, e, options);
        part.model_count = part.models.size();
        part.status = status_for(part.model_count);
        total = saturating_mul(total, part.model_count);
        parts.push_back(part.models);
        verdict.per_evaluation.push_back(std::move(part));
    }
    verdict.model_count = total;
    verdict.status = status_for(total);
    verdict.models = product(u, parts, options.witness_cap);
    return verdict;
}

}  // namespace estcause
