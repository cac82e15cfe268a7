#pragma once

// Shared helpers for the test binaries: corpus access, a random program
// generator and two brute-force oracles.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "estcause/grounding.hpp"
#include "estcause/models.hpp"
#include "estcause/proofs.hpp"
#include "estcause/syntax.hpp"

namespace testsupport {

using namespace estcause;

inline std::string corpus_path(const std::string& name) { return std::string(ESTCAUSE_CORPUS_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ParsedProgram corpus_program(const std::string& name) { return parse(read_text(corpus_path(name + ".est"))); }

inline Universe corpus_universe(const std::string& name, EmissionRules mode = EmissionRules::standard) {
    ParsedProgram pp = corpus_program(name);
    GroundingOptions g;
    g.emission = mode;
    return ground_space(AnalysisContext{pp.program, pp.env}, g);
}

inline Universe universe_of(const std::string& source, EmissionRules mode = EmissionRules::standard) {
    ParsedProgram pp = parse(source);
    GroundingOptions g;
    g.emission = mode;
    return ground_space(AnalysisContext{pp.program, pp.env}, g);
}

inline const std::vector<std::string>& corpus_names() {
    static const std::vector<std::string> names{"L1", "P0", "P1", "P2", "P3", "P4", "P5", "P6"};
    return names;
}

/// TermId of a program given in concrete syntax; signals keep the kinds of env.
inline TermId term_of(const Universe& u, const std::string& text) {
    std::string header;
    for (const auto& s : u.context().env.inputs()) header += "input " + s.name + ";\n";
    for (const auto& s : u.context().env.outputs()) header += "output " + s.name + ";\n";
    auto found = u.symbols().find(parse(header + text).program);
    if (!found) throw std::runtime_error("term not in universe: " + text);
    return *found;
}

inline SignalIdx signal_of(const Universe& u, const std::string& name) { return *u.symbols().find_signal(name); }

inline EvalIdx eval0() { return EvalIdx{0}; }

inline std::set<std::string> rendered_set(const Universe& u, const std::vector<Formula>& facts) {
    std::set<std::string> out;
    for (const auto& f : facts) out.insert(u.render(f));
    return out;
}

// ---------------------------------------------------------------------------
// Random programs

struct ProgramGen {
    std::mt19937_64 rng;
    std::vector<SignalId> inputs{{"i", SignalKind::input}, {"j", SignalKind::input}};
    std::vector<SignalId> outputs{{"o", SignalKind::output}, {"p", SignalKind::output}};
    std::vector<SignalId> locals{{"s", SignalKind::local}, {"t", SignalKind::local}, {"s'", SignalKind::local}};
    int local_weight = 1;

    explicit ProgramGen(std::uint64_t seed) : rng(seed) {}

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

    SignalId emittable() {
        const std::size_t n = outputs.size() + locals.size();
        const std::size_t k = pick(n);
        return k < outputs.size() ? outputs[k] : locals[k - outputs.size()];
    }
    SignalId any() {
        const std::size_t n = inputs.size() + outputs.size() + locals.size();
        const std::size_t k = pick(n);
        if (k < inputs.size()) return inputs[k];
        if (k < inputs.size() + outputs.size()) return outputs[k - inputs.size()];
        return locals[k - inputs.size() - outputs.size()];
    }

    Program gen(int depth) {
        const int leaf = depth <= 0 ? 2 : 0;
        const std::size_t choice = leaf ? pick(2) : pick(6 + static_cast<std::size_t>(local_weight));
        switch (choice) {
            case 0: return Program::nil();
            case 1: return Program::emit(emittable());
            case 2:
            case 3: return Program::present(any(), gen(depth - 1), gen(depth - 1));
            case 4: return Program::seq(gen(depth - 1), gen(depth - 1));
            case 5: return Program::par(gen(depth - 1), gen(depth - 1));
            default: return Program::local(locals[pick(locals.size())], gen(depth - 1));
        }
    }
};

/// A small program over one input, one output and one local, with per-evaluation
/// formula space at most `limit`. Rejection sampling.
inline std::pair<Program, SignalEnv> small_program(ProgramGen& g, std::size_t limit) {
    for (;;) {
        Program p = g.gen(static_cast<int>(g.pick(4)));
        SignalEnv env = env_for(p);
        const auto n = residual_universe(AnalysisContext{p, env}).size();
        // signals: emittable plus one fresh name per local binder
        std::size_t k = env.emittable().size();
        for (const auto& t : subterms(p))
            if (t.tag() == Program::Tag::local) ++k;
        if (n * k + n + n * k * n > limit * 4) continue;
        Universe u = ground_space(AnalysisContext{p, env});
        if (u.facts_per_evaluation() <= limit) return {p, env};
    }
}

/// `count` small programs, distinct while the generator keeps finding new ones.
inline std::vector<std::pair<Program, SignalEnv>> small_programs(ProgramGen& g, std::size_t count, std::size_t limit) {
    std::vector<std::pair<Program, SignalEnv>> out;
    std::set<std::string> seen;
    while (out.size() < count) {
        auto candidate = small_program(g, limit);
        for (int tries = 0; tries < 200 && seen.count(pretty(candidate.first)); ++tries)
            candidate = small_program(g, limit);
        seen.insert(pretty(candidate.first));
        out.push_back(std::move(candidate));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Oracle 1: supported models by exhaustive enumeration of every subset of the
// formula space of one evaluation (conditions checked with bitmasks).

struct MaskInstance {
    std::uint32_t pos = 0;  ///< facts that must be in T
    std::uint32_t neg = 0;  ///< facts that must not be in T
};

inline std::vector<std::vector<MaskInstance>> mask_instances(const Universe& u, EvalIdx e) {
    const auto space = u.pos_space(e);
    std::map<Formula, std::size_t> index;
    for (std::size_t i = 0; i < space.size(); ++i) index[space[i]] = i;
    std::vector<std::vector<MaskInstance>> out(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        for (const auto& ri : instances_concluding(u, space[i])) {
            MaskInstance m;
            for (const auto& prem : ri.premises) {
                if (prem.positive()) {
                    m.pos |= 1u << index.at(prem);
                } else {
                    for (std::size_t j = 0; j < space.size(); ++j)
                        if (space[j].same_group(prem)) m.neg |= 1u << j;
                }
            }
            out[i].push_back(m);
        }
    }
    return out;
}

inline std::vector<std::set<std::string>> naive_models(const Universe& u, EvalIdx e) {
    const auto space = u.pos_space(e);
    if (space.size() > 20) throw std::runtime_error("space too large for the naive oracle");
    const auto inst = mask_instances(u, e);
    std::vector<std::set<std::string>> out;
    const std::uint32_t total = 1u << space.size();
    for (std::uint32_t t = 0; t < total; ++t) {
        bool model = true;
        for (std::size_t i = 0; i < space.size() && model; ++i) {
            bool derivable = false;
            for (const auto& m : inst[i])
                if ((m.pos & ~t) == 0 && (m.neg & t) == 0) {
                    derivable = true;
                    break;
                }
            model = derivable == (((t >> i) & 1u) != 0);
        }
        if (!model) continue;
        std::set<std::string> facts;
        for (std::size_t i = 0; i < space.size(); ++i)
            if ((t >> i) & 1u) facts.insert(u.render(space[i]));
        out.push_back(std::move(facts));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Oracle 2: provability by iterating the one-step proof operator from the
// empty set, `depth` times. After d rounds exactly the formulae with a proof
// tree of height at most d are marked.

struct ProvableSets {
    std::vector<Formula> space;          ///< positive formulae of the evaluation
    std::vector<bool> positive;          ///< per space index
    std::vector<Formula> negatives;      ///< one per group
    std::vector<bool> negative;          ///< per group
    bool reached_fixpoint = false;

    bool proves(const Formula& f) const {
        if (f.positive()) {
            for (std::size_t i = 0; i < space.size(); ++i)
                if (space[i] == f) return positive[i];
        } else {
            for (std::size_t g = 0; g < negatives.size(); ++g)
                if (negatives[g] == f) return negative[g];
        }
        throw std::runtime_error("formula outside the space");
    }
};

inline ProvableSets bounded_provability(const Universe& u, EvalIdx e, std::size_t depth) {
    ProvableSets s;
    s.space = u.pos_space(e);
    std::map<Formula, std::size_t> pos_index, group_index;
    for (std::size_t i = 0; i < s.space.size(); ++i) {
        pos_index[s.space[i]] = i;
        const Formula neg = s.space[i].negated();
        if (group_index.emplace(neg, s.negatives.size()).second) s.negatives.push_back(neg);
    }
    std::vector<std::vector<std::size_t>> members(s.negatives.size());
    for (std::size_t i = 0; i < s.space.size(); ++i) members[group_index.at(s.space[i].negated())].push_back(i);

    // premises as (is_positive, index into space or groups)
    using Prem = std::pair<bool, std::size_t>;
    auto encode = [&](const RuleInstance& ri) {
        std::vector<Prem> out;
        for (const auto& p : ri.premises)
            out.emplace_back(p.positive(), p.positive() ? pos_index.at(p) : group_index.at(p));
        return out;
    };
    std::vector<std::vector<std::vector<Prem>>> by_fact(s.space.size());
    std::vector<std::vector<std::vector<Prem>>> by_group(s.negatives.size());
    for (std::size_t i = 0; i < s.space.size(); ++i)
        for (const auto& ri : instances_concluding(u, s.space[i])) {
            by_fact[i].push_back(encode(ri));
            by_group[group_index.at(s.space[i].negated())].push_back(by_fact[i].back());
        }

    s.positive.assign(s.space.size(), false);
    s.negative.assign(s.negatives.size(), false);
    for (std::size_t round = 0; round < depth; ++round) {
        auto holds = [&](const Prem& p) -> bool { return p.first ? s.positive[p.second] : s.negative[p.second]; };
        auto contradiction_holds = [&](const Prem& p) -> bool {
            if (p.first) return s.negative[group_index.at(s.space[p.second].negated())];
            return std::any_of(members[p.second].begin(), members[p.second].end(),
                               [&](std::size_t m) { return bool(s.positive[m]); });
        };
        std::vector<bool> np = s.positive, nn = s.negative;
        for (std::size_t i = 0; i < s.space.size(); ++i)
            np[i] = std::any_of(by_fact[i].begin(), by_fact[i].end(), [&](const auto& inst) {
                return std::all_of(inst.begin(), inst.end(), holds);
            });
        for (std::size_t g = 0; g < s.negatives.size(); ++g)
            nn[g] = std::all_of(by_group[g].begin(), by_group[g].end(), [&](const auto& inst) {
                return std::any_of(inst.begin(), inst.end(), contradiction_holds);
            });
        s.reached_fixpoint = np == s.positive && nn == s.negative;
        s.positive = std::move(np);
        s.negative = std::move(nn);
    }
    return s;
}

}  // namespace testsupport
