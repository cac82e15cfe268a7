#pragma once

// Supported proofs for positive and negative formulae, the constructiveness
// classification built on them, and cross-checks against the model semantics.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "estcause/formulas.hpp"
#include "estcause/grounding.hpp"
#include "estcause/models.hpp"

namespace estcause {

struct ProofTree;
using ProofPtr = std::shared_ptr<const ProofTree>;

/// How a negative node disposes of one contradicting rule instance: the
/// premise at `premise` is contradicted by the root of children[child].
struct Refutation {
    RuleInstance instance;
    std::size_t premise = 0;
    std::size_t child = 0;
};

/// Positive nodes: `rule` is set and children prove the instance's premises
/// in order. Negative nodes: one refutation per contradicting instance;
/// children are shared between refutations.
struct ProofTree {
    Formula root;
    std::optional<RuleName> rule;
    std::vector<Refutation> refutations;
    std::vector<ProofPtr> children;
};

/// Goal-directed supported-proof search. A goal never recurs on its own
/// ancestor path; successes are memoised unconditionally, failures only
/// when they did not depend on an ancestor being excluded.
class Prover {
public:
    explicit Prover(const Universe& u) : u_(u) {}

    /// nullptr when the goal has no supported proof.
    ProofPtr prove(const Formula& goal);
    /// Same, with `path` treated as ancestors that may not recur.
    ProofPtr prove(const Formula& goal, std::span<const Formula> path);
    /// First target in universe order with a proof of `source --x--> target`.
    ProofPtr prove_some_transition(EvalIdx e, TermId source, SignalIdx x);

    const Universe& universe() const noexcept { return u_; }

private:
    static constexpr std::size_t kNoCut = static_cast<std::size_t>(-1);
    struct Outcome {
        ProofPtr proof;
        std::size_t low = kNoCut;  ///< shallowest ancestor the failure depended on
    };

    Outcome search(const Formula& goal);
    const std::vector<RuleInstance>& instances(const Formula& goal);

    const Universe& u_;
    std::unordered_map<Formula, ProofPtr, FormulaHash> proved_;
    std::unordered_set<Formula, FormulaHash> refuted_;
    std::unordered_map<Formula, std::size_t, FormulaHash> on_path_;
    std::unordered_map<Formula, std::vector<RuleInstance>, FormulaHash> instances_;
};

/// Re-checks every node against the rule instances of the universe and
/// confirms the proof graph is acyclic. Returns an empty string when valid,
/// otherwise a description of the first defect.
std::string verify_proof(const Universe& u, const ProofTree& tree);

enum class Resolution : std::uint8_t { proved_positive, proved_negative, unprovable };

std::string_view to_string(Resolution r);

/// One constructiveness obligation for one input evaluation: either a signal
/// (emission together with a transition) or termination (signal empty).
struct Obligation {
    EvalIdx eval;
    std::optional<SignalIdx> signal;
    Resolution resolution = Resolution::unprovable;
    ProofPtr positive;             ///< emits x, or term
    ProofPtr negative;             ///< not emits x, or not term
    ProofPtr transition_positive;  ///< signal only: some p --x--> p'
    ProofPtr transition_negative;  ///< signal only: not p --x-->
    std::optional<TermId> target;  ///< target of transition_positive
    std::string diagnostic;
};

struct ConstructiveVerdict {
    bool constructive = false;
    std::vector<Obligation> obligations;
};

ConstructiveVerdict classify_constructive(Prover& prover);

struct PropertyResult {
    std::string name;
    bool holds = true;
    std::string detail;
};

class PropertyViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TheoremOptions {
    /// Exhaustive sweeps over the formula space run when it has at most this
    /// many positive formulae per evaluation.
    std::size_t sweep_limit = 20000;
};

/// Checks that constructiveness implies a unique supported model equal to
/// the positively provable formulae, that no formula is provable in both
/// polarities, and that every obligation proof verifies.
std::vector<PropertyResult> check_theorems(Prover& prover, const LogicalVerdict& logical,
                                           const ConstructiveVerdict& constructive,
                                           const TheoremOptions& options = {});

/// All positive formulae of the space with a supported proof.
std::vector<Formula> provable_facts(Prover& prover);

enum class ProofFormat : std::uint8_t { text, json };

std::string render_proof(const Universe& u, const ProofTree& tree, ProofFormat format);

/// Rule names of the positive nodes, pre-order.
std::vector<RuleName> rules_used(const ProofTree& tree);

}  // namespace estcause
