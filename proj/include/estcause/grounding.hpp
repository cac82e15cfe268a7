#pragma once

// Finite grounding of the deduction rules: the closed-term universe of one
// program, its positive formula space, and every ground rule instance
// concluding a given formula.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "estcause/formulas.hpp"
#include "estcause/syntax.hpp"

namespace estcause {

enum class RuleName : std::uint8_t {
    // emission
    e0, s0, s1, s2, p0, p1, f0, f1, f2, f3, en0,
    // termination and transition
    nil, em,
    seq0, seq1, seq2, seq3, seq4,
    par0, par1, par2, par3, par4,
    if0, if1, if2, if3, if4, if5, if6, if7,
    enc0, enc1,
    // single emission rule replacing e0..en0 in the collapsed mode
    emit_collapsed,
};

inline constexpr std::size_t kRuleCount = static_cast<std::size_t>(RuleName::emit_collapsed) + 1;

std::string_view to_string(RuleName rule);
std::optional<RuleName> rule_from_string(std::string_view name);

/// Which rule set defines the emission predicate.
enum class EmissionRules : std::uint8_t {
    standard,   ///< e0, s0-s2, p0-p1, f0-f3, en0
    collapsed,  ///< `p --x--> p'` implies `p emits x`
};

std::string_view to_string(EmissionRules mode);

class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RuleInstance {
    RuleName rule = RuleName::nil;
    std::vector<Formula> premises;
    Formula conclusion;

    friend bool operator==(const RuleInstance&, const RuleInstance&) = default;
};

struct GroundingOptions {
    EmissionRules emission = EmissionRules::standard;
    /// Upper bound on the size of the positive formula space (all evaluations).
    std::size_t max_space = 200000;
    /// Restricts the analysis to a single input evaluation.
    std::optional<InputEvaluation> only_evaluation;
};

class Universe {
public:
    /// Structure of one term, with children and derived terms already interned.
    struct Shape {
        Program::Tag tag = Program::Tag::nil;
        TermId a;               ///< then / first / left / body
        TermId b;               ///< else / second / right
        SignalIdx signal;       ///< emitted, tested (non-input) or bound signal
        std::string input;      ///< tested input, when the test is on an input
        SignalIdx fresh;        ///< local only: the fresh name replacing the bound one
        TermId renamed_body;    ///< local only: body with the bound signal renamed fresh
    };

    const AnalysisContext& context() const noexcept { return ctx_; }
    const SymbolTable& symbols() const noexcept { return symbols_; }
    EmissionRules emission_rules() const noexcept { return emission_; }

    TermId root() const noexcept { return root_; }
    std::size_t term_count() const noexcept { return shapes_.size(); }
    std::size_t signal_count() const noexcept { return symbols_.signal_count(); }
    std::size_t evaluation_count() const noexcept { return symbols_.evaluation_count(); }
    const Shape& shape(TermId t) const { return shapes_.at(t.idx()); }
    const Program& term(TermId t) const { return symbols_.term(t); }
    /// Terms of subterms(context); the rest are residuals and renamed bodies.
    bool is_context_subterm(TermId t) const { return context_subterm_.at(t.idx()); }
    /// The program's own emittable signals, excluding fresh renamings.
    const std::vector<SignalIdx>& program_signals() const noexcept { return program_signals_; }

    /// Size of the positive formula space for one input evaluation.
    std::size_t facts_per_evaluation() const noexcept;
    std::size_t dense_index(const Formula& positive) const;
    Formula fact(EvalIdx e, std::size_t dense) const;
    std::vector<Formula> pos_space() const;
    std::vector<Formula> pos_space(EvalIdx e) const;

    /// Greatest self-supporting subset of the formula space (negative premises ignored).
    const std::vector<Formula>& supportable() const noexcept { return supportable_; }
    bool is_supportable(const Formula& f) const;

    std::string render(const Formula& f) const { return estcause::render(symbols_, f); }

private:
    friend Universe ground_space(const AnalysisContext&, const GroundingOptions&);

    AnalysisContext ctx_;
    SymbolTable symbols_;
    EmissionRules emission_ = EmissionRules::standard;
    TermId root_;
    std::vector<Shape> shapes_;
    std::vector<bool> context_subterm_;
    std::vector<SignalIdx> program_signals_;
    std::vector<Formula> supportable_;
    std::vector<std::vector<bool>> supportable_mask_;
};

/// Subterms of the context closed under transition-target formation and under
/// the fresh renaming of local bodies, in discovery order.
std::vector<Program> residual_universe(const AnalysisContext& ctx);

/// Builds the universe and its supportable space. Throws ResourceLimit when
/// the formula space exceeds options.max_space.
Universe ground_space(const AnalysisContext& ctx, const GroundingOptions& options = {});

/// Every ground instance of every active rule whose conclusion equals f
/// (f must be positive). Premise-only variables range over the universe.
std::vector<RuleInstance> instances_concluding(const Universe& u, const Formula& f);

/// Every ground instance whose conclusion contradicts the negative formula
/// `neg`, i.e. concludes some member of its group.
std::vector<RuleInstance> instances_contradicting(const Universe& u, const Formula& neg);

/// Recomputes the greatest self-supporting subset of u.pos_space().
std::vector<Formula> supportable_space(const Universe& u);

/// `rule: premise, premise ⊢ conclusion`.
std::string render_instance(const Universe& u, const RuleInstance& ri);

}  // namespace estcause
