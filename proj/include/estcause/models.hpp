#pragma once

// Supported models of the grounded rule set and the logical classification
// (reactivity, determinism, coherency) they induce.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "estcause/formulas.hpp"
#include "estcause/grounding.hpp"

namespace estcause {

enum class LogicalStatus : std::uint8_t { non_reactive, non_deterministic, coherent };

std::string_view to_string(LogicalStatus status);

/// A finite set of positive formulae, ordered by rendered form.
class Model {
public:
    Model() = default;
    Model(const Universe& u, std::vector<Formula> facts);

    const std::vector<Formula>& facts() const noexcept { return facts_; }
    std::size_t size() const noexcept { return facts_.size(); }
    bool contains(const Formula& f) const;
    FactSet as_set() const { return FactSet(facts_); }
    std::vector<std::string> rendered(const Universe& u) const;

    friend bool operator==(const Model&, const Model&) = default;

private:
    std::vector<Formula> facts_;
};

/// The terms P whose formulae must be closed under derivability.
struct TermScope {
    std::vector<bool> member;
    static TermScope all(const Universe& u);
    bool contains(TermId t) const { return member.at(t.idx()); }
};

/// The labels L', selected by input evaluation (every kind and signal).
struct LabelScope {
    std::vector<bool> member;
    static LabelScope all(const Universe& u);
    static LabelScope only(const Universe& u, EvalIdx e);
    bool contains(EvalIdx e) const { return member.at(e.idx()); }
};

/// (1) every fact of T is concluded by an instance whose premises T satisfies;
/// (2) every formula with source in P and label in L concluded by such an
/// instance is in T.
bool is_supported_model(const Universe& u, const Model& t, const TermScope& p, const LabelScope& l);

struct ModelSearchOptions {
    /// Maximum nesting of unforced branching decisions per evaluation.
    std::size_t max_choice_points = 24;
    /// Maximum number of whole-program models materialised as witnesses.
    std::size_t witness_cap = 8;
};

/// All supported models restricted to one input evaluation.
std::vector<Model> enumerate_models_for_evaluation(const Universe& u, EvalIdx e,
                                                   const ModelSearchOptions& options = {});

/// All supported models for every term of the universe and every label: the
/// cross product of the per-evaluation models. Throws ResourceLimit when more
/// than 4096 models would be materialised.
std::vector<Model> enumerate_supported_models(const Universe& u,
                                              const ModelSearchOptions& options = {});

struct EvaluationVerdict {
    EvalIdx eval;
    LogicalStatus status = LogicalStatus::non_reactive;
    std::uint64_t model_count = 0;
    std::vector<Model> models;
};

struct LogicalVerdict {
    LogicalStatus status = LogicalStatus::non_reactive;
    /// Exact count, saturating at UINT64_MAX.
    std::uint64_t model_count = 0;
    /// The unique model, or up to witness_cap witnesses.
    std::vector<Model> models;
    std::vector<EvaluationVerdict> per_evaluation;
};

LogicalVerdict classify_logical(const Universe& u, const ModelSearchOptions& options = {});

}  // namespace estcause
