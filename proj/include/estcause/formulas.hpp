#pragma once

// Ground formulae over a fixed analysis context: emission and termination
// predicates and labelled transitions, in positive and negative form.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "estcause/syntax.hpp"

namespace estcause {

/// Dense index into one of the symbol tables below.
template <class Tag>
struct Index {
    static constexpr std::uint32_t kNone = 0xffffffffU;
    std::uint32_t value = kNone;

    constexpr bool valid() const noexcept { return value != kNone; }
    constexpr std::size_t idx() const noexcept { return value; }
    friend constexpr auto operator<=>(Index, Index) = default;
};

using TermId = Index<struct TermTag>;
using SignalIdx = Index<struct SignalTag>;
using EvalIdx = Index<struct EvalTag>;

enum class Presence : std::uint8_t { present, absent };

/// Total assignment of a presence status to every declared input.
class InputEvaluation {
public:
    InputEvaluation() = default;
    /// Entries are sorted by input name; duplicate names throw std::invalid_argument.
    explicit InputEvaluation(std::vector<std::pair<std::string, Presence>> entries);

    std::optional<Presence> status(std::string_view input) const;
    const std::vector<std::pair<std::string, Presence>>& entries() const noexcept {
        return entries_;
    }
    bool empty() const noexcept { return entries_.empty(); }

    /// `∅` or `{i+,j-}`.
    std::string render() const;

    friend bool operator==(const InputEvaluation&, const InputEvaluation&) = default;
    friend auto operator<=>(const InputEvaluation&, const InputEvaluation&) = default;

private:
    std::vector<std::pair<std::string, Presence>> entries_;
};

/// Every total evaluation of env's inputs, ordered lexicographically by input
/// name with present before absent.
std::vector<InputEvaluation> all_input_evaluations(const SignalEnv& env);

/// Parses `i=+,j=-` into an evaluation; every input of env must be assigned.
InputEvaluation parse_input_evaluation(std::string_view text, const SignalEnv& env);

/// The whole analysed program; every presence test on a non-input signal
/// consults whether this term emits it.
struct AnalysisContext {
    Program context;
    SignalEnv env;
};

enum class Polarity : std::uint8_t { positive, negative };
enum class FormulaKind : std::uint8_t { emits, terminates, trans };

std::string_view to_string(FormulaKind kind);

/// Ground formula whose terms, signals and evaluation are indices into a
/// SymbolTable. Predicates carry the dummy target `nothing`; negative
/// formulae carry no target.
struct Formula {
    Polarity polarity = Polarity::positive;
    FormulaKind kind = FormulaKind::terminates;
    EvalIdx eval;
    TermId source;
    SignalIdx signal;
    TermId target;

    static Formula emits(EvalIdx e, TermId source, SignalIdx x);
    static Formula terminates(EvalIdx e, TermId source);
    static Formula trans(EvalIdx e, TermId source, SignalIdx x, TermId target);

    bool positive() const noexcept { return polarity == Polarity::positive; }
    bool negative() const noexcept { return polarity == Polarity::negative; }

    /// The negative formula this one contradicts (identity on negatives).
    Formula negated() const;
    /// Same kind, source, evaluation and signal; polarity and target ignored.
    bool same_group(const Formula& other) const noexcept;

    friend bool operator==(const Formula&, const Formula&) = default;
    friend auto operator<=>(const Formula&, const Formula&) = default;
};

struct FormulaHash {
    std::size_t operator()(const Formula& f) const noexcept;
};

/// Interned terms, signals and input evaluations shared by every formula of
/// one analysis. `nothing` is always term 0.
class SymbolTable {
public:
    static constexpr TermId kNil{0};

    SymbolTable();

    TermId intern(const Program& p);
    std::optional<TermId> find(const Program& p) const;
    const Program& term(TermId id) const { return terms_.at(id.idx()); }
    std::size_t term_count() const noexcept { return terms_.size(); }

    SignalIdx intern_signal(const SignalId& s);
    std::optional<SignalIdx> find_signal(std::string_view name) const;
    const SignalId& signal(SignalIdx id) const { return signals_.at(id.idx()); }
    std::size_t signal_count() const noexcept { return signals_.size(); }

    EvalIdx add_evaluation(InputEvaluation e);
    const InputEvaluation& evaluation(EvalIdx id) const { return evals_.at(id.idx()); }
    std::size_t evaluation_count() const noexcept { return evals_.size(); }

private:
    std::vector<Program> terms_;
    std::unordered_map<Program, TermId, ProgramHash> term_ids_;
    std::vector<SignalId> signals_;
    std::unordered_map<std::string, SignalIdx> signal_ids_;
    std::vector<InputEvaluation> evals_;
};

/// Canonical text: `p emits[I] x`, `p term[I]`, `p --I,x--> q`, `not ...` for negatives.
std::string render(const SymbolTable& symbols, const Formula& f);

/// t --l--> t' contradicts t -/l->; symmetric.
bool contradicts(const Formula& f, const Formula& g) noexcept;

/// A set of positive formulae (a candidate transition relation).
class FactSet {
public:
    FactSet() = default;
    explicit FactSet(std::span<const Formula> facts);

    /// Throws std::invalid_argument for negative formulae.
    bool insert(const Formula& f);
    bool contains(const Formula& f) const { return facts_.contains(f); }
    /// True when some member contradicts the negative formula `neg`.
    bool contradicts(const Formula& neg) const { return groups_.contains(neg.negated()); }
    std::size_t size() const noexcept { return facts_.size(); }
    bool empty() const noexcept { return facts_.empty(); }
    std::vector<Formula> sorted() const;

private:
    std::unordered_set<Formula, FormulaHash> facts_;
    std::unordered_set<Formula, FormulaHash> groups_;
};

/// T ⊨ Φ: positive members of phi are in T; no member of T contradicts a
/// negative member of phi.
bool consistent(const FactSet& facts, std::span<const Formula> phi);

}  // namespace estcause
