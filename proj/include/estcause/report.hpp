#pragma once

// End-to-end analysis of one source text and the report it produces, in a
// plain-data form that serialises to and from JSON.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "estcause/grounding.hpp"
#include "estcause/models.hpp"
#include "estcause/proofs.hpp"

namespace estcause {

struct AnalysisOptions {
    EmissionRules mode = EmissionRules::standard;
    std::size_t max_space = 200000;
    std::size_t max_choice_points = 24;
    /// `i=+,j=-`; empty means every evaluation.
    std::string only_eval;
    bool proofs = false;
    bool models = false;
    std::size_t sweep_limit = 20000;
};

struct EnvView {
    std::vector<std::string> inputs, outputs, locals;
    friend bool operator==(const EnvView&, const EnvView&) = default;
};

struct UniverseView {
    std::size_t terms = 0;
    std::size_t residual_terms = 0;
    std::size_t facts_per_evaluation = 0;
    std::size_t supportable = 0;
    friend bool operator==(const UniverseView&, const UniverseView&) = default;
};

struct ModelView {
    std::vector<std::string> facts;
    /// Facts whose source is a residual rather than a subterm of the program.
    std::vector<std::string> residual;
    friend bool operator==(const ModelView&, const ModelView&) = default;
};

struct EvaluationView {
    std::string eval;
    std::string status;
    std::uint64_t model_count = 0;
    friend bool operator==(const EvaluationView&, const EvaluationView&) = default;
};

struct LogicalView {
    std::string status;
    std::uint64_t model_count = 0;
    std::vector<ModelView> models;
    std::vector<EvaluationView> per_evaluation;
    friend bool operator==(const LogicalView&, const LogicalView&) = default;
};

struct ProofView {
    std::string role;  ///< positive, negative, transition_positive, transition_negative
    std::string root;
    std::vector<std::string> rules;
    std::string text;
    nlohmann::json tree;
    friend bool operator==(const ProofView&, const ProofView&) = default;
};

struct ObligationView {
    std::string eval;
    std::string signal;  ///< empty for the termination obligation
    std::string resolution;
    std::string target;  ///< target of the proved transition, if any
    std::string diagnostic;
    std::vector<ProofView> proofs;
    friend bool operator==(const ObligationView&, const ObligationView&) = default;
};

struct ConstructiveView {
    bool constructive = false;
    std::vector<ObligationView> obligations;
    friend bool operator==(const ConstructiveView&, const ConstructiveView&) = default;
};

struct TheoremView {
    std::string name;
    bool holds = true;
    std::string detail;
    friend bool operator==(const TheoremView&, const TheoremView&) = default;
};

struct TimingView {
    double parse_ms = 0, ground_ms = 0, logical_ms = 0, constructive_ms = 0, theorems_ms = 0;
    friend bool operator==(const TimingView&, const TimingView&) = default;
};

struct AnalysisReport {
    int schema = 1;
    std::string name;
    std::string source;
    std::string ast;
    EnvView env;
    std::string mode;
    std::vector<std::string> evaluations;
    UniverseView universe;
    LogicalView logical;
    ConstructiveView constructive;
    std::vector<TheoremView> theorems;
    TimingView timing;
    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

void to_json(nlohmann::json& j, const EnvView& v);
void from_json(const nlohmann::json& j, EnvView& v);
void to_json(nlohmann::json& j, const UniverseView& v);
void from_json(const nlohmann::json& j, UniverseView& v);
void to_json(nlohmann::json& j, const ModelView& v);
void from_json(const nlohmann::json& j, ModelView& v);
void to_json(nlohmann::json& j, const EvaluationView& v);
void from_json(const nlohmann::json& j, EvaluationView& v);
void to_json(nlohmann::json& j, const LogicalView& v);
void from_json(const nlohmann::json& j, LogicalView& v);
void to_json(nlohmann::json& j, const ProofView& v);
void from_json(const nlohmann::json& j, ProofView& v);
void to_json(nlohmann::json& j, const ObligationView& v);
void from_json(const nlohmann::json& j, ObligationView& v);
void to_json(nlohmann::json& j, const ConstructiveView& v);
void from_json(const nlohmann::json& j, ConstructiveView& v);
void to_json(nlohmann::json& j, const TheoremView& v);
void from_json(const nlohmann::json& j, TheoremView& v);
void to_json(nlohmann::json& j, const TimingView& v);
void from_json(const nlohmann::json& j, TimingView& v);
void to_json(nlohmann::json& j, const AnalysisReport& v);
void from_json(const nlohmann::json& j, AnalysisReport& v);

/// Parses and analyses `source`. Throws ParseError, SemanticError and
/// ResourceLimit; failed theorem checks are recorded, not thrown.
AnalysisReport analyze_source(const std::string& source, const AnalysisOptions& options = {});

namespace exit_codes {
inline constexpr int constructive = 0;
inline constexpr int usage = 1;
inline constexpr int parse_error = 2;
inline constexpr int resource_limit = 3;
inline constexpr int property_violation = 4;
inline constexpr int not_constructive = 10;
inline constexpr int non_reactive = 20;
inline constexpr int non_deterministic = 21;
}  // namespace exit_codes

/// 4 when a theorem check failed, otherwise by classification.
int exit_code(const AnalysisReport& report);

/// Sections HEADER, LOGICAL, MODELS, CONSTRUCTIVE, PROOFS, THEOREMS.
std::string render_text(const AnalysisReport& report);

}  // namespace estcause
