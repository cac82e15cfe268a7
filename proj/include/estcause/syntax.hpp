#pragma once

// Abstract syntax of the instantaneous Esterel subset, its concrete syntax,
// and the term utilities the rule layer needs (subterms, renaming, fresh names).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace estcause {

enum class SignalKind : std::uint8_t { input, output, local };

std::string_view to_string(SignalKind kind);

struct SignalId {
    std::string name;
    SignalKind kind = SignalKind::local;

    friend bool operator==(const SignalId&, const SignalId&) = default;
    friend auto operator<=>(const SignalId&, const SignalId&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class SemanticError : public std::runtime_error {
public:
    enum class Kind : std::uint8_t {
        emit_on_input,
        duplicate_declaration,
        input_output_conflict,
        bind_non_local,
    };
    SemanticError(Kind kind, const std::string& message);
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class FreshnessViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Immutable program term. Copies share structure; equality is structural.
class Program {
public:
    enum class Tag : std::uint8_t { nil, emit, present, seq, par, local };

    /// The terminated process `nothing`.
    Program();

    static Program nil() { return Program(); }
    static Program emit(SignalId x);
    static Program present(SignalId cond, Program then_branch, Program else_branch);
    static Program seq(Program first, Program second);
    static Program par(Program left, Program right);
    static Program local(SignalId s, Program body);

    Tag tag() const noexcept;
    bool is_nil() const noexcept { return tag() == Tag::nil; }

    /// Emitted signal, tested signal, or bound signal. Throws for nil/seq/par.
    const SignalId& signal() const;

    std::size_t arity() const noexcept;
    const Program& child(std::size_t i) const;

    const Program& then_branch() const { return child(0); }
    const Program& else_branch() const { return child(1); }
    const Program& first() const { return child(0); }
    const Program& second() const { return child(1); }
    const Program& left() const { return child(0); }
    const Program& right() const { return child(1); }
    const Program& body() const { return child(0); }

    std::size_t hash() const noexcept;
    /// Number of AST nodes.
    std::size_t size() const noexcept;

    friend bool operator==(const Program& a, const Program& b);
    friend std::strong_ordering operator<=>(const Program& a, const Program& b);

private:
    struct Node;
    explicit Program(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Program make(Tag tag, std::optional<SignalId> signal, std::vector<Program> children);

    std::shared_ptr<const Node> node_;
};

struct ProgramHash {
    std::size_t operator()(const Program& p) const noexcept { return p.hash(); }
};

/// Input/output/local partition of the signals of one program. Each list is
/// kept sorted by name and the three lists are pairwise disjoint.
class SignalEnv {
public:
    /// Throws SemanticError on a conflicting or duplicate declaration.
    void declare(const SignalId& signal);
    /// Registers a local signal unless the name is already known (any kind).
    void declare_local_if_absent(std::string_view name);

    const std::vector<SignalId>& inputs() const noexcept { return inputs_; }
    const std::vector<SignalId>& outputs() const noexcept { return outputs_; }
    const std::vector<SignalId>& locals() const noexcept { return locals_; }

    /// Outputs followed by locals; the signals a program may emit.
    std::vector<SignalId> emittable() const;

    std::optional<SignalKind> kind_of(std::string_view name) const;
    bool contains(std::string_view name) const { return kind_of(name).has_value(); }

    friend bool operator==(const SignalEnv&, const SignalEnv&) = default;

private:
    std::vector<SignalId> inputs_;
    std::vector<SignalId> outputs_;
    std::vector<SignalId> locals_;
};

struct ParsedProgram {
    Program program;
    SignalEnv env;
};

/// Parses a `.est` source: optional `input a, b;` / `output o;` header lines
/// followed by a program body. Undeclared signals are local.
ParsedProgram parse(std::string_view source);

/// Concrete syntax that `parse` reads back to the same tree.
std::string pretty(const Program& p);

/// Reflexive-transitive subterms, deduplicated, in pre-order of first occurrence.
std::vector<Program> subterms(const Program& p);

/// Names of every signal occurring in p (uses and binders).
std::set<std::string> signals_of(const Program& p);

/// Replaces every occurrence of `from` (uses and binders) by `to`.
/// Throws FreshnessViolation when `to` already occurs in p.
Program substitute(const Program& p, const SignalId& from, const SignalId& to);

/// Unchecked renaming; may merge `from` into an already present `to`.
Program rename_signal(const Program& p, std::string_view from, const SignalId& to);

/// `hint$n` for the smallest n such that the name is not in env and not in `avoid`.
SignalId fresh_signal(const SignalEnv& env, const SignalId& hint,
                      const std::set<std::string>& avoid = {});

/// Collects every signal of p into env: declared kinds are kept, the rest become local.
SignalEnv env_for(const Program& p, const SignalEnv& declared = {});

}  // namespace estcause
