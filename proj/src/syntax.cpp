#include "estcause/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <unordered_set>
#include <utility>

namespace estcause {

std::string_view to_string(SignalKind kind) {
    switch (kind) {
        case SignalKind::input: return "input";
        case SignalKind::output: return "output";
        case SignalKind::local: return "local";
    }
    return "?";
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

SemanticError::SemanticError(Kind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

// ---------------------------------------------------------------------------
// Program

struct Program::Node {
    Tag tag = Tag::nil;
    std::optional<SignalId> signal;
    std::vector<Program> children;
    std::size_t hash = 0;
    std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Program Program::make(Tag tag, std::optional<SignalId> signal, std::vector<Program> children) {
    auto node = std::make_shared<Node>();
    node->tag = tag;
    std::size_t h = mix(0, static_cast<std::size_t>(tag));
    if (signal) {
        h = mix(h, std::hash<std::string>{}(signal->name));
        h = mix(h, static_cast<std::size_t>(signal->kind));
    }
    for (const auto& c : children) {
        h = mix(h, c.hash());
        node->size += c.size();
    }
    node->hash = h;
    node->signal = std::move(signal);
    node->children = std::move(children);
    return Program(std::move(node));
}

Program::Program() {
    static const std::shared_ptr<const Node> nil_node = [] {
        auto n = std::make_shared<Node>();
        n->hash = mix(0, static_cast<std::size_t>(Tag::nil));
        return n;
    }();
    node_ = nil_node;
}

Program Program::emit(SignalId x) {
    if (x.kind == SignalKind::input)
        throw SemanticError(SemanticError::Kind::emit_on_input,
                            "cannot emit input signal '" + x.name + "'");
    return make(Tag::emit, std::move(x), {});
}

Program Program::present(SignalId cond, Program then_branch, Program else_branch) {
    return make(Tag::present, std::move(cond), {std::move(then_branch), std::move(else_branch)});
}

Program Program::seq(Program first, Program second) {
    return make(Tag::seq, std::nullopt, {std::move(first), std::move(second)});
}

Program Program::par(Program left, Program right) {
    return make(Tag::par, std::nullopt, {std::move(left), std::move(right)});
}

Program Program::local(SignalId s, Program body) {
    if (s.kind != SignalKind::local)
        throw SemanticError(SemanticError::Kind::bind_non_local,
                            "signal '" + s.name + "' is declared " +
                                std::string(to_string(s.kind)) + " and cannot be bound locally");
    return make(Tag::local, std::move(s), {std::move(body)});
}

Program::Tag Program::tag() const noexcept { return node_->tag; }

const SignalId& Program::signal() const {
    if (!node_->signal) throw std::logic_error("program node carries no signal");
    return *node_->signal;
}

std::size_t Program::arity() const noexcept { return node_->children.size(); }

const Program& Program::child(std::size_t i) const { return node_->children.at(i); }

std::size_t Program::hash() const noexcept { return node_->hash; }

std::size_t Program::size() const noexcept { return node_->size; }

bool operator==(const Program& a, const Program& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.size() != b.size()) return false;
    return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Program& a, const Program& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.tag() <=> b.tag(); c != 0) return c;
    if (auto c = a.node_->signal <=> b.node_->signal; c != 0) return c;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (auto c = a.child(i) <=> b.child(i); c != 0) return c;
    return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// SignalEnv

namespace {

void insert_sorted(std::vector<SignalId>& v, SignalId s) {
    auto it = std::lower_bound(v.begin(), v.end(), s.name,
                               [](const SignalId& a, const std::string& n) { return a.name < n; });
    v.insert(it, std::move(s));
}

const SignalId* find_by_name(const std::vector<SignalId>& v, std::string_view name) {
    auto it = std::lower_bound(v.begin(), v.end(), name,
                               [](const SignalId& a, std::string_view n) { return a.name < n; });
    return (it != v.end() && it->name == name) ? &*it : nullptr;
}

}  // namespace

void SignalEnv::declare(const SignalId& signal) {
    if (auto existing = kind_of(signal.name)) {
        if (*existing == signal.kind)
            throw SemanticError(SemanticError::Kind::duplicate_declaration,
                                "signal '" + signal.name + "' declared twice");
        if ((*existing == SignalKind::input && signal.kind == SignalKind::output) ||
            (*existing == SignalKind::output && signal.kind == SignalKind::input))
            throw SemanticError(SemanticError::Kind::input_output_conflict,
                                "signal '" + signal.name + "' declared both input and output");
        throw SemanticError(SemanticError::Kind::duplicate_declaration,
                            "signal '" + signal.name + "' declared as both " +
                                std::string(to_string(*existing)) + " and " +
                                std::string(to_string(signal.kind)));
    }
    switch (signal.kind) {
        case SignalKind::input: insert_sorted(inputs_, signal); break;
        case SignalKind::output: insert_sorted(outputs_, signal); break;
        case SignalKind::local: insert_sorted(locals_, signal); break;
    }
}

void SignalEnv::declare_local_if_absent(std::string_view name) {
    if (!contains(name)) insert_sorted(locals_, SignalId{std::string(name), SignalKind::local});
}

std::vector<SignalId> SignalEnv::emittable() const {
    std::vector<SignalId> out = outputs_;
    out.insert(out.end(), locals_.begin(), locals_.end());
    return out;
}

std::optional<SignalKind> SignalEnv::kind_of(std::string_view name) const {
    if (find_by_name(inputs_, name)) return SignalKind::input;
    if (find_by_name(outputs_, name)) return SignalKind::output;
    if (find_by_name(locals_, name)) return SignalKind::local;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok : std::uint8_t {
    ident, kw_nothing, kw_emit, kw_present, kw_then, kw_else, kw_end, kw_signal, kw_in,
    kw_input, kw_output, semi, bar2, comma, lparen, rparen, eof,
};

struct Token {
    Tok kind = Tok::eof;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

constexpr std::array<std::pair<std::string_view, Tok>, 10> kKeywords{{
    {"nothing", Tok::kw_nothing}, {"emit", Tok::kw_emit},     {"present", Tok::kw_present},
    {"then", Tok::kw_then},       {"else", Tok::kw_else},     {"end", Tok::kw_end},
    {"signal", Tok::kw_signal},   {"in", Tok::kw_in},         {"input", Tok::kw_input},
    {"output", Tok::kw_output},
}};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                      src[j] == '_' || src[j] == '\''))
                ++j;
            t.text = std::string(src.substr(i, j - i));
            t.kind = Tok::ident;
            for (auto [kw, tok] : kKeywords)
                if (kw == t.text) t.kind = tok;
            advance(j - i);
        } else if (c == ';') {
            t.kind = Tok::semi;
            t.text = ";";
            advance(1);
        } else if (c == ',') {
            t.kind = Tok::comma;
            t.text = ",";
            advance(1);
        } else if (c == '(') {
            t.kind = Tok::lparen;
            t.text = "(";
            advance(1);
        } else if (c == ')') {
            t.kind = Tok::rparen;
            t.text = ")";
            advance(1);
        } else if (c == '|' && i + 1 < src.size() && src[i + 1] == '|') {
            t.kind = Tok::bar2;
            t.text = "||";
            advance(2);
        } else {
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        out.push_back(std::move(t));
    }
    Token eof;
    eof.line = line;
    eof.column = col;
    out.push_back(eof);
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    ParsedProgram run() {
        parse_header();
        Program body = parse_par();
        if (peek().kind != Tok::eof) fail("unexpected '" + peek().text + "' after program");
        return {std::move(body), std::move(env_)};
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(peek().line, peek().column, msg);
    }

    const Token& expect(Tok kind, std::string_view what) {
        if (peek().kind != kind) {
            std::string got = peek().kind == Tok::eof ? "end of input" : "'" + peek().text + "'";
            fail("expected " + std::string(what) + ", got " + got);
        }
        return take();
    }

    void parse_header() {
        for (;;) {
            if (peek().kind == Tok::semi) {
                take();
                continue;
            }
            if (peek().kind != Tok::kw_input && peek().kind != Tok::kw_output) return;
            SignalKind kind = take().kind == Tok::kw_input ? SignalKind::input : SignalKind::output;
            for (;;) {
                const Token& id = expect(Tok::ident, "signal name");
                env_.declare(SignalId{id.text, kind});
                if (peek().kind == Tok::comma) {
                    take();
                    continue;
                }
                break;
            }
            expect(Tok::semi, "';' after declaration");
        }
    }

    SignalId resolve(const std::string& name) {
        env_.declare_local_if_absent(name);
        return SignalId{name, *env_.kind_of(name)};
    }

    Program parse_par() {
        Program lhs = parse_seq();
        while (peek().kind == Tok::bar2) {
            take();
            lhs = Program::par(std::move(lhs), parse_seq());
        }
        return lhs;
    }

    Program parse_seq() {
        Program lhs = parse_atom();
        while (peek().kind == Tok::semi) {
            take();
            lhs = Program::seq(std::move(lhs), parse_atom());
        }
        return lhs;
    }

    Program parse_atom() {
        switch (peek().kind) {
            case Tok::kw_nothing: take(); return Program::nil();
            case Tok::kw_emit: {
                take();
                const Token& id = expect(Tok::ident, "signal name after 'emit'");
                return Program::emit(resolve(id.text));
            }
            case Tok::kw_present: {
                take();
                const Token& id = expect(Tok::ident, "signal name after 'present'");
                SignalId cond = resolve(id.text);
                expect(Tok::kw_then, "'then'");
                Program p = parse_par();
                expect(Tok::kw_else, "'else'");
                Program q = parse_par();
                expect(Tok::kw_end, "'end'");
                return Program::present(std::move(cond), std::move(p), std::move(q));
            }
            case Tok::kw_signal: {
                take();
                const Token& id = expect(Tok::ident, "signal name after 'signal'");
                SignalId s = resolve(id.text);
                expect(Tok::kw_in, "'in'");
                Program body = parse_par();
                expect(Tok::kw_end, "'end'");
                return Program::local(std::move(s), std::move(body));
            }
            case Tok::lparen: {
                take();
                Program p = parse_par();
                expect(Tok::rparen, "')'");
                return p;
            }
            case Tok::eof: fail("unexpected end of input, expected a statement");
            default: fail("unexpected '" + peek().text + "', expected a statement");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SignalEnv env_;
};

// level 0: anywhere, 1: left of ';' or right of '||', 2: right of ';'
void print(const Program& p, int level, std::string& out) {
    switch (p.tag()) {
        case Program::Tag::nil: out += "nothing"; return;
        case Program::Tag::emit: out += "emit " + p.signal().name; return;
        case Program::Tag::present:
            out += "present " + p.signal().name + " then ";
            print(p.then_branch(), 0, out);
            out += " else ";
            print(p.else_branch(), 0, out);
            out += " end";
            return;
        case Program::Tag::local:
            out += "signal " + p.signal().name + " in ";
            print(p.body(), 0, out);
            out += " end";
            return;
        case Program::Tag::seq: {
            bool parens = level > 1;
            if (parens) out += "(";
            print(p.first(), 1, out);
            out += " ; ";
            print(p.second(), 2, out);
            if (parens) out += ")";
            return;
        }
        case Program::Tag::par: {
            bool parens = level > 0;
            if (parens) out += "(";
            print(p.left(), 0, out);
            out += " || ";
            print(p.right(), 1, out);
            if (parens) out += ")";
            return;
        }
    }
}

void collect_signals(const Program& p, std::set<std::string>& out) {
    if (p.tag() == Program::Tag::emit || p.tag() == Program::Tag::present ||
        p.tag() == Program::Tag::local)
        out.insert(p.signal().name);
    for (std::size_t i = 0; i < p.arity(); ++i) collect_signals(p.child(i), out);
}

}  // namespace

ParsedProgram parse(std::string_view source) { return Parser(source).run(); }

std::string pretty(const Program& p) {
    std::string out;
    print(p, 0, out);
    return out;
}

std::vector<Program> subterms(const Program& p) {
    std::vector<Program> out;
    std::unordered_set<Program, ProgramHash> seen;
    std::vector<Program> stack{p};
    while (!stack.empty()) {
        Program t = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(t).second) continue;
        out.push_back(t);
        for (std::size_t i = t.arity(); i-- > 0;) stack.push_back(t.child(i));
    }
    return out;
}

std::set<std::string> signals_of(const Program& p) {
    std::set<std::string> out;
    collect_signals(p, out);
    return out;
}

Program rename_signal(const Program& p, std::string_view from, const SignalId& to) {
    switch (p.tag()) {
        case Program::Tag::nil: return p;
        case Program::Tag::emit:
            return p.signal().name == from ? Program::emit(to) : p;
        case Program::Tag::present:
            return Program::present(p.signal().name == from ? to : p.signal(),
                                    rename_signal(p.then_branch(), from, to),
                                    rename_signal(p.else_branch(), from, to));
        case Program::Tag::seq:
            return Program::seq(rename_signal(p.first(), from, to),
                                rename_signal(p.second(), from, to));
        case Program::Tag::par:
            return Program::par(rename_signal(p.left(), from, to),
                                rename_signal(p.right(), from, to));
        case Program::Tag::local:
            return Program::local(p.signal().name == from ? to : p.signal(),
                                  rename_signal(p.body(), from, to));
    }
    return p;
}

Program substitute(const Program& p, const SignalId& from, const SignalId& to) {
    if (signals_of(p).contains(to.name))
        throw FreshnessViolation("signal '" + to.name + "' already occurs in '" + pretty(p) + "'");
    return rename_signal(p, from.name, to);
}

SignalId fresh_signal(const SignalEnv& env, const SignalId& hint,
                      const std::set<std::string>& avoid) {
    for (std::size_t n = 0;; ++n) {
        std::string name = hint.name + "$" + std::to_string(n);
        if (!env.contains(name) && !avoid.contains(name)) return SignalId{name, SignalKind::local};
    }
}

SignalEnv env_for(const Program& p, const SignalEnv& declared) {
    SignalEnv env = declared;
    std::function<void(const Program&)> walk = [&](const Program& t) {
        if (t.tag() == Program::Tag::emit || t.tag() == Program::Tag::present ||
            t.tag() == Program::Tag::local) {
            if (!env.contains(t.signal().name)) env.declare(t.signal());
        }
        for (std::size_t i = 0; i < t.arity(); ++i) walk(t.child(i));
    };
    walk(p);
    return env;
}

}  // namespace estcause
