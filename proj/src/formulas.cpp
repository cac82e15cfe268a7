#include "estcause/formulas.hpp"

#include <algorithm>
#include <stdexcept>

namespace estcause {

InputEvaluation::InputEvaluation(std::vector<std::pair<std::string, Presence>> entries)
    : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries_.size(); ++i)
        if (entries_[i].first == entries_[i - 1].first)
            throw std::invalid_argument("input '" + entries_[i].first + "' assigned twice");
}

std::optional<Presence> InputEvaluation::status(std::string_view input) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), input,
                               [](const auto& e, std::string_view n) { return e.first < n; });
    if (it == entries_.end() || it->first != input) return std::nullopt;
    return it->second;
}

std::string InputEvaluation::render() const {
    if (entries_.empty()) return "∅";
    std::string out = "{";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) out += ",";
        out += entries_[i].first;
        out += entries_[i].second == Presence::present ? "+" : "-";
    }
    return out + "}";
}

std::vector<InputEvaluation> all_input_evaluations(const SignalEnv& env) {
    const auto& inputs = env.inputs();
    if (inputs.size() >= 31) throw std::length_error("too many inputs to enumerate");
    std::vector<InputEvaluation> out;
    const std::size_t n = inputs.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::pair<std::string, Presence>> entries;
        for (std::size_t k = 0; k < n; ++k) {
            bool absent = (mask >> (n - 1 - k)) & 1U;
            entries.emplace_back(inputs[k].name, absent ? Presence::absent : Presence::present);
        }
        out.emplace_back(std::move(entries));
    }
    return out;
}

InputEvaluation parse_input_evaluation(std::string_view text, const SignalEnv& env) {
    std::vector<std::pair<std::string, Presence>> entries;
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item = text.substr(pos, comma == std::string_view::npos ? text.size() - pos
                                                                                 : comma - pos);
        std::size_t eq = item.find('=');
        if (eq == std::string_view::npos || eq + 2 != item.size() ||
            (item[eq + 1] != '+' && item[eq + 1] != '-'))
            throw std::invalid_argument("bad evaluation item '" + std::string(item) +
                                        "', expected name=+ or name=-");
        std::string name(item.substr(0, eq));
        if (env.kind_of(name) != SignalKind::input)
            throw std::invalid_argument("'" + name + "' is not a declared input");
        entries.emplace_back(name, item[eq + 1] == '+' ? Presence::present : Presence::absent);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    InputEvaluation ev(std::move(entries));
    if (ev.entries().size() != env.inputs().size())
        throw std::invalid_argument("evaluation must assign every declared input");
    return ev;
}

std::string_view to_string(FormulaKind kind) {
    switch (kind) {
        case FormulaKind::emits: return "emits";
        case FormulaKind::terminates: return "term";
        case FormulaKind::trans: return "trans";
    }
    return "?";
}

Formula Formula::emits(EvalIdx e, TermId source, SignalIdx x) {
    return Formula{Polarity::positive, FormulaKind::emits, e, source, x, SymbolTable::kNil};
}

Formula Formula::terminates(EvalIdx e, TermId source) {
    return Formula{Polarity::positive, FormulaKind::terminates, e, source, SignalIdx{},
                   SymbolTable::kNil};
}

Formula Formula::trans(EvalIdx e, TermId source, SignalIdx x, TermId target) {
    return Formula{Polarity::positive, FormulaKind::trans, e, source, x, target};
}

Formula Formula::negated() const {
    Formula n = *this;
    n.polarity = Polarity::negative;
    n.target = TermId{};
    return n;
}

bool Formula::same_group(const Formula& o) const noexcept {
    return kind == o.kind && eval == o.eval && source == o.source && signal == o.signal;
}

std::size_t FormulaHash::operator()(const Formula& f) const noexcept {
    std::size_t h = static_cast<std::size_t>(f.polarity) | (static_cast<std::size_t>(f.kind) << 1);
    h = h * 1000003U ^ f.eval.value;
    h = h * 1000003U ^ f.source.value;
    h = h * 1000003U ^ f.signal.value;
    h = h * 1000003U ^ f.target.value;
    return h;
}

SymbolTable::SymbolTable() { intern(Program::nil()); }

TermId SymbolTable::intern(const Program& p) {
    if (auto it = term_ids_.find(p); it != term_ids_.end()) return it->second;
    TermId id{static_cast<std::uint32_t>(terms_.size())};
    terms_.push_back(p);
    term_ids_.emplace(p, id);
    return id;
}

std::optional<TermId> SymbolTable::find(const Program& p) const {
    if (auto it = term_ids_.find(p); it != term_ids_.end()) return it->second;
    return std::nullopt;
}

SignalIdx SymbolTable::intern_signal(const SignalId& s) {
    if (auto it = signal_ids_.find(s.name); it != signal_ids_.end()) {
        if (signals_[it->second.idx()].kind != s.kind)
            throw std::invalid_argument("signal '" + s.name + "' interned with two kinds");
        return it->second;
    }
    SignalIdx id{static_cast<std::uint32_t>(signals_.size())};
    signals_.push_back(s);
    signal_ids_.emplace(s.name, id);
    return id;
}

std::optional<SignalIdx> SymbolTable::find_signal(std::string_view name) const {
    if (auto it = signal_ids_.find(std::string(name)); it != signal_ids_.end()) return it->second;
    return std::nullopt;
}

EvalIdx SymbolTable::add_evaluation(InputEvaluation e) {
    evals_.push_back(std::move(e));
    return EvalIdx{static_cast<std::uint32_t>(evals_.size() - 1)};
}

std::string render(const SymbolTable& symbols, const Formula& f) {
    std::string out = f.negative() ? "not " : "";
    out += pretty(symbols.term(f.source));
    const std::string ev = symbols.evaluation(f.eval).render();
    switch (f.kind) {
        case FormulaKind::emits:
            out += " emits[" + ev + "] " + symbols.signal(f.signal).name;
            break;
        case FormulaKind::terminates: out += " term[" + ev + "]"; break;
        case FormulaKind::trans:
            out += " --" + ev + "," + symbols.signal(f.signal).name + "-->";
            if (f.positive()) out += " " + pretty(symbols.term(f.target));
            break;
    }
    return out;
}

bool contradicts(const Formula& f, const Formula& g) noexcept {
    return f.polarity != g.polarity && f.same_group(g);
}

FactSet::FactSet(std::span<const Formula> facts) {
    for (const auto& f : facts) insert(f);
}

bool FactSet::insert(const Formula& f) {
    if (!f.positive()) throw std::invalid_argument("fact sets hold positive formulae only");
    groups_.insert(f.negated());
    return facts_.insert(f).second;
}

std::vector<Formula> FactSet::sorted() const {
    std::vector<Formula> out(facts_.begin(), facts_.end());
    std::sort(out.begin(), out.end());
    return out;
}

bool consistent(const FactSet& facts, std::span<const Formula> phi) {
    for (const auto& f : phi) {
        if (f.positive() ? !facts.contains(f) : facts.contradicts(f)) return false;
    }
    return true;
}

}  // namespace estcause
