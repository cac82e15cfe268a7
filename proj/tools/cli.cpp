#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "estcause/report.hpp"
#include "estcause/syntax.hpp"

namespace estcause {
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Flags {
    std::string format = "text";
    bool proofs = false;
    bool models = false;
    bool collapsed = false;
    std::size_t max_space = 200000;
    std::string eval;

    AnalysisOptions options() const {
        AnalysisOptions o;
        o.mode = collapsed ? EmissionRules::collapsed : EmissionRules::standard;
        o.max_space = max_space;
        o.only_eval = eval;
        o.proofs = proofs;
        o.models = models;
        return o;
    }
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_flag("--collapsed-emission", f.collapsed, "Replace the emission rules by the single collapsed rule");
    cmd->add_option("--max-space", f.max_space, "Maximum number of positive formulae")->check(CLI::PositiveNumber);
}

/// Runs one analysis, mapping failures to exit codes with a diagnostic.
int analyze_file(const fs::path& file, const Flags& flags, std::ostream& out, std::ostream& err) {
    std::string source;
    try {
        source = read_file(file);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_codes::usage;
    }
    try {
        AnalysisReport report = analyze_source(source, flags.options());
        report.name = file.filename().string();
        if (flags.format == "json")
            out << nlohmann::json(report).dump(2) << "\n";
        else
            out << render_text(report);
        const int code = exit_code(report);
        if (code == exit_codes::property_violation) err << "error: property violation (see THEOREMS)\n";
        return code;
    } catch (const ParseError& e) {
        err << file.string() << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
        return exit_codes::parse_error;
    } catch (const SemanticError& e) {
        err << file.string() << ": " << e.what() << "\n";
        return exit_codes::parse_error;
    } catch (const ResourceLimit& e) {
        err << file.string() << ": resource limit: " << e.what() << "\n";
        return exit_codes::resource_limit;
    } catch (const std::invalid_argument& e) {
        err << file.string() << ": " << e.what() << "\n";
        return exit_codes::usage;
    }
}

struct Row {
    std::string name, status, models, constructive, theorems;
    double ms = 0;
    bool violation = false;
};

Row corpus_row(const fs::path& file, const AnalysisOptions& options) {
    Row row;
    row.name = file.filename().string();
    const auto start = std::chrono::steady_clock::now();
    try {
        const AnalysisReport r = analyze_source(read_file(file), options);
        row.status = r.logical.status;
        row.models = std::to_string(r.logical.model_count);
        row.constructive = r.constructive.constructive ? "yes" : "no";
        std::size_t failed = 0;
        for (const auto& t : r.theorems) failed += t.holds ? 0 : 1;
        row.theorems = failed == 0 ? "ok" : std::to_string(failed) + " FAILED";
        row.violation = failed > 0;
    } catch (const ResourceLimit& e) {
        row.status = "ResourceLimit";
        row.models = row.constructive = row.theorems = "-";
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
        row.models = row.constructive = row.theorems = "-";
    }
    row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return row;
}

int run_corpus(const fs::path& dir, const Flags& flags, std::ostream& out, std::ostream& err) {
    if (!fs::is_directory(dir)) {
        err << "error: " << dir.string() << " is not a directory\n";
        return exit_codes::usage;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".est") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    const AnalysisOptions options = flags.options();
    std::vector<std::future<Row>> pending;
    for (const auto& f : files) pending.push_back(std::async(std::launch::async, corpus_row, f, options));
    std::vector<Row> rows;
    for (auto& p : pending) rows.push_back(p.get());

    if (flags.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows)
            j.push_back({{"name", r.name}, {"status", r.status}, {"models", r.models},
                         {"constructive", r.constructive}, {"theorems", r.theorems}, {"ms", r.ms}});
        out << j.dump(2) << "\n";
    } else {
        out << std::left << std::setw(16) << "name" << std::setw(20) << "status" << std::setw(9) << "#models"
            << std::setw(14) << "constructive" << std::setw(12) << "theorems" << "time(ms)\n";
        for (const auto& r : rows)
            out << std::left << std::setw(16) << r.name << std::setw(20) << r.status << std::setw(9) << r.models
                << std::setw(14) << r.constructive << std::setw(12) << r.theorems << std::fixed
                << std::setprecision(1) << r.ms << "\n";
    }
    const bool violation = std::any_of(rows.begin(), rows.end(), [](const Row& r) { return r.violation; });
    return violation ? exit_codes::property_violation : 0;
}

int run_ground(const fs::path& file, const Flags& flags, std::ostream& out, std::ostream& err) {
    try {
        const ParsedProgram parsed = parse(read_file(file));
        GroundingOptions g;
        g.emission = flags.options().mode;
        g.max_space = flags.max_space;
        if (!flags.eval.empty()) g.only_evaluation = parse_input_evaluation(flags.eval, parsed.env);
        const Universe u = ground_space(AnalysisContext{parsed.program, parsed.env}, g);
        out << "# terms\n";
        for (std::size_t t = 0; t < u.term_count(); ++t) {
            const TermId id{static_cast<std::uint32_t>(t)};
            out << t << (u.is_context_subterm(id) ? "  " : " *") << " " << pretty(u.term(id)) << "\n";
        }
        out << "# instances\n";
        for (const auto& f : u.pos_space())
            for (const auto& ri : instances_concluding(u, f)) out << render_instance(u, ri) << "\n";
        out << "# supportable\n";
        for (const auto& f : u.supportable()) out << u.render(f) << "\n";
        return 0;
    } catch (const ParseError& e) {
        err << file.string() << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
        return exit_codes::parse_error;
    } catch (const SemanticError& e) {
        err << file.string() << ": " << e.what() << "\n";
        return exit_codes::parse_error;
    } catch (const ResourceLimit& e) {
        err << file.string() << ": resource limit: " << e.what() << "\n";
        return exit_codes::resource_limit;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_codes::usage;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causality analysis for instantaneous Esterel programs", "estcause"};
    app.require_subcommand(1);

    Flags flags;
    std::string path;

    auto* analyze = app.add_subcommand("analyze", "Classify one program");
    analyze->add_option("file", path, "Source file (.est)")->required();
    analyze->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    analyze->add_flag("--proofs", flags.proofs, "Attach proof trees");
    analyze->add_flag("--models", flags.models, "List model facts");
    analyze->add_option("--eval", flags.eval, "Restrict to one input evaluation, e.g. i=+,j=-");
    add_common(analyze, flags);

    auto* corpus = app.add_subcommand("corpus", "Classify every .est file of a directory");
    corpus->add_option("dir", path, "Directory")->required();
    corpus->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    add_common(corpus, flags);

    auto* ground = app.add_subcommand("ground", "Dump the grounded rule instances of a program");
    ground->add_option("file", path, "Source file (.est)")->required();
    ground->add_option("--eval", flags.eval, "Restrict to one input evaluation");
    add_common(ground, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : exit_codes::usage;
    }
    if (analyze->parsed()) return analyze_file(path, flags, out, err);
    if (corpus->parsed()) return run_corpus(path, flags, out, err);
    return run_ground(path, flags, out, err);
}

}  // namespace estcause
