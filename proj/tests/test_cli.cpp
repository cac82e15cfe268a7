#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "estcause/report.hpp"
#include "support.hpp"

using namespace estcause;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "estcause");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("estcause_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("analyze: exit codes on the corpus") {
    CHECK(cli({"analyze", corpus_path("P0.est")}).code == 0);
    CHECK(cli({"analyze", corpus_path("P3.est")}).code == 10);
    CHECK(cli({"analyze", corpus_path("P2.est")}).code == 20);
    CHECK(cli({"analyze", corpus_path("P1.est")}).code == 21);
}

TEST_CASE("analyze: error exit codes") {
    const fs::path dir = temp_dir("errors");
    const auto bad = write_file(dir, "bad.est", "present s then\n");
    const Run parse_error = cli({"analyze", bad.string()});
    CHECK(parse_error.code == 2);
    CHECK(parse_error.err.find("bad.est:") != std::string::npos);
    const auto sem = write_file(dir, "sem.est", "input i;\nemit i\n");
    CHECK(cli({"analyze", sem.string()}).code == 2);
    CHECK(cli({"analyze", corpus_path("P4.est"), "--max-space", "10"}).code == 3);
    CHECK(cli({"analyze", (dir / "missing.est").string()}).code == 1);
    CHECK(cli({"analyze"}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"analyze", corpus_path("P0.est"), "--eval", "k=+"}).code == 1);
}

TEST_CASE("analyze: text report sections") {
    const Run r = cli({"analyze", corpus_path("P6.est"), "--proofs", "--models"});
    REQUIRE(r.code == 0);
    std::size_t at = 0;
    for (const char* section : {"== HEADER", "== LOGICAL", "== MODELS", "== CONSTRUCTIVE", "== PROOFS", "== THEOREMS"}) {
        const auto pos = r.out.find(section, at);
        CHECK_MESSAGE(pos != std::string::npos, section);
        at = pos;
    }
    CHECK(r.out.find("rules: par0 if0 p1 e0 em em") != std::string::npos);
}

TEST_CASE("analyze: json output and evaluation restriction") {
    const Run r = cli({"analyze", corpus_path("P0.est"), "--format", "json", "--eval", "i=-"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["evaluations"] == nlohmann::json::array({"{i-}"}));
    CHECK(j["logical"]["status"] == "Coherent");
    CHECK(j["mode"] == "standard");
}

TEST_CASE("analyze: collapsed emission flips the parallel program") {
    CHECK(cli({"analyze", corpus_path("P6.est")}).code == 0);
    const Run r = cli({"analyze", corpus_path("P6.est"), "--collapsed-emission", "--format", "json"});
    CHECK(r.code == 10);
    CHECK(nlohmann::json::parse(r.out)["mode"] == "collapsed-emission");
}

TEST_CASE("report: JSON round trip") {
    for (const auto& name : corpus_names()) {
        AnalysisOptions o;
        o.proofs = true;
        o.models = true;
        AnalysisReport report = analyze_source(read_text(corpus_path(name + ".est")), o);
        report.name = name;
        const nlohmann::json j = report;
        const auto back = nlohmann::json::parse(j.dump()).get<AnalysisReport>();
        CHECK(back == report);
    }
}

TEST_CASE("exit code mapping is total and exclusive") {
    const std::vector<std::string> statuses{"NonReactive", "NonDeterministic", "Coherent"};
    std::set<int> seen;
    for (const auto& st : statuses)
        for (bool constructive : {false, true})
            for (bool theorem_ok : {false, true}) {
                AnalysisReport r;
                r.logical.status = st;
                r.constructive.constructive = constructive;
                r.theorems.push_back({"t", theorem_ok, ""});
                const int code = exit_code(r);
                if (!theorem_ok) {
                    CHECK(code == 4);
                } else if (st == "NonReactive") {
                    CHECK(code == 20);
                } else if (st == "NonDeterministic") {
                    CHECK(code == 21);
                } else {
                    CHECK(code == (constructive ? 0 : 10));
                }
                seen.insert(code);
            }
    CHECK(seen == std::set<int>{0, 4, 10, 20, 21});
}

TEST_CASE("corpus: bundled programs match their sidecars") {
    const Run r = cli({"corpus", ESTCAUSE_CORPUS_DIR, "--format", "json"});
    REQUIRE(r.code == 0);
    const auto rows = nlohmann::json::parse(r.out);
    REQUIRE(rows.size() == corpus_names().size());
    const Run collapsed = cli({"corpus", ESTCAUSE_CORPUS_DIR, "--format", "json", "--collapsed-emission"});
    const auto crows = nlohmann::json::parse(collapsed.out);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::string file = rows[k]["name"];
        const std::string stem = file.substr(0, file.size() - 4);
        CHECK(stem == corpus_names()[k]);
        const auto expected = nlohmann::json::parse(read_text(corpus_path(stem + ".expected.json")));
        CHECK_MESSAGE(rows[k]["status"] == expected["status"], stem);
        CHECK_MESSAGE(rows[k]["models"] == std::to_string(expected["models"].get<int>()), stem);
        CHECK_MESSAGE(rows[k]["constructive"] == (expected["constructive"].get<bool>() ? "yes" : "no"), stem);
        CHECK_MESSAGE(rows[k]["theorems"] == "ok", stem);
        CHECK_MESSAGE(cli({"analyze", corpus_path(file)}).code == expected["exit"].get<int>(), stem);
        CHECK_MESSAGE(crows[k]["constructive"] == (expected["collapsed_constructive"].get<bool>() ? "yes" : "no"), stem);
    }
}

TEST_CASE("corpus: text table and empty directory") {
    const Run r = cli({"corpus", ESTCAUSE_CORPUS_DIR});
    CHECK(r.code == 0);
    CHECK(r.out.find("P1.est") != std::string::npos);
    CHECK(r.out.find("NonDeterministic    2") != std::string::npos);

    const fs::path empty = temp_dir("empty");
    const Run e = cli({"corpus", empty.string()});
    CHECK(e.code == 0);
    CHECK(std::count(e.out.begin(), e.out.end(), '\n') == 1);
}

TEST_CASE("corpus: per-file errors do not stop the run") {
    const fs::path dir = temp_dir("mixed");
    write_file(dir, "a.est", "present s then\n");
    write_file(dir, "b.est", "emit o\n");
    const Run r = cli({"corpus", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("a.est") != std::string::npos);
    CHECK(r.out.find("error:") != std::string::npos);
    CHECK(r.out.find("b.est") != std::string::npos);
}

TEST_CASE("ground: instance dump") {
    const Run r = cli({"ground", corpus_path("P1.est")});
    CHECK(r.code == 0);
    CHECK(r.out.find("e0: ⊢ emit s emits[∅] s") != std::string::npos);
    CHECK(r.out.find("if0: present s then emit s else nothing end emits[∅] s, emit s --∅,s--> nothing ⊢ "
                     "present s then emit s else nothing end --∅,s--> nothing") != std::string::npos);
}
