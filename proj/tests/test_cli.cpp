#include <fermat/search.hpp>
#include <fermat/serialize.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef FERMAT_CLI_PATH
#error "FERMAT_CLI_PATH must point at the fermat binary"
#endif

namespace {

struct CmdResult {
    int exit_code;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    std::string cmd = std::string(FERMAT_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    int rc = pclose(pipe);
    return CmdResult{WEXITSTATUS(rc), out};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("fermat_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("check: refutation output") {
    // default pipeline: T6 fires first on (2, 3, 4)
    CmdResult r = run_cli("check 2 3 4 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "Refuted by T6: z-y=1\n");

    // with the coprimality criterion alone, the certificate names the gcd
    r = run_cli("check 2 3 4 3 --pipeline T3");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "Refuted by T3: gcd(x+y,z)=gcd(5,4)=1\n");
}

TEST_CASE("check: survivor goes to the oracle") {
    // (30, 35, 50) survives the full default pipeline
    CmdResult r = run_cli("check 30 35 50 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Inconclusive by filters; oracle: not a solution") != std::string::npos);

    // (6, 10, 14) survives every theorem filter (only MODULAR would catch it)
    r = run_cli("check 6 10 14 3 --pipeline BASIC_BOUNDS,T6,T4,T3,T5,T2");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Inconclusive by filters; oracle: not a solution") != std::string::npos);
}

TEST_CASE("check: composite exponent needs --generalized") {
    CmdResult r = run_cli("check 3 4 7 4");
    CHECK(r.exit_code == 1);
    CHECK(run_cli("check 3 4 7 1").exit_code == 1);
    // a real generalized solution exits 2
    CHECK(run_cli("check 3 4 7 1 --generalized").exit_code == 2);
    CHECK(run_cli("check 3 4 8 1 --generalized").exit_code == 0);
    CHECK(run_cli("check 3 4 5 2 --generalized").exit_code == 2);
}

TEST_CASE("check: json lines output parses") {
    CmdResult r = run_cli("check 2 3 4 3 --json-lines --pipeline T3");
    CHECK(r.exit_code == 0);
    fermat::json j = fermat::json::parse(r.output);
    CHECK(j.at("outcome") == "refuted");
    CHECK(j.at("filter_id") == "T3");
    CHECK(j.at("candidate").at("x") == "2");
    CHECK(j.at("external_assumption") == false);

    r = run_cli("check 30 35 50 3 --json-lines");
    j = fermat::json::parse(r.output);
    CHECK(j.at("outcome") == "inconclusive");
    CHECK(j.at("oracle_solution") == false);
}

TEST_CASE("check: bad arguments") {
    CHECK(run_cli("check 0 3 4 3").exit_code == 1);
    CHECK(run_cli("check 2 3 4 notanumber").exit_code == 1);
    CHECK(run_cli("check 2 3 4 3 --pipeline T9").exit_code == 1);
    CHECK(run_cli("check 7 8 13 7 --pipeline T1_EXTERNAL").exit_code == 1);
    CHECK(run_cli("check 7 8 13 7 --pipeline T1_EXTERNAL --allow-external").exit_code == 0);
}

TEST_CASE("search: report files are identical across worker counts") {
    TempDir tmp;
    auto r1 = tmp.path / "r1.json";
    auto r4 = tmp.path / "r4.json";
    CmdResult a = run_cli("search --max 20 --p 3,5 --workers 1 --report " + r1.string());
    CmdResult b = run_cli("search --max 20 --p 3,5 --workers 4 --report " + r4.string());
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    std::string doc1 = slurp(r1), doc4 = slurp(r4);
    CHECK(!doc1.empty());
    CHECK(doc1 == doc4);
    CHECK(a.output.find("oracle solutions found: 0") != std::string::npos);
}

TEST_CASE("search: certificate stream re-checks and config echo round-trips") {
    TempDir tmp;
    auto certs = tmp.path / "certs.jsonl";
    auto report = tmp.path / "report.json";
    auto csv = tmp.path / "report.csv";
    CmdResult r = run_cli("search --max 12 --p 3 --coprime-only --certificates " +
                          certs.string() + " --report " + report.string() + " --csv " +
                          csv.string());
    CHECK(r.exit_code == 0);

    fermat::json doc = fermat::json::parse(slurp(report));
    fermat::SearchConfig echoed = fermat::config_from_json(doc.at("config"));
    CHECK(echoed.coprime_only);
    CHECK(echoed.x_max == 12);
    CHECK(echoed.p_set == std::vector<fermat::Natural>{3});

    std::uint64_t refuted_total = 0;
    for (const auto& [key, val] : doc.at("refuted_by_filter").items())
        refuted_total += val.get<std::uint64_t>();

    std::ifstream in(certs);
    std::string line;
    std::uint64_t lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        fermat::Refutation rec = fermat::refutation_from_json_line(line);
        CHECK(fermat::recheck_certificate(rec.candidate, rec.certificate));
    }
    CHECK(lines == refuted_total);

    std::string table = slurp(csv);
    CHECK(table.starts_with("filter_id,count\n"));
    CHECK(table.find("BASIC_BOUNDS,") != std::string::npos);
}

TEST_CASE("search: usage errors") {
    CHECK(run_cli("search --max 50").exit_code == 1);        // --p required
    CHECK(run_cli("search --max 50 --p \"\"").exit_code == 1);
    CHECK(run_cli("search --max 0 --p 3").exit_code == 1);
    CHECK(run_cli("search --p 3").exit_code == 1);           // no range
    CHECK(run_cli("search --max 10 --p 4").exit_code == 1);  // 4 not an odd prime
    CHECK(run_cli("search --max 10 --p 1 --generalized").exit_code == 2); // finds x+y=z
}

TEST_CASE("selftest: mutation sensitivity smoke test") {
    CHECK(run_cli("selftest --mutate no-such-mutation").exit_code == 1);
    CmdResult r = run_cli("selftest --mutate alt-sum-limit");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("SELFTEST FAILED") != std::string::npos);
}

TEST_CASE("bench: shape and determinism of counts") {
    CmdResult r = run_cli("bench --max 12 --p 3");
    CHECK(r.exit_code == 0);
    for (const char* name : {"BASIC_BOUNDS", "T6", "T4", "T3", "T5", "T2", "MODULAR", "oracle"})
        CHECK(r.output.find(name) != std::string::npos);

    CmdResult r2 = run_cli("bench --max 12 --p 3");
    auto count_of = [](const std::string& out) {
        auto pos = out.find("candidates: ");
        REQUIRE(pos != std::string::npos);
        return out.substr(pos, out.find('\n', pos) - pos);
    };
    CHECK(count_of(r.output) == count_of(r2.output));

    CHECK(run_cli("bench --max 0 --p 3").exit_code == 1);
    CHECK(run_cli("bench --p 3").exit_code == 1);
}
