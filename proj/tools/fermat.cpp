// Command-line driver: check one candidate, sweep a range, run the built-in
// consistency suite, or benchmark the filters.
//
// Exit codes: 0 completed with no oracle solutions; 1 usage or configuration
// error; 2 an oracle solution was found (only reachable with --generalized
// exponents); 3 internal consistency failure.

#include <fermat/arith.hpp>
#include <fermat/filters.hpp>
#include <fermat/search.hpp>
#include <fermat/selftest.hpp>
#include <fermat/serialize.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using fermat::Natural;

std::optional<Natural> parse_natural(const std::string& s) {
    if (s.empty()) return std::nullopt;
    for (char c : s)
        if (c < '0' || c > '9') return std::nullopt;
    try {
        return Natural(s);
    } catch (...) {
        return std::nullopt;
    }
}

std::optional<std::vector<Natural>> parse_natural_list(const std::string& s) {
    std::vector<Natural> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        auto n = parse_natural(tok);
        if (!n) return std::nullopt;
        out.push_back(*n);
    }
    return out;
}

std::optional<std::vector<fermat::FilterId>> parse_pipeline_list(const std::string& s) {
    std::vector<fermat::FilterId> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        auto id = fermat::parse_filter_id(tok);
        if (!id) return std::nullopt;
        out.push_back(*id);
    }
    return out;
}

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 1;
}

struct CheckArgs {
    std::string x, y, z, p;
    std::string pipeline = "BASIC_BOUNDS,T6,T4,T3,T5,T2,MODULAR";
    std::string moduli = "9,25,49";
    bool generalized = false;
    bool allow_external = false;
    bool json_lines = false;
};

int run_check(const CheckArgs& args) {
    auto x = parse_natural(args.x), y = parse_natural(args.y), z = parse_natural(args.z),
         p = parse_natural(args.p);
    if (!x || !y || !z || !p) return usage_error("x, y, z, p must be decimal integers");
    if (*x < 1 || *y < 1 || *z < 1 || *p < 1)
        return usage_error("x, y, z, p must be >= 1");

    fermat::PipelineConfig pipeline;
    auto filters = parse_pipeline_list(args.pipeline);
    auto moduli = parse_natural_list(args.moduli);
    if (!filters) return usage_error("unknown filter id in --pipeline");
    if (!moduli) return usage_error("--moduli must be a comma-separated list of integers");
    pipeline.filters = *filters;
    pipeline.moduli = *moduli;
    pipeline.allow_external = args.allow_external;
    try {
        fermat::validate_pipeline(pipeline);
    } catch (const std::exception& e) {
        return usage_error(e.what());
    }

    bool p_is_odd_prime = *p >= 3 && fermat::is_prime(*p);
    if (!p_is_odd_prime && !args.generalized)
        return usage_error("p = " + p->str() +
                           " is not an odd prime; pass --generalized to allow it");

    if (p_is_odd_prime) {
        fermat::Candidate c(*x, *y, *z, fermat::OddPrime::unchecked(*p));
        fermat::Verdict v = fermat::evaluate(c, pipeline);
        if (v.refuted()) {
            if (args.json_lines) {
                fermat::json j = fermat::to_json(fermat::Refutation{c, *v.certificate});
                j["outcome"] = "refuted";
                std::cout << j.dump() << "\n";
            } else {
                std::cout << "Refuted by " << fermat::to_string(v.certificate->filter_id) << ": "
                          << fermat::describe_certificate(c, *v.certificate) << "\n";
            }
            return 0;
        }
        bool solution = fermat::oracle_check(*x, *y, *z, *p);
        if (args.json_lines) {
            fermat::json j{{"candidate", fermat::to_json(c)},
                           {"outcome", "inconclusive"},
                           {"oracle_solution", solution}};
            std::cout << j.dump() << "\n";
        } else {
            std::cout << "Inconclusive by filters; oracle: "
                      << (solution ? "exact solution" : "not a solution") << "\n";
        }
        return solution ? 2 : 0;
    }

    // Generalized exponent: the filter criteria require an odd prime, so only
    // the oracle applies.
    bool solution = fermat::oracle_check(*x, *y, *z, *p);
    if (args.json_lines) {
        fermat::json j{{"candidate", fermat::json{{"x", fermat::to_json(*x)},
                                                  {"y", fermat::to_json(*y)},
                                                  {"z", fermat::to_json(*z)},
                                                  {"p", fermat::to_json(*p)}}},
                       {"outcome", "generalized"},
                       {"oracle_solution", solution}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "Filters skipped (p is not an odd prime); oracle: "
                  << (solution ? "exact solution" : "not a solution") << "\n";
    }
    return solution ? 2 : 0;
}

struct SearchArgs {
    std::string max, x_max, y_max, z_max;
    std::string p_list;
    std::string pipeline = "BASIC_BOUNDS,T6,T4,T3,T5,T2,MODULAR";
    std::string moduli = "9,25,49";
    std::string certificates_path, report_path, csv_path;
    unsigned workers = 1;
    bool coprime_only = false;
    bool generalized = false;
    bool allow_external = false;
    bool full_xy = false;
};

std::optional<fermat::SearchConfig> build_config(const SearchArgs& args, std::string& err) {
    fermat::SearchConfig cfg;
    auto pick = [&](const std::string& specific, Natural& out) -> bool {
        const std::string& chosen = specific.empty() ? args.max : specific;
        if (chosen.empty()) {
            err = "range missing: pass --max or all of --x-max/--y-max/--z-max";
            return false;
        }
        auto n = parse_natural(chosen);
        if (!n) {
            err = "ranges must be decimal integers";
            return false;
        }
        out = *n;
        return true;
    };
    if (!pick(args.x_max, cfg.x_max) || !pick(args.y_max, cfg.y_max) ||
        !pick(args.z_max, cfg.z_max))
        return std::nullopt;

    auto ps = parse_natural_list(args.p_list);
    if (!ps) {
        err = "--p must be a comma-separated list of integers";
        return std::nullopt;
    }
    cfg.p_set = *ps;

    auto filters = parse_pipeline_list(args.pipeline);
    auto moduli = parse_natural_list(args.moduli);
    if (!filters) {
        err = "unknown filter id in --pipeline";
        return std::nullopt;
    }
    if (!moduli) {
        err = "--moduli must be a comma-separated list of integers";
        return std::nullopt;
    }
    cfg.pipeline.filters = *filters;
    cfg.pipeline.moduli = *moduli;
    cfg.pipeline.allow_external = args.allow_external;
    cfg.coprime_only = args.coprime_only;
    cfg.canonical_xy = !args.full_xy;
    cfg.allow_generalized = args.generalized;
    cfg.worker_count = args.workers;
    try {
        fermat::validate_config(cfg);
    } catch (const std::exception& e) {
        err = e.what();
        return std::nullopt;
    }
    return cfg;
}

void print_report_summary(const fermat::SearchReport& r) {
    std::cout << "total candidates:       " << r.total_candidates << "\n";
    for (fermat::FilterId f : r.config_echo.pipeline.filters) {
        auto it = r.refuted_by_filter.find(f);
        std::cout << "refuted by " << fermat::to_string(f) << ": "
                  << (it == r.refuted_by_filter.end() ? 0 : it->second) << "\n";
    }
    std::cout << "survivors to oracle:    " << r.survivors_to_oracle << "\n";
    std::cout << "oracle solutions found: " << r.oracle_solutions_found << "\n";
    std::cout << "wall time:              " << r.wall_time_seconds << " s\n";
}

int run_search_cmd(const SearchArgs& args) {
    std::string err;
    auto cfg = build_config(args, err);
    if (!cfg) return usage_error(err);

    std::optional<fermat::JsonLinesSink> sink;
    if (!args.certificates_path.empty()) {
        try {
            sink.emplace(args.certificates_path);
        } catch (const std::exception& e) {
            return usage_error(e.what());
        }
    }

    fermat::SearchReport report = fermat::run_search(*cfg, sink ? &*sink : nullptr);

    if (!args.report_path.empty()) {
        std::ofstream out(args.report_path, std::ios::trunc);
        out << fermat::report_document(report);
        if (!out) return usage_error("cannot write report to " + args.report_path);
    }
    if (!args.csv_path.empty()) {
        std::ofstream out(args.csv_path, std::ios::trunc);
        out << fermat::report_csv(report);
        if (!out) return usage_error("cannot write csv to " + args.csv_path);
    }
    print_report_summary(report);
    if (report.partial) {
        std::cerr << "error: certificate stream failed; counts above are partial\n";
        return 1;
    }
    return report.oracle_solutions_found > 0 ? 2 : 0;
}

struct SelftestArgs {
    std::string mutate = "none";
};

int run_selftest_cmd(const SelftestArgs& args) {
    auto m = fermat::parse_mutation(args.mutate);
    if (!m) return usage_error("unknown mutation: " + args.mutate);
    if (*m != fermat::Mutation::None)
        std::cout << "running with deliberate fault: " << fermat::to_string(*m) << "\n";
    fermat::SelftestResult result = fermat::run_selftest(*m, &std::cout);
    if (!result.passed()) {
        std::cout << "SELFTEST FAILED\n";
        return 3;
    }
    std::cout << "selftest passed\n";
    return 0;
}

struct BenchArgs {
    std::string max;
    std::string p_list;
    std::string pipeline = "BASIC_BOUNDS,T6,T4,T3,T5,T2,MODULAR";
    std::string moduli = "9,25,49";
    bool allow_external = false;
};

int run_bench(const BenchArgs& args) {
    SearchArgs sargs;
    sargs.max = args.max;
    sargs.p_list = args.p_list;
    sargs.pipeline = args.pipeline;
    sargs.moduli = args.moduli;
    sargs.allow_external = args.allow_external;
    std::string err;
    auto cfg = build_config(sargs, err);
    if (!cfg) return usage_error(err);

    std::vector<fermat::OddPrime> primes;
    for (const Natural& p : cfg->p_set) primes.push_back(fermat::OddPrime::unchecked(p));

    using clock = std::chrono::steady_clock;
    auto time_filter = [&](fermat::FilterId id, std::uint64_t& evals, std::uint64_t& refuted) {
        fermat::PipelineConfig single;
        single.filters = {id};
        single.moduli = cfg->pipeline.moduli;
        single.allow_external = cfg->pipeline.allow_external;
        auto t0 = clock::now();
        fermat::for_each_candidate(*cfg, [&](const Natural& x, const Natural& y, const Natural& z,
                                             const Natural& p) {
            std::size_t pi = 0;
            while (cfg->p_set[pi] != p) ++pi;
            fermat::Candidate c(x, y, z, primes[pi]);
            ++evals;
            if (fermat::detail::evaluate_unchecked(c, single).refuted()) ++refuted;
        });
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    std::uint64_t n = fermat::count_candidates(*cfg);
    std::cout << "candidates: " << n << "\n";
    std::cout << "filter        evals      refuted      mean-ns\n";
    for (fermat::FilterId f : cfg->pipeline.filters) {
        std::uint64_t evals = 0, refuted = 0;
        double secs = time_filter(f, evals, refuted);
        std::printf("%-12s %10llu %10llu %12.1f\n", std::string(fermat::to_string(f)).c_str(),
                    static_cast<unsigned long long>(evals),
                    static_cast<unsigned long long>(refuted),
                    evals ? 1e9 * secs / static_cast<double>(evals) : 0.0);
    }

    std::uint64_t oracle_evals = 0, oracle_true = 0;
    auto t0 = clock::now();
    fermat::for_each_candidate(*cfg, [&](const Natural& x, const Natural& y, const Natural& z,
                                         const Natural& p) {
        ++oracle_evals;
        if (fermat::oracle_check(x, y, z, p)) ++oracle_true;
    });
    double oracle_secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("%-12s %10llu %10llu %12.1f\n", "oracle",
                static_cast<unsigned long long>(oracle_evals),
                static_cast<unsigned long long>(oracle_true),
                oracle_evals ? 1e9 * oracle_secs / static_cast<double>(oracle_evals) : 0.0);

    fermat::SearchConfig run_cfg = *cfg;
    run_cfg.worker_count = 1;
    t0 = clock::now();
    fermat::SearchReport report = fermat::run_search(run_cfg);
    double pipeline_secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::cout << "pipeline+oracle sweep: " << pipeline_secs << " s; oracle-only sweep: "
              << oracle_secs << " s; speedup: "
              << (pipeline_secs > 0 ? oracle_secs / pipeline_secs : 0.0) << "x\n";
    std::cout << "survivors to oracle: " << report.survivors_to_oracle << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certificate-producing refutation filters for x^p + y^p = z^p"};
    app.require_subcommand(1);

    CheckArgs check_args;
    CLI::App* check = app.add_subcommand("check", "evaluate one candidate (x, y, z, p)");
    check->add_option("x", check_args.x)->required();
    check->add_option("y", check_args.y)->required();
    check->add_option("z", check_args.z)->required();
    check->add_option("p", check_args.p)->required();
    check->add_flag("--generalized", check_args.generalized,
                    "allow exponents outside the odd primes (oracle only)");
    check->add_option("--pipeline", check_args.pipeline, "comma-separated filter list");
    check->add_option("--moduli", check_args.moduli, "moduli for MODULAR");
    check->add_flag("--allow-external", check_args.allow_external,
                    "permit the T1_EXTERNAL filter (assumes an external theorem)");
    check->add_flag("--json-lines", check_args.json_lines, "machine-readable output");

    SearchArgs search_args;
    CLI::App* search = app.add_subcommand("search", "exhaustive sweep over a range");
    search->add_option("--max", search_args.max, "bound for x, y and z");
    search->add_option("--x-max", search_args.x_max);
    search->add_option("--y-max", search_args.y_max);
    search->add_option("--z-max", search_args.z_max);
    search->add_option("--p", search_args.p_list, "comma-separated exponent list")->required();
    search->add_option("--workers", search_args.workers, "worker thread count");
    search->add_option("--certificates", search_args.certificates_path,
                       "write the certificate stream (JSON lines) here");
    search->add_option("--report", search_args.report_path, "write the report document here");
    search->add_option("--csv", search_args.csv_path, "write the per-filter table here");
    search->add_option("--pipeline", search_args.pipeline, "comma-separated filter list");
    search->add_option("--moduli", search_args.moduli, "moduli for MODULAR");
    search->add_flag("--coprime-only", search_args.coprime_only, "enumerate gcd(x,y)=1 only");
    search->add_flag("--generalized", search_args.generalized,
                     "allow exponents outside the odd primes");
    search->add_flag("--allow-external", search_args.allow_external,
                     "permit the T1_EXTERNAL filter");
    search->add_flag("--full-xy", search_args.full_xy,
                     "enumerate unordered x, y instead of x <= y");

    SelftestArgs selftest_args;
    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in consistency suite");
    selftest->add_option("--mutate", selftest_args.mutate,
                         "run with a deliberate fault (sensitivity check): alt-sum-limit, "
                         "alt-sum-sign, diff-sum-limit, gap-sum-limit");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "per-filter timing over a range");
    bench->add_option("--max", bench_args.max)->required();
    bench->add_option("--p", bench_args.p_list)->required();
    bench->add_option("--pipeline", bench_args.pipeline);
    bench->add_option("--moduli", bench_args.moduli);
    bench->add_flag("--allow-external", bench_args.allow_external);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*check) return run_check(check_args);
        if (*search) return run_search_cmd(search_args);
        if (*selftest) return run_selftest_cmd(selftest_args);
        if (*bench) return run_bench(bench_args);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
