// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits nonzero if any fails.
//
// usage: acceptance <path-to-fermat-cli>

#include <fermat/arith.hpp>
#include <fermat/filters.hpp>
#include <fermat/identities.hpp>
#include <fermat/search.hpp>
#include <fermat/selftest.hpp>

#include <sys/wait.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using fermat::Candidate;
using fermat::Integer;
using fermat::Natural;
using fermat::OddPrime;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool g_all_passed = true;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) g_all_passed = false;
}

// Runs fn(v) for every v in [lo, hi] across hardware threads; fn must be
// thread-safe.
template <typename Fn>
void parallel_for(std::uint64_t lo, std::uint64_t hi, Fn fn) {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::uint64_t> next{lo};
    auto body = [&] {
        for (;;) {
            std::uint64_t v = next.fetch_add(1);
            if (v > hi) break;
            fn(v);
        }
    };
    std::vector<std::thread> threads;
    for (unsigned i = 0; i + 1 < workers; ++i) threads.emplace_back(body);
    body();
    for (auto& t : threads) t.join();
}

// ---------------------------------------------------------------------------
// 1. Identity suite: 1,000 randomized tuples, exact equality, under 1 minute.

void criterion1() {
    auto t0 = clock_type::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::uint64_t> value(1, 1'000'000);
    std::uniform_int_distribution<int> half(0, 10);
    std::uint64_t failures = 0;
    const int tuples = 1000;
    for (int i = 0; i < tuples; ++i) {
        Natural x = value(rng), y = value(rng);
        Natural n = 2 * half(rng) + 1; // odd, in {1,...,21}

        if ((x + y) * fermat::alt_factor_sum(x, y, n) != fermat::pow(x, n) + fermat::pow(y, n))
            ++failures;

        Natural z = y + 1 + value(rng);
        if ((z - y) * fermat::diff_factor_sum(z, y, n) != fermat::pow(z, n) - fermat::pow(y, n))
            ++failures;

        Natural p = n == 1 ? Natural(2) : n;
        if (fermat::binomial_gap_expansion(y, x, p) !=
            fermat::pow(y + x, p) - fermat::pow(y, p) - fermat::pow(x, p))
            ++failures;
    }
    double secs = seconds_since(t0);
    std::ostringstream detail;
    detail << tuples << " tuples x 3 identities, " << failures << " failures, " << secs << "s";
    report(1, "identity suite, exact equality", failures == 0 && secs < 60.0, detail.str());
}

// ---------------------------------------------------------------------------
// 2. Reduction on real solution families.

void criterion2() {
    std::uint64_t cases = 0, failures = 0;

    auto verify = [&](const Natural& x, const Natural& y, const Natural& z, const Natural& p) {
        ++cases;
        try {
            fermat::ReductionWitness w = fermat::theorem1_reduce(x, y, z, p);
            Natural xp = fermat::pow(x, p), yp = fermat::pow(y, p);
            Natural c_expected = xp > yp ? xp - yp : yp - xp;
            bool ok = Integer(fermat::pow(w.a, p)) - 4 * Integer(fermat::pow(w.b, p)) ==
                          Integer(w.c) * Integer(w.c) &&
                      w.c == c_expected && fermat::gcd(w.a, w.b) == 1;
            if (!ok) ++failures;
        } catch (...) {
            ++failures;
        }
    };

    // p = 1 family: coprime x < y <= 500, z = x + y
    for (unsigned x = 1; x <= 500; ++x)
        for (unsigned y = x + 1; y <= 500; ++y) {
            if (fermat::gcd(x, y) != 1) continue;
            verify(x, y, Natural(x) + y, 1);
        }

    // p = 2 family: every primitive Pythagorean triple with z <= 1000
    auto triples = fermat::detail::primitive_triples(1000);
    for (const auto& [x, y, z] : triples) verify(x, y, z, 2);

    std::ostringstream detail;
    detail << cases << " solutions (" << triples.size() << " Pythagorean), " << failures
           << " failures";
    report(2, "reduction on p=1 and p=2 solution families", failures == 0 && cases > 0,
           detail.str());
}

// ---------------------------------------------------------------------------
// 3. Exhaustive sweep: x, y, z <= 300 (covering all x <= y < z), p in {3,5,7};
//    no oracle solutions, every certificate re-checks, no refuted candidate is
//    oracle-true; under 5 minutes.

struct CheckingSink : fermat::RefutationSink {
    std::atomic<std::uint64_t> records{0};
    std::atomic<std::uint64_t> recheck_failures{0};
    std::atomic<std::uint64_t> refuted_oracle_true{0};

    bool thread_safe() const override { return true; }
    void append(const fermat::Refutation& r) override {
        records.fetch_add(1, std::memory_order_relaxed);
        if (!fermat::recheck_certificate(r.candidate, r.certificate))
            recheck_failures.fetch_add(1, std::memory_order_relaxed);
        if (fermat::oracle_check(r.candidate.x, r.candidate.y, r.candidate.z,
                                 r.candidate.p.value()))
            refuted_oracle_true.fetch_add(1, std::memory_order_relaxed);
    }
};

fermat::SearchConfig sweep_config() {
    fermat::SearchConfig cfg;
    cfg.x_max = cfg.y_max = cfg.z_max = 300;
    cfg.p_set = {3, 5, 7};
    return cfg;
}

void criterion3() {
    auto t0 = clock_type::now();
    fermat::SearchConfig cfg = sweep_config();
    cfg.worker_count = std::max(1u, std::thread::hardware_concurrency());
    CheckingSink sink;
    fermat::SearchReport r = fermat::run_search(cfg, &sink);
    double secs = seconds_since(t0);

    std::uint64_t refuted = 0;
    for (const auto& [id, n] : r.refuted_by_filter) refuted += n;

    bool pass = r.oracle_solutions_found == 0 && sink.recheck_failures == 0 &&
                sink.refuted_oracle_true == 0 && sink.records == refuted &&
                r.total_candidates == fermat::count_candidates(cfg) && !r.partial &&
                secs < 300.0;
    std::ostringstream detail;
    detail << r.total_candidates << " candidates, " << r.oracle_solutions_found << " solutions, "
           << sink.recheck_failures.load() << " recheck failures, "
           << sink.refuted_oracle_true.load() << " refuted-but-true, "
           << r.survivors_to_oracle << " survivors, " << secs << "s";
    report(3, "exhaustive sweep z<=300, p in {3,5,7}", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 4. Euclidean step property for all (x, y, z) with z <= 500, z < x+y < 2z.

void criterion4() {
    auto t0 = clock_type::now();
    std::atomic<std::uint64_t> checks{0}, failures{0};
    parallel_for(2, 500, [&](std::uint64_t zi) {
        Natural z = zi;
        std::uint64_t local_checks = 0, local_failures = 0;
        for (Natural s = z + 1; s < 2 * z; ++s)
            for (Natural x = 1; x < s; ++x) {
                ++local_checks;
                if (!fermat::euclid_step_check(x, s - x, z)) ++local_failures;
            }
        checks += local_checks;
        failures += local_failures;
    });
    double secs = seconds_since(t0);
    std::ostringstream detail;
    detail << checks.load() << " triples, " << failures.load() << " failures, " << secs << "s";
    report(4, "Euclid step gcd(x+y,z) = gcd(z,x+y-z) for z<=500", failures == 0, detail.str());
}

// ---------------------------------------------------------------------------
// 5. T5 containment versus the basic bounds, over the criterion-3 domain
//    restricted to gcd(x,y) = 1.

void criterion5() {
    auto t0 = clock_type::now();
    std::atomic<std::uint64_t> outside_t5_interval{0}, t5_refuted{0}, bounds_sum_refuted{0},
        margin{0}, missed_by_t5{0}, t5_not_covered{0};
    OddPrime p3(3);
    parallel_for(2, 300, [&](std::uint64_t zi) {
        Natural z = zi;
        std::uint64_t l_outside = 0, l_t5 = 0, l_bounds = 0, l_margin = 0, l_missed = 0,
                      l_uncovered = 0;
        for (Natural x = 1; x < z; ++x)
            for (Natural y = x; y < z; ++y) {
                if (fermat::gcd(x, y) != 1) continue;
                Natural s = x + y;
                bool outside = s < z + 2 || s > 2 * (z - 1);
                bool is_margin = s == z + 1 || s == 2 * z - 1;
                bool bounds_sum = s <= z || s >= 2 * z;
                Candidate c(x, y, z, p3);
                bool t5 = fermat::filter_t5(c).refuted();
                if (outside) ++l_outside;
                if (t5) ++l_t5;
                if (bounds_sum) ++l_bounds;
                if (is_margin) ++l_margin;
                if (outside && !t5) ++l_missed;
                if (t5 && !(bounds_sum || is_margin)) ++l_uncovered;
            }
        outside_t5_interval += l_outside;
        t5_refuted += l_t5;
        bounds_sum_refuted += l_bounds;
        margin += l_margin;
        missed_by_t5 += l_missed;
        t5_not_covered += l_uncovered;
    });
    double secs = seconds_since(t0);
    bool counts_consistent = t5_refuted == bounds_sum_refuted + margin &&
                             t5_refuted == outside_t5_interval;
    bool pass = missed_by_t5 == 0 && t5_not_covered == 0 && counts_consistent;
    std::ostringstream detail;
    detail << "t5=" << t5_refuted.load() << " = bounds_sum=" << bounds_sum_refuted.load()
           << " + margin=" << margin.load() << ", missed=" << missed_by_t5.load()
           << ", uncovered=" << t5_not_covered.load() << ", " << secs << "s";
    report(5, "T5 interval contains the basic-bounds interval", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 6. Determinism: worker_count in {1, 2, 4, 8} produces bit-identical report
//    documents and equal certificate multisets.

void criterion6() {
    auto t0 = clock_type::now();
    std::string reference_doc;
    fermat::MultisetDigest reference_digest;
    bool pass = true;
    std::uint64_t runs = 0;
    for (unsigned workers : {1u, 2u, 4u, 8u}) {
        fermat::SearchConfig cfg = sweep_config();
        cfg.worker_count = workers;
        fermat::DigestSink sink;
        fermat::SearchReport r = fermat::run_search(cfg, &sink);
        std::string doc = fermat::report_document(r);
        if (runs == 0) {
            reference_doc = doc;
            reference_digest = sink.digest();
        } else {
            if (doc != reference_doc) pass = false;
            if (!(sink.digest() == reference_digest)) pass = false;
        }
        ++runs;
    }
    double secs = seconds_since(t0);
    std::ostringstream detail;
    detail << runs << " runs, " << reference_digest.count << " certificates each, " << secs
           << "s";
    report(6, "bit-identical reports and certificate multisets for 1/2/4/8 workers", pass,
           detail.str());
}

// ---------------------------------------------------------------------------
// 7. Mutation sensitivity: each single-fault corruption of an identity
//    operation makes the selftest exit 3.

int run_command(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WEXITSTATUS(rc);
}

void criterion7(const std::string& cli) {
    bool pass = true;
    std::ostringstream detail;
    int healthy = run_command(cli + " selftest > /dev/null 2>&1");
    if (healthy != 0) {
        pass = false;
        detail << "healthy selftest exited " << healthy << "; ";
    }
    for (fermat::Mutation m : fermat::all_mutations()) {
        std::string name(fermat::to_string(m));
        int rc = run_command(cli + " selftest --mutate " + name + " > /dev/null 2>&1");
        if (rc != 3) {
            pass = false;
            detail << name << " exited " << rc << " (want 3); ";
        }
    }
    detail << "healthy=0 and " << fermat::all_mutations().size() << " mutations=3";
    report(7, "selftest exits 3 under every identity mutation", pass, detail.str());
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-fermat-cli>\n";
        return 2;
    }
    std::string cli = argv[1];

    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7(cli);

    if (!g_all_passed) {
        std::printf("acceptance: FAILURES PRESENT\n");
        return 1;
    }
    std::printf("acceptance: all criteria passed\n");
    return 0;
}
