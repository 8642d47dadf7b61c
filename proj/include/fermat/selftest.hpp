#pragma once

// Built-in consistency suite: randomized identity checks, the Euclidean-step
// sweep, and certificate re-check over a canned sweep. The suite can be run
// with a deliberate single-fault corruption of one identity evaluation
// (`Mutation`); a healthy suite must then fail, which is how its own
// sensitivity is verified.

#include <fermat/arith.hpp>
#include <fermat/filters.hpp>
#include <fermat/identities.hpp>
#include <fermat/search.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace fermat {

enum class Mutation { None, AltSumLimit, AltSumSign, DiffSumLimit, GapSumLimit };

inline constexpr std::string_view to_string(Mutation m) {
    switch (m) {
        case Mutation::None: return "none";
        case Mutation::AltSumLimit: return "alt-sum-limit";
        case Mutation::AltSumSign: return "alt-sum-sign";
        case Mutation::DiffSumLimit: return "diff-sum-limit";
        case Mutation::GapSumLimit: return "gap-sum-limit";
    }
    return "?";
}

inline std::optional<Mutation> parse_mutation(std::string_view s) {
    for (Mutation m : {Mutation::None, Mutation::AltSumLimit, Mutation::AltSumSign,
                       Mutation::DiffSumLimit, Mutation::GapSumLimit})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

inline std::vector<Mutation> all_mutations() {
    return {Mutation::AltSumLimit, Mutation::AltSumSign, Mutation::DiffSumLimit,
            Mutation::GapSumLimit};
}

struct SelftestResult {
    struct Suite {
        std::string name;
        std::uint64_t checks = 0;
        std::uint64_t failures = 0;
    };
    std::vector<Suite> suites;

    bool passed() const {
        if (suites.empty()) return false;
        for (const Suite& s : suites)
            if (s.failures != 0) return false;
        return true;
    }
};

namespace detail {

// Primitive Pythagorean triples with hypotenuse <= limit, via the classic
// parametrization (m^2 - n^2, 2mn, m^2 + n^2), gcd(m,n) = 1, m - n odd.
inline std::vector<std::tuple<Natural, Natural, Natural>> primitive_triples(const Natural& limit) {
    std::vector<std::tuple<Natural, Natural, Natural>> out;
    for (Natural m = 2; m * m + 1 <= limit; ++m)
        for (Natural n = 1; n < m; ++n) {
            if (((m - n) & 1) == 0) continue;
            if (boost::multiprecision::gcd(m, n) != 1) continue;
            Natural z = m * m + n * n;
            if (z > limit) break;
            out.emplace_back(m * m - n * n, 2 * m * n, z);
        }
    return out;
}

} // namespace detail

inline SelftestResult run_selftest(Mutation mutation = Mutation::None,
                                   std::ostream* log = nullptr) {
    SelftestResult result;

    detail::SumTweak alt_tweak, diff_tweak, gap_tweak;
    switch (mutation) {
        case Mutation::None: break;
        case Mutation::AltSumLimit: alt_tweak.drop_last_term = true; break;
        case Mutation::AltSumSign: alt_tweak.flip_sign = true; break;
        case Mutation::DiffSumLimit: diff_tweak.drop_last_term = true; break;
        case Mutation::GapSumLimit: gap_tweak.drop_last_term = true; break;
    }

    // --- identity suite -----------------------------------------------------
    {
        SelftestResult::Suite suite{"identities", 0, 0};
        auto check = [&](bool ok) {
            ++suite.checks;
            if (!ok) ++suite.failures;
        };

        std::mt19937_64 rng(0x5eedf117e25ULL);
        std::uniform_int_distribution<std::uint64_t> value_dist(1, 1'000'000);
        std::uniform_int_distribution<int> n_dist(0, 10);
        for (int i = 0; i < 400; ++i) {
            Natural x = value_dist(rng), y = value_dist(rng);
            Natural n = 2 * n_dist(rng) + 1; // odd, 1..21
            try {
                Integer s = detail::alt_factor_sum_impl(x, y, n, alt_tweak);
                check(Integer(x + y) * s == Integer(pow(x, n)) + Integer(pow(y, n)));
            } catch (...) {
                check(false);
            }
            Natural z = y + 1 + value_dist(rng);
            try {
                Integer s = detail::diff_factor_sum_impl(z, y, n, diff_tweak);
                check(Integer(z - y) * s == Integer(pow(z, n)) - Integer(pow(y, n)));
            } catch (...) {
                check(false);
            }
            Natural p = n == 1 ? Natural(2) : n;
            try {
                Integer s = detail::binomial_gap_expansion_impl(y, x, p, gap_tweak);
                check(s == Integer(pow(y + x, p)) - Integer(pow(y, p)) - Integer(pow(x, p)));
            } catch (...) {
                check(false);
            }
        }

        // Solution families: the reduction must hold exactly on every real
        // solution of the p = 1 and p = 2 families.
        for (Natural x = 1; x <= 60; ++x)
            for (Natural y = x + 1; y <= 60; ++y) {
                if (boost::multiprecision::gcd(x, y) != 1) continue;
                Natural z = x + y;
                try {
                    ReductionWitness w = theorem1_reduce(x, y, z, 1);
                    check(w.a == z * z && w.b == x * y && w.c == y - x &&
                          Integer(w.a) - 4 * Integer(w.b) == Integer(w.c) * Integer(w.c) &&
                          gcd(w.a, w.b) == 1 && pairwise_coprime(x, y, z));
                } catch (...) {
                    check(false);
                }
            }
        for (const auto& [x, y, z] : detail::primitive_triples(200)) {
            try {
                ReductionWitness w = theorem1_reduce(x, y, z, 2);
                Natural c_expect = x > y ? x * x - y * y : y * y - x * x;
                check(w.a == z * z && w.b == x * y && w.c == c_expect &&
                      Integer(pow(w.a, 2)) - 4 * Integer(pow(w.b, 2)) ==
                          Integer(w.c) * Integer(w.c) &&
                      gcd(w.a, w.b) == 1);
            } catch (...) {
                check(false);
            }
        }

        result.suites.push_back(suite);
    }

    // --- Euclidean step sweep ----------------------------------------------
    {
        SelftestResult::Suite suite{"euclid-step", 0, 0};
        for (Natural z = 2; z <= 80; ++z)
            for (Natural s = z + 1; s < 2 * z; ++s)
                for (Natural x = 1; x < s; ++x) {
                    ++suite.checks;
                    try {
                        if (!euclid_step_check(x, s - x, z)) ++suite.failures;
                    } catch (...) {
                        ++suite.failures;
                    }
                }
        result.suites.push_back(suite);
    }

    // --- certificate re-check on a canned sweep -----------------------------
    {
        SelftestResult::Suite suite{"certificate-recheck", 0, 0};
        SearchConfig cfg;
        cfg.x_max = cfg.y_max = cfg.z_max = 40;
        cfg.p_set = {3, 5};
        for (Natural z = 1; z <= cfg.z_max; ++z)
            for (Natural x = 1; x <= cfg.x_max; ++x)
                for (Natural y = x; y <= cfg.y_max; ++y)
                    for (const Natural& p : cfg.p_set) {
                        Candidate c(x, y, z, OddPrime::unchecked(p));
                        Verdict v = detail::evaluate_unchecked(c, cfg.pipeline);
                        ++suite.checks;
                        if (v.refuted()) {
                            if (!recheck_certificate(c, *v.certificate)) ++suite.failures;
                            if (oracle_check(x, y, z, p)) ++suite.failures;
                        } else {
                            if (oracle_check(x, y, z, p)) ++suite.failures;
                        }
                    }
        result.suites.push_back(suite);
    }

    if (log) {
        for (const auto& s : result.suites)
            *log << s.name << ": " << (s.checks - s.failures) << "/" << s.checks
                 << " checks passed\n";
    }
    return result;
}

} // namespace fermat
