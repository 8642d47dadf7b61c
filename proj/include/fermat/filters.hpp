#pragma once

// Necessary-condition filters over Fermat-equation candidates (x, y, z, p)
// with p an odd prime. Each filter implements a criterion that every genuine
// solution of x^p + y^p = z^p would have to satisfy; when the criterion
// fails, the filter refutes the candidate and emits a certificate from which
// the refutation can be re-verified without trusting the filter.
//
// The criteria, for any solution with p an odd prime:
//   BASIC_BOUNDS  x < z, y < z and z < x+y < 2z
//   T2            gcd(x,y) = 1 and z-y >= 2 together forbid (z-y) | x
//   T3            gcd(x+y,z), gcd(z-y,x), gcd(z-x,y) are all >= 2
//   T4            z is composite (z prime is impossible, including z = 2)
//   T5            if gcd(x,y) = 1 then z+2 <= x+y <= 2(z-1)
//   T6            z-y >= 2 and z-x >= 2
//   MODULAR       x^p + y^p == z^p (mod m) for every modulus m
//   T1_EXTERNAL   for p >= 7 and gcd(x,y) = 1, refutation by an external
//                 theorem (Bennett-Skinner 2004, Theorem 1.2: no coprime
//                 a, b, c with a^p - 4b^p = c^2); off by default.

#include <fermat/arith.hpp>
#include <fermat/identities.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fermat {

struct Candidate {
    Natural x;
    Natural y;
    Natural z;
    OddPrime p;

    Candidate(Natural x_, Natural y_, Natural z_, OddPrime p_)
        : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)), p(std::move(p_)) {
        if (x < 1 || y < 1 || z < 1)
            throw std::domain_error("Candidate: x, y, z must be >= 1");
    }

    Candidate swapped_xy() const { return Candidate(y, x, z, p); }

    friend bool operator==(const Candidate& a, const Candidate& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z && a.p == b.p;
    }
};

enum class FilterId { BasicBounds, T2, T3, T4, T5, T6, Modular, T1External };

inline constexpr std::string_view to_string(FilterId id) {
    switch (id) {
        case FilterId::BasicBounds: return "BASIC_BOUNDS";
        case FilterId::T2: return "T2";
        case FilterId::T3: return "T3";
        case FilterId::T4: return "T4";
        case FilterId::T5: return "T5";
        case FilterId::T6: return "T6";
        case FilterId::Modular: return "MODULAR";
        case FilterId::T1External: return "T1_EXTERNAL";
    }
    return "?";
}

inline std::optional<FilterId> parse_filter_id(std::string_view s) {
    for (FilterId id : {FilterId::BasicBounds, FilterId::T2, FilterId::T3, FilterId::T4,
                        FilterId::T5, FilterId::T6, FilterId::Modular, FilterId::T1External})
        if (s == to_string(id)) return id;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Certificates

enum class BoundsViolation { XGeZ, YGeZ, SumLeZ, SumGe2Z };
enum class T3Clause { SumZ, ZMinusYX, ZMinusXY }; // which gcd equals 1
enum class T6Side { ZMinusY, ZMinusX };           // which gap equals 1

struct BoundsWitness {
    BoundsViolation violated;
    friend bool operator==(const BoundsWitness&, const BoundsWitness&) = default;
};
struct T2Witness {
    Natural d;    // z - y (or z - x when swapped); d >= 2 and d | x (resp. y)
    bool swapped; // criterion applied with the roles of x and y exchanged
    friend bool operator==(const T2Witness&, const T2Witness&) = default;
};
struct T3Witness {
    T3Clause clause;
    Natural a; // the pair whose gcd is 1, in clause order
    Natural b;
    friend bool operator==(const T3Witness&, const T3Witness&) = default;
};
struct T4Witness {
    Natural z; // prime
    friend bool operator==(const T4Witness&, const T4Witness&) = default;
};
struct T5Witness {
    Natural g;     // gcd(x, y), always 1 in a certificate
    Natural s;     // x + y
    Natural lower; // z + 2
    Natural upper; // 2 (z - 1)
    std::optional<Natural> r; // s - z, present iff s > z
    friend bool operator==(const T5Witness&, const T5Witness&) = default;
};
struct T6Witness {
    T6Side side;
    friend bool operator==(const T6Witness&, const T6Witness&) = default;
};
struct ModularWitness {
    Natural m;
    Natural lhs; // (x^p + y^p) mod m
    Natural rhs; // z^p mod m
    friend bool operator==(const ModularWitness&, const ModularWitness&) = default;
};
struct ExternalWitness {
    Natural gcd_xy; // always 1; the refutation otherwise rests on the cited theorem
    friend bool operator==(const ExternalWitness&, const ExternalWitness&) = default;
};

using Witness = std::variant<BoundsWitness, T2Witness, T3Witness, T4Witness, T5Witness,
                             T6Witness, ModularWitness, ExternalWitness>;

struct Certificate {
    FilterId filter_id;
    Witness witness;
    bool external_assumption = false;

    friend bool operator==(const Certificate&, const Certificate&) = default;
};

// One entry of the certificate stream: the refuted candidate together with
// the certificate that refutes it.
struct Refutation {
    Candidate candidate;
    Certificate certificate;

    friend bool operator==(const Refutation&, const Refutation&) = default;
};

struct Verdict {
    std::optional<Certificate> certificate;

    bool refuted() const { return certificate.has_value(); }
    static Verdict inconclusive() { return Verdict{std::nullopt}; }
    static Verdict refute(FilterId id, Witness w, bool external = false) {
        return Verdict{Certificate{id, std::move(w), external}};
    }
};

// ---------------------------------------------------------------------------
// Filters

inline Verdict filter_basic_bounds(const Candidate& c) {
    if (c.x >= c.z) return Verdict::refute(FilterId::BasicBounds, BoundsWitness{BoundsViolation::XGeZ});
    if (c.y >= c.z) return Verdict::refute(FilterId::BasicBounds, BoundsWitness{BoundsViolation::YGeZ});
    Natural s = c.x + c.y;
    if (s <= c.z) return Verdict::refute(FilterId::BasicBounds, BoundsWitness{BoundsViolation::SumLeZ});
    if (s >= 2 * c.z) return Verdict::refute(FilterId::BasicBounds, BoundsWitness{BoundsViolation::SumGe2Z});
    return Verdict::inconclusive();
}

namespace detail {

inline Verdict t2_oriented(const Candidate& c, bool swapped) {
    const Natural& u = swapped ? c.y : c.x; // the dividend
    const Natural& v = swapped ? c.x : c.y; // the subtrahend
    if (c.z <= v) return Verdict::inconclusive();
    Natural d = c.z - v;
    if (d < 2) return Verdict::inconclusive();
    if (u % d != 0) return Verdict::inconclusive();
    if (gcd(c.x, c.y) != 1) return Verdict::inconclusive();
    return Verdict::refute(FilterId::T2, T2Witness{std::move(d), swapped});
}

} // namespace detail

inline Verdict filter_t2(const Candidate& c) { return detail::t2_oriented(c, false); }

inline Verdict filter_t3(const Candidate& c) {
    Natural s = c.x + c.y;
    if (gcd(s, c.z) == 1)
        return Verdict::refute(FilterId::T3, T3Witness{T3Clause::SumZ, std::move(s), c.z});
    if (c.z > c.y) {
        Natural d = c.z - c.y;
        if (gcd(d, c.x) == 1)
            return Verdict::refute(FilterId::T3, T3Witness{T3Clause::ZMinusYX, std::move(d), c.x});
    }
    if (c.z > c.x) {
        Natural d = c.z - c.x;
        if (gcd(d, c.y) == 1)
            return Verdict::refute(FilterId::T3, T3Witness{T3Clause::ZMinusXY, std::move(d), c.y});
    }
    return Verdict::inconclusive();
}

inline Verdict filter_t4(const Candidate& c) {
    if (is_prime(c.z)) return Verdict::refute(FilterId::T4, T4Witness{c.z});
    return Verdict::inconclusive();
}

inline Verdict filter_t5(const Candidate& c) {
    Natural g = gcd(c.x, c.y);
    if (g != 1) return Verdict::inconclusive(); // hypothesis fails; the criterion is silent
    Natural s = c.x + c.y;
    Natural lower = c.z + 2;
    Natural upper = 2 * (c.z - 1);
    if (s >= lower && s <= upper) return Verdict::inconclusive();
    std::optional<Natural> r;
    if (s > c.z) r = s - c.z;
    return Verdict::refute(FilterId::T5,
                           T5Witness{std::move(g), std::move(s), std::move(lower),
                                     std::move(upper), std::move(r)});
}

inline Verdict filter_t6(const Candidate& c) {
    if (c.z == c.y + 1) return Verdict::refute(FilterId::T6, T6Witness{T6Side::ZMinusY});
    if (c.z == c.x + 1) return Verdict::refute(FilterId::T6, T6Witness{T6Side::ZMinusX});
    return Verdict::inconclusive();
}

namespace detail {

// (x^p + y^p) mod m and z^p mod m.
inline std::pair<Natural, Natural> congruence_residues(const Natural& x, const Natural& y,
                                                       const Natural& z, const Natural& p,
                                                       const Natural& m) {
    using boost::multiprecision::powm;
    Natural px = powm(x, p, m);
    Natural py = powm(y, p, m);
    Natural lhs = (px + py) % m;
    Natural rhs = powm(z, p, m);
    return {std::move(lhs), std::move(rhs)};
}

} // namespace detail

// True iff x^p + y^p == z^p (mod m). Exponent-agnostic; a genuine equality
// satisfies the congruence for every modulus.
inline bool congruence_holds(const Natural& x, const Natural& y, const Natural& z,
                             const Natural& p, const Natural& m) {
    if (m < 2) throw std::domain_error("congruence_holds: modulus must be >= 2");
    if (x < 1 || y < 1 || z < 1 || p < 1)
        throw std::domain_error("congruence_holds: arguments must be >= 1");
    auto [lhs, rhs] = detail::congruence_residues(x, y, z, p, m);
    return lhs == rhs;
}

inline Verdict filter_modular(const Candidate& c, const Natural& m) {
    if (m < 2) throw std::domain_error("filter_modular: modulus must be >= 2");
    auto [lhs, rhs] = detail::congruence_residues(c.x, c.y, c.z, c.p.value(), m);
    if (lhs != rhs)
        return Verdict::refute(FilterId::Modular,
                               ModularWitness{m, std::move(lhs), std::move(rhs)});
    return Verdict::inconclusive();
}

// Conditional filter: sound only if the cited nonexistence theorem holds
// (Bennett-Skinner 2004, Thm 1.2). Certificates carry an explicit flag and
// the soundness suite never runs this filter.
inline Verdict filter_t1_external(const Candidate& c) {
    if (c.p.value() == 3 || c.p.value() == 5) return Verdict::inconclusive();
    Natural g = gcd(c.x, c.y);
    if (g != 1) return Verdict::inconclusive();
    return Verdict::refute(FilterId::T1External, ExternalWitness{std::move(g)}, true);
}

// gcd(x+y, z) == gcd(z, x+y-z): one Euclidean division step, valid whenever
// z < x+y < 2z. Always true; exposed so the step can be property-tested.
inline bool euclid_step_check(const Natural& x, const Natural& y, const Natural& z) {
    if (x < 1 || y < 1 || z < 1)
        throw std::domain_error("euclid_step_check: arguments must be >= 1");
    Natural s = x + y;
    if (!(z < s && s < 2 * z))
        throw std::domain_error("euclid_step_check: requires z < x+y < 2z");
    return gcd(s, z) == gcd(z, s - z);
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineConfig {
    std::vector<FilterId> filters;
    std::vector<Natural> moduli = {9, 25, 49}; // used by MODULAR steps
    bool allow_external = false;               // must be set to run T1_EXTERNAL

    friend bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
        return a.filters == b.filters && a.moduli == b.moduli &&
               a.allow_external == b.allow_external;
    }
};

// Cheapest predicates first; order is configuration, not semantics.
inline PipelineConfig default_pipeline() {
    return PipelineConfig{{FilterId::BasicBounds, FilterId::T6, FilterId::T4, FilterId::T3,
                           FilterId::T5, FilterId::T2, FilterId::Modular},
                          {9, 25, 49},
                          false};
}

inline void validate_pipeline(const PipelineConfig& cfg) {
    if (cfg.filters.empty()) throw std::invalid_argument("pipeline: must not be empty");
    for (std::size_t i = 0; i < cfg.filters.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.filters.size(); ++j)
            if (cfg.filters[i] == cfg.filters[j])
                throw std::invalid_argument("pipeline: duplicate filter id");
    for (FilterId f : cfg.filters) {
        if (f == FilterId::T1External && !cfg.allow_external)
            throw std::invalid_argument(
                "pipeline: T1_EXTERNAL requires explicitly acknowledging the external "
                "theorem it assumes (allow_external)");
        if (f == FilterId::Modular) {
            if (cfg.moduli.empty())
                throw std::invalid_argument("pipeline: MODULAR requires at least one modulus");
            for (const Natural& m : cfg.moduli)
                if (m < 2) throw std::invalid_argument("pipeline: moduli must be >= 2");
        }
    }
}

namespace detail {

// Pipeline body without the validation pass; run_search validates once and
// then calls this per candidate.
inline Verdict evaluate_unchecked(const Candidate& c, const PipelineConfig& cfg) {
    for (FilterId f : cfg.filters) {
        Verdict v = Verdict::inconclusive();
        switch (f) {
            case FilterId::BasicBounds: v = filter_basic_bounds(c); break;
            case FilterId::T2:
                // The divisor criterion names x as the dividend; relabeling
                // x and y in the equation is immediate, so the pipeline
                // tries both orientations.
                v = t2_oriented(c, false);
                if (!v.refuted()) v = t2_oriented(c, true);
                break;
            case FilterId::T3: v = filter_t3(c); break;
            case FilterId::T4: v = filter_t4(c); break;
            case FilterId::T5: v = filter_t5(c); break;
            case FilterId::T6: v = filter_t6(c); break;
            case FilterId::Modular:
                for (const Natural& m : cfg.moduli) {
                    v = filter_modular(c, m);
                    if (v.refuted()) break;
                }
                break;
            case FilterId::T1External: v = filter_t1_external(c); break;
        }
        if (v.refuted()) return v;
    }
    return Verdict::inconclusive();
}

} // namespace detail

// Applies the filters in order and returns the first refutation, or
// Inconclusive if none fire. Deterministic for a fixed pipeline.
inline Verdict evaluate(const Candidate& c, const PipelineConfig& cfg) {
    validate_pipeline(cfg);
    return detail::evaluate_unchecked(c, cfg);
}

// ---------------------------------------------------------------------------
// Independent certificate re-check
//
// Recomputes every claim in a certificate from the candidate alone, using
// its own plain-loop arithmetic rather than the filters' helpers, so a bug
// in either side shows up as a mismatch.

namespace recheck_detail {

inline Natural plain_gcd(Natural a, Natural b) {
    while (b != 0) {
        Natural t = a % b;
        a = std::move(b);
        b = std::move(t);
    }
    return a;
}

inline bool plain_is_prime(const Natural& n) {
    if (n < 2) return false;
    if (n == 2) return true;
    if (n % 2 == 0) return false;
    for (Natural d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline Natural plain_powm(const Natural& base, const Natural& exp, const Natural& m) {
    Natural result = 1;
    Natural b = base % m;
    Natural e = exp;
    while (e > 0) {
        if ((e & 1) != 0) result = (result * b) % m;
        b = (b * b) % m;
        e >>= 1;
    }
    return result;
}

} // namespace recheck_detail

inline bool recheck_certificate(const Candidate& c, const Certificate& cert) {
    using namespace recheck_detail;
    if (cert.external_assumption != (cert.filter_id == FilterId::T1External)) return false;
    switch (cert.filter_id) {
        case FilterId::BasicBounds: {
            auto* w = std::get_if<BoundsWitness>(&cert.witness);
            if (!w) return false;
            switch (w->violated) {
                case BoundsViolation::XGeZ: return c.x >= c.z;
                case BoundsViolation::YGeZ: return c.y >= c.z;
                case BoundsViolation::SumLeZ: return c.x + c.y <= c.z;
                case BoundsViolation::SumGe2Z: return c.x + c.y >= 2 * c.z;
            }
            return false;
        }
        case FilterId::T2: {
            auto* w = std::get_if<T2Witness>(&cert.witness);
            if (!w) return false;
            const Natural& u = w->swapped ? c.y : c.x;
            const Natural& v = w->swapped ? c.x : c.y;
            if (c.z <= v) return false;
            if (w->d != c.z - v) return false;
            if (w->d < 2) return false;
            if (u % w->d != 0) return false;
            return plain_gcd(c.x, c.y) == 1;
        }
        case FilterId::T3: {
            auto* w = std::get_if<T3Witness>(&cert.witness);
            if (!w) return false;
            switch (w->clause) {
                case T3Clause::SumZ:
                    if (w->a != c.x + c.y || w->b != c.z) return false;
                    break;
                case T3Clause::ZMinusYX:
                    if (c.z <= c.y || w->a != c.z - c.y || w->b != c.x) return false;
                    break;
                case T3Clause::ZMinusXY:
                    if (c.z <= c.x || w->a != c.z - c.x || w->b != c.y) return false;
                    break;
            }
            return plain_gcd(w->a, w->b) == 1;
        }
        case FilterId::T4: {
            auto* w = std::get_if<T4Witness>(&cert.witness);
            if (!w) return false;
            return w->z == c.z && plain_is_prime(c.z);
        }
        case FilterId::T5: {
            auto* w = std::get_if<T5Witness>(&cert.witness);
            if (!w) return false;
            if (w->g != 1 || plain_gcd(c.x, c.y) != 1) return false;
            if (w->s != c.x + c.y) return false;
            if (w->lower != c.z + 2 || w->upper != 2 * (c.z - 1)) return false;
            if (w->s >= w->lower && w->s <= w->upper) return false;
            if (w->s > c.z) {
                if (!w->r || *w->r != w->s - c.z) return false;
            } else if (w->r) {
                return false;
            }
            return true;
        }
        case FilterId::T6: {
            auto* w = std::get_if<T6Witness>(&cert.witness);
            if (!w) return false;
            if (w->side == T6Side::ZMinusY) return c.z == c.y + 1;
            return c.z == c.x + 1;
        }
        case FilterId::Modular: {
            auto* w = std::get_if<ModularWitness>(&cert.witness);
            if (!w) return false;
            if (w->m < 2) return false;
            Natural lhs = (plain_powm(c.x, c.p.value(), w->m) + plain_powm(c.y, c.p.value(), w->m)) % w->m;
            Natural rhs = plain_powm(c.z, c.p.value(), w->m);
            return lhs == w->lhs && rhs == w->rhs && lhs != rhs;
        }
        case FilterId::T1External: {
            auto* w = std::get_if<ExternalWitness>(&cert.witness);
            if (!w) return false;
            if (c.p.value() == 3 || c.p.value() == 5) return false;
            return w->gcd_xy == 1 && plain_gcd(c.x, c.y) == 1;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Human-readable rendering

inline std::string describe_certificate(const Candidate& c, const Certificate& cert) {
    auto str = [](const Natural& n) { return n.str(); };
    switch (cert.filter_id) {
        case FilterId::BasicBounds: {
            const auto& w = std::get<BoundsWitness>(cert.witness);
            Natural s = c.x + c.y;
            switch (w.violated) {
                case BoundsViolation::XGeZ: return "x>=z (" + str(c.x) + ">=" + str(c.z) + ")";
                case BoundsViolation::YGeZ: return "y>=z (" + str(c.y) + ">=" + str(c.z) + ")";
                case BoundsViolation::SumLeZ: return "x+y<=z (" + str(s) + "<=" + str(c.z) + ")";
                case BoundsViolation::SumGe2Z: return "x+y>=2z (" + str(s) + ">=" + str(2 * c.z) + ")";
            }
            return "?";
        }
        case FilterId::T2: {
            const auto& w = std::get<T2Witness>(cert.witness);
            const Natural& u = w.swapped ? c.y : c.x;
            std::string roles = w.swapped ? "d=z-x=" : "d=z-y=";
            return roles + w.d.str() + " divides " + (w.swapped ? "y=" : "x=") + u.str() +
                   ", gcd(x,y)=1";
        }
        case FilterId::T3: {
            const auto& w = std::get<T3Witness>(cert.witness);
            const char* name = w.clause == T3Clause::SumZ      ? "gcd(x+y,z)"
                               : w.clause == T3Clause::ZMinusYX ? "gcd(z-y,x)"
                                                                : "gcd(z-x,y)";
            return std::string(name) + "=gcd(" + w.a.str() + "," + w.b.str() + ")=1";
        }
        case FilterId::T4:
            return "z=" + c.z.str() + " is prime";
        case FilterId::T5: {
            const auto& w = std::get<T5Witness>(cert.witness);
            return "gcd(x,y)=1 and x+y=" + w.s.str() + " outside [" + w.lower.str() + ", " +
                   w.upper.str() + "]";
        }
        case FilterId::T6: {
            const auto& w = std::get<T6Witness>(cert.witness);
            return w.side == T6Side::ZMinusY ? "z-y=1" : "z-x=1";
        }
        case FilterId::Modular: {
            const auto& w = std::get<ModularWitness>(cert.witness);
            return "(x^p+y^p) mod " + w.m.str() + " = " + w.lhs.str() + " != " + w.rhs.str() +
                   " = z^p mod " + w.m.str();
        }
        case FilterId::T1External:
            return "gcd(x,y)=1 and p=" + c.p.value().str() +
                   " not in {3,5} [assumes Bennett-Skinner 2004, Thm 1.2]";
    }
    return "?";
}

} // namespace fermat
