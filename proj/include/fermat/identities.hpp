#pragma once

// The algebraic identities behind the refutation filters, each exposed as an
// exact, independently testable operation:
//
//   (x+y) * sum_{i=0}^{n-1} (-1)^i x^i y^{n-1-i}  =  x^n + y^n   (n odd)
//   (z-y) * sum_{i=0}^{n-1} z^i y^{n-1-i}         =  z^n - y^n
//   sum_{j=1}^{p-1} C(p,j) y^j a^{p-j}            =  (y+a)^p - y^p - a^p
//
// plus the quadratic-discriminant reduction: from any solution of
// x^p + y^p = z^p with gcd(x,y) = 1 one obtains (a,b,c) = (z^2, xy, c) with
// gcd(a,b) = 1 and a^p - 4 b^p = c^2.

#include <fermat/arith.hpp>

#include <stdexcept>

namespace fermat {

// (a, b, c) produced by the discriminant reduction: a = z^2, b = x*y,
// c = sqrt(z^2p - 4(xy)^p). Satisfies a^p - 4 b^p = c^2 for the exponent it
// was produced under, and gcd(a, b) = 1 when built from a coprime solution.
struct ReductionWitness {
    Natural a;
    Natural b;
    Natural c;
};

namespace detail {

// Deliberate single-fault corruptions of the sum evaluations below. The
// selftest uses these to prove its identity suite actually discriminates:
// dropping the last term or flipping the alternating sign must make the
// suite fail. Public entry points always pass the default (no corruption).
struct SumTweak {
    bool drop_last_term = false;
    bool flip_sign = false;
};

inline Integer alt_factor_sum_impl(const Natural& x, const Natural& y,
                                   const Natural& n, SumTweak tweak) {
    Natural terms = n;
    if (tweak.drop_last_term) terms -= 1;
    Integer acc = 0;
    Natural xp = 1; // x^i
    for (Natural i = 0; i < terms; ++i) {
        Integer term = xp * pow(y, n - 1 - i);
        bool negative = (i & 1) != 0;
        if (tweak.flip_sign) negative = !negative;
        if (negative)
            acc -= term;
        else
            acc += term;
        xp *= x;
    }
    return acc;
}

inline Integer diff_factor_sum_impl(const Natural& z, const Natural& y,
                                    const Natural& n, SumTweak tweak) {
    Natural terms = n;
    if (tweak.drop_last_term) terms -= 1;
    Integer acc = 0;
    Natural zp = 1; // z^i
    for (Natural i = 0; i < terms; ++i) {
        acc += zp * pow(y, n - 1 - i);
        zp *= z;
    }
    return acc;
}

inline Integer binomial_gap_expansion_impl(const Natural& y, const Natural& a,
                                           const Natural& p, SumTweak tweak) {
    Natural last = p - 1;
    if (tweak.drop_last_term) last -= 1;
    Integer acc = 0;
    for (Natural j = 1; j <= last; ++j)
        acc += binomial(p, j) * pow(y, j) * pow(a, p - j);
    return acc;
}

} // namespace detail

// S with (x+y) * S = x^n + y^n, for odd n. Evaluated with signed
// intermediate arithmetic; the result of the genuine sum is always >= 1.
inline Natural alt_factor_sum(const Natural& x, const Natural& y, const Natural& n) {
    if (x < 1 || y < 1) throw std::domain_error("alt_factor_sum: x, y must be >= 1");
    if (n < 1 || (n & 1) == 0) throw std::domain_error("alt_factor_sum: n must be odd and >= 1");
    Integer s = detail::alt_factor_sum_impl(x, y, n, {});
    if (s < 1) throw std::logic_error("alt_factor_sum: internal error, sum not positive");
    return s;
}

// S with (z-y) * S = z^n - y^n.
inline Natural diff_factor_sum(const Natural& z, const Natural& y, const Natural& n) {
    if (y < 1) throw std::domain_error("diff_factor_sum: y must be >= 1");
    if (z <= y) throw std::domain_error("diff_factor_sum: requires z > y");
    if (n < 1) throw std::domain_error("diff_factor_sum: n must be >= 1");
    return Natural(detail::diff_factor_sum_impl(z, y, n, {}));
}

// sum_{j=1}^{p-1} C(p,j) y^j a^{p-j}  ==  (y+a)^p - y^p - a^p.
inline Natural binomial_gap_expansion(const Natural& y, const Natural& a, const Natural& p) {
    if (y < 1 || a < 1) throw std::domain_error("binomial_gap_expansion: y, a must be >= 1");
    if (p < 2) throw std::domain_error("binomial_gap_expansion: p must be >= 2");
    return Natural(detail::binomial_gap_expansion_impl(y, a, p, {}));
}

// D = z^2p - 4 (xy)^p, signed. On any solution of x^p + y^p = z^p this
// equals (x^p - y^p)^2 and in particular is a perfect square.
inline Integer discriminant(const Natural& x, const Natural& y, const Natural& z,
                            const Natural& p) {
    if (x < 1 || y < 1 || z < 1) throw std::domain_error("discriminant: x, y, z must be >= 1");
    if (p < 1) throw std::domain_error("discriminant: p must be >= 1");
    return Integer(pow(z, 2 * p)) - 4 * Integer(pow(x * y, p));
}

inline bool pairwise_coprime(const Natural& x, const Natural& y, const Natural& z) {
    if (x < 1 || y < 1 || z < 1) throw std::domain_error("pairwise_coprime: arguments must be >= 1");
    return gcd(x, y) == 1 && gcd(y, z) == 1 && gcd(x, z) == 1;
}

// Builds the (a, b, c) witness from a genuine solution of x^p + y^p = z^p
// with gcd(x, y) = 1 and x != y. The exponent is not restricted to odd
// primes: the construction itself works for any p >= 1, and the p = 1 and
// p = 2 solution families are the only way to exercise it on real inputs.
inline ReductionWitness theorem1_reduce(const Natural& x, const Natural& y,
                                        const Natural& z, const Natural& p) {
    if (x < 1 || y < 1 || z < 1) throw std::domain_error("theorem1_reduce: x, y, z must be >= 1");
    if (p < 1) throw std::domain_error("theorem1_reduce: p must be >= 1");
    if (pow(x, p) + pow(y, p) != pow(z, p)) throw std::domain_error("not a solution");
    // x = y with gcd(x,y) = 1 forces x = y = 1, which is never a solution of
    // a sum of equal powers; it is exactly the degenerate case where the
    // discriminant vanishes.
    if (x == y) throw std::domain_error("theorem1_reduce: x = y is excluded");
    if (gcd(x, y) != 1) throw std::domain_error("theorem1_reduce: requires gcd(x, y) = 1");
    Integer d = discriminant(x, y, z, p);
    if (d < 0) throw std::logic_error("theorem1_reduce: negative discriminant on a solution");
    auto c = perfect_square_root(Natural(d));
    if (!c) throw std::logic_error("theorem1_reduce: discriminant of a solution is not a square");
    return ReductionWitness{z * z, x * y, *c};
}

} // namespace fermat
