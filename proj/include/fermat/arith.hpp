#pragma once

// Exact arbitrary-precision integer primitives. Everything here is pure and
// exact: no floating point, no probabilistic answers within the ranges the
// search harness can enumerate.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fermat {

// Arbitrary-precision integer. `Natural` is used where a value is >= 0 by
// contract; `Integer` where a sign can legitimately appear (discriminants,
// alternating sums). Both share the same exact representation.
using Natural = boost::multiprecision::cpp_int;
using Integer = boost::multiprecision::cpp_int;

inline Natural gcd(const Natural& a, const Natural& b) {
    if (a < 0 || b < 0) throw std::domain_error("gcd: arguments must be >= 0");
    if (a == 0 && b == 0) throw std::domain_error("gcd(0, 0) is undefined");
    return boost::multiprecision::gcd(a, b);
}

// Floor of the square root, by Newton iteration on integers.
inline Natural integer_sqrt(const Natural& n) {
    if (n < 0) throw std::domain_error("integer_sqrt: argument must be >= 0");
    if (n < 2) return n;
    // Start above the true root: 2^(floor(msb/2)+1) > sqrt(n).
    Natural x = Natural(1) << (boost::multiprecision::msb(n) / 2 + 1);
    for (;;) {
        Natural y = (x + n / x) >> 1;
        if (y >= x) return x;
        x = std::move(y);
    }
}

inline std::optional<Natural> perfect_square_root(const Natural& n) {
    if (n < 0) return std::nullopt;
    Natural r = integer_sqrt(n);
    if (r * r == n) return r;
    return std::nullopt;
}

inline Natural pow(const Natural& base, const Natural& exp) {
    if (exp < 0) throw std::domain_error("pow: exponent must be >= 0");
    if (base == 0 && exp == 0) throw std::domain_error("pow: 0^0 is undefined");
    Natural result = 1;
    Natural b = base;
    Natural e = exp;
    while (e > 0) {
        if ((e & 1) != 0) result *= b;
        e >>= 1;
        if (e > 0) b *= b;
    }
    return result;
}

inline Natural binomial(const Natural& n, const Natural& k) {
    if (n < 0 || k < 0) throw std::domain_error("binomial: arguments must be >= 0");
    if (k > n) throw std::domain_error("binomial: k > n");
    Natural kk = k;
    if (kk > n - kk) kk = n - kk;
    Natural result = 1;
    // result stays integral at every step: after i factors it equals C(m, i)
    // for a prefix m, so the division is exact.
    for (Natural i = 1; i <= kk; ++i) {
        result *= n - kk + i;
        result /= i;
    }
    return result;
}

namespace detail {

// Strong-pseudoprime check for odd n > 2 with n - 1 = d * 2^s.
inline bool strong_probable_prime(const Natural& n, const Natural& a,
                                  const Natural& d, unsigned s) {
    Natural base = a % n;
    Natural x = boost::multiprecision::powm(base, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned r = 1; r < s; ++r) {
        x = (x * x) % n;
        if (x == n - 1) return true;
    }
    return false;
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0 || n % 3 == 0) return false;
    for (std::uint64_t d = 5; d * d <= n; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

} // namespace detail

// Exact primality. Trial division below 2^32; above that, a strong-
// pseudoprime test over the fixed witness set {2,3,...,37}, which is
// deterministic for all n < 3.3 * 10^24 -- far beyond anything the search
// harness enumerates.
inline bool is_prime(const Natural& n) {
    if (n < 2) return false;
    if (n < (Natural(1) << 32)) return detail::is_prime_u64(n.convert_to<std::uint64_t>());
    static const unsigned witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (unsigned w : witnesses)
        if (n % w == 0) return false;
    Natural d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (unsigned w : witnesses)
        if (!detail::strong_probable_prime(n, Natural(w), d, s)) return false;
    return true;
}

// A prime >= 3. Validity is established once, at construction.
class OddPrime {
  public:
    explicit OddPrime(Natural value) : value_(std::move(value)) {
        if (value_ < 3 || !is_prime(value_))
            throw std::domain_error("OddPrime: value must be a prime >= 3");
    }

    // For values already known prime (sieve output); skips revalidation.
    static OddPrime unchecked(Natural value) { return OddPrime(std::move(value), unchecked_tag{}); }

    const Natural& value() const { return value_; }

    friend bool operator==(const OddPrime& a, const OddPrime& b) { return a.value_ == b.value_; }
    friend bool operator!=(const OddPrime& a, const OddPrime& b) { return a.value_ != b.value_; }

  private:
    struct unchecked_tag {};
    OddPrime(Natural value, unchecked_tag) : value_(std::move(value)) {}
    Natural value_;
};

// Ascending primes p with 3 <= p <= limit. 2 is excluded by definition.
inline std::vector<OddPrime> odd_primes_up_to(const Natural& limit) {
    std::vector<OddPrime> result;
    if (limit < 3) return result;
    if (limit > 100'000'000)
        throw std::overflow_error("odd_primes_up_to: sieve limit too large");
    std::size_t lim = limit.convert_to<std::size_t>();
    std::vector<bool> composite(lim + 1, false);
    for (std::size_t i = 3; i * i <= lim; i += 2) {
        if (composite[i]) continue;
        for (std::size_t j = i * i; j <= lim; j += 2 * i) composite[j] = true;
    }
    for (std::size_t i = 3; i <= lim; i += 2)
        if (!composite[i]) result.push_back(OddPrime::unchecked(Natural(i)));
    return result;
}

} // namespace fermat
