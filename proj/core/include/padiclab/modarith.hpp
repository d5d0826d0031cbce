#pragma once

#include <cstdint>
#include <stdexcept>

namespace padiclab {
namespace detail {

// Fixed-width modular arithmetic helpers. Every residue in the library is a
// uint64_t below its modulus; 128-bit intermediates keep products exact.

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    std::uint64_t s = a + b;  // a,b < m <= 2^62, no overflow
    return s >= m ? s - m : s;
}

inline std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return a >= b ? a - b : a + m - b;
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (e) {
        if (e & 1)
            r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return r;
}

// p^e with overflow check; throws rather than wrapping.
inline std::uint64_t upow_checked(std::uint64_t p, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > (std::uint64_t(1) << 62) / p)
            throw std::overflow_error("p^e exceeds the 2^62 residue budget");
        r *= p;
    }
    return r;
}

inline int val_p(std::uint64_t x, std::uint64_t p) {
    if (x == 0)
        throw std::invalid_argument("valuation of zero residue");
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

// Inverse of a unit mod p^k by Newton lifting from the inverse mod p.
// Division free: z <- z(2 - uz) doubles the number of correct digits.
inline std::uint64_t inv_unit_mod(std::uint64_t u, std::uint64_t p, int k, std::uint64_t pk) {
    if (u % p == 0)
        throw std::domain_error("inverse of a non-unit residue");
    std::uint64_t z = powmod(u % p, p - 2, p);  // Fermat at one digit
    int good = 1;
    while (good < k) {
        std::uint64_t uz = mulmod(u, z, pk);
        std::uint64_t t = submod(2 % pk, uz, pk);
        z = mulmod(z, t, pk);
        good *= 2;
    }
    return z % pk;
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

}  // namespace detail
}  // namespace padiclab
