#pragma once

#include <cstdint>
#include <stdexcept>

#include "padiclab/modarith.hpp"

namespace padiclab {

/**
 * A run-wide precision contract: the prime p, the number of p-adic digits N
 * the caller wants certified at the end, and how many guard digits the
 * pipeline may burn along the way. All arithmetic happens at working()
 * digits; each lossy step (division by p, averaging over p^n-th roots of
 * unity) eats into the guard, and the per-value precision tracking makes the
 * consumption visible rather than silent.
 *
 * Residues are stored in 64 bits, so p^working() must stay below 2^62.
 * That caps the working precision at 39 digits for p=3, 26 for p=5,
 * 21 for p=7; generous for every pipeline here, but it is a hard cap.
 */
struct PrecisionProfile {
    std::uint64_t p;
    int digits;  // N: digits the caller wants certified
    int guard;   // extra working digits available for lossy steps

    PrecisionProfile(std::uint64_t p_, int digits_, int guard_ = 0)
        : p(p_), digits(digits_), guard(guard_) {
        if (p < 3 || p % 2 == 0 || !detail::is_prime_u64(p))
            throw std::invalid_argument("p must be an odd prime >= 3");
        if (digits < 1)
            throw std::invalid_argument("digit count must be >= 1");
        if (guard < 0)
            throw std::invalid_argument("guard digits must be >= 0");
        detail::upow_checked(p, working());  // reject budgets that cannot be stored
    }

    int working() const { return digits + guard; }

    std::uint64_t p_pow(int e) const { return detail::upow_checked(p, e); }

    // Largest number of digits storable for this p under the 2^62 residue cap.
    int max_storable() const {
        int e = 0;
        std::uint64_t r = 1;
        while (r <= (std::uint64_t(1) << 62) / p) {
            r *= p;
            ++e;
        }
        return e;
    }
};

}  // namespace padiclab
