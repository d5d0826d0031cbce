#pragma once

#include <cstdint>
#include <string>

#include "padiclab/precision.hpp"

namespace padiclab {

/**
 * Fixed-precision p-adic scalar: a residue known to `prec` base-p digits,
 * divided by an explicit power of p. The value represented is
 *
 *     residue / p^den   with residue determined mod p^prec,
 *
 * so the absolute precision (the power of p modulo which the value is pinned
 * down) is prec - den. Negative valuation is always carried in `den`, never
 * in a floating mantissa; canonical form keeps the residue a unit whenever
 * den > 0 and collapses an exactly-zero residue to den = 0.
 *
 * Precision bookkeeping is sharp per operation: products gain digits when a
 * factor has positive valuation, divisions by p^k move digits from `prec`
 * into `den` (or strip exact factors), and any operation whose output would
 * carry no digits at all throws instead of returning a value that lies about
 * what it knows. Residues live in 64 bits (p^prec < 2^62); see
 * PrecisionProfile for the resulting per-prime caps.
 */
class PadicScalar {
  public:
    PadicScalar() : p_(0), residue_(0), prec_(0), den_(0) {}

    static PadicScalar from_int(std::uint64_t p, int prec, long long v);
    static PadicScalar from_residue(std::uint64_t p, int prec, std::uint64_t residue);
    static PadicScalar zero(std::uint64_t p, int prec) { return from_residue(p, prec, 0); }
    static PadicScalar one(std::uint64_t p, int prec) { return from_residue(p, prec, 1); }

    static PadicScalar zero(const PrecisionProfile& pr) { return zero(pr.p, pr.working()); }
    static PadicScalar one(const PrecisionProfile& pr) { return one(pr.p, pr.working()); }
    static PadicScalar from_int(const PrecisionProfile& pr, long long v) {
        return from_int(pr.p, pr.working(), v);
    }

    std::uint64_t p() const { return p_; }
    std::uint64_t residue() const { return residue_; }
    int prec() const { return prec_; }            // digits known in the residue
    int den_exp() const { return den_; }          // denominator exponent
    int abs_prec() const { return prec_ - den_; } // value known mod p^abs_prec
    bool attached() const { return p_ != 0; }

    bool is_zero() const { return residue_ == 0; }
    bool is_unit() const { return residue_ % p_ != 0 && den_ == 0; }

    // Valuation of the value; for an exactly-zero residue this is the best
    // lower bound the precision supports, i.e. abs_prec().
    int valuation() const;

    PadicScalar operator+(const PadicScalar& o) const;
    PadicScalar operator-(const PadicScalar& o) const;
    PadicScalar operator*(const PadicScalar& o) const;
    PadicScalar operator-() const;
    PadicScalar& operator+=(const PadicScalar& o) { return *this = *this + o; }
    PadicScalar& operator-=(const PadicScalar& o) { return *this = *this - o; }
    PadicScalar& operator*=(const PadicScalar& o) { return *this = *this * o; }

    PadicScalar inv() const;
    PadicScalar operator/(const PadicScalar& o) const { return *this * o.inv(); }
    PadicScalar pow(long long e) const;

    PadicScalar mul_int(long long c) const;

    // Divide by p^k. Exact p-factors of the residue are stripped (each costs
    // one digit of prec, the honest loss); whatever remains lands in den.
    // Absolute precision always drops by exactly k.
    PadicScalar div_p_pow(int k) const;
    PadicScalar mul_p_pow(int k) const;

    // Reduce to t digits of residue precision (t <= prec).
    PadicScalar with_prec(int t) const;

    // Teichmuller representative of the residue class mod p: the unique
    // (p-1)-th root of unity congruent to it, or 0. One digit per iteration
    // of x -> x^p, so prec iterations pin it exactly.
    PadicScalar teichmuller() const;

    // Number of base-p digits on which the two values agree, i.e. the
    // valuation of the difference, capped by the common absolute precision.
    static int agree_digits(const PadicScalar& a, const PadicScalar& b);
    static bool equal_at(const PadicScalar& a, const PadicScalar& b, int digits) {
        return agree_digits(a, b) >= digits;
    }
    // Equality at the full common absolute precision.
    bool same_value(const PadicScalar& o) const;

    // Canonical text form: exactly prec digits, least significant first
    // (single characters for p <= 9, dot-separated decimal otherwise),
    // followed by "/p^k" when den > 0.
    std::string to_string() const;
    static PadicScalar parse(std::uint64_t p, const std::string& text);

  private:
    std::uint64_t p_;
    std::uint64_t residue_;
    int prec_;
    int den_;

    PadicScalar(std::uint64_t p, std::uint64_t residue, int prec, int den)
        : p_(p), residue_(residue), prec_(prec), den_(den) {}

    void canonicalize();
    void require_same_p(const PadicScalar& o) const;
    static int max_digits(std::uint64_t p);
};

// Iwasawa-branch logarithm: log(p) = 0 and log kills Teichmuller parts, so
// log(x) = log<series>(u^(p-1))/(p-1) applied to the unit part u of x.
// Term-by-term tracking shows no net precision loss for this branch.
PadicScalar iwasawa_log(const PadicScalar& x);

// Generic-ring hooks: the extension rings and series templates are generic
// over their coefficient ring through these.
inline PadicScalar zero_like(const PadicScalar& x) { return PadicScalar::zero(x.p(), x.prec()); }
inline PadicScalar one_like(const PadicScalar& x) { return PadicScalar::one(x.p(), x.prec()); }
inline PadicScalar frobenius(const PadicScalar& x) { return x; }
inline PadicScalar frobenius_inv(const PadicScalar& x) { return x; }
inline bool is_zero(const PadicScalar& x) { return x.is_zero(); }
inline PadicScalar mul_int(const PadicScalar& x, long long v) { return x.mul_int(v); }
inline PadicScalar div_p_pow(const PadicScalar& x, int k) { return x.div_p_pow(k); }
inline bool same_value(const PadicScalar& a, const PadicScalar& b) { return a.same_value(b); }
inline int min_valuation(const PadicScalar& x) { return x.valuation(); }
// Cap the reported absolute precision (digits below p^a are kept, the rest
// forgotten). For operators whose truncation error is bounded mathematically
// but is invisible to the digit-tracking arithmetic.
inline PadicScalar cap_abs_prec(const PadicScalar& x, int a) {
    if (x.abs_prec() <= a)
        return x;
    return x.with_prec(a + x.den_exp());
}


}  // namespace padiclab
