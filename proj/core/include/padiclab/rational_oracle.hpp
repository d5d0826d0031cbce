#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "padiclab/scalar.hpp"

namespace padiclab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/**
 * Exact rational arithmetic shared by the certification paths. Everything
 * here is independent of the p-adic representation: Bernoulli numbers come
 * from the defining recurrence, special values from closed forms, and the
 * series expansions from term-by-term rational algebra. Reducing one of
 * these rationals mod p^k is the only point of contact with the scalar type,
 * which is what makes the comparisons meaningful as certificates.
 */
class RationalOracle {
  public:
    // B_0 = 1, B_1 = -1/2; sum_{j<=k} binom(k+1, j) B_j = 0 pins the rest.
    // Cached; extending the cache is O(k^2) rational operations.
    const BigRational& bernoulli(int k);

    // zeta(1-k) = -B_k / k for k >= 1.
    BigRational zeta_one_minus(int k);

    // Coefficients c_0..c_terms of log((e^{at}-1)/(e^t-1)) as a power series
    // in t, computed by exact series algebra (exp, quotient, log), not from
    // the Bernoulli closed form. c_0 = log(a) is not rational, so index 0 is
    // returned as 0 and only indices >= 1 are meaningful.
    std::vector<BigRational> log_ratio_series(long long a, int terms);

    // The k-th moment certificate (1 - p^{k-1}) (a^k - 1) B_k / k for k >= 2,
    // 0 for k = 1 (and for every odd k >= 3 via B_k = 0).
    BigRational regulator_moment(std::uint64_t p, long long a, int k);

    static BigInt binomial(long long n, long long k);
    static BigInt factorial(long long n);

  private:
    std::vector<BigRational> bernoulli_cache_;
};

// Reduce an exact rational to a p-adic scalar at `prec` residue digits.
// The p-part of the denominator becomes the explicit denominator exponent.
PadicScalar reduce_mod_p(const BigRational& r, std::uint64_t p, int prec);

// Valuation of a rational at p (0 for 0 by convention here is invalid: throws).
int valuation_p(const BigRational& r, std::uint64_t p);

}  // namespace padiclab
