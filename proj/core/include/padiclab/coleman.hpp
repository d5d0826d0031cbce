#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "padiclab/cyclotomic.hpp"
#include "padiclab/measures.hpp"
#include "padiclab/pi_series.hpp"
#include "padiclab/rational_oracle.hpp"
#include "padiclab/scalar.hpp"

namespace padiclab {

/**
 * ((1+pi)^a - 1)/pi, the power series behind the tower of cyclotomic
 * elements (zeta^a - 1)/(zeta - 1). It is a polynomial of degree a-1 with
 * binomial coefficients, constant term a, so a unit series exactly when a
 * is prime to p; the norm operator fixes it.
 */
inline PiSeries<PadicScalar> cyclotomic_unit_series(std::uint64_t p, long long a,
                                                    int terms, int prec) {
    if (a < 1 || a % static_cast<long long>(p) == 0)
        throw std::domain_error("the exponent must be a positive integer prime to p");
    PadicScalar proto = PadicScalar::zero(p, prec);
    PiSeries<PadicScalar> f =
        PiSeries<PadicScalar>::one_plus_pi_pow(p, static_cast<std::uint64_t>(a),
                                               terms + 1, proto) -
        PiSeries<PadicScalar>::constant(p, terms + 1, PadicScalar::one(p, prec));
    return f.shift_down_pi(1);
}

/**
 * A unit power series together with the caller's claim that the norm
 * operator fixes it. The regulator pipeline only accepts claimed-fixed
 * input and re-verifies the claim on the transformed series, so a wrong
 * flag is caught, not trusted.
 */
struct ColemanSeries {
    PiSeries<PadicScalar> g;
    bool fixed_by_norm = false;
};

inline ColemanSeries cyclotomic_unit(std::uint64_t p, long long a, int terms,
                                     int prec) {
    return {cyclotomic_unit_series(p, a, terms, prec), true};
}

/**
 * Coleman's norm operator: the unique N(g) with
 *
 *   phi(N g)(pi) = prod_{zeta^p = 1} g(zeta(1+pi) - 1).
 *
 * The product is assembled in the level-one cyclotomic extension, where the
 * factors are permuted by the Galois action; every coefficient is therefore
 * symmetric and descends to the base exactly. The integral section of phi
 * is the trace solver, so N(g) = psi(product) with the solver's output
 * certificate. That certificate also covers what the truncation dropped: a
 * discarded monomial of degree k >= T reaches coefficient m < T only
 * through (zeta - 1)^(k-m), worth at least ceil((T-m)/(p-1)) digits, the
 * same boundary decay the solver already prices in.
 *
 * `digits` is the solver round count. The iteration gains one absolute
 * digit per round, which can be less than the analytic certificate on a
 * coefficient, so the output is capped at `digits` to keep the claimed
 * precision inside what actually converged.
 */
inline PiSeries<PadicScalar> coleman_norm(const PiSeries<PadicScalar>& g,
                                          int digits) {
    using CycS = CyclotomicElem<PadicScalar>;
    const std::uint64_t p = g.p();
    if (g.coeff(0).is_zero() || g.coeff(0).valuation() != 0)
        throw std::domain_error("the norm operator needs a unit series");
    if (g.min_valuation() < 0)
        throw std::domain_error("the norm operator needs integral coefficients");
    const int T = g.nterms();
    const PadicScalar proto = ringops::make_zero(g.coeff(0));
    const CycS sproto = CycS::zero(p, 1, proto);

    PiSeries<CycS> prod =
        PiSeries<CycS>::constant(p, T, CycS::one(p, 1, proto));
    for (std::uint64_t j = 0; j < p; ++j) {
        CycS zj = CycS::zeta(p, 1, proto, static_cast<long long>(j));
        CycS zj1 = zj - CycS::one(p, 1, proto);
        // Horner for g(zeta^j (1+pi) - 1): the argument has two terms, so
        // multiply in place instead of forming a dense series product.
        std::vector<CycS> acc(static_cast<std::size_t>(T), sproto);
        for (int m = T - 1; m >= 0; --m) {
            for (std::size_t k = acc.size(); k-- > 0;) {
                CycS v = ringops::vanishes(acc[k]) ? sproto : acc[k] * zj1;
                if (k > 0 && !ringops::vanishes(acc[k - 1]))
                    v = v + acc[k - 1] * zj;
                acc[k] = v;
            }
            acc[0] = acc[0] + CycS::scalar(p, 1, g.coeff(m));
        }
        prod *= PiSeries<CycS>(p, std::move(acc));
    }

    std::vector<PadicScalar> flat;
    flat.reserve(static_cast<std::size_t>(T));
    for (int m = 0; m < T; ++m)
        flat.push_back(prod.coeff(m).descend());
    return cap_abs_prec(psi(PiSeries<PadicScalar>(p, std::move(flat)), digits), digits);
}

/**
 * Valuation of g(zeta - 1) - sum_{i<a} zeta^i at a primitive p^n-th root
 * zeta, the closed form of (zeta^a - 1)/(zeta - 1). Returns max int when
 * the residual vanishes at the stored precision; for the cyclotomic unit
 * series the identity is exact. The series must track at least
 * (p-1) p^(n-1) terms (one full unit of valuation at this level), or no
 * digit of the residual is certified.
 */
inline int interpolation_check(const PiSeries<PadicScalar>& g, long long a,
                               int n) {
    using CycS = CyclotomicElem<PadicScalar>;
    const std::uint64_t p = g.p();
    if (n < 1)
        throw std::invalid_argument("tower level must be >= 1");
    if (a < 1)
        throw std::invalid_argument("the exponent must be a positive integer");
    std::uint64_t unit = (p - 1) * detail::upow_checked(p, n - 1);
    if (static_cast<std::uint64_t>(g.nterms()) < unit)
        throw std::invalid_argument("series too short to certify level " +
                                    std::to_string(n));
    const PadicScalar proto = ringops::make_zero(g.coeff(0));
    CycS x = CycS::zeta(p, n, proto, 1) - CycS::one(p, n, proto);
    CycS val = eval_poly(g, x,
                         [&](const PadicScalar& c) { return CycS::scalar(p, n, c); });
    CycS target = CycS::zero(p, n, proto);
    for (long long i = 0; i < a; ++i)
        target = target + CycS::zeta(p, n, proto, i);
    CycS res = val - target;
    if (res.is_zero())
        return std::numeric_limits<int>::max();
    return res.min_valuation();
}

// (1 - phi/p) log g for a unit series g. The division by p costs one digit
// of absolute precision; everything else is exact in the tracked terms.
inline PiSeries<PadicScalar> regulator_log(const PiSeries<PadicScalar>& g) {
    PiSeries<PadicScalar> u = log_unit_series(g);
    return u - phi(u).div_p_pow(1);
}

/**
 * The regulator pipeline output for one series: w = (1 - phi/p) log g, its
 * measure readback h at the requested level, and L = ell_0 times the branch
 * shadow of h. entry_digits is the honest distance between h and the
 * untruncated measure: the readback window certificate floor(terms/p^level)
 * capped by the stored precision of the entries. Identities internal to the
 * stored objects (the ell_0 factor relation, the round trip onto w's
 * window) hold at arithmetic precision, which is usually higher.
 */
struct RegulatorOutput {
    PiSeries<PadicScalar> w;
    GroupAlgebraMeasure<PadicScalar> h;
    DistributionSeries L;
    int entry_digits;
};

inline RegulatorOutput coleman_to_measure(const ColemanSeries& cs, int level,
                                          int dist_terms) {
    if (!cs.fixed_by_norm)
        throw std::domain_error("the regulator pipeline needs a norm-fixed series");
    const std::uint64_t p = cs.g.p();
    PiSeries<PadicScalar> w = regulator_log(cs.g);
    // psi(w) = (1/p) log(N(g)/g); six certified digits of vanishing is the
    // gate for the fixed_by_norm claim. The solver converges one absolute
    // digit per round from the input's valuation floor, so run enough
    // rounds that everything at or below the checked depth is real, then
    // cap before testing: coefficients may carry analytic certificates far
    // above the round count, and the unconverged digits in between are junk.
    int shift = std::min(0, w.min_valuation());
    if (!cap_abs_prec(psi(w, 8 - shift), 6).is_zero())
        throw std::domain_error(
            "norm defect: psi of (1 - phi/p) log g is nonzero, N(g) != g");
    GroupAlgebraMeasure<PadicScalar> h = mellin_inverse(w, level);
    std::uint64_t pn = detail::upow_checked(p, level);
    int cert = static_cast<int>(static_cast<std::uint64_t>(w.nterms()) / pn);
    for (std::uint64_t a = 0; a < pn; ++a)
        if (a % p != 0)
            cert = std::min(cert, h.at(a).abs_prec());
    int prec = w.coeff(0).prec();
    DistributionSeries L = ell_element(p, 0, dist_terms, prec) *
                           DistributionSeries::from_measure(h, dist_terms);
    return {std::move(w), std::move(h), std::move(L), cert};
}

/**
 * d^k w at pi = 0 for the invariant derivative d = (1+pi) d/dpi. When
 * w = mellin(h) this is the k-th moment of h up to the congruence of h's
 * level: the constant coefficient of d^k only reads coefficients 0..k, so
 * the series truncation never enters. Requires k + p tracked terms of slack.
 */
inline PadicScalar moment(const PiSeries<PadicScalar>& w, int k) {
    if (k < 0)
        throw std::invalid_argument("moment index must be >= 0");
    if (k >= w.nterms() - static_cast<int>(w.p()))
        throw std::invalid_argument("moment index exceeds the tracked terms");
    PiSeries<PadicScalar> d = w;
    for (int i = 0; i < k; ++i)
        d = d.invariant_derivative();
    return d.coeff(0);
}

struct MomentCertificate {
    PadicScalar value;   // the series pipeline
    PadicScalar oracle;  // exact rational route, reduced p-adically
    int agree_digits;    // shared absolute digits between the two
};

/**
 * The k-th moment of (1 - phi/p) log g_a certified against the exact
 * rational value (1 - p^(k-1))(a^k - 1) B_k / k for k >= 1. For k = 0 the
 * value is (1 - 1/p) log a, a p-adic number, so that case certifies
 * against the scalar logarithm instead. The guard has to cover the 1/p,
 * the small derivative losses, and the log denominators: terms up to
 * h^terms / terms put floor(log_p terms) denominator digits into the deep
 * coefficients, and phi's substitution folds those into every coefficient.
 */
inline MomentCertificate kubota_leopoldt(std::uint64_t p, long long a, int k,
                                         int digits, int terms) {
    int guard = 4;
    for (std::uint64_t pw = p; pw <= static_cast<std::uint64_t>(terms); pw *= p)
        ++guard;
    int prec = PrecisionProfile(p, digits, guard).working();
    PiSeries<PadicScalar> w =
        regulator_log(cyclotomic_unit_series(p, a, terms, prec));
    PadicScalar value = moment(w, k);
    PadicScalar oracle = PadicScalar::zero(p, prec);
    if (k == 0) {
        oracle = iwasawa_log(PadicScalar::from_int(p, prec, a))
                     .mul_int(static_cast<long long>(p) - 1)
                     .div_p_pow(1);
    } else {
        RationalOracle rat;
        oracle = reduce_mod_p(rat.regulator_moment(p, a, k), p, prec);
    }
    return {value, oracle, PadicScalar::agree_digits(value, oracle)};
}

}  // namespace padiclab
