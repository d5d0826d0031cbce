#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "padiclab/cyclotomic.hpp"
#include "padiclab/measures.hpp"
#include "padiclab/modarith.hpp"
#include "padiclab/rational_oracle.hpp"
#include "padiclab/scalar.hpp"

namespace padiclab {

/**
 * A character omega = chi^weight * omega' of the abelianized Weil group of
 * Q_p, reduced to the data the local-constant formulas actually consume:
 * the finite part omega' read on the units through the cyclotomic
 * identification (a CharacterSpec whose own weight field stays zero), the
 * integer weight, and the value of the unramified part at the Frobenius
 * lift that fixes the p-power roots of unity. That stored value also fixes
 * the working precision of everything computed from the character.
 */
struct WeilCharacter {
    CharacterSpec finite;
    int weight = 0;
    PadicScalar frob;

    std::uint64_t p() const { return finite.p; }
    int conductor() const { return finite.conductor_level(); }
    bool unramified() const { return conductor() == 0; }

    WeilCharacter inverse() const {
        return {finite.inverted(), -weight, frob.inv()};
    }

    void require_valid() const {
        if (finite.weight != 0)
            throw std::invalid_argument(
                "the finite part carries no weight; use the weight field");
        if (!frob.attached() || frob.p() != finite.p)
            throw std::invalid_argument(
                "Frobenius value must live over the character's p");
        if (!frob.is_unit())
            throw std::invalid_argument("Frobenius value must be a unit");
    }
};

namespace epsdetail {

/**
 * Evaluator for the finite part at its conductor level n: omega'(a) is a
 * Teichmuller scalar times a power of zeta_{p^n}. The wild component is a
 * character of the one-units of order p^{n-1}, so its values sit one level
 * below the conductor; exponents are parked at level n by the factor p.
 */
struct FiniteEval {
    std::uint64_t p;
    int n;
    std::uint64_t pn;
    int tame;
    std::uint64_t wild_unit = 0;  // unit part of the wild exponent, 0 if tame-only
    std::uint64_t pn1 = 1;        // p^{n-1}
    std::vector<long long> logs;
    int prec;

    FiniteEval(const CharacterSpec& s, int prec_) : p(s.p), prec(prec_) {
        n = s.conductor_level();
        if (n < 1)
            throw std::domain_error("finite part is unramified");
        pn = detail::upow_checked(p, n);
        tame = s.tame_norm();
        std::uint64_t wd = s.wild % s.wild_modulus();
        if (wd != 0) {
            int v = detail::val_p(wd, p);
            wild_unit = wd / detail::upow_checked(p, v);
            pn1 = pn / p;
            logs = measdetail::one_plus_p_logs(p, n);
        }
    }

    // omega'(a)^{+-1} as (scalar factor, exponent of zeta_{p^n}).
    std::pair<PadicScalar, std::uint64_t> term(std::uint64_t a,
                                               bool invert) const {
        if (a % p == 0)
            throw std::domain_error("character values are defined on units only");
        PadicScalar s = PadicScalar::one(p, prec);
        if (tame != 0) {
            int e = invert ? static_cast<int>(p - 1) - tame : tame;
            s = PadicScalar::from_residue(p, prec, a % pn).teichmuller().pow(e);
        }
        std::uint64_t ex = 0;
        if (wild_unit != 0) {
            std::uint64_t m = measdetail::wild_log(p, n, a % pn, logs);
            ex = p * detail::mulmod(wild_unit % pn1, m, pn1);
            if (invert)
                ex = (pn - ex) % pn;
        }
        return {s, ex};
    }
};

}  // namespace epsdetail

/**
 * Value of the finite part at the unit a, hosted at the conductor level of
 * the shared compatible root system (level 1 and the scalar 1 when the
 * character is unramified).
 */
inline CyclotomicElem<PadicScalar> finite_value(const WeilCharacter& w,
                                                std::uint64_t a) {
    w.require_valid();
    if (a % w.p() == 0)
        throw std::domain_error("character values are defined on units only");
    if (w.conductor() == 0)
        return CyclotomicElem<PadicScalar>::one(
            w.p(), 1, PadicScalar::zero(w.p(), w.frob.prec()));
    epsdetail::FiniteEval ev(w.finite, w.frob.prec());
    auto [s, e] = ev.term(a, false);
    return CyclotomicElem<PadicScalar>::zeta(ev.p, ev.n,
                                             PadicScalar::zero(ev.p, ev.prec),
                                             static_cast<long long>(e))
        .scale(s);
}

/**
 * tau(omega, zeta^gamma) = sum over units a mod p^n of omega'(a)^{-1}
 * zeta_{p^n}^{gamma a}, n the conductor. Depends only on the finite part;
 * gamma reindexes the root system and must be a unit. Exact at the stored
 * precision: every term is a Teichmuller scalar on a monomial.
 */
inline CyclotomicElem<PadicScalar> gauss_sum(const WeilCharacter& w,
                                             long long gamma = 1) {
    w.require_valid();
    if (w.conductor() == 0)
        throw std::domain_error(
            "unramified character has no Gauss sum; conductor must be >= 1");
    epsdetail::FiniteEval ev(w.finite, w.frob.prec());
    std::uint64_t pn = ev.pn;
    long long gr = gamma % static_cast<long long>(pn);
    std::uint64_t g = static_cast<std::uint64_t>(
        gr < 0 ? gr + static_cast<long long>(pn) : gr);
    if (g % ev.p == 0)
        throw std::invalid_argument("root-system exponent must be a unit");
    std::vector<PadicScalar> buf(static_cast<std::size_t>(pn),
                                 PadicScalar::zero(ev.p, ev.prec));
    for (std::uint64_t a = 1; a < pn; ++a) {
        if (a % ev.p == 0)
            continue;
        auto [s, e] = ev.term(a, true);
        std::uint64_t slot = (e + detail::mulmod(g, a, pn)) % pn;
        buf[static_cast<std::size_t>(slot)] += s;
    }
    return from_redundant(ev.p, ev.n, std::move(buf));
}

/** Both evaluation routes of the epsilon factor, kept for audit output. */
struct EpsilonReport {
    CyclotomicElem<PadicScalar> closed;
    CyclotomicElem<PadicScalar> direct;
};

/**
 * epsilon(omega^{-1}) for omega = chi^j omega': 1 when omega is unramified,
 * else p^{n(1+j)} omega(phi~)^n / tau(omega, zeta) in the conductor-level
 * ring. The division is carried out against the conjugate sum, whose
 * product with tau must be the scalar omega'(-1) p^n; that certificate is
 * checked before it is used, and the defining integral omega(p)^{-n}
 * sum_x omega(x) zeta^{-x} is summed independently as the second route.
 * Any disagreement is an arithmetic bug, so it is a hard failure rather
 * than a wrong value. Negative weights put honest p-powers in the
 * denominator, costing absolute precision digit for digit.
 */
inline EpsilonReport epsilon_routes(const WeilCharacter& w) {
    w.require_valid();
    const std::uint64_t p = w.p();
    const int prec = w.frob.prec();
    const int n = w.conductor();
    if (n == 0) {
        auto one = CyclotomicElem<PadicScalar>::one(p, 1,
                                                    PadicScalar::zero(p, prec));
        return {one, one};
    }
    const WeilCharacter winv = w.inverse();
    const CyclotomicElem<PadicScalar> t = gauss_sum(w);
    const CyclotomicElem<PadicScalar> tbar = gauss_sum(winv);
    const int sign = w.finite.tame_norm() % 2 == 0 ? 1 : -1;  // omega'(-1)
    const PadicScalar pn_signed =
        PadicScalar::one(p, prec).mul_int(sign).mul_p_pow(n);
    if (!(t * tbar).same_value(
            CyclotomicElem<PadicScalar>::scalar(p, n, pn_signed)))
        throw std::logic_error(
            "Gauss sum pair product missed omega(-1) p^n; arithmetic bug");
    PadicScalar c = w.frob.pow(n).mul_int(sign);
    long long nj = static_cast<long long>(n) * w.weight;
    c = nj >= 0 ? c.mul_p_pow(static_cast<int>(nj))
                : c.div_p_pow(static_cast<int>(-nj));
    return {tbar.scale(c), gauss_sum(winv, -1).scale(c.mul_int(sign))};
}

inline CyclotomicElem<PadicScalar> epsilon_factor(const WeilCharacter& w) {
    EpsilonReport r = epsilon_routes(w);
    if (!r.closed.same_value(r.direct))
        throw std::logic_error("epsilon routes disagree; arithmetic bug");
    return r.closed;
}

/**
 * L-factor of omega as a polynomial in the crystalline Frobenius variable:
 * the constant 1 when the finite part is ramified, else 1 - uX with
 * u = p^{-weight} times the inverse of the stored Frobenius value.
 */
struct LFactor {
    bool is_one;
    PadicScalar u;
};

inline LFactor l_factor(const WeilCharacter& w) {
    w.require_valid();
    if (w.conductor() >= 1)
        return {true, PadicScalar::zero(w.p(), w.frob.prec())};
    PadicScalar u = w.frob.inv();
    u = w.weight >= 0 ? u.div_p_pow(w.weight) : u.mul_p_pow(-w.weight);
    return {false, u};
}

/**
 * Leading coefficient of the Taylor expansion of Gamma at the integer m:
 * (m-1)! for m >= 1, and the residue pattern (-1)^{-m} / (-m)! at the poles
 * m <= 0. Satisfies gamma_star(m+1) = m * gamma_star(m) away from m = 0.
 */
inline BigRational gamma_star(long long m) {
    BigInt f = 1;
    if (m >= 1) {
        for (long long i = 2; i < m; ++i)
            f *= i;
        return BigRational(f);
    }
    for (long long i = 2; i <= -m; ++i)
        f *= i;
    BigRational r(1, f);
    return (-m) % 2 == 0 ? r : -r;
}

}  // namespace padiclab
