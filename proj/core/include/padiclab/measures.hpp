#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "padiclab/cyclotomic.hpp"
#include "padiclab/modarith.hpp"
#include "padiclab/pi_series.hpp"
#include "padiclab/ring_ops.hpp"
#include "padiclab/scalar.hpp"

namespace padiclab {

namespace measdetail {

// Teichmuller representative of a mod p^k, as a plain residue.
inline std::uint64_t teich_residue(std::uint64_t p, int k, std::uint64_t a) {
    std::uint64_t pk = detail::upow_checked(p, k);
    std::uint64_t y = a % pk;
    for (int i = 0; i < k; ++i)
        y = detail::powmod(y, p, pk);
    return y;
}

// Slot u holds m with (1+p)^m = u mod p^k; slots outside 1+pZ hold -1.
inline std::vector<long long> one_plus_p_logs(std::uint64_t p, int k) {
    std::uint64_t pk = detail::upow_checked(p, k);
    std::vector<long long> t(pk, -1);
    std::uint64_t acc = 1;
    for (std::uint64_t m = 0; m < pk / p; ++m) {
        t[acc] = static_cast<long long>(m);
        acc = detail::mulmod(acc, 1 + p, pk);
    }
    return t;
}

// m with a / teich(a) = (1+p)^m mod p^k, for a unit.
inline std::uint64_t wild_log(std::uint64_t p, int k, std::uint64_t a,
                              const std::vector<long long>& logs) {
    std::uint64_t pk = detail::upow_checked(p, k);
    std::uint64_t t = teich_residue(p, k, a);
    std::uint64_t u =
        detail::mulmod(a % pk, detail::inv_unit_mod(t, p, k, pk), pk);
    long long m = logs[u];
    if (m < 0)
        throw std::logic_error("wild logarithm landed outside the one-units");
    return static_cast<std::uint64_t>(m);
}

inline int scalar_prec(const PadicScalar& x) { return x.prec(); }
template <typename R>
int scalar_prec(const CyclotomicElem<R>& x) {
    return scalar_prec(x.coord(0));
}

}  // namespace measdetail

/**
 * A measure on the units mod p^level with values in R: the finite-level
 * picture of an Iwasawa-algebra element. Entries are indexed by residues in
 * [0, p^level); non-unit residues carry no mass and refuse writes. Reducing
 * the level sums mass over the fibers of the projection, matching the
 * inverse-limit structure.
 */
template <typename R>
class GroupAlgebraMeasure {
  public:
    GroupAlgebraMeasure(std::uint64_t p, int level, const R& proto)
        : p_(p), level_(level), proto_(ringops::make_zero(proto)) {
        if (level < 1)
            throw std::invalid_argument("measure level must be at least 1");
        pn_ = detail::upow_checked(p, level);
        c_.assign(static_cast<std::size_t>(pn_), proto_);
    }

    static GroupAlgebraMeasure dirac(std::uint64_t p, int level,
                                     std::uint64_t g, const R& mass) {
        GroupAlgebraMeasure mu(p, level, mass);
        mu.set(g, mass);
        return mu;
    }

    std::uint64_t p() const { return p_; }
    int level() const { return level_; }
    std::uint64_t modulus() const { return pn_; }
    const R& proto() const { return proto_; }

    const R& at(std::uint64_t a) const {
        return c_[static_cast<std::size_t>(a % pn_)];
    }
    void set(std::uint64_t a, const R& v) {
        a %= pn_;
        if (a % p_ == 0)
            throw std::invalid_argument("measure entries live on the unit group");
        c_[static_cast<std::size_t>(a)] = v;
    }

    GroupAlgebraMeasure operator+(const GroupAlgebraMeasure& o) const {
        require_compatible(o);
        GroupAlgebraMeasure out(*this);
        for (std::size_t i = 0; i < c_.size(); ++i)
            out.c_[i] = out.c_[i] + o.c_[i];
        return out;
    }
    GroupAlgebraMeasure operator-(const GroupAlgebraMeasure& o) const {
        require_compatible(o);
        GroupAlgebraMeasure out(*this);
        for (std::size_t i = 0; i < c_.size(); ++i)
            out.c_[i] = out.c_[i] - o.c_[i];
        return out;
    }
    GroupAlgebraMeasure scale(const R& s) const {
        GroupAlgebraMeasure out(*this);
        for (auto& v : out.c_)
            v = v * s;
        return out;
    }

    bool same_value(const GroupAlgebraMeasure& o) const {
        if (p_ != o.p_ || level_ != o.level_)
            return false;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!ringops::agree(c_[i], o.c_[i]))
                return false;
        return true;
    }

    GroupAlgebraMeasure reduce_level() const {
        if (level_ == 1)
            throw std::domain_error("measure is already at the base level");
        GroupAlgebraMeasure out(p_, level_ - 1, proto_);
        for (std::uint64_t a = 0; a < pn_; ++a) {
            if (a % p_ == 0)
                continue;
            std::size_t b = static_cast<std::size_t>(a % out.pn_);
            out.c_[b] = out.c_[b] + c_[static_cast<std::size_t>(a)];
        }
        return out;
    }

  private:
    std::uint64_t p_;
    int level_;
    std::uint64_t pn_;
    R proto_;
    std::vector<R> c_;

    void require_compatible(const GroupAlgebraMeasure& o) const {
        if (p_ != o.p_ || level_ != o.level_)
            throw std::invalid_argument("mixing measures of different levels");
    }
};

// Group-algebra product: mass at a times mass at b lands on ab.
template <typename R>
GroupAlgebraMeasure<R> convolve(const GroupAlgebraMeasure<R>& x,
                                const GroupAlgebraMeasure<R>& y) {
    if (x.p() != y.p() || x.level() != y.level())
        throw std::invalid_argument("mixing measures of different levels");
    GroupAlgebraMeasure<R> out(x.p(), x.level(), x.proto());
    std::uint64_t pn = x.modulus();
    for (std::uint64_t a = 0; a < pn; ++a) {
        if (a % x.p() == 0 || ringops::vanishes(x.at(a)))
            continue;
        for (std::uint64_t b = 0; b < pn; ++b) {
            if (b % x.p() == 0 || ringops::vanishes(y.at(b)))
                continue;
            std::uint64_t ab = detail::mulmod(a, b, pn);
            out.set(ab, out.at(ab) + x.at(a) * y.at(b));
        }
    }
    return out;
}

/**
 * Smallest level at which the transform below is independent, mod p^digits,
 * of the choice of unit lifts: two lifts of the same class differ by a
 * factor (1+pi)^{p^n}, and the first `terms` coefficients of that factor
 * minus one all have valuation at least n - ceil(log_p terms).
 */
inline int mellin_analytic_level(std::uint64_t p, int digits, int terms) {
    int extra = 0;
    std::uint64_t pw = 1;
    while (pw < static_cast<std::uint64_t>(terms)) {
        pw *= p;
        ++extra;
    }
    return digits + extra;
}

/**
 * Sum_a mu_a (1+pi)^a with canonical lifts a in [0, p^level). Every
 * exponent is a unit, so the output lies in the psi-kernel, and it is a
 * polynomial of degree < p^level in 1+pi, tracked exactly whenever terms
 * >= p^level. Below mellin_analytic_level the result is an honest function
 * of the finite-level measure but not of its class in the inverse limit.
 */
template <typename R>
PiSeries<R> mellin(const GroupAlgebraMeasure<R>& mu, int terms) {
    if (terms < 1)
        throw std::invalid_argument("series needs at least one tracked term");
    const R zero = ringops::make_zero(mu.proto());
    std::vector<R> pw(static_cast<std::size_t>(terms), zero);
    pw[0] = ringops::make_one(zero);
    std::vector<R> acc(static_cast<std::size_t>(terms), zero);
    for (std::uint64_t a = 0; a < mu.modulus(); ++a) {
        if (a > 0)
            for (std::size_t k = pw.size(); k-- > 1;)
                pw[k] = pw[k] + pw[k - 1];
        if (a % mu.p() == 0 || ringops::vanishes(mu.at(a)))
            continue;
        for (std::size_t k = 0; k < pw.size(); ++k)
            acc[k] = acc[k] + pw[k] * mu.at(a);
    }
    return PiSeries<R>(mu.p(), std::move(acc));
}

/**
 * Read a measure back off a psi-kernel series. Expanding f in powers of
 * z = 1+pi and folding exponents mod p^level leaves mu(a) in slot a; this
 * equals the root-of-unity average p^{-level} Sum_{zeta^{p^level}=1}
 * zeta^{-a} f(zeta-1), with the division carried out exactly by
 * orthogonality. Slots at non-unit residues must vanish (that is the
 * psi-condition at this level); visible mass there beyond the truncation
 * certificate floor(terms / p^level) digits is rejected. For a polynomial
 * of degree < p^level in z the readback is exact at full precision, so
 * mellin_inverse(mellin(mu), level) returns mu on the nose.
 */
template <typename R>
GroupAlgebraMeasure<R> mellin_inverse(const PiSeries<R>& f, int level) {
    std::uint64_t p = f.p();
    std::uint64_t pn = detail::upow_checked(p, level);
    if (static_cast<std::uint64_t>(f.nterms()) < pn)
        throw std::invalid_argument(
            "inversion at level " + std::to_string(level) + " needs at least " +
            std::to_string(pn) + " tracked terms");
    const R zero = ringops::make_zero(f.coeff(0));
    std::vector<R> buf(static_cast<std::size_t>(pn), zero);
    std::vector<R> nxt(static_cast<std::size_t>(pn), zero);
    for (int j = f.nterms(); j-- > 0;) {
        for (std::uint64_t k = 0; k < pn; ++k)
            nxt[static_cast<std::size_t>(k)] =
                buf[static_cast<std::size_t>((k + pn - 1) % pn)] -
                buf[static_cast<std::size_t>(k)];
        nxt[0] = nxt[0] + f.coeff(j);
        buf.swap(nxt);
    }
    int cert = static_cast<int>(static_cast<std::uint64_t>(f.nterms()) / pn);
    GroupAlgebraMeasure<R> out(p, level, zero);
    for (std::uint64_t a = 0; a < pn; ++a) {
        const R& v = buf[static_cast<std::size_t>(a)];
        if (a % p == 0) {
            if (!ringops::vanishes(ringops::clamp_abs(v, cert)))
                throw std::domain_error(
                    "series is not in the psi-kernel at this level");
        } else if (!ringops::vanishes(v)) {
            out.set(a, v);
        }
    }
    return out;
}

/**
 * A character of the units split into a finite-order part omega and an
 * integer weight. omega lives on (Z/p^wild_level)^*: teich^tame on the
 * Teichmuller component and exponent `wild` on the one-units, whose values
 * are p^{wild_level-1}-th roots of unity; the weight contributes the full
 * unit lift to the j-th power. Values of omega live in the cyclotomic ring
 * of level max(wild_level-1, 1).
 */
struct CharacterSpec {
    std::uint64_t p = 3;
    int tame = 0;
    int wild_level = 1;
    std::uint64_t wild = 0;
    int weight = 0;

    std::uint64_t wild_modulus() const {
        return detail::upow_checked(p, wild_level - 1);
    }
    int tame_norm() const {
        long long d = static_cast<long long>(p) - 1;
        return static_cast<int>(((static_cast<long long>(tame) % d) + d) % d);
    }
    bool wild_trivial() const { return wild % wild_modulus() == 0; }
    bool finite_trivial() const { return wild_trivial() && tame_norm() == 0; }

    // p-power level of the conductor of the finite-order part.
    int conductor_level() const {
        std::uint64_t w = wild % wild_modulus();
        if (w != 0)
            return wild_level - detail::val_p(w, p);
        return tame_norm() != 0 ? 1 : 0;
    }
    int value_level() const { return std::max(wild_level - 1, 1); }

    CharacterSpec times(const CharacterSpec& o) const {
        require_same_shape(o);
        return {p, tame + o.tame, wild_level,
                (wild % wild_modulus() + o.wild % wild_modulus()) %
                    wild_modulus(),
                weight + o.weight};
    }
    CharacterSpec inverted() const {
        std::uint64_t m = wild_modulus();
        return {p, -tame, wild_level, (m - wild % m) % m, -weight};
    }

  private:
    void require_same_shape(const CharacterSpec& o) const {
        if (p != o.p || wild_level != o.wild_level)
            throw std::invalid_argument(
                "combining characters declared at different levels");
    }
};

namespace measdetail {

// teich(a)^tame * lift(a)^weight at the given precision; the wild part is
// handled by the callers, which know their value ring.
inline PadicScalar unit_factor(const CharacterSpec& eta, std::uint64_t a,
                               int prec) {
    PadicScalar f = PadicScalar::one(eta.p, prec);
    PadicScalar av = PadicScalar::from_residue(eta.p, prec, a);
    if (eta.tame_norm() != 0)
        f = f * av.teichmuller().pow(eta.tame_norm());
    if (eta.weight != 0)
        f = f * av.pow(eta.weight);
    return f;
}

}  // namespace measdetail

/**
 * The finite character sum Sum_a mu_a omega(a) lift(a)^weight, with lifts
 * taken at the measure's own level; exact at the stored precision, and for
 * weight 0 a ring homomorphism from the convolution algebra. Only the
 * weight factor sees more of a than the conductor does, so with a weight
 * the homomorphism property, like recomputing after a level reduction,
 * holds mod p^level.
 */
inline CyclotomicElem<PadicScalar> eval_character(
    const GroupAlgebraMeasure<PadicScalar>& mu, const CharacterSpec& eta) {
    if (mu.p() != eta.p)
        throw std::invalid_argument("character and measure disagree on p");
    if (mu.level() < eta.conductor_level())
        throw std::domain_error(
            "measure level is below the character conductor, need level >= " +
            std::to_string(eta.conductor_level()));
    int prec = mu.proto().prec();
    PadicScalar zero = PadicScalar::zero(eta.p, prec);
    int v = eta.value_level();
    CyclotomicElem<PadicScalar> acc =
        CyclotomicElem<PadicScalar>::zero(eta.p, v, zero);
    std::vector<long long> logs;
    std::uint64_t wmod = eta.wild_modulus();
    std::uint64_t w = eta.wild % wmod;
    if (w != 0)
        logs = measdetail::one_plus_p_logs(eta.p, eta.wild_level);
    for (std::uint64_t a = 0; a < mu.modulus(); ++a) {
        if (a % eta.p == 0 || ringops::vanishes(mu.at(a)))
            continue;
        PadicScalar s = mu.at(a) * measdetail::unit_factor(eta, a, prec);
        long long e = 0;
        if (w != 0)
            e = static_cast<long long>(detail::mulmod(
                w, measdetail::wild_log(eta.p, eta.wild_level, a, logs), wmod));
        acc = acc + CyclotomicElem<PadicScalar>::zeta(eta.p, v, zero, e).scale(s);
    }
    return acc;
}

// Same sum for measures that already carry root-of-unity values; the
// character may not add a wild part on top of those.
inline CyclotomicElem<PadicScalar> eval_character(
    const GroupAlgebraMeasure<CyclotomicElem<PadicScalar>>& mu,
    const CharacterSpec& eta) {
    if (mu.p() != eta.p)
        throw std::invalid_argument("character and measure disagree on p");
    if (!eta.wild_trivial())
        throw std::invalid_argument(
            "wild characters need scalar-coefficient measures");
    int prec = measdetail::scalar_prec(mu.proto());
    CyclotomicElem<PadicScalar> acc = zero_like(mu.proto());
    for (std::uint64_t a = 0; a < mu.modulus(); ++a) {
        if (a % eta.p == 0 || ringops::vanishes(mu.at(a)))
            continue;
        acc = acc + mu.at(a).scale(measdetail::unit_factor(eta, a, prec));
    }
    return acc;
}

/**
 * [a] -> eta(a)[a] coefficientwise, for characters whose values stay in the
 * scalars (trivial wild part). eval_character(twist(mu, eta), xi) equals
 * eval_character(mu, eta*xi).
 */
inline GroupAlgebraMeasure<PadicScalar> twist(
    const GroupAlgebraMeasure<PadicScalar>& mu, const CharacterSpec& eta) {
    if (mu.p() != eta.p)
        throw std::invalid_argument("character and measure disagree on p");
    if (!eta.wild_trivial())
        throw std::invalid_argument("use twist_wild for a ramified wild part");
    int prec = mu.proto().prec();
    GroupAlgebraMeasure<PadicScalar> out(mu.p(), mu.level(), mu.proto());
    for (std::uint64_t a = 0; a < mu.modulus(); ++a) {
        if (a % eta.p == 0 || ringops::vanishes(mu.at(a)))
            continue;
        out.set(a, mu.at(a) * measdetail::unit_factor(eta, a, prec));
    }
    return out;
}

// The wild counterpart: values move to the cyclotomic ring of the
// character's value level. The wild part only sees a through its conductor,
// so measures need level >= conductor_level only.
inline GroupAlgebraMeasure<CyclotomicElem<PadicScalar>> twist_wild(
    const GroupAlgebraMeasure<PadicScalar>& mu, const CharacterSpec& eta) {
    if (mu.p() != eta.p)
        throw std::invalid_argument("character and measure disagree on p");
    if (mu.level() < eta.conductor_level())
        throw std::domain_error(
            "measure level is below the character conductor, need level >= " +
            std::to_string(eta.conductor_level()));
    int prec = mu.proto().prec();
    PadicScalar zero = PadicScalar::zero(eta.p, prec);
    int v = eta.value_level();
    CyclotomicElem<PadicScalar> czero =
        CyclotomicElem<PadicScalar>::zero(eta.p, v, zero);
    GroupAlgebraMeasure<CyclotomicElem<PadicScalar>> out(mu.p(), mu.level(),
                                                         czero);
    std::uint64_t wmod = eta.wild_modulus();
    std::uint64_t w = eta.wild % wmod;
    int c = eta.conductor_level();
    std::vector<long long> logs;
    if (w != 0)
        logs = measdetail::one_plus_p_logs(eta.p, c);
    for (std::uint64_t a = 0; a < mu.modulus(); ++a) {
        if (a % eta.p == 0 || ringops::vanishes(mu.at(a)))
            continue;
        PadicScalar s = mu.at(a) * measdetail::unit_factor(eta, a, prec);
        long long e = 0;
        if (w != 0) {
            // w * m is well-defined mod p^{wild_level-1} from m mod p^{c-1}
            std::uint64_t m = measdetail::wild_log(eta.p, c, a, logs);
            e = static_cast<long long>(detail::mulmod(w, m, wmod));
        }
        out.set(a, CyclotomicElem<PadicScalar>::zeta(eta.p, v, zero, e).scale(s));
    }
    return out;
}

/**
 * The series side of character evaluation: with f = mellin(mu) and D the
 * invariant derivative, Sum_sigma omega(sigma)^{-1} (D^j f)(zeta^sigma - 1)
 * over units sigma mod p^c, c the conductor level. Substituting
 * sigma -> g*sigma term by term shows this equals
 * tau(omega) * eval_character(mu, eta), tau(omega) = Sum_sigma
 * omega(sigma)^{-1} zeta^sigma, so the value lives one level up from
 * eval_character's. Negative weights are folded into the measure before
 * transforming; a trivial finite part degenerates to the moment (D^j f)(0).
 * Exact when f tracks the full polynomial, i.e. terms >= p^level + weight.
 */
inline CyclotomicElem<PadicScalar> eval_character_series(
    const GroupAlgebraMeasure<PadicScalar>& mu, const CharacterSpec& eta,
    int terms) {
    if (mu.p() != eta.p)
        throw std::invalid_argument("character and measure disagree on p");
    if (mu.level() < eta.conductor_level())
        throw std::domain_error(
            "measure level is below the character conductor, need level >= " +
            std::to_string(eta.conductor_level()));
    int prec = mu.proto().prec();
    PadicScalar zero = PadicScalar::zero(eta.p, prec);
    int j = eta.weight;
    PiSeries<PadicScalar> f =
        j < 0 ? mellin(twist(mu, CharacterSpec{eta.p, 0, eta.wild_level, 0, j}),
                       terms)
              : mellin(mu, terms);
    for (int t = 0; t < j; ++t)
        f = f.invariant_derivative();
    int c = eta.conductor_level();
    if (c == 0)
        return CyclotomicElem<PadicScalar>::scalar(eta.p, 1, f.coeff(0));

    std::uint64_t pc = detail::upow_checked(eta.p, c);
    std::vector<PadicScalar> h(static_cast<std::size_t>(pc), zero);
    std::vector<PadicScalar> nxt(static_cast<std::size_t>(pc), zero);
    for (int m = f.nterms(); m-- > 0;) {
        for (std::uint64_t k = 0; k < pc; ++k)
            nxt[static_cast<std::size_t>(k)] =
                h[static_cast<std::size_t>((k + pc - 1) % pc)] -
                h[static_cast<std::size_t>(k)];
        nxt[0] = nxt[0] + f.coeff(m);
        h.swap(nxt);
    }

    std::uint64_t w = eta.wild % eta.wild_modulus();
    std::uint64_t wprim = 0, cmod = 1;
    std::vector<long long> logs;
    if (w != 0) {
        int vw = detail::val_p(w, eta.p);
        cmod = detail::upow_checked(eta.p, c - 1);
        wprim = (w / detail::upow_checked(eta.p, vw)) % cmod;
        logs = measdetail::one_plus_p_logs(eta.p, c);
    }
    CharacterSpec tame_inv{eta.p, -eta.tame, 1, 0, 0};
    std::vector<PadicScalar> obuf(static_cast<std::size_t>(pc), zero);
    for (std::uint64_t sigma = 0; sigma < pc; ++sigma) {
        if (sigma % eta.p == 0)
            continue;
        PadicScalar sc = measdetail::unit_factor(tame_inv, sigma, prec);
        std::uint64_t shift = 0;
        if (wprim != 0) {
            std::uint64_t m = measdetail::wild_log(eta.p, c, sigma, logs);
            std::uint64_t e = detail::mulmod(wprim, m, cmod);
            shift = (pc - detail::mulmod(e, eta.p, pc)) % pc;
        }
        for (std::uint64_t k = 0; k < pc; ++k) {
            if (ringops::vanishes(h[static_cast<std::size_t>(k)]))
                continue;
            std::uint64_t slot = (detail::mulmod(sigma, k, pc) + shift) % pc;
            obuf[static_cast<std::size_t>(slot)] =
                obuf[static_cast<std::size_t>(slot)] +
                h[static_cast<std::size_t>(k)] * sc;
        }
    }
    return from_redundant(eta.p, c, std::move(obuf));
}

// Non-negative rational bound on distribution growth, carried as metadata.
struct OrderBound {
    int num = 0;
    int den = 1;

    OrderBound plus(const OrderBound& o) const {
        int n = num * o.den + o.num * den;
        int d = den * o.den;
        int g = std::gcd(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        return {n, d};
    }
};

/**
 * A distribution on the units presented through its branch decomposition:
 * one truncated power series in X = gamma - 1, gamma = 1+p the fixed
 * generator of the one-units, for each power of the Teichmuller character.
 * Coefficients may carry denominators; `order` bounds the growth rate as
 * metadata and adds under multiplication. The branch-d series of a measure
 * is Sum_a mu_a teich(a)^d (1+X)^{m_a}, and evaluating at teich^i lift^j
 * reads branch (i+j) mod (p-1) at X = (1+p)^j - 1.
 */
class DistributionSeries {
  public:
    DistributionSeries(std::uint64_t p,
                       std::vector<PiSeries<PadicScalar>> branches,
                       OrderBound h)
        : p_(p), br_(std::move(branches)), h_(h) {
        if (br_.size() != static_cast<std::size_t>(p - 1))
            throw std::invalid_argument(
                "a distribution carries one branch per tame character");
        for (const auto& b : br_)
            if (b.p() != p_ || b.nterms() != br_[0].nterms())
                throw std::invalid_argument(
                    "distribution branches must share p and truncation");
    }

    static DistributionSeries from_measure(
        const GroupAlgebraMeasure<PadicScalar>& mu, int terms) {
        std::uint64_t p = mu.p();
        int prec = mu.proto().prec();
        PadicScalar zero = PadicScalar::zero(p, prec);
        std::uint64_t pn1 = mu.modulus() / p;
        std::vector<long long> logs =
            measdetail::one_plus_p_logs(p, mu.level());
        std::vector<std::vector<PadicScalar>> mass(
            static_cast<std::size_t>(p - 1),
            std::vector<PadicScalar>(static_cast<std::size_t>(pn1), zero));
        for (std::uint64_t a = 0; a < mu.modulus(); ++a) {
            if (a % p == 0 || ringops::vanishes(mu.at(a)))
                continue;
            std::size_t m = static_cast<std::size_t>(
                measdetail::wild_log(p, mu.level(), a, logs));
            PadicScalar tch =
                PadicScalar::from_residue(p, prec, a).teichmuller();
            PadicScalar tp = PadicScalar::one(p, prec);
            for (std::size_t d = 0; d + 1 < p; ++d) {
                mass[d][m] = mass[d][m] + mu.at(a) * tp;
                tp = tp * tch;
            }
        }
        std::vector<std::vector<PadicScalar>> br(
            static_cast<std::size_t>(p - 1),
            std::vector<PadicScalar>(static_cast<std::size_t>(terms), zero));
        std::vector<PadicScalar> pw(static_cast<std::size_t>(terms), zero);
        pw[0] = PadicScalar::one(p, prec);
        for (std::uint64_t m = 0; m < pn1; ++m) {
            if (m > 0)
                for (std::size_t k = pw.size(); k-- > 1;)
                    pw[k] = pw[k] + pw[k - 1];
            for (std::size_t d = 0; d + 1 < p; ++d) {
                const PadicScalar& s = mass[d][static_cast<std::size_t>(m)];
                if (s.is_zero())
                    continue;
                for (std::size_t k = 0; k < pw.size(); ++k)
                    br[d][k] = br[d][k] + pw[k] * s;
            }
        }
        std::vector<PiSeries<PadicScalar>> out;
        out.reserve(br.size());
        for (auto& b : br)
            out.emplace_back(p, std::move(b));
        return DistributionSeries(p, std::move(out), OrderBound{0, 1});
    }

    std::uint64_t p() const { return p_; }
    int nterms() const { return br_[0].nterms(); }
    int nbranches() const { return static_cast<int>(br_.size()); }
    const OrderBound& order() const { return h_; }

    const PiSeries<PadicScalar>& branch(int d) const {
        long long n = static_cast<long long>(br_.size());
        return br_[static_cast<std::size_t>(((d % n) + n) % n)];
    }

    PadicScalar eval_weight(int tame_i, int j) const {
        const PiSeries<PadicScalar>& b = branch(tame_i + j);
        int prec = b.coeff(0).prec();
        PadicScalar x =
            PadicScalar::from_int(p_, prec, static_cast<long long>(p_) + 1)
                .pow(j) -
            PadicScalar::one(p_, prec);
        PadicScalar acc = b.coeff(b.nterms() - 1);
        for (int k = b.nterms() - 2; k >= 0; --k)
            acc = acc * x + b.coeff(k);
        return acc;
    }

    // Largest denominator exponent in play; finite-truncation stand-in for
    // the boundedness question, which callers interpret themselves.
    int den_exponent_max() const {
        int m = 0;
        for (const auto& b : br_)
            for (int k = 0; k < b.nterms(); ++k)
                if (!b.coeff(k).is_zero())
                    m = std::max(m, -std::min(0, b.coeff(k).valuation()));
        return m;
    }

    DistributionSeries operator*(const DistributionSeries& o) const {
        if (p_ != o.p_)
            throw std::invalid_argument("mixing distributions over different p");
        if (nterms() != o.nterms())
            throw std::invalid_argument(
                "distribution truncations do not match");
        std::vector<PiSeries<PadicScalar>> out;
        out.reserve(br_.size());
        for (std::size_t d = 0; d < br_.size(); ++d)
            out.push_back(br_[d] * o.br_[d]);
        return DistributionSeries(p_, std::move(out), h_.plus(o.h_));
    }

  private:
    std::uint64_t p_;
    std::vector<PiSeries<PadicScalar>> br_;
    OrderBound h_;
};

/**
 * ell_i = log(1+X)/log(1+p) - i, the same series on every branch (the
 * generator gamma = 1+p has no Teichmuller component). Coefficient k has
 * valuation at least -floor(log_p k) - 1; construction checks that cap.
 * Evaluating at weight j gives j - i. Order 1.
 */
inline DistributionSeries ell_element(std::uint64_t p, int i, int terms,
                                      int prec) {
    PiSeries<PadicScalar> t = t_series(p, terms, prec);
    PadicScalar lg =
        iwasawa_log(PadicScalar::from_int(p, prec, static_cast<long long>(p) + 1));
    PiSeries<PadicScalar> base =
        t.scale(lg.inv()) -
        PiSeries<PadicScalar>::constant(p, terms,
                                        PadicScalar::from_int(p, prec, i));
    for (int k = 1; k < terms; ++k) {
        if (base.coeff(k).is_zero())
            continue;
        int flog = 0;
        for (std::uint64_t pw = p; pw <= static_cast<std::uint64_t>(k); pw *= p)
            ++flog;
        if (base.coeff(k).valuation() < -flog - 1)
            throw std::logic_error("ell coefficient denominator exceeded its cap");
    }
    std::vector<PiSeries<PadicScalar>> br(static_cast<std::size_t>(p - 1),
                                          base);
    return DistributionSeries(p, std::move(br), OrderBound{1, 1});
}

}  // namespace padiclab
