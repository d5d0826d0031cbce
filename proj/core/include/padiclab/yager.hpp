#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "padiclab/cyclotomic.hpp"
#include "padiclab/measures.hpp"
#include "padiclab/modarith.hpp"
#include "padiclab/unramified.hpp"

namespace padiclab {

namespace detail {

// Determinant over F_p by Gaussian elimination. Entries need not be reduced;
// returns 0 for singular matrices.
inline std::uint64_t det_mod_p(std::vector<std::vector<std::uint64_t>> m, std::uint64_t p) {
    std::size_t n = m.size();
    std::uint64_t det = 1 % p;
    for (auto& row : m) {
        if (row.size() != n)
            throw std::invalid_argument("determinant needs a square matrix");
        for (auto& v : row)
            v %= p;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col] == 0)
            ++piv;
        if (piv == n)
            return 0;
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = p - det;
        }
        det = mulmod(det, m[col][col], p);
        std::uint64_t di = powmod(m[col][col], p - 2, p);
        for (std::size_t r = col + 1; r < n; ++r) {
            std::uint64_t f = mulmod(m[r][col], di, p);
            if (!f)
                continue;
            for (std::size_t cc = col; cc < n; ++cc)
                m[r][cc] = submod(m[r][cc], mulmod(f, m[col][cc], p), p);
        }
    }
    return det % p;
}

}  // namespace detail

/**
 * Element of the group ring O_K[Gal(K/F)] for a step K/F of an unramified
 * tower, F itself unramified over Q_p of degree `base_degree`. The group is
 * cyclic, generated by the relative Frobenius sigma = (arithmetic
 * Frobenius)^base_degree; coefficient j is attached to [sigma^j].
 *
 * The elements that matter are the semilinear ones, y^g = [g] y with the
 * group acting on the coefficients. They are exactly the image of
 * yager_map, they survive reduction down the tower as traces, and applying
 * a character of the group to them produces periods: elements on which the
 * coefficient action of u is multiplication by the character value at u.
 */
class YagerElement {
  public:
    YagerElement(int base_degree, std::vector<UnramifiedElem> coeffs)
        : base_(base_degree), c_(std::move(coeffs)) {
        if (base_ < 1 || c_.empty())
            throw std::invalid_argument("group ring element needs a base degree and coefficients");
        const auto& K = c_[0].field();
        if (!K)
            throw std::invalid_argument("coefficients must carry their field");
        if (K->degree() % base_ != 0 ||
            c_.size() != static_cast<std::size_t>(K->degree() / base_))
            throw std::invalid_argument("coefficient count must equal the relative degree");
        for (const auto& x : c_)
            if (x.field() != K)
                throw std::invalid_argument("coefficients live in different fields");
    }

    int base_degree() const { return base_; }
    int order() const { return static_cast<int>(c_.size()); }
    const UnramifiedField::Ptr& field() const { return c_[0].field(); }
    const UnramifiedElem& coeff(int j) const { return c_[static_cast<std::size_t>(j)]; }

    YagerElement operator+(const YagerElement& o) const {
        require_compatible(o);
        std::vector<UnramifiedElem> c(c_);
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] += o.c_[i];
        return YagerElement(base_, std::move(c));
    }
    YagerElement operator-(const YagerElement& o) const {
        require_compatible(o);
        std::vector<UnramifiedElem> c(c_);
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] -= o.c_[i];
        return YagerElement(base_, std::move(c));
    }
    YagerElement scale(const UnramifiedElem& s) const {
        std::vector<UnramifiedElem> c(c_);
        for (auto& x : c)
            x *= s;
        return YagerElement(base_, std::move(c));
    }

    // Galois action on the coefficients: y -> y^(sigma^k).
    YagerElement galois(int k) const {
        std::vector<UnramifiedElem> c(c_);
        for (auto& x : c)
            x = x.frobenius_pow(k * base_);
        return YagerElement(base_, std::move(c));
    }

    // Multiplication by the group element [sigma^k] (index rotation).
    YagerElement group_mul(int k) const {
        int m = order();
        int s = ((k % m) + m) % m;
        std::vector<UnramifiedElem> c(c_);
        for (int j = 0; j < m; ++j)
            c[static_cast<std::size_t>((j + s) % m)] = c_[static_cast<std::size_t>(j)];
        return YagerElement(base_, std::move(c));
    }

    bool same_value(const YagerElement& o) const {
        if (base_ != o.base_ || c_.size() != o.c_.size() || field() != o.field())
            return false;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!c_[i].same_value(o.c_[i]))
                return false;
        return true;
    }

    // The defining property of the module, checked at every group element.
    bool is_semilinear() const {
        for (int k = 1; k < order(); ++k)
            if (!galois(k).same_value(group_mul(k)))
                return false;
        return true;
    }

  private:
    int base_;
    std::vector<UnramifiedElem> c_;

    void require_compatible(const YagerElement& o) const {
        if (base_ != o.base_ || field() != o.field())
            throw std::invalid_argument("mixing group rings of different tower steps");
    }
};

/**
 * The one-variable map x -> sum_sigma x^sigma [sigma^{-1}]: coefficient j
 * is x^(sigma^{-j}). Its image is exactly the semilinear elements, and it
 * turns the Galois action on x into group multiplication.
 */
inline YagerElement yager_map(const UnramifiedElem& x, int base_degree = 1) {
    const auto& K = x.field();
    if (base_degree < 1 || K->degree() % base_degree != 0)
        throw std::invalid_argument("base degree must divide the field degree");
    int m = K->degree() / base_degree;
    std::vector<UnramifiedElem> c;
    c.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        c.push_back(x.frobenius_pow(-j * base_degree));
    return YagerElement(base_degree, std::move(c));
}

/**
 * Push along the group surjection Gal(L/F) ->> Gal(K/F) and return the
 * result over K. Each target slot is the sum of the source slots in its
 * residue class; for semilinear inputs those sums are relative traces, so
 * they genuinely lie in O_K and the coefficient pullback is exact. The
 * pullback throws for inputs whose folds stay outside O_K.
 */
inline YagerElement reduce_yager(const YagerElement& y, const UnramifiedField::Ptr& K) {
    const auto& L = y.field();
    if (K == L)
        return y;
    if (K->p() != L->p() || K->prec() != L->prec())
        throw std::invalid_argument("tower levels need one prime and one working precision");
    if (K->degree() % y.base_degree() != 0 || L->degree() % K->degree() != 0)
        throw std::invalid_argument("fields are not nested over the base");
    int mK = K->degree() / y.base_degree();
    int mL = y.order();
    UnramifiedEmbedding emb(K, L);
    std::vector<UnramifiedElem> fold(static_cast<std::size_t>(mK), L->zero());
    for (int j = 0; j < mL; ++j)
        fold[static_cast<std::size_t>(j % mK)] += y.coeff(j);
    std::vector<UnramifiedElem> c;
    c.reserve(fold.size());
    for (const auto& v : fold)
        c.push_back(emb.restrict(v));
    return YagerElement(y.base_degree(), std::move(c));
}

/**
 * Whether the conjugates of x over F form an O_F-basis of O_K, i.e. whether
 * x generates O_K as a module over O_F[Gal(K/F)]. Certified mod p: the
 * products (basis of O_F) x (conjugates of x) are written in F_p-coordinates
 * and the determinant must be a unit. The residue statement lifts, p being
 * in the radical of the group ring. Pass F = nullptr for base Q_p.
 */
inline bool is_normal_basis_gen(const UnramifiedElem& x,
                                const UnramifiedField::Ptr& F = nullptr) {
    const auto& K = x.field();
    int fF = F ? F->degree() : 1;
    if (F && (F->p() != K->p() || F->prec() != K->prec()))
        throw std::invalid_argument("base field does not match the top field");
    if (K->degree() % fF != 0)
        throw std::invalid_argument("base degree must divide the field degree");
    int fK = K->degree();
    int m = fK / fF;
    std::vector<UnramifiedElem> lambda;
    if (F) {
        UnramifiedEmbedding emb(F, K);
        UnramifiedElem b = F->one();
        for (int i = 0; i < fF; ++i) {
            lambda.push_back(emb.embed(b));
            if (i + 1 < fF)
                b *= F->gen();
        }
    } else {
        lambda.push_back(K->one());
    }
    std::vector<std::vector<std::uint64_t>> mat;
    mat.reserve(static_cast<std::size_t>(fK));
    UnramifiedElem conj = x;
    for (int i = 0; i < m; ++i) {
        for (const auto& lb : lambda) {
            UnramifiedElem row = lb * conj;
            std::vector<std::uint64_t> r;
            r.reserve(static_cast<std::size_t>(fK));
            for (int t = 0; t < fK; ++t) {
                const PadicScalar& c = row.coord(t);
                r.push_back(c.den_exp() == 0 ? c.residue() % K->p() : 0);
            }
            mat.push_back(std::move(r));
        }
        if (i + 1 < m)
            conj = conj.frobenius_pow(fF);
    }
    return detail::det_mod_p(std::move(mat), K->p()) != 0;
}

/**
 * Deterministic normal-basis generator search: Teichmueller lifts of the
 * residue classes are tried in enumeration order, first certified element
 * wins. A generator always exists, so the loop terminates.
 */
inline UnramifiedElem find_normal_basis_gen(const UnramifiedField::Ptr& K,
                                            const UnramifiedField::Ptr& F = nullptr) {
    std::uint64_t count = detail::upow_checked(K->p(), K->degree());
    for (std::uint64_t k = 1; k < count; ++k) {
        UnramifiedElem x = K->residue_rep(k).teichmuller();
        if (is_normal_basis_gen(x, F))
            return x;
    }
    throw std::logic_error("residue enumeration exhausted without a generator");
}

/**
 * Apply the character sigma -> t to the group elements of y, t a
 * Teichmueller scalar given by its residue r. The result lives in O_K, and
 * for semilinear y it is a period: acting on it by sigma^k multiplies it by
 * t^k. That crossed-homomorphism identity is verified here for every group
 * element and its failure (a non-semilinear input) is an error.
 */
inline UnramifiedElem period_teich(const YagerElement& y, std::uint64_t r) {
    const auto& K = y.field();
    int m = y.order();
    UnramifiedElem t = K->from_scalar(
        PadicScalar::from_residue(K->p(), K->prec(), r % K->p()).teichmuller());
    if (!t.pow(static_cast<std::uint64_t>(m)).same_value(K->one()))
        throw std::domain_error("character order does not divide the group order");
    UnramifiedElem acc = K->zero();
    UnramifiedElem tp = K->one();
    for (int j = 0; j < m; ++j) {
        acc += y.coeff(j) * tp;
        tp *= t;
    }
    for (int k = 1; k < m; ++k) {
        UnramifiedElem lhs = acc.frobenius_pow(k * y.base_degree());
        if (!lhs.same_value(acc * t.pow(static_cast<std::uint64_t>(k))))
            throw std::domain_error(
                "crossed-homomorphism identity fails: element is not semilinear");
    }
    return acc;
}

/**
 * Apply the character sigma -> zeta^w, zeta a primitive (p^level)-th root
 * of unity, to the group elements of y. The value ring is the cyclotomic
 * extension with O_K coefficients; the root of unity is inert under the
 * coefficient Galois action, which is exactly the u-action of the period
 * identity. The identity is verified for every group element, as above.
 */
inline CyclotomicElem<UnramifiedElem> period_wild(const YagerElement& y, int level,
                                                  long long w) {
    using CycU = CyclotomicElem<UnramifiedElem>;
    const auto& K = y.field();
    std::uint64_t p = K->p();
    int m = y.order();
    std::uint64_t pn = detail::upow_checked(p, level);
    std::uint64_t w0 = static_cast<std::uint64_t>(((w % static_cast<long long>(pn)) +
                                                   static_cast<long long>(pn))) % pn;
    if ((w0 * static_cast<std::uint64_t>(m)) % pn != 0)
        throw std::domain_error("value ring cannot host the character order");
    std::vector<UnramifiedElem> buf(static_cast<std::size_t>(pn), K->zero());
    for (int j = 0; j < m; ++j) {
        std::size_t slot = static_cast<std::size_t>(
            (w0 * static_cast<std::uint64_t>(j)) % pn);
        buf[slot] += y.coeff(j);
    }
    CycU res = from_redundant(p, level, std::move(buf));
    for (int k = 1; k < m; ++k) {
        CycU lhs = res;
        for (int s = 0; s < k * y.base_degree(); ++s)
            lhs = lhs.frobenius();
        CycU rhs = res * CycU::zeta(p, level, K->zero(),
                                    static_cast<long long>(w0) * k);
        if (!lhs.same_value(rhs))
            throw std::domain_error(
                "crossed-homomorphism identity fails: element is not semilinear");
    }
    return res;
}

/**
 * Unit test for periods. The composite rings O_K and O_K[zeta] are local
 * with residue field k_K; the root of unity reduces to 1 there, so the
 * residue image is the coordinate sum mod p and unitness is its
 * nonvanishing. A normal-basis generator has all its resolvents unit.
 */
inline bool period_is_unit(const UnramifiedElem& e) {
    return !e.is_zero() && e.min_valuation() == 0;
}
inline bool period_is_unit(const CyclotomicElem<UnramifiedElem>& e) {
    UnramifiedElem s = e.coord(0);
    for (std::size_t i = 1; i < e.dim(); ++i)
        s += e.coord(i);
    return period_is_unit(s);
}

// ---------------------------------------------------------------------------
// Two-variable measures: the group ring of Gal(K/F) with one-variable
// measures over O_K as coefficients.

using UnramifiedMeasure = GroupAlgebraMeasure<UnramifiedElem>;

// Coefficient Frobenius, entry by entry.
inline UnramifiedMeasure measure_galois(const UnramifiedMeasure& h, int steps) {
    UnramifiedMeasure out(h);
    std::uint64_t pn = h.modulus();
    for (std::uint64_t a = 1; a < pn; ++a)
        if (a % h.p() != 0)
            out.set(a, h.at(a).frobenius_pow(steps));
    return out;
}

/**
 * One level of the two-variable object: slot j is the coefficient measure
 * of the group element [sigma^j]. Semilinear instances (the assembled ones)
 * satisfy slot-rotation = coefficientwise Galois action, the finite-level
 * form of the equivariance the regulator machinery guarantees.
 */
struct TwoVarMeasure {
    int base_degree = 1;
    std::vector<UnramifiedMeasure> slots;

    int order() const { return static_cast<int>(slots.size()); }
    const UnramifiedField::Ptr& field() const { return slots[0].proto().field(); }
};

/**
 * Assemble sum_sigma h^sigma [sigma^{-1}] from one level's one-variable
 * measure: slot j carries h^(sigma^{-j}). This mirrors the one-variable map
 * coefficient for coefficient, so the assembly is semilinear.
 */
inline TwoVarMeasure assemble_level(const UnramifiedMeasure& h, int base_degree = 1) {
    const auto& K = h.proto().field();
    if (!K)
        throw std::invalid_argument("measure entries must carry their field");
    if (base_degree < 1 || K->degree() % base_degree != 0)
        throw std::invalid_argument("base degree must divide the field degree");
    int m = K->degree() / base_degree;
    TwoVarMeasure out;
    out.base_degree = base_degree;
    out.slots.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        out.slots.push_back(measure_galois(h, -j * base_degree));
    return out;
}

inline TwoVarMeasure two_var_galois(const TwoVarMeasure& mu, int k) {
    TwoVarMeasure out = mu;
    for (auto& s : out.slots)
        s = measure_galois(s, k * mu.base_degree);
    return out;
}

inline TwoVarMeasure two_var_group_mul(const TwoVarMeasure& mu, int k) {
    int m = mu.order();
    int s = ((k % m) + m) % m;
    TwoVarMeasure out = mu;
    for (int j = 0; j < m; ++j)
        out.slots[static_cast<std::size_t>((j + s) % m)] = mu.slots[static_cast<std::size_t>(j)];
    return out;
}

inline bool two_var_same(const TwoVarMeasure& a, const TwoVarMeasure& b) {
    if (a.base_degree != b.base_degree || a.slots.size() != b.slots.size())
        return false;
    for (std::size_t j = 0; j < a.slots.size(); ++j)
        if (!a.slots[j].same_value(b.slots[j]))
            return false;
    return true;
}

inline bool two_var_semilinear(const TwoVarMeasure& mu) {
    for (int k = 1; k < mu.order(); ++k)
        if (!two_var_same(two_var_galois(mu, k), two_var_group_mul(mu, k)))
            return false;
    return true;
}

/**
 * Reduce one step down the tower: fold the slots along the group
 * surjection, then pull every entry back to the subfield. The folds are
 * entrywise relative traces for semilinear inputs, so the pullback is
 * exact; it throws when a fold escapes O_K.
 */
inline TwoVarMeasure reduce_two_var(const TwoVarMeasure& mu, const UnramifiedField::Ptr& K) {
    const auto& L = mu.field();
    if (K == L)
        return mu;
    if (K->degree() % mu.base_degree != 0 || L->degree() % K->degree() != 0)
        throw std::invalid_argument("fields are not nested over the base");
    int mK = K->degree() / mu.base_degree;
    int mL = mu.order();
    UnramifiedEmbedding emb(K, L);
    std::uint64_t p = K->p();
    std::uint64_t pn = mu.slots[0].modulus();
    TwoVarMeasure out;
    out.base_degree = mu.base_degree;
    std::vector<UnramifiedMeasure> fold(
        static_cast<std::size_t>(mK),
        UnramifiedMeasure(p, mu.slots[0].level(), L->zero()));
    for (int j = 0; j < mL; ++j)
        fold[static_cast<std::size_t>(j % mK)] =
            fold[static_cast<std::size_t>(j % mK)] + mu.slots[static_cast<std::size_t>(j)];
    for (const auto& f : fold) {
        UnramifiedMeasure down(p, f.level(), K->zero());
        for (std::uint64_t a = 1; a < pn; ++a)
            if (a % p != 0)
                down.set(a, emb.restrict(f.at(a)));
        out.slots.push_back(std::move(down));
    }
    return out;
}

/** A tower of assembled levels, ordered by inclusion of their fields. */
struct TwoVarMeasureTower {
    int base_degree = 1;
    std::vector<TwoVarMeasure> levels;
};

/**
 * Assemble every level of a tower. The level measures must share one prime
 * and one cyclotomic level, and their fields must be nested by degree;
 * adjacent levels are expected (and later checked) to be related by the
 * entrywise relative trace.
 */
inline TwoVarMeasureTower assemble_two_var(const std::vector<UnramifiedMeasure>& levels,
                                           int base_degree = 1) {
    if (levels.empty())
        throw std::invalid_argument("a tower needs at least one level");
    TwoVarMeasureTower t;
    t.base_degree = base_degree;
    t.levels.reserve(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i > 0) {
            const auto& lo = levels[i - 1].proto().field();
            const auto& hi = levels[i].proto().field();
            if (levels[i].level() != levels[i - 1].level() ||
                hi->degree() % lo->degree() != 0)
                throw std::invalid_argument("tower levels are not nested");
        }
        t.levels.push_back(assemble_level(levels[i], base_degree));
    }
    return t;
}

constexpr int kExactCongruence = std::numeric_limits<int>::max();

struct TowerPairReport {
    int lower_level;        // index of the smaller field of the pair
    int defect_valuation;   // kExactCongruence when the congruence is exact
};

struct TowerCompatReport {
    std::vector<TowerPairReport> pairs;
    bool all_exact = true;
};

/**
 * The cross-level congruence: reducing level i+1's assembly to level i's
 * field must reproduce level i's assembly. What is reported per pair is the
 * valuation of the worst defect, not a boolean, so precision loss in the
 * level data stays visible. Exact pairs report the sentinel.
 */
inline TowerCompatReport check_tower_compat(const TwoVarMeasureTower& t) {
    TowerCompatReport rep;
    for (std::size_t i = 0; i + 1 < t.levels.size(); ++i) {
        TwoVarMeasure red = reduce_two_var(t.levels[i + 1], t.levels[i].field());
        int worst = kExactCongruence;
        std::uint64_t p = t.levels[i].slots[0].p();
        std::uint64_t pn = t.levels[i].slots[0].modulus();
        for (int j = 0; j < t.levels[i].order(); ++j)
            for (std::uint64_t a = 1; a < pn; ++a) {
                if (a % p == 0)
                    continue;
                UnramifiedElem d = red.slots[static_cast<std::size_t>(j)].at(a) -
                                   t.levels[i].slots[static_cast<std::size_t>(j)].at(a);
                if (!d.is_zero())
                    worst = std::min(worst, d.min_valuation());
            }
        rep.pairs.push_back({static_cast<int>(i), worst});
        if (worst != kExactCongruence)
            rep.all_exact = false;
    }
    return rep;
}

/**
 * Twist by the inverse of the unramified character sigma -> alpha: the
 * group element [sigma^j] goes to alpha^(-j) [sigma^j]. Twisting by alpha
 * and then by alpha^(-1) is the identity, and evaluation against a
 * character beta of the group reads the untwisted measure at alpha^(-1)
 * beta.
 */
inline TwoVarMeasure twist_two_var(const TwoVarMeasure& mu, const UnramifiedElem& alpha) {
    UnramifiedElem step = alpha.inv();
    UnramifiedElem pw = mu.field()->one();
    TwoVarMeasure out = mu;
    for (std::size_t j = 0; j < out.slots.size(); ++j) {
        if (j > 0)
            pw *= step;
        out.slots[j] = out.slots[j].scale(pw);
    }
    return out;
}

/** Fold the group variable against the character sigma -> beta. */
inline UnramifiedMeasure eval_u_side(const TwoVarMeasure& mu, const UnramifiedElem& beta) {
    UnramifiedMeasure acc = mu.slots[0];
    UnramifiedElem pw = mu.field()->one();
    for (std::size_t j = 1; j < mu.slots.size(); ++j) {
        pw *= beta;
        acc = acc + mu.slots[j].scale(pw);
    }
    return acc;
}

/** Lift a scalar one-variable measure into a field, for use as level data. */
inline UnramifiedMeasure lift_measure(const GroupAlgebraMeasure<PadicScalar>& h,
                                      const UnramifiedField::Ptr& K) {
    UnramifiedMeasure out(h.p(), h.level(), K->zero());
    std::uint64_t pn = h.modulus();
    for (std::uint64_t a = 1; a < pn; ++a)
        if (a % h.p() != 0)
            out.set(a, K->from_scalar(h.at(a)));
    return out;
}

}  // namespace padiclab
