#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "padiclab/modarith.hpp"
#include "padiclab/rational_oracle.hpp"

namespace padiclab {

// Smallest m with p^m > n; the exponent controller of the scaled binomial
// basis. Pure combinatorics, so any p >= 2 is accepted.
inline int ell_index(std::uint64_t n, std::uint64_t p) {
    if (p < 2)
        throw std::invalid_argument("ell index needs p >= 2");
    int m = 0;
    for (std::uint64_t pw = 1; pw <= n; pw *= p)
        ++m;
    return m;
}

// binom(x, n) for any integer x, by the exact stepwise recurrence.
inline BigInt binom_int(long long x, int n) {
    if (n < 0)
        throw std::invalid_argument("binomial lower index must be >= 0");
    BigInt c = 1;
    for (int i = 1; i <= n; ++i) {
        c *= BigInt(x - i + 1);
        c /= i;
    }
    return c;
}

/**
 * Coefficients of a function on Z_p^2 in the binomial basis
 * binom(x1,n1) binom(x2,n2), indices below the cutoff, stored as exact
 * rationals. order1/order2 are the declared scale exponents (a, b) of the
 * scaled-basis reading p^{[a l(n1)] + [b l(n2)]} binom binom; the raw
 * coefficients are kept unscaled so expansion and pullback stay p-free,
 * and the norms below apply the scaling on the fly.
 */
struct MahlerCoeffs2D {
    std::uint64_t p = 3;
    int cutoff = 1;
    BigRational order1, order2;
    std::vector<BigRational> c;

    const BigRational& at(int n1, int n2) const {
        return c[static_cast<std::size_t>(n1) * static_cast<std::size_t>(cutoff) +
                 static_cast<std::size_t>(n2)];
    }
    BigRational& at(int n1, int n2) {
        return c[static_cast<std::size_t>(n1) * static_cast<std::size_t>(cutoff) +
                 static_cast<std::size_t>(n2)];
    }
};

namespace amicedetail {

inline void check_order(const BigRational& a) {
    if (a < 0)
        throw std::invalid_argument("scale exponents must be >= 0");
}

// floor(a * ell) for a >= 0, ell >= 0.
inline int scale_shift(const BigRational& a, int ell) {
    BigInt q = numerator(a) * ell / denominator(a);
    return static_cast<int>(q);
}

// In-place forward-difference expansion: slot n becomes Delta^n f(0), the
// Mahler coefficient sum_k (-1)^{n-k} binom(n,k) f(k).
template <typename T>
void difference_expand(std::vector<T>& v) {
    for (std::size_t n = 1; n < v.size(); ++n)
        for (std::size_t k = v.size() - 1; k >= n; --k)
            v[k] -= v[k - 1];
}

}  // namespace amicedetail

inline MahlerCoeffs2D mahler_zero(std::uint64_t p, int cutoff,
                                  BigRational a = BigRational(0),
                                  BigRational b = BigRational(0)) {
    if (p < 2 || cutoff < 1)
        throw std::invalid_argument("coefficient table needs p >= 2, cutoff >= 1");
    amicedetail::check_order(a);
    amicedetail::check_order(b);
    MahlerCoeffs2D f;
    f.p = p;
    f.cutoff = cutoff;
    f.order1 = std::move(a);
    f.order2 = std::move(b);
    f.c.assign(static_cast<std::size_t>(cutoff) * static_cast<std::size_t>(cutoff),
               BigRational(0));
    return f;
}

// The scaled basis element c_{n1,n2} as a raw coefficient array: the single
// entry p^{[a l(n1)] + [b l(n2)]} at (n1, n2).
inline MahlerCoeffs2D scaled_basis_elem(std::uint64_t p, int cutoff, int n1,
                                        int n2, const BigRational& a,
                                        const BigRational& b) {
    MahlerCoeffs2D f = mahler_zero(p, cutoff, a, b);
    if (n1 < 0 || n1 >= cutoff || n2 < 0 || n2 >= cutoff)
        throw std::invalid_argument("basis index outside the cutoff");
    int s = amicedetail::scale_shift(a, ell_index(static_cast<std::uint64_t>(n1), p)) +
            amicedetail::scale_shift(b, ell_index(static_cast<std::uint64_t>(n2), p));
    BigInt pw = 1;
    for (int i = 0; i < s; ++i)
        pw *= p;
    f.at(n1, n2) = BigRational(pw);
    return f;
}

/**
 * One-variable Mahler inversion by iterated finite differences:
 * a_n = sum_k (-1)^{n-k} binom(n,k) f(k), read off a difference table of
 * the first `cutoff` samples. Exact; inverse of evaluation on the grid.
 */
inline std::vector<BigRational> mahler_expand(std::vector<BigRational> samples,
                                              int cutoff) {
    if (cutoff < 1 || static_cast<int>(samples.size()) < cutoff)
        throw std::invalid_argument(
            "expansion to cutoff " + std::to_string(cutoff) + " needs " +
            std::to_string(cutoff) + " samples");
    samples.resize(static_cast<std::size_t>(cutoff));
    amicedetail::difference_expand(samples);
    return samples;
}

// Two-variable expansion: samples[x1][x2] on the integer grid, differenced
// per variable. The declared orders are carried as labels only.
inline MahlerCoeffs2D mahler_expand(
    std::uint64_t p, const std::vector<std::vector<BigRational>>& samples,
    int cutoff, BigRational a = BigRational(0), BigRational b = BigRational(0)) {
    MahlerCoeffs2D f = mahler_zero(p, cutoff, std::move(a), std::move(b));
    if (static_cast<int>(samples.size()) < cutoff)
        throw std::invalid_argument("expansion needs a full sample grid");
    std::vector<std::vector<BigRational>> rows;
    rows.reserve(static_cast<std::size_t>(cutoff));
    for (int x1 = 0; x1 < cutoff; ++x1)
        rows.push_back(mahler_expand(samples[static_cast<std::size_t>(x1)], cutoff));
    for (int n2 = 0; n2 < cutoff; ++n2) {
        std::vector<BigRational> col;
        col.reserve(static_cast<std::size_t>(cutoff));
        for (int x1 = 0; x1 < cutoff; ++x1)
            col.push_back(rows[static_cast<std::size_t>(x1)][static_cast<std::size_t>(n2)]);
        amicedetail::difference_expand(col);
        for (int n1 = 0; n1 < cutoff; ++n1)
            f.at(n1, n2) = col[static_cast<std::size_t>(n1)];
    }
    return f;
}

inline BigRational mahler_eval(const std::vector<BigRational>& coeffs,
                               long long x) {
    BigRational acc(0);
    for (std::size_t n = 0; n < coeffs.size(); ++n)
        if (coeffs[n] != 0)
            acc += coeffs[n] * BigRational(binom_int(x, static_cast<int>(n)));
    return acc;
}

inline BigRational mahler_eval(const MahlerCoeffs2D& f, long long x1,
                               long long x2) {
    BigRational acc(0);
    std::vector<BigInt> b2;
    b2.reserve(static_cast<std::size_t>(f.cutoff));
    for (int n = 0; n < f.cutoff; ++n)
        b2.push_back(binom_int(x2, n));
    for (int n1 = 0; n1 < f.cutoff; ++n1) {
        BigInt b1 = binom_int(x1, n1);
        if (b1 == 0)
            continue;
        for (int n2 = 0; n2 < f.cutoff; ++n2)
            if (f.at(n1, n2) != 0)
                acc += f.at(n1, n2) * BigRational(b1 * b2[static_cast<std::size_t>(n2)]);
    }
    return acc;
}

/**
 * Valuation of f in the scaled-basis reading at exponents (a, b): the basis
 * elements p^{[a l(n1)] + [b l(n2)]} binom binom have norm one, so the raw
 * coefficient at (n1, n2) contributes v_p minus the two shifts. A lower
 * bound for the true order-(a,b) norm, exact on anything supported below
 * the cutoff. An all-zero table reports INT_MAX.
 */
inline int order_norm(const MahlerCoeffs2D& f, const BigRational& a,
                      const BigRational& b) {
    amicedetail::check_order(a);
    amicedetail::check_order(b);
    int best = std::numeric_limits<int>::max();
    for (int n1 = 0; n1 < f.cutoff; ++n1) {
        int s1 = amicedetail::scale_shift(a, ell_index(static_cast<std::uint64_t>(n1), f.p));
        for (int n2 = 0; n2 < f.cutoff; ++n2) {
            if (f.at(n1, n2) == 0)
                continue;
            int s2 = amicedetail::scale_shift(b, ell_index(static_cast<std::uint64_t>(n2), f.p));
            int v = valuation_p(f.at(n1, n2), f.p) - s1 - s2;
            if (v < best)
                best = v;
        }
    }
    return best;
}

inline int order_norm(const MahlerCoeffs2D& f) {
    return order_norm(f, f.order1, f.order2);
}

/**
 * Pullback along (x1, x2) -> (x1, s x1 + x2): binom(s x1 + x2, n2) splits by
 * Vandermonde into binom(s x1, n2 - i) binom(x2, i), and the one-variable
 * factors binom(x1, n1) binom(s x1, m) are expanded on the integer grid.
 * Those factors are polynomials vanishing at 0..n1-1, so the output index
 * pair never drops below (n1, i) in either slot; truncation at the cutoff
 * therefore commutes with composition, and the group law in s is exact on
 * truncated tables. All intermediate arithmetic is over the integers.
 */
inline MahlerCoeffs2D shear_pullback(const MahlerCoeffs2D& f, long long s) {
    const int K = f.cutoff;
    std::vector<std::vector<BigInt>> cache(
        static_cast<std::size_t>(K) * static_cast<std::size_t>(K));
    std::vector<char> ready(cache.size(), 0);
    auto gexp = [&](int n1, int m) -> const std::vector<BigInt>& {
        std::size_t key = static_cast<std::size_t>(n1) * static_cast<std::size_t>(K) +
                          static_cast<std::size_t>(m);
        if (!ready[key]) {
            std::vector<BigInt> v;
            v.reserve(static_cast<std::size_t>(K));
            for (long long x = 0; x < K; ++x)
                v.push_back(binom_int(x, n1) * binom_int(s * x, m));
            amicedetail::difference_expand(v);
            cache[key] = std::move(v);
            ready[key] = 1;
        }
        return cache[key];
    };
    MahlerCoeffs2D out = mahler_zero(f.p, K, f.order1, f.order2);
    for (int n1 = 0; n1 < K; ++n1)
        for (int n2 = 0; n2 < K; ++n2) {
            const BigRational& w = f.at(n1, n2);
            if (w == 0)
                continue;
            for (int i = 0; i <= n2; ++i) {
                const std::vector<BigInt>& g = gexp(n1, n2 - i);
                for (int q = n1; q < K; ++q)
                    if (g[static_cast<std::size_t>(q)] != 0)
                        out.at(q, i) += w * BigRational(g[static_cast<std::size_t>(q)]);
            }
        }
    return out;
}

/**
 * A distribution on Z_p^2 as its finite-level shadow: the masses of every
 * cell (a1 + p^{lev1} Z_p) x (a2 + p^{lev2} Z_p) at one fixed bi-level,
 * exact rationals. Coarser cell data is derived by summation, which is the
 * additivity of the distribution made constructive. order1/order2 are the
 * claimed order labels; they are bookkeeping only, and growth_constant
 * measures whether the table actually supports them.
 */
struct CellDistribution2D {
    std::uint64_t p = 3;
    int lev1 = 0, lev2 = 0;
    BigRational order1, order2;
    std::vector<BigRational> mass;

    std::uint64_t mod1() const { return detail::upow_checked(p, lev1); }
    std::uint64_t mod2() const { return detail::upow_checked(p, lev2); }
    const BigRational& at(std::uint64_t a1, std::uint64_t a2) const {
        return mass[static_cast<std::size_t>(a1) * static_cast<std::size_t>(mod2()) +
                    static_cast<std::size_t>(a2)];
    }
    BigRational& at(std::uint64_t a1, std::uint64_t a2) {
        return mass[static_cast<std::size_t>(a1) * static_cast<std::size_t>(mod2()) +
                    static_cast<std::size_t>(a2)];
    }
};

inline CellDistribution2D cell_zero(std::uint64_t p, int lev1, int lev2,
                                    BigRational a = BigRational(0),
                                    BigRational b = BigRational(0)) {
    if (p < 2 || lev1 < 0 || lev2 < 0)
        throw std::invalid_argument("cell table needs p >= 2 and levels >= 0");
    amicedetail::check_order(a);
    amicedetail::check_order(b);
    CellDistribution2D mu;
    mu.p = p;
    mu.lev1 = lev1;
    mu.lev2 = lev2;
    mu.order1 = std::move(a);
    mu.order2 = std::move(b);
    mu.mass.assign(static_cast<std::size_t>(mu.mod1()) *
                       static_cast<std::size_t>(mu.mod2()),
                   BigRational(0));
    return mu;
}

inline CellDistribution2D cell_dirac(std::uint64_t p, int lev1, int lev2,
                                     std::uint64_t a1, std::uint64_t a2) {
    CellDistribution2D mu = cell_zero(p, lev1, lev2);
    mu.at(a1 % mu.mod1(), a2 % mu.mod2()) = BigRational(1);
    return mu;
}

// The product Haar shadow: every cell carries p^{-lev1-lev2}.
inline CellDistribution2D cell_haar(std::uint64_t p, int lev1, int lev2) {
    CellDistribution2D mu = cell_zero(p, lev1, lev2, BigRational(1), BigRational(1));
    BigRational share = BigRational(1) / BigRational(BigInt(mu.mod1()) * BigInt(mu.mod2()));
    for (auto& m : mu.mass)
        m = share;
    return mu;
}

inline BigRational total_mass(const CellDistribution2D& mu) {
    BigRational acc(0);
    for (const auto& m : mu.mass)
        acc += m;
    return acc;
}

// Sum the masses over the fibers of the projection to a coarser bi-level.
inline CellDistribution2D reduce_bilevel(const CellDistribution2D& mu, int m1,
                                         int m2) {
    if (m1 < 0 || m1 > mu.lev1 || m2 < 0 || m2 > mu.lev2)
        throw std::invalid_argument("target bi-level must be below the stored one");
    CellDistribution2D out = cell_zero(mu.p, m1, m2, mu.order1, mu.order2);
    std::uint64_t q1 = out.mod1(), q2 = out.mod2();
    for (std::uint64_t a1 = 0; a1 < mu.mod1(); ++a1)
        for (std::uint64_t a2 = 0; a2 < mu.mod2(); ++a2) {
            const BigRational& m = mu.at(a1, a2);
            if (m != 0)
                out.at(a1 % q1, a2 % q2) += m;
        }
    return out;
}

// Group-algebra product for the additive group (Z/p^{lev1}) x (Z/p^{lev2});
// the claimed order labels add.
inline CellDistribution2D convolve(const CellDistribution2D& x,
                                   const CellDistribution2D& y) {
    if (x.p != y.p || x.lev1 != y.lev1 || x.lev2 != y.lev2)
        throw std::invalid_argument("convolution needs a common bi-level");
    CellDistribution2D out = cell_zero(x.p, x.lev1, x.lev2, x.order1 + y.order1,
                                       x.order2 + y.order2);
    std::uint64_t q1 = x.mod1(), q2 = x.mod2();
    for (std::uint64_t a1 = 0; a1 < q1; ++a1)
        for (std::uint64_t a2 = 0; a2 < q2; ++a2) {
            const BigRational& mx = x.at(a1, a2);
            if (mx == 0)
                continue;
            for (std::uint64_t b1 = 0; b1 < q1; ++b1)
                for (std::uint64_t b2 = 0; b2 < q2; ++b2) {
                    const BigRational& my = y.at(b1, b2);
                    if (my != 0)
                        out.at((a1 + b1) % q1, (a2 + b2) % q2) += mx * my;
                }
        }
    return out;
}

/**
 * Pushforward along a shear of the finite quotient: with move_second the
 * map is (x1, x2) -> (x1, x2 + s x1), which preserves the subgroup
 * 0 x Z_p and hence order (0, h); with move_second false it is
 * (x1, x2) -> (x1 + s x2, x2), the coordinate the (0, h) spaces are NOT
 * stable under. Order labels are carried unchanged, exactly because the
 * interesting question is whether the table still supports them.
 */
inline CellDistribution2D shear_push(const CellDistribution2D& mu, long long s,
                                     bool move_second) {
    CellDistribution2D out =
        cell_zero(mu.p, mu.lev1, mu.lev2, mu.order1, mu.order2);
    std::uint64_t q1 = mu.mod1(), q2 = mu.mod2();
    auto shift = [](std::uint64_t a, long long s_, std::uint64_t b,
                    std::uint64_t q) {
        long long r = static_cast<long long>(a) +
                      s_ * static_cast<long long>(b) % static_cast<long long>(q);
        r %= static_cast<long long>(q);
        if (r < 0)
            r += static_cast<long long>(q);
        return static_cast<std::uint64_t>(r);
    };
    for (std::uint64_t a1 = 0; a1 < q1; ++a1)
        for (std::uint64_t a2 = 0; a2 < q2; ++a2) {
            const BigRational& m = mu.at(a1, a2);
            if (m == 0)
                continue;
            if (move_second)
                out.at(a1, shift(a2, s, a1, q2)) += m;
            else
                out.at(shift(a1, s, a2, q1), a2) += m;
        }
    return out;
}

/**
 * Best constant in the growth condition v_p(scaled moment) >= C - a n1 -
 * b n2, scanned over every derived bi-level, every cell, and moment
 * exponents up to max_k per variable; moments take the canonical residue
 * of each finest cell as its representative point. `bounded` records
 * whether dropping the deepest level in either direction leaves the
 * constant unchanged; a constant that the deepest levels keep lowering is
 * the finite-level signature of an unbounded defect. The single-order
 * Remark condition v_p(mass of a square cell) >= C - n h is scanned
 * alongside at h = a + b for comparison; no relation between the two
 * constants is asserted. An identically zero table reports constant 0.
 */
struct GrowthReport {
    BigRational constant;
    bool bounded = true;
    BigRational single_constant;
    bool single_bounded = true;
};

inline GrowthReport growth_constant(const CellDistribution2D& mu,
                                    const BigRational& a, const BigRational& b,
                                    int max_k) {
    amicedetail::check_order(a);
    amicedetail::check_order(b);
    if (max_k < 0)
        throw std::invalid_argument("moment bound must be >= 0");
    std::optional<BigRational> full, sub1, sub2, sq_full, sq_sub;
    auto fold = [](std::optional<BigRational>& acc, const BigRational& v) {
        if (!acc || v < *acc)
            acc = v;
    };
    std::uint64_t q1 = mu.mod1(), q2 = mu.mod2();
    for (int m1 = 0; m1 <= mu.lev1; ++m1) {
        std::uint64_t pm1 = detail::upow_checked(mu.p, m1);
        for (int m2 = 0; m2 <= mu.lev2; ++m2) {
            std::uint64_t pm2 = detail::upow_checked(mu.p, m2);
            std::vector<BigRational> mom(
                static_cast<std::size_t>(pm1) * static_cast<std::size_t>(pm2));
            for (int k1 = 0; k1 <= max_k; ++k1)
                for (int k2 = 0; k2 <= max_k; ++k2) {
                    for (auto& v : mom)
                        v = 0;
                    for (std::uint64_t b1 = 0; b1 < q1; ++b1)
                        for (std::uint64_t b2 = 0; b2 < q2; ++b2) {
                            const BigRational& m = mu.at(b1, b2);
                            if (m == 0)
                                continue;
                            BigInt w = 1;
                            for (int i = 0; i < k1; ++i)
                                w *= BigInt(b1 / pm1);
                            for (int i = 0; i < k2; ++i)
                                w *= BigInt(b2 / pm2);
                            if (w != 0)
                                mom[static_cast<std::size_t>(b1 % pm1) *
                                        static_cast<std::size_t>(pm2) +
                                    static_cast<std::size_t>(b2 % pm2)] +=
                                    m * BigRational(w);
                        }
                    for (const auto& v : mom) {
                        if (v == 0)
                            continue;
                        BigRational defect = BigRational(valuation_p(v, mu.p)) +
                                             a * m1 + b * m2;
                        fold(full, defect);
                        if (m1 < mu.lev1)
                            fold(sub1, defect);
                        if (m2 < mu.lev2)
                            fold(sub2, defect);
                        if (k1 == 0 && k2 == 0 && m1 == m2) {
                            BigRational sd = BigRational(valuation_p(v, mu.p)) +
                                             (a + b) * m1;
                            fold(sq_full, sd);
                            if (m1 < std::min(mu.lev1, mu.lev2))
                                fold(sq_sub, sd);
                        }
                    }
                }
        }
    }
    GrowthReport r;
    if (!full)
        return r;
    r.constant = *full;
    r.bounded = (mu.lev1 == 0 || (sub1 && *sub1 == *full)) &&
                (mu.lev2 == 0 || (sub2 && *sub2 == *full));
    if (sq_full) {
        r.single_constant = *sq_full;
        r.single_bounded =
            std::min(mu.lev1, mu.lev2) == 0 || (sq_sub && *sq_sub == *sq_full);
    }
    return r;
}

}  // namespace padiclab
