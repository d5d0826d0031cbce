#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "padiclab/cyclotomic.hpp"
#include "padiclab/modarith.hpp"
#include "padiclab/ring_ops.hpp"
#include "padiclab/scalar.hpp"

namespace padiclab {

/**
 * Truncated power series in the variable pi (the coordinate with
 * 1 + pi a principal p^infinity-torsion point; same object also serves as
 * the X of branch expansions). nterms() = T means coefficients of
 * pi^0..pi^(T-1) are tracked and the series is known modulo pi^T.
 *
 * Truncation discipline: binary operations produce min(Ta, Tb) terms;
 * composition f(u) with u(0) = 0 is exact in every tracked coefficient;
 * nothing ever pads with fake zeros. Coefficient-level precision loss is the
 * coefficient ring's business (these are sharp-tracking scalars all the way
 * down).
 */
template <typename R>
class PiSeries {
  public:
    PiSeries(std::uint64_t p, std::vector<R> coeffs) : p_(p), c_(std::move(coeffs)) {
        if (c_.empty())
            throw std::invalid_argument("series needs at least one tracked term");
    }

    static PiSeries zero(std::uint64_t p, int terms, const R& proto) {
        return PiSeries(p, std::vector<R>(checked(terms), ringops::make_zero(proto)));
    }

    static PiSeries constant(std::uint64_t p, int terms, const R& value) {
        std::vector<R> c(checked(terms), ringops::make_zero(value));
        c[0] = value;
        return PiSeries(p, std::move(c));
    }

    // (1 + pi)^e by binary exponentiation, exact in all tracked terms.
    static PiSeries one_plus_pi_pow(std::uint64_t p, std::uint64_t e, int terms, const R& proto) {
        PiSeries base = zero(p, terms, proto);
        base.c_[0] = ringops::make_one(proto);
        if (terms > 1)
            base.c_[1] = ringops::make_one(proto);
        PiSeries acc = zero(p, terms, proto);
        acc.c_[0] = ringops::make_one(proto);
        while (e) {
            if (e & 1)
                acc = acc * base;
            if (e >>= 1)
                base = base * base;
        }
        return acc;
    }

    std::uint64_t p() const { return p_; }
    int nterms() const { return static_cast<int>(c_.size()); }
    const std::vector<R>& coeffs() const { return c_; }
    const R& coeff(int i) const { return c_[static_cast<std::size_t>(i)]; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (!ringops::vanishes(x))
                return false;
        return true;
    }

    PiSeries truncated(int terms) const {
        if (terms > nterms())
            throw std::invalid_argument("cannot extend a truncated series");
        return PiSeries(p_, std::vector<R>(c_.begin(), c_.begin() + checked(terms)));
    }

    PiSeries operator+(const PiSeries& o) const {
        require_same_p(o);
        std::size_t n = std::min(c_.size(), o.c_.size());
        std::vector<R> c(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(n));
        for (std::size_t i = 0; i < n; ++i)
            c[i] = c[i] + o.c_[i];
        return PiSeries(p_, std::move(c));
    }

    PiSeries operator-(const PiSeries& o) const {
        require_same_p(o);
        std::size_t n = std::min(c_.size(), o.c_.size());
        std::vector<R> c(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(n));
        for (std::size_t i = 0; i < n; ++i)
            c[i] = c[i] - o.c_[i];
        return PiSeries(p_, std::move(c));
    }

    PiSeries operator-() const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = -x;
        return PiSeries(p_, std::move(c));
    }

    PiSeries operator*(const PiSeries& o) const {
        require_same_p(o);
        std::size_t n = std::min(c_.size(), o.c_.size());
        std::vector<R> r(n, ringops::make_zero(c_[0]));
        for (std::size_t i = 0; i < n; ++i) {
            if (ringops::vanishes(c_[i]))
                continue;
            for (std::size_t j = 0; i + j < n; ++j)
                r[i + j] = r[i + j] + c_[i] * o.c_[j];
        }
        return PiSeries(p_, std::move(r));
    }

    PiSeries& operator+=(const PiSeries& o) { return *this = *this + o; }
    PiSeries& operator-=(const PiSeries& o) { return *this = *this - o; }
    PiSeries& operator*=(const PiSeries& o) { return *this = *this * o; }

    PiSeries scale(const R& s) const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = x * s;
        return PiSeries(p_, std::move(c));
    }

    PiSeries mul_int(long long v) const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = ringops::times_int(x, v);
        return PiSeries(p_, std::move(c));
    }

    PiSeries div_p_pow(int k) const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = ringops::shift_down(x, k);
        return PiSeries(p_, std::move(c));
    }

    // Multiply by pi^k: the new low-order terms are genuinely zero, so the
    // tracked window grows by k.
    PiSeries shift_up_pi(int k) const {
        std::vector<R> c(static_cast<std::size_t>(k), ringops::make_zero(c_[0]));
        c.insert(c.end(), c_.begin(), c_.end());
        return PiSeries(p_, std::move(c));
    }

    // Divide by pi^k; the k low coefficients must vanish identically.
    PiSeries shift_down_pi(int k) const {
        if (k >= nterms())
            throw std::invalid_argument("shift exceeds the tracked terms");
        for (int i = 0; i < k; ++i)
            if (!ringops::vanishes(c_[static_cast<std::size_t>(i)]))
                throw std::domain_error("series is not divisible by pi^k");
        return PiSeries(p_, std::vector<R>(c_.begin() + k, c_.end()));
    }

    PiSeries pow(std::uint64_t e) const {
        PiSeries acc = zero(p_, nterms(), c_[0]);
        acc.c_[0] = ringops::make_one(c_[0]);
        PiSeries base = *this;
        while (e) {
            if (e & 1)
                acc = acc * base;
            if (e >>= 1)
                base = base * base;
        }
        return acc;
    }

    // f(u) for u with vanishing constant term: coefficient j of the result
    // depends only on tracked data, so this is exact.
    PiSeries compose(const PiSeries& u) const {
        require_same_p(u);
        if (!ringops::vanishes(u.coeff(0)))
            throw std::domain_error("composition needs a substitution with u(0) = 0");
        int n = std::min(nterms(), u.nterms());
        PiSeries acc = zero(p_, n, c_[0]);
        PiSeries ut = u.truncated(n);
        for (int m = n - 1; m >= 0; --m) {
            acc = acc * ut;
            acc.c_[0] = acc.c_[0] + c_[static_cast<std::size_t>(m)];
        }
        return acc;
    }

    PiSeries frobenius_coeffs() const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = ringops::frob(x);
        return PiSeries(p_, std::move(c));
    }

    PiSeries frobenius_inv_coeffs() const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = ringops::frob_inv(x);
        return PiSeries(p_, std::move(c));
    }

    // d/dpi, one tracked term fewer.
    PiSeries derivative() const {
        if (nterms() < 2)
            throw std::invalid_argument("series too short to differentiate");
        std::vector<R> c;
        c.reserve(c_.size() - 1);
        for (std::size_t m = 1; m < c_.size(); ++m)
            c.push_back(ringops::times_int(c_[m], static_cast<long long>(m)));
        return PiSeries(p_, std::move(c));
    }

    // the invariant operator (1 + pi) d/dpi: coefficient m is
    // (m+1) c_{m+1} + m c_m
    PiSeries invariant_derivative() const {
        PiSeries d = derivative();
        for (std::size_t m = d.c_.size(); m-- > 1;)
            d.c_[m] = d.c_[m] + ringops::times_int(c_[m], static_cast<long long>(m));
        return d;
    }

    bool same_value(const PiSeries& o) const {
        require_same_p(o);
        if (c_.size() != o.c_.size())
            return false;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!ringops::agree(c_[i], o.c_[i]))
                return false;
        return true;
    }

    int min_valuation() const {
        int m = 1 << 20;
        for (const auto& x : c_)
            m = std::min(m, ringops::val_floor(x));
        return m;
    }

    PiSeries cap_coeff_abs(int i, int a) const {
        std::vector<R> c(c_);
        c[static_cast<std::size_t>(i)] = ringops::clamp_abs(c[static_cast<std::size_t>(i)], a);
        return PiSeries(p_, std::move(c));
    }

  private:
    std::uint64_t p_;
    std::vector<R> c_;

    static std::size_t checked(int terms) {
        if (terms < 1)
            throw std::invalid_argument("series needs at least one tracked term");
        return static_cast<std::size_t>(terms);
    }

    void require_same_p(const PiSeries& o) const {
        if (p_ != o.p_)
            throw std::invalid_argument("mixing series over different primes");
    }
};

// Hooks so series can serve as coefficients of the other ring templates.
template <typename R>
PiSeries<R> zero_like(const PiSeries<R>& x) {
    return PiSeries<R>::zero(x.p(), x.nterms(), x.coeff(0));
}
template <typename R>
PiSeries<R> one_like(const PiSeries<R>& x) {
    return PiSeries<R>::constant(x.p(), x.nterms(), ringops::make_one(x.coeff(0)));
}
template <typename R>
bool is_zero(const PiSeries<R>& x) {
    return x.is_zero();
}
template <typename R>
PiSeries<R> mul_int(const PiSeries<R>& x, long long v) {
    return x.mul_int(v);
}
template <typename R>
PiSeries<R> div_p_pow(const PiSeries<R>& x, int k) {
    return x.div_p_pow(k);
}
template <typename R>
bool same_value(const PiSeries<R>& a, const PiSeries<R>& b) {
    return a.same_value(b);
}
template <typename R>
int min_valuation(const PiSeries<R>& x) {
    return x.min_valuation();
}
template <typename R>
PiSeries<R> frobenius(const PiSeries<R>& x) {
    return x.frobenius_coeffs();
}
template <typename R>
PiSeries<R> frobenius_inv(const PiSeries<R>& x) {
    return x.frobenius_inv_coeffs();
}
template <typename R>
PiSeries<R> cap_abs_prec(const PiSeries<R>& x, int a) {
    PiSeries<R> r = x;
    for (int i = 0; i < x.nterms(); ++i)
        r = r.cap_coeff_abs(i, a);
    return r;
}

/**
 * The semilinear lift phi: pi -> (1+pi)^p - 1, coefficients through the ring
 * Frobenius. Exact in every tracked term.
 */
template <typename R>
PiSeries<R> phi(const PiSeries<R>& f) {
    const R proto = ringops::make_zero(f.coeff(0));
    PiSeries<R> B =
        PiSeries<R>::one_plus_pi_pow(f.p(), f.p(), f.nterms(), proto) -
        PiSeries<R>::constant(f.p(), f.nterms(), ringops::make_one(proto));
    return f.frobenius_coeffs().compose(B);
}

/**
 * Trace-direction inverse: psi with p * psi(phi(f) * g-free part...) -- the
 * operator extracting g_0 from f = sum_{i<p} (1+pi)^i phi(g_i).
 *
 * The solver works on the exactly-determined square system over the first
 * p*Q tracked coefficients, Q = floor(T/p). Writing the system matrix as
 * U + pE with U the block-diagonal part that is unipotent-triangular in the
 * key order (m mod p, m div p), the iteration x <- U^{-1}(b - pE x) gains a
 * digit per round and needs no division anywhere.
 *
 * Truncating the unknowns at Q terms is the one genuinely lossy step in this
 * module: the recovered coefficient q carries a mathematical error of
 * valuation at least E(q) = ceil(p(Q-q)/(p-1)) - 2 (calibrated against exact
 * solves; one digit of margin included), so its reported precision is capped
 * there and trailing coefficients with no certified digits are dropped.
 * Inputs with coefficient denominators shift the certificate down by their
 * minimum valuation. For an input that is exactly a finite product of
 * conjugates of a polynomial the solve is exact, but the generic certificate
 * is what the output advertises.
 */
class PsiSolver {
  public:
    PsiSolver(std::uint64_t p, int q_terms, int prec)
        : p_(p), q_(q_terms), prec_(prec), mod_(detail::upow_checked(p, prec)) {
        if (q_ < 1)
            throw std::invalid_argument("psi needs at least p tracked terms");
        build();
    }

    std::uint64_t p() const { return p_; }
    int q_terms() const { return q_; }
    int prec() const { return prec_; }

    // Certified error valuation of output coefficient q for an integral
    // input; the q-th output is reported with at most this many digits.
    int certificate(int q) const {
        long long num = static_cast<long long>(p_) * (q_ - q);
        long long den = static_cast<long long>(p_) - 1;
        return static_cast<int>((num + den - 1) / den) - 2;
    }

    template <typename R>
    PiSeries<R> apply(const PiSeries<R>& f) const {
        if (f.p() != p_)
            throw std::invalid_argument("solver and series prime differ");
        int n = static_cast<int>(p_) * q_;
        if (f.nterms() < n)
            throw std::invalid_argument("series too short for this solver");
        const R proto = ringops::make_zero(f.coeff(0));
        int shift = std::min(0, f.min_valuation());

        std::vector<R> x(static_cast<std::size_t>(n), proto);
        for (int round = 0; round < prec_; ++round) {
            // y = b - p * E x
            std::vector<R> y;
            y.reserve(static_cast<std::size_t>(n));
            for (int m = 0; m < n; ++m) {
                R acc = proto;
                const auto& Em = E_[static_cast<std::size_t>(m)];
                for (int c = 0; c < n; ++c) {
                    if (Em[static_cast<std::size_t>(c)] == 0 ||
                        ringops::vanishes(x[static_cast<std::size_t>(c)]))
                        continue;
                    acc = acc + ringops::times_int(
                                    x[static_cast<std::size_t>(c)],
                                    static_cast<long long>(Em[static_cast<std::size_t>(c)]));
                }
                y.push_back(f.coeff(m) - ringops::times_int(acc, static_cast<long long>(p_)));
            }
            // x = U^{-1} y: per block q, rows p*q + r from r = p-1 down
            for (int qb = 0; qb < q_; ++qb)
                for (int r = static_cast<int>(p_) - 1; r >= 0; --r) {
                    int m = static_cast<int>(p_) * qb + r;
                    R s = y[static_cast<std::size_t>(m)];
                    for (int r2 = r + 1; r2 < static_cast<int>(p_); ++r2) {
                        int c = static_cast<int>(p_) * qb + r2;
                        std::uint64_t u = U_[static_cast<std::size_t>(m)][static_cast<std::size_t>(r2)];
                        if (u == 0 || ringops::vanishes(x[static_cast<std::size_t>(c)]))
                            continue;
                        s = s - ringops::times_int(x[static_cast<std::size_t>(c)],
                                                   static_cast<long long>(u));
                    }
                    x[static_cast<std::size_t>(m)] = s;
                }
        }

        // keep the certified window of g_0 and undo the coefficient twist
        std::vector<R> out;
        for (int q = 0; q < q_; ++q) {
            int cert = certificate(q) + shift;
            if (cert < 1)
                break;
            out.push_back(ringops::clamp_abs(
                ringops::frob_inv(x[static_cast<std::size_t>(static_cast<int>(p_) * q)]), cert));
        }
        if (out.empty())
            throw std::domain_error("no output coefficient has certified digits");
        return PiSeries<R>(p_, std::move(out));
    }

  private:
    std::uint64_t p_;
    int q_;
    int prec_;
    std::uint64_t mod_;
    // U stored per row as the p entries of its block row (columns r2 >= row's r);
    // E dense.
    std::vector<std::vector<std::uint64_t>> U_;
    std::vector<std::vector<std::uint64_t>> E_;

    void build() {
        int n = static_cast<int>(p_) * q_;
        std::size_t ns = static_cast<std::size_t>(n);
        // columns: coefficient vectors of (1+pi)^r * B^q, B = (1+pi)^p - 1
        std::vector<std::vector<std::uint64_t>> A(ns, std::vector<std::uint64_t>(ns, 0));
        std::vector<std::uint64_t> Bq(ns, 0), B(ns, 0);
        Bq[0] = 1;
        for (std::uint64_t k = 1; k <= p_ && k < static_cast<std::uint64_t>(n); ++k) {
            // binomial(p, k) mod p^prec via exact 128-bit products (p <= 7)
            unsigned __int128 b = 1;
            for (std::uint64_t i = 0; i < k; ++i)
                b = b * (p_ - i) / (i + 1);
            B[static_cast<std::size_t>(k)] = static_cast<std::uint64_t>(b % mod_);
        }
        for (int qb = 0; qb < q_; ++qb) {
            std::vector<std::uint64_t> col = Bq;
            for (int r = 0; r < static_cast<int>(p_); ++r) {
                int ci = static_cast<int>(p_) * qb + r;
                for (int m = 0; m < n; ++m)
                    A[static_cast<std::size_t>(m)][static_cast<std::size_t>(ci)] =
                        col[static_cast<std::size_t>(m)];
                // multiply by (1+pi)
                for (int m = n - 1; m >= 1; --m)
                    col[static_cast<std::size_t>(m)] = detail::addmod(
                        col[static_cast<std::size_t>(m)], col[static_cast<std::size_t>(m - 1)],
                        mod_);
            }
            // Bq *= B
            std::vector<std::uint64_t> nb(ns, 0);
            for (int i = 0; i < n; ++i) {
                if (Bq[static_cast<std::size_t>(i)] == 0)
                    continue;
                for (int j = 0; i + j < n; ++j)
                    nb[static_cast<std::size_t>(i + j)] = detail::addmod(
                        nb[static_cast<std::size_t>(i + j)],
                        detail::mulmod(Bq[static_cast<std::size_t>(i)],
                                       B[static_cast<std::size_t>(j)], mod_),
                        mod_);
            }
            Bq = std::move(nb);
        }
        U_.assign(ns, std::vector<std::uint64_t>(static_cast<std::size_t>(p_), 0));
        E_.assign(ns, std::vector<std::uint64_t>(ns, 0));
        for (int m = 0; m < n; ++m) {
            int qm = m / static_cast<int>(p_);
            int jm = m % static_cast<int>(p_);
            for (int c = 0; c < n; ++c) {
                std::uint64_t a = A[static_cast<std::size_t>(m)][static_cast<std::size_t>(c)];
                int qc = c / static_cast<int>(p_);
                int rc = c % static_cast<int>(p_);
                if (qc == qm && jm <= rc) {
                    U_[static_cast<std::size_t>(m)][static_cast<std::size_t>(rc)] = a;
                } else {
                    if (a % p_ != 0)
                        throw std::logic_error("norm-solve matrix lost its p-divisibility");
                    E_[static_cast<std::size_t>(m)][static_cast<std::size_t>(c)] = a / p_;
                }
            }
            if (U_[static_cast<std::size_t>(m)][static_cast<std::size_t>(jm)] != 1)
                throw std::logic_error("norm-solve matrix lost its unit diagonal");
        }
    }
};

/**
 * psi(f): trace-direction companion of phi, left inverse up to the
 * truncation certificate (see PsiSolver). prec is the coefficient working
 * precision (iteration count of the division-free solve).
 */
template <typename R>
PiSeries<R> psi(const PiSeries<R>& f, int prec) {
    PsiSolver solver(f.p(), f.nterms() / static_cast<int>(f.p()), prec);
    return solver.apply(f);
}

// Input length needed so psi reports q_full coefficients at >= prec digits.
inline int psi_input_terms(std::uint64_t p, int prec, int q_full) {
    long long extra =
        ((static_cast<long long>(prec) + 2) * (static_cast<long long>(p) - 1) +
         static_cast<long long>(p) - 1) /
        static_cast<long long>(p);
    return static_cast<int>(static_cast<long long>(p) * (q_full + extra));
}

/**
 * The wild-inertia action pi -> (1+pi)^c - 1. The exponent matters modulo
 * p^(prec + ceil(log_p terms)); gamma_exponent_modulus gives that modulus so
 * callers can reduce a unit once and reuse it.
 */
template <typename R>
PiSeries<R> gamma_act(const PiSeries<R>& f, std::uint64_t c) {
    if (c % f.p() == 0)
        throw std::domain_error("gamma exponent must be a unit");
    const R proto = ringops::make_zero(f.coeff(0));
    PiSeries<R> u =
        PiSeries<R>::one_plus_pi_pow(f.p(), c, f.nterms(), proto) -
        PiSeries<R>::constant(f.p(), f.nterms(), ringops::make_one(proto));
    return f.compose(u);
}

inline std::uint64_t gamma_exponent_modulus(std::uint64_t p, int terms, int prec) {
    int extra = 0;
    std::uint64_t pw = 1;
    while (pw < static_cast<std::uint64_t>(terms)) {
        pw *= p;
        ++extra;
    }
    return detail::upow_checked(p, prec + extra);
}

// log(1 + pi) with its honest denominators (coefficient k carries 1/k).
inline PiSeries<PadicScalar> t_series(std::uint64_t p, int terms, int prec) {
    std::vector<PadicScalar> c;
    c.push_back(PadicScalar::zero(p, prec));
    for (int k = 1; k < terms; ++k) {
        PadicScalar v = PadicScalar::from_int(p, prec, k).inv();
        if (k % 2 == 0)
            v = -v;
        c.push_back(v);
    }
    return PiSeries<PadicScalar>(p, std::move(c));
}

/**
 * log of a series with unit constant term: iwasawa_log of the scalar part
 * plus the finite expansion of log(1 + h), h = f/f(0) - 1.
 */
inline PiSeries<PadicScalar> log_unit_series(const PiSeries<PadicScalar>& f) {
    const PadicScalar u0 = f.coeff(0);
    if (u0.valuation() != 0)
        throw std::domain_error("series logarithm needs a unit constant term");
    int T = f.nterms();
    PiSeries<PadicScalar> h = f.scale(u0.inv()) -
                              PiSeries<PadicScalar>::constant(f.p(), T, PadicScalar::one(f.p(), u0.prec()));
    // h(0) = 0 exactly by construction, so h^k starts at pi^k and the term
    // h^k / k touches nothing below coefficient k; accumulating only from
    // there keeps the denominator of 1/k away from the early coefficients.
    std::vector<PadicScalar> out;
    out.reserve(static_cast<std::size_t>(T));
    out.push_back(iwasawa_log(u0));
    for (int m = 1; m < T; ++m)
        out.push_back(PadicScalar::zero(f.p(), u0.prec()));
    PiSeries<PadicScalar> hk = h;
    for (int k = 1; k < T; ++k) {
        PadicScalar inv_k = PadicScalar::from_int(f.p(), u0.prec(), k % 2 ? k : -k).inv();
        for (int m = k; m < T; ++m) {
            const PadicScalar& c = hk.coeff(m);
            if (!c.is_zero())
                out[static_cast<std::size_t>(m)] += c * inv_k;
        }
        if (k + 1 < T)
            hk *= h;
    }
    return PiSeries<PadicScalar>(f.p(), std::move(out));
}

/**
 * Horner evaluation of the tracked polynomial part at a point of another
 * ring; `lift` embeds coefficients. The caller owns the tail estimate.
 */
template <typename S, typename R, typename LiftFn>
S eval_poly(const PiSeries<R>& f, const S& x, LiftFn lift) {
    S acc = ringops::make_zero(x);
    for (int m = f.nterms() - 1; m >= 0; --m)
        acc = acc * x + lift(f.coeff(m));
    return acc;
}

/**
 * The norm-compatibility defect sum over the p-torsion points,
 * sum_{zeta^p = 1} f(zeta(1+pi) - 1), assembled in the level-one cyclotomic
 * extension of the coefficient ring. It vanishes exactly when psi(f) = 0;
 * on truncated input coefficient j of the result is only meaningful to
 * floor((T-j)/(p-1)) digits (plus the input's minimum valuation if
 * negative), which is what psi_vanishes checks against.
 */
template <typename R>
PiSeries<CyclotomicElem<R>> psi_defect_sum(const PiSeries<R>& f) {
    using S = CyclotomicElem<R>;
    const std::uint64_t p = f.p();
    const R proto = ringops::make_zero(f.coeff(0));
    const S sproto = S::zero(p, 1, proto);
    int T = f.nterms();
    PiSeries<S> total = PiSeries<S>::zero(p, T, sproto);
    for (std::uint64_t j = 0; j < p; ++j) {
        S zj = S::zeta(p, 1, proto, static_cast<long long>(j));
        // argument zeta^j (1+pi) - 1 as a two-term series over S
        PiSeries<S> term = PiSeries<S>::constant(p, T, zj - S::one(p, 1, proto));
        term = term + PiSeries<S>::constant(p, T, zj).shift_up_pi(1).truncated(T);
        PiSeries<S> acc = PiSeries<S>::zero(p, T, sproto);
        for (int m = T - 1; m >= 0; --m) {
            acc = acc * term;
            acc = acc + PiSeries<S>::constant(p, T, S::scalar(p, 1, f.coeff(m)));
        }
        total += acc;
    }
    return total;
}

template <typename R>
bool psi_vanishes(const PiSeries<R>& f, int digits) {
    PiSeries<CyclotomicElem<R>> s = psi_defect_sum(f);
    int T = f.nterms();
    int shift = std::min(0, f.min_valuation());
    for (int j = 0; j < s.nterms(); ++j) {
        int certified = (T - j) / (static_cast<int>(f.p()) - 1) + shift;
        int need = std::min(digits, certified);
        if (need <= 0)
            continue;
        if (ringops::val_floor(s.coeff(j)) < need)
            return false;
    }
    return true;
}

}  // namespace padiclab
