#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "padiclab/ring_ops.hpp"
#include "padiclab/scalar.hpp"

namespace padiclab {

/**
 * Element of R[z]/Phi_{p^n}(z), z the class of a primitive p^n-th root of
 * unity, over an arbitrary coefficient ring R (scalars, unramified field
 * elements, or truncated series). Coordinates live in the power basis
 * 1, z, ..., z^(d-1) with d = (p-1)p^(n-1); the representation in that basis
 * is unique, so equality is coordinatewise.
 *
 * Reduction uses z^d = -(1 + z^m + z^(2m) + ... + z^((p-2)m)) * z^(e-d) with
 * m = p^(n-1), swept from the top degree down; every replacement lands
 * strictly below the degree being cleared, so one pass suffices.
 *
 * frobenius() acts on the coefficients only and fixes z. This is the right
 * action for the series-level operators built on top (which track the root
 * of unity separately), and it is documented here because it is NOT the
 * residue-extension Frobenius of the composite field.
 */
template <typename R>
class CyclotomicElem {
  public:
    CyclotomicElem(std::uint64_t p, int level, std::vector<R> coords)
        : p_(p), level_(level), c_(std::move(coords)) {
        if (level_ < 1)
            throw std::invalid_argument("cyclotomic level must be >= 1");
        if (c_.size() != dim(p_, level_))
            throw std::invalid_argument("coordinate count does not match the cyclotomic level");
    }

    static std::size_t dim(std::uint64_t p, int level) {
        std::size_t d = static_cast<std::size_t>(p - 1);
        for (int i = 1; i < level; ++i)
            d *= static_cast<std::size_t>(p);
        return d;
    }

    static CyclotomicElem scalar(std::uint64_t p, int level, const R& v) {
        std::vector<R> c(dim(p, level), ringops::make_zero(v));
        c[0] = v;
        return CyclotomicElem(p, level, std::move(c));
    }

    static CyclotomicElem zero(std::uint64_t p, int level, const R& proto) {
        return scalar(p, level, ringops::make_zero(proto));
    }

    static CyclotomicElem one(std::uint64_t p, int level, const R& proto) {
        return scalar(p, level, ringops::make_one(proto));
    }

    // z^power, any integer exponent (reduced mod p^level)
    static CyclotomicElem zeta(std::uint64_t p, int level, const R& proto, long long power = 1) {
        std::uint64_t pn = 1;
        for (int i = 0; i < level; ++i)
            pn *= p;
        long long r = power % static_cast<long long>(pn);
        if (r < 0)
            r += static_cast<long long>(pn);
        std::size_t d = dim(p, level);
        std::vector<R> buf(static_cast<std::size_t>(pn), ringops::make_zero(proto));
        buf[static_cast<std::size_t>(r)] = ringops::make_one(proto);
        reduce(buf, p, d);
        buf.resize(d, ringops::make_zero(proto));
        return CyclotomicElem(p, level, std::move(buf));
    }

    std::uint64_t p() const { return p_; }
    int level() const { return level_; }
    std::size_t dim() const { return c_.size(); }
    const std::vector<R>& coords() const { return c_; }
    const R& coord(std::size_t i) const { return c_[i]; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (!ringops::vanishes(x))
                return false;
        return true;
    }

    // Pull a z-free element back to the coefficient ring.
    R descend() const {
        for (std::size_t i = 1; i < c_.size(); ++i)
            if (!ringops::vanishes(c_[i]))
                throw std::domain_error("element has a nonzero root-of-unity component");
        return c_[0];
    }

    CyclotomicElem operator+(const CyclotomicElem& o) const {
        require_compatible(o);
        std::vector<R> c(c_);
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = c[i] + o.c_[i];
        return CyclotomicElem(p_, level_, std::move(c));
    }

    CyclotomicElem operator-(const CyclotomicElem& o) const {
        require_compatible(o);
        std::vector<R> c(c_);
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = c[i] - o.c_[i];
        return CyclotomicElem(p_, level_, std::move(c));
    }

    CyclotomicElem operator-() const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = -x;
        return CyclotomicElem(p_, level_, std::move(c));
    }

    CyclotomicElem operator*(const CyclotomicElem& o) const {
        require_compatible(o);
        std::size_t d = c_.size();
        const R proto = ringops::make_zero(c_[0]);
        std::vector<R> buf(2 * d - 1, proto);
        for (std::size_t i = 0; i < d; ++i) {
            if (ringops::vanishes(c_[i]))
                continue;
            for (std::size_t j = 0; j < d; ++j)
                buf[i + j] = buf[i + j] + c_[i] * o.c_[j];
        }
        reduce(buf, p_, d);
        buf.resize(d, proto);
        return CyclotomicElem(p_, level_, std::move(buf));
    }

    CyclotomicElem& operator+=(const CyclotomicElem& o) { return *this = *this + o; }
    CyclotomicElem& operator-=(const CyclotomicElem& o) { return *this = *this - o; }
    CyclotomicElem& operator*=(const CyclotomicElem& o) { return *this = *this * o; }

    CyclotomicElem scale(const R& s) const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = x * s;
        return CyclotomicElem(p_, level_, std::move(c));
    }

    CyclotomicElem mul_int(long long v) const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = ringops::times_int(x, v);
        return CyclotomicElem(p_, level_, std::move(c));
    }

    CyclotomicElem div_p_pow(int k) const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = ringops::shift_down(x, k);
        return CyclotomicElem(p_, level_, std::move(c));
    }

    CyclotomicElem frobenius() const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = ringops::frob(x);
        return CyclotomicElem(p_, level_, std::move(c));
    }

    CyclotomicElem frobenius_inv() const {
        std::vector<R> c(c_);
        for (auto& x : c)
            x = ringops::frob_inv(x);
        return CyclotomicElem(p_, level_, std::move(c));
    }

    CyclotomicElem pow(std::uint64_t e) const {
        CyclotomicElem acc = one(p_, level_, c_[0]);
        CyclotomicElem base = *this;
        while (e) {
            if (e & 1)
                acc = acc * base;
            if (e >>= 1)
                base = base * base;
        }
        return acc;
    }

    bool same_value(const CyclotomicElem& o) const {
        require_compatible(o);
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

  private:
    std::uint64_t p_;
    int level_;
    std::vector<R> c_;

    void require_compatible(const CyclotomicElem& o) const {
        if (p_ != o.p_ || level_ != o.level_)
            throw std::invalid_argument("mixing different cyclotomic rings");
    }

    // Clear buf[e] for e >= d using the minimal relation of z.
    static void reduce(std::vector<R>& buf, std::uint64_t p, std::size_t d) {
        std::size_t m = d / static_cast<std::size_t>(p - 1);  // p^(level-1)
        for (std::size_t e = buf.size(); e-- > d;) {
            if (ringops::vanishes(buf[e]))
                continue;
            R c = buf[e];
            buf[e] = ringops::make_zero(c);
            std::size_t s = e - d;
            for (std::uint64_t i = 0; i + 1 < p; ++i)
                buf[static_cast<std::size_t>(i) * m + s] =
                    buf[static_cast<std::size_t>(i) * m + s] - c;
        }
    }
};

// Generic-ring hooks, mirroring the scalar and unramified ones.
template <typename R>
CyclotomicElem<R> zero_like(const CyclotomicElem<R>& x) {
    return CyclotomicElem<R>::zero(x.p(), x.level(), x.coord(0));
}
template <typename R>
CyclotomicElem<R> one_like(const CyclotomicElem<R>& x) {
    return CyclotomicElem<R>::one(x.p(), x.level(), x.coord(0));
}
template <typename R>
CyclotomicElem<R> frobenius(const CyclotomicElem<R>& x) {
    return x.frobenius();
}
template <typename R>
CyclotomicElem<R> frobenius_inv(const CyclotomicElem<R>& x) {
    return x.frobenius_inv();
}
template <typename R>
bool is_zero(const CyclotomicElem<R>& x) {
    return x.is_zero();
}
template <typename R>
CyclotomicElem<R> mul_int(const CyclotomicElem<R>& x, long long v) {
    return x.mul_int(v);
}
template <typename R>
CyclotomicElem<R> div_p_pow(const CyclotomicElem<R>& x, int k) {
    return x.div_p_pow(k);
}
template <typename R>
bool same_value(const CyclotomicElem<R>& a, const CyclotomicElem<R>& b) {
    return a.same_value(b);
}
template <typename R>
int min_valuation(const CyclotomicElem<R>& x) {
    return x.min_valuation();
}
template <typename R>
CyclotomicElem<R> cap_abs_prec(const CyclotomicElem<R>& x, int a) {
    std::vector<R> c(x.coords());
    for (auto& v : c)
        v = ringops::clamp_abs(v, a);
    return CyclotomicElem<R>(x.p(), x.level(), std::move(c));
}

/**
 * Collapse a buffer of p^level exponent slots (slot e holds the coefficient
 * of zeta^e) into the cyclotomic basis. Summations over many root-of-unity
 * monomials are cheapest accumulated this way: exponent arithmetic is plain
 * modular arithmetic on slot indices, and the basis relation is applied once
 * at the end instead of per term.
 */
template <typename R>
CyclotomicElem<R> from_redundant(std::uint64_t p, int level, std::vector<R> buf) {
    std::size_t d = CyclotomicElem<R>::dim(p, level);
    std::size_t m = d / static_cast<std::size_t>(p - 1);
    if (buf.size() != m * static_cast<std::size_t>(p))
        throw std::invalid_argument("redundant buffer must hold p^level slots");
    for (std::size_t e = buf.size(); e-- > d;) {
        if (ringops::vanishes(buf[e]))
            continue;
        R c = buf[e];
        buf[e] = ringops::make_zero(c);
        std::size_t s = e - d;
        for (std::uint64_t i = 0; i + 1 < p; ++i)
            buf[static_cast<std::size_t>(i) * m + s] =
                buf[static_cast<std::size_t>(i) * m + s] - c;
    }
    buf.resize(d);
    return CyclotomicElem<R>(p, level, std::move(buf));
}

// Embed into a higher level, where zeta_old = zeta_new^{p^(diff)}.
template <typename R>
CyclotomicElem<R> raise_level(const CyclotomicElem<R>& x, int target) {
    if (target < x.level())
        throw std::invalid_argument("raise_level cannot lower the level");
    if (target == x.level())
        return x;
    std::uint64_t step = 1;
    for (int i = x.level(); i < target; ++i)
        step *= x.p();
    std::uint64_t slots = 1;
    for (int i = 0; i < target; ++i)
        slots *= x.p();
    std::size_t dim = CyclotomicElem<R>::dim(x.p(), x.level());
    std::vector<R> buf(static_cast<std::size_t>(slots),
                       ringops::make_zero(x.coord(0)));
    for (std::size_t i = 0; i < dim; ++i)
        buf[i * static_cast<std::size_t>(step)] = x.coord(i);
    return from_redundant(x.p(), target, std::move(buf));
}

}  // namespace padiclab
