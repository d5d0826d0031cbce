#include "padiclab/scalar.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "padiclab/modarith.hpp"

namespace padiclab {

using detail::addmod;
using detail::inv_unit_mod;
using detail::mulmod;
using detail::submod;
using detail::upow_checked;
using detail::val_p;

int PadicScalar::max_digits(std::uint64_t p) {
    int e = 0;
    std::uint64_t r = 1;
    while (r <= (std::uint64_t(1) << 62) / p) {
        r *= p;
        ++e;
    }
    return e;
}

void PadicScalar::canonicalize() {
    if (residue_ == 0) {
        prec_ -= den_;
        den_ = 0;
        if (prec_ <= 0)
            throw std::domain_error("p-adic precision exhausted");
        return;
    }
    if (den_ > 0) {
        int v = 0;
        while (residue_ % p_ == 0 && v < den_) {
            residue_ /= p_;
            ++v;
        }
        prec_ -= v;
        den_ -= v;
        if (prec_ <= 0)
            throw std::domain_error("p-adic precision exhausted");
    }
}

void PadicScalar::require_same_p(const PadicScalar& o) const {
    if (p_ != o.p_)
        throw std::invalid_argument("mixing scalars of different primes");
}

PadicScalar PadicScalar::from_residue(std::uint64_t p, int prec, std::uint64_t residue) {
    if (prec < 1)
        throw std::invalid_argument("scalar precision must be >= 1");
    std::uint64_t m = upow_checked(p, prec);
    return PadicScalar(p, residue % m, prec, 0);
}

PadicScalar PadicScalar::from_int(std::uint64_t p, int prec, long long v) {
    std::uint64_t m = upow_checked(p, prec);
    if (v >= 0)
        return PadicScalar(p, static_cast<std::uint64_t>(v) % m, prec, 0);
    std::uint64_t a = static_cast<std::uint64_t>(-(v + 1)) + 1;  // |v| without UB at LLONG_MIN
    return PadicScalar(p, submod(0, a % m, m), prec, 0);
}

int PadicScalar::valuation() const {
    if (residue_ == 0)
        return prec_ - den_;
    return val_p(residue_, p_) - den_;
}

PadicScalar PadicScalar::operator+(const PadicScalar& o) const {
    require_same_p(o);
    int d = std::max(den_, o.den_);
    int pa = prec_ + (d - den_);
    int pb = o.prec_ + (d - o.den_);
    int prec = std::min({pa, pb, max_digits(p_)});
    std::uint64_t m = upow_checked(p_, prec);
    std::uint64_t ra = mulmod(residue_ % m, upow_checked(p_, std::min(d - den_, prec)) % m, m);
    std::uint64_t rb = mulmod(o.residue_ % m, upow_checked(p_, std::min(d - o.den_, prec)) % m, m);
    PadicScalar r(p_, addmod(ra, rb, m), prec, d);
    r.canonicalize();
    return r;
}

PadicScalar PadicScalar::operator-() const {
    if (residue_ == 0)
        return *this;
    std::uint64_t m = upow_checked(p_, prec_);
    return PadicScalar(p_, m - residue_, prec_, den_);
}

PadicScalar PadicScalar::operator-(const PadicScalar& o) const { return *this + (-o); }

PadicScalar PadicScalar::operator*(const PadicScalar& o) const {
    require_same_p(o);
    int va = residue_ == 0 ? prec_ : val_p(residue_, p_);
    int vb = o.residue_ == 0 ? o.prec_ : val_p(o.residue_, o.p_);
    // a known mod p^pa with v_p(a) = va: the product is pinned mod
    // p^min(pa+vb, pb+va).
    int prec = std::min({prec_ + vb, o.prec_ + va, max_digits(p_)});
    std::uint64_t m = upow_checked(p_, prec);
    std::uint64_t r =
        static_cast<std::uint64_t>((static_cast<unsigned __int128>(residue_) * o.residue_) % m);
    PadicScalar out(p_, r, prec, den_ + o.den_);
    out.canonicalize();
    return out;
}

PadicScalar PadicScalar::mul_int(long long c) const {
    return *this * from_int(p_, std::min(prec_ + den_ + 2, max_digits(p_)), c);
}

PadicScalar PadicScalar::inv() const {
    if (residue_ == 0)
        throw std::domain_error("inverse of a residue that is zero at this precision");
    int v = val_p(residue_, p_);
    int prec = prec_ - v;
    if (prec <= 0)
        throw std::domain_error("p-adic precision exhausted");
    std::uint64_t m = upow_checked(p_, prec);
    std::uint64_t u = residue_;
    for (int i = 0; i < v; ++i)
        u /= p_;
    std::uint64_t uinv = inv_unit_mod(u % m, p_, prec, m);
    // value = p^(v - den) * u, so inverse = p^(den - v) * u^-1
    if (den_ >= v) {
        int up = den_ - v;
        int prec2 = std::min(prec + up, max_digits(p_));
        std::uint64_t m2 = upow_checked(p_, prec2);
        std::uint64_t r = mulmod(uinv % m2, upow_checked(p_, std::min(up, prec2)) % m2, m2);
        return PadicScalar(p_, r, prec2, 0);
    }
    return PadicScalar(p_, uinv, prec, v - den_);
}

PadicScalar PadicScalar::pow(long long e) const {
    if (e < 0)
        return inv().pow(-e);
    PadicScalar acc = one(p_, prec_);
    PadicScalar base = *this;
    std::uint64_t k = static_cast<std::uint64_t>(e);
    while (k) {
        if (k & 1)
            acc = acc * base;
        if (k >>= 1)
            base = base * base;
    }
    return acc;
}

PadicScalar PadicScalar::div_p_pow(int k) const {
    if (k < 0)
        return mul_p_pow(-k);
    PadicScalar r = *this;
    if (r.residue_ == 0) {
        r.prec_ -= k;
        if (r.prec_ <= 0)
            throw std::domain_error("p-adic precision exhausted");
        return r;
    }
    int v = val_p(r.residue_, p_);
    int s = std::min(v, k);
    for (int i = 0; i < s; ++i)
        r.residue_ /= p_;
    r.prec_ -= s;
    r.den_ += k - s;
    if (r.prec_ <= 0)
        throw std::domain_error("p-adic precision exhausted");
    return r;
}

PadicScalar PadicScalar::mul_p_pow(int k) const {
    if (k < 0)
        return div_p_pow(-k);
    PadicScalar r = *this;
    int fromden = std::min(k, r.den_);
    r.den_ -= fromden;
    k -= fromden;
    if (k > 0) {
        int prec = std::min(r.prec_ + k, max_digits(p_));
        std::uint64_t m = upow_checked(p_, prec);
        r.residue_ = mulmod(r.residue_ % m, upow_checked(p_, std::min(k, prec)) % m, m);
        r.prec_ = prec;
    }
    return r;
}

PadicScalar PadicScalar::with_prec(int t) const {
    if (t > prec_)
        throw std::invalid_argument("cannot raise precision of an existing scalar");
    if (t < 1)
        throw std::invalid_argument("scalar precision must be >= 1");
    PadicScalar r(p_, residue_ % upow_checked(p_, t), t, den_);
    r.canonicalize();
    return r;
}

PadicScalar PadicScalar::teichmuller() const {
    if (den_ > 0)
        throw std::domain_error("teichmuller lift needs an integral scalar");
    if (residue_ % p_ == 0)
        return zero(p_, prec_);
    std::uint64_t m = upow_checked(p_, prec_);
    std::uint64_t y = residue_;
    for (int i = 0; i < prec_; ++i)
        y = detail::powmod(y, p_, m);
    return PadicScalar(p_, y, prec_, 0);
}

int PadicScalar::agree_digits(const PadicScalar& a, const PadicScalar& b) {
    PadicScalar d = a - b;
    if (d.residue_ == 0)
        return d.prec_ - d.den_;
    return val_p(d.residue_, d.p_) - d.den_;
}

bool PadicScalar::same_value(const PadicScalar& o) const {
    PadicScalar d = *this - o;
    return d.residue_ == 0;
}

std::string PadicScalar::to_string() const {
    std::ostringstream out;
    std::uint64_t r = residue_;
    for (int i = 0; i < prec_; ++i) {
        std::uint64_t digit = r % p_;
        r /= p_;
        if (p_ <= 9) {
            out << digit;
        } else {
            if (i)
                out << '.';
            out << digit;
        }
    }
    if (den_ > 0)
        out << "/p^" << den_;
    return out.str();
}

PadicScalar PadicScalar::parse(std::uint64_t p, const std::string& text) {
    std::string digits = text;
    int den = 0;
    auto slash = text.find("/p^");
    if (slash != std::string::npos) {
        digits = text.substr(0, slash);
        den = std::stoi(text.substr(slash + 3));
    }
    std::uint64_t value = 0;
    int prec = 0;
    if (p <= 9) {
        for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
            if (*it < '0' || *it >= static_cast<char>('0' + p))
                throw std::invalid_argument("digit out of range for base p");
            value = value * p + static_cast<std::uint64_t>(*it - '0');
            ++prec;
        }
    } else {
        std::vector<std::uint64_t> ds;
        std::istringstream in(digits);
        std::string piece;
        while (std::getline(in, piece, '.'))
            ds.push_back(std::stoull(piece));
        for (auto it = ds.rbegin(); it != ds.rend(); ++it) {
            if (*it >= p)
                throw std::invalid_argument("digit out of range for base p");
            value = value * p + *it;
            ++prec;
        }
    }
    if (prec == 0)
        throw std::invalid_argument("empty digit string");
    PadicScalar r(p, value, prec, den);
    r.canonicalize();
    return r;
}

PadicScalar iwasawa_log(const PadicScalar& x) {
    if (x.is_zero())
        throw std::domain_error("logarithm of zero");
    std::uint64_t p = x.p();
    // Iwasawa branch: only the unit part contributes.
    PadicScalar u = x;
    if (u.den_exp() > 0 || u.residue() % p == 0) {
        int v = u.valuation();
        u = u.div_p_pow(v);  // exact strip: u is now a unit
    }
    PadicScalar w = u.pow(static_cast<long long>(p - 1)) - PadicScalar::one(p, u.prec());
    PadicScalar acc = PadicScalar::zero(p, u.prec());
    PadicScalar wk = PadicScalar::one(p, u.prec());
    // log(1+w) = sum (-1)^(k+1) w^k / k; v(w) >= 1 makes every term integral
    // with sharp precision, so the loop ends once w^k has no digits left.
    for (int k = 1;; ++k) {
        wk = wk * w;
        if (wk.is_zero() && k > 1)
            break;
        int a = 0;
        long long m = k;
        while (m % static_cast<long long>(p) == 0) {
            m /= static_cast<long long>(p);
            ++a;
        }
        PadicScalar term = wk.div_p_pow(a) * PadicScalar::from_int(p, u.prec(), m).inv();
        acc = (k % 2 == 1) ? acc + term : acc - term;
        if (wk.is_zero())
            break;
    }
    return acc * PadicScalar::from_int(p, u.prec(), static_cast<long long>(p - 1)).inv();
}

}  // namespace padiclab
