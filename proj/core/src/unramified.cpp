#include "padiclab/unramified.hpp"

#include <algorithm>
#include <sstream>

#include "padiclab/modarith.hpp"

namespace padiclab {

using detail::inv_unit_mod;
using detail::mulmod;
using detail::submod;
using detail::upow_checked;

namespace {

// --- F_p[x] helpers on u64 coefficient vectors (index = degree) ---

using Poly = std::vector<std::uint64_t>;

int pdeg(const Poly& a) {
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
        if (a[static_cast<std::size_t>(i)] != 0)
            return i;
    return -1;
}

Poly ptrim(Poly a) {
    a.resize(static_cast<std::size_t>(pdeg(a) + 1));
    return a;
}

// a mod m over F_p, m monic-ish (leading coefficient inverted on the fly)
Poly pmod(Poly a, const Poly& m, std::uint64_t p) {
    int dm = pdeg(m);
    std::uint64_t lead_inv = detail::powmod(m[static_cast<std::size_t>(dm)], p - 2, p);
    for (int i = pdeg(a); i >= dm; --i) {
        std::uint64_t c = a[static_cast<std::size_t>(i)];
        if (c == 0)
            continue;
        std::uint64_t q = mulmod(c, lead_inv, p);
        for (int j = 0; j <= dm; ++j) {
            auto& t = a[static_cast<std::size_t>(i - dm + j)];
            t = submod(t, mulmod(q, m[static_cast<std::size_t>(j)], p), p);
        }
    }
    a.resize(static_cast<std::size_t>(std::max(dm, 1)));
    return a;
}

Poly pmulmod(const Poly& a, const Poly& b, const Poly& m, std::uint64_t p) {
    Poly r(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0)
            continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = detail::addmod(r[i + j], mulmod(a[i], b[j], p), p);
    }
    return pmod(std::move(r), m, p);
}

Poly ppowmod(Poly base, std::uint64_t e, const Poly& m, std::uint64_t p) {
    Poly r{1};
    r.resize(base.size(), 0);
    base = pmod(std::move(base), m, p);
    while (e) {
        if (e & 1)
            r = pmulmod(r, base, m, p);
        base = pmulmod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

Poly pgcd(Poly a, Poly b, std::uint64_t p) {
    a = ptrim(std::move(a));
    b = ptrim(std::move(b));
    while (pdeg(b) >= 0) {
        Poly r = pmod(a, b, p);
        a = std::move(b);
        b = ptrim(std::move(r));
    }
    // monic normalization
    int d = pdeg(a);
    if (d >= 0) {
        std::uint64_t li = detail::powmod(a[static_cast<std::size_t>(d)], p - 2, p);
        for (auto& c : a)
            c = mulmod(c, li, p);
    }
    return a;
}

Poly pderiv(const Poly& a, std::uint64_t p) {
    Poly r(a.size() > 1 ? a.size() - 1 : 1, 0);
    for (std::size_t i = 1; i < a.size(); ++i)
        r[i - 1] = mulmod(a[i], i % p, p);
    return r;
}

std::string poly_to_string(const Poly& a) {
    std::ostringstream out;
    bool first = true;
    for (int i = pdeg(a); i >= 0; --i) {
        std::uint64_t c = a[static_cast<std::size_t>(i)];
        if (c == 0)
            continue;
        if (!first)
            out << " + ";
        first = false;
        if (i == 0 || c != 1)
            out << c;
        if (i >= 1)
            out << "y";
        if (i >= 2)
            out << "^" << i;
    }
    if (first)
        out << "0";
    return out.str();
}

bool pdivides(const Poly& d, const Poly& m, std::uint64_t p) {
    Poly r = pmod(m, d, p);
    return pdeg(r) < 0;
}

// Smallest monic divisor of degree in [1, maxd], by lexicographic scan.
Poly smallest_divisor(const Poly& m, std::uint64_t p, int maxd) {
    for (int d = 1; d <= maxd; ++d) {
        std::uint64_t count = 1;
        for (int i = 0; i < d; ++i)
            count *= p;
        for (std::uint64_t n = 0; n < count; ++n) {
            Poly cand(static_cast<std::size_t>(d) + 1, 0);
            cand[static_cast<std::size_t>(d)] = 1;
            std::uint64_t t = n;
            for (int i = d - 1; i >= 0; --i) {
                cand[static_cast<std::size_t>(d - 1 - i)] = t % p;
                t /= p;
            }
            if (pdivides(cand, m, p))
                return cand;
        }
    }
    return {};
}

// Returns an empty poly when irreducible, otherwise a nontrivial factor.
Poly find_factor(const Poly& m, std::uint64_t p) {
    int f = pdeg(m);
    if (f <= 0)
        return Poly{0};
    if (f == 1)
        return {};
    Poly dm = pderiv(m, p);
    if (pdeg(dm) < 0) {
        // vanishing derivative means m(x) = h(x)^p over F_p
        Poly h(static_cast<std::size_t>(f / static_cast<int>(p)) + 1, 0);
        for (std::size_t i = 0; i < h.size(); ++i)
            h[i] = m[i * static_cast<std::size_t>(p)];
        return h;
    }
    Poly g = pgcd(m, dm, p);
    if (pdeg(g) > 0)
        return g;  // repeated factor; deg < f since deg dm < f
    // m squarefree: gcd with x^(p^d) - x collects the factors of degree
    // dividing d. A reducible m has a factor of degree < f, so the scan
    // below always hits something.
    Poly t{0, 1};
    for (int d = 1; d < f; ++d) {
        t = ppowmod(t, p, m, p);
        Poly diff = t;
        if (diff.size() < 2)
            diff.resize(2, 0);
        diff[1] = submod(diff[1], 1, p);
        Poly h = pgcd(m, diff, p);
        int dh = pdeg(h);
        if (dh <= 0)
            continue;
        if (dh < f)
            return h;
        // every factor divides degree d < f: reducible, dig out a witness
        return smallest_divisor(m, p, d);
    }
    return {};
}

bool generates_multiplicative_group(const Poly& m, std::uint64_t p) {
    int f = pdeg(m);
    std::uint64_t q = 1;
    for (int i = 0; i < f; ++i)
        q *= p;
    std::uint64_t order = q - 1;
    Poly x{0, 1};
    if (f == 1)
        x = pmod(Poly{0, 1}, m, p);
    // x must be a unit: nonzero constant term (f >= 2) or nonzero root (f == 1)
    if (pdeg(pgcd(x, m, p)) > 0)
        return false;
    std::uint64_t n = order;
    std::vector<std::uint64_t> primes;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) {
            primes.push_back(d);
            while (n % d == 0)
                n /= d;
        }
    if (n > 1)
        primes.push_back(n);
    for (std::uint64_t qq : primes) {
        Poly t = ppowmod(x, order / qq, m, p);
        if (pdeg(t) == 0 && t[0] == 1)
            return false;
    }
    return true;
}

}  // namespace

// --- UnramifiedField ---

UnramifiedField::Ptr UnramifiedField::make(std::uint64_t p, int prec, int degree) {
    if (degree < 1)
        throw std::invalid_argument("field degree must be >= 1");
    PrecisionProfile check(p, prec);  // validates p and the storage budget
    (void)check;
    std::uint64_t count = 1;
    for (int i = 0; i < degree; ++i)
        count *= p;
    for (std::uint64_t n = 0; n < count; ++n) {
        // lexicographic on (c_0, ..., c_{f-1}): c_{f-1} varies fastest
        Poly cand(static_cast<std::size_t>(degree) + 1, 0);
        cand[static_cast<std::size_t>(degree)] = 1;
        std::uint64_t t = n;
        for (int i = degree - 1; i >= 0; --i) {
            cand[static_cast<std::size_t>(i)] = t % p;
            t /= p;
        }
        if (!find_factor(cand, p).empty())
            continue;
        if (!generates_multiplicative_group(cand, p))
            continue;
        return make_with_poly(p, prec, cand);
    }
    throw std::logic_error("no primitive irreducible polynomial found");
}

UnramifiedField::Ptr UnramifiedField::make_with_poly(std::uint64_t p, int prec,
                                                     std::vector<std::uint64_t> poly) {
    PrecisionProfile check(p, prec);
    (void)check;
    if (poly.size() < 2)
        throw std::invalid_argument("defining polynomial must have degree >= 1");
    for (auto& c : poly)
        c %= p;
    if (poly.back() != 1)
        throw std::invalid_argument("defining polynomial must be monic");
    Poly factor = find_factor(poly, p);
    if (!factor.empty())
        throw std::invalid_argument("seed polynomial is reducible; factor: " +
                                    poly_to_string(factor));
    auto K = std::shared_ptr<UnramifiedField>(new UnramifiedField());
    K->p_ = p;
    K->prec_ = prec;
    K->f_ = static_cast<int>(poly.size()) - 1;
    K->mod_ = upow_checked(p, prec);
    K->poly_ = std::move(poly);
    K->build_frobenius();
    return K;
}

std::string UnramifiedField::poly_string() const { return poly_to_string(poly_); }

UnramifiedElem UnramifiedField::zero() const {
    std::vector<PadicScalar> c(static_cast<std::size_t>(f_), PadicScalar::zero(p_, prec_));
    return UnramifiedElem(shared_from_this(), std::move(c));
}

UnramifiedElem UnramifiedField::one() const { return from_int(1); }

UnramifiedElem UnramifiedField::gen() const {
    if (f_ == 1) {
        // the class of y is the root -c_0 of the linear polynomial
        std::vector<PadicScalar> c{PadicScalar::from_int(p_, prec_, 0) -
                                   PadicScalar::from_residue(p_, prec_, poly_[0])};
        return UnramifiedElem(shared_from_this(), std::move(c));
    }
    std::vector<PadicScalar> c(static_cast<std::size_t>(f_), PadicScalar::zero(p_, prec_));
    c[1] = PadicScalar::one(p_, prec_);
    return UnramifiedElem(shared_from_this(), std::move(c));
}

UnramifiedElem UnramifiedField::from_scalar(const PadicScalar& v) const {
    if (v.p() != p_)
        throw std::invalid_argument("scalar prime does not match the field");
    std::vector<PadicScalar> c(static_cast<std::size_t>(f_), PadicScalar::zero(p_, prec_));
    c[0] = v;
    return UnramifiedElem(shared_from_this(), std::move(c));
}

UnramifiedElem UnramifiedField::from_int(long long v) const {
    return from_scalar(PadicScalar::from_int(p_, prec_, v));
}

UnramifiedElem UnramifiedField::element(std::vector<PadicScalar> coords) const {
    if (static_cast<int>(coords.size()) != f_)
        throw std::invalid_argument("coordinate count does not match the field degree");
    return UnramifiedElem(shared_from_this(), std::move(coords));
}

UnramifiedElem UnramifiedField::residue_rep(std::uint64_t k) const {
    std::vector<PadicScalar> c;
    c.reserve(static_cast<std::size_t>(f_));
    for (int i = 0; i < f_; ++i) {
        c.push_back(PadicScalar::from_residue(p_, prec_, k % p_));
        k /= p_;
    }
    return UnramifiedElem(shared_from_this(), std::move(c));
}

void UnramifiedField::build_frobenius() {
    // Newton iteration for the root of the defining polynomial congruent to
    // y^p: z <- z - P(z)/P'(z). All arithmetic happens in the ring itself.
    UnramifiedElem y = gen();
    UnramifiedElem z = y.pow(p_);
    auto P = [&](const UnramifiedElem& at) {
        UnramifiedElem acc = from_int(1);  // monic leading coefficient
        for (int i = f_ - 1; i >= 0; --i)
            acc = acc * at + from_scalar(PadicScalar::from_residue(p_, prec_, poly_[static_cast<std::size_t>(i)]));
        return acc;
    };
    auto dP = [&](const UnramifiedElem& at) {
        UnramifiedElem acc = from_int(f_);
        for (int i = f_ - 1; i >= 1; --i)
            acc = acc * at +
                  from_scalar(PadicScalar::from_residue(p_, prec_, poly_[static_cast<std::size_t>(i)]))
                      .mul_int(i);
        return acc;
    };
    for (int it = 0; it < prec_ + 2; ++it) {
        UnramifiedElem num = P(z);
        if (num.is_zero())
            break;
        z = z - num * dP(z).inv();
    }
    if (!P(z).is_zero())
        throw std::logic_error("frobenius root did not converge");

    frob_.assign(static_cast<std::size_t>(f_),
                 std::vector<std::uint64_t>(static_cast<std::size_t>(f_), 0));
    UnramifiedElem zp = from_int(1);
    for (int j = 0; j < f_; ++j) {
        for (int i = 0; i < f_; ++i)
            frob_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = zp.coord(i).residue();
        if (j + 1 < f_)
            zp = zp * z;
    }
    // inverse = (f-1)-th power of the matrix
    auto matmul = [&](const std::vector<std::vector<std::uint64_t>>& A,
                      const std::vector<std::vector<std::uint64_t>>& B) {
        std::vector<std::vector<std::uint64_t>> C(
            static_cast<std::size_t>(f_), std::vector<std::uint64_t>(static_cast<std::size_t>(f_), 0));
        for (int i = 0; i < f_; ++i)
            for (int k = 0; k < f_; ++k) {
                std::uint64_t a = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                if (!a)
                    continue;
                for (int j = 0; j < f_; ++j)
                    C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = detail::addmod(
                        C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                        mulmod(a, B[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)], mod_),
                        mod_);
            }
        return C;
    };
    std::vector<std::vector<std::uint64_t>> id(
        static_cast<std::size_t>(f_), std::vector<std::uint64_t>(static_cast<std::size_t>(f_), 0));
    for (int i = 0; i < f_; ++i)
        id[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    frob_inv_ = id;
    for (int i = 0; i < f_ - 1; ++i)
        frob_inv_ = matmul(frob_inv_, frob_);
}

// --- UnramifiedElem ---

UnramifiedElem::UnramifiedElem(UnramifiedField::Ptr K, std::vector<PadicScalar> c)
    : K_(std::move(K)), c_(std::move(c)) {
    if (static_cast<int>(c_.size()) != K_->degree())
        throw std::invalid_argument("coordinate count does not match the field degree");
}

void UnramifiedElem::require_same_field(const UnramifiedElem& o) const {
    if (K_ != o.K_)
        throw std::invalid_argument("mixing elements of different field instances");
}

bool UnramifiedElem::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const PadicScalar& x) { return x.is_zero(); });
}

bool UnramifiedElem::is_scalar() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (!c_[i].is_zero())
            return false;
    return true;
}

PadicScalar UnramifiedElem::as_scalar() const {
    if (!is_scalar())
        throw std::domain_error("element does not lie in the base field");
    return c_[0];
}

UnramifiedElem UnramifiedElem::operator+(const UnramifiedElem& o) const {
    require_same_field(o);
    std::vector<PadicScalar> c(c_);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] += o.c_[i];
    return UnramifiedElem(K_, std::move(c));
}

UnramifiedElem UnramifiedElem::operator-(const UnramifiedElem& o) const {
    require_same_field(o);
    std::vector<PadicScalar> c(c_);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] -= o.c_[i];
    return UnramifiedElem(K_, std::move(c));
}

UnramifiedElem UnramifiedElem::operator-() const {
    std::vector<PadicScalar> c(c_);
    for (auto& x : c)
        x = -x;
    return UnramifiedElem(K_, std::move(c));
}

UnramifiedElem UnramifiedElem::operator*(const UnramifiedElem& o) const {
    require_same_field(o);
    int f = K_->degree();
    std::vector<PadicScalar> prod(static_cast<std::size_t>(2 * f - 1),
                                  PadicScalar::zero(K_->p(), K_->prec()));
    for (int i = 0; i < f; ++i) {
        if (c_[static_cast<std::size_t>(i)].is_zero())
            continue;
        for (int j = 0; j < f; ++j)
            prod[static_cast<std::size_t>(i + j)] +=
                c_[static_cast<std::size_t>(i)] * o.c_[static_cast<std::size_t>(j)];
    }
    // reduce x^(f+k) with the monic defining polynomial
    for (int e = 2 * f - 2; e >= f; --e) {
        PadicScalar c = prod[static_cast<std::size_t>(e)];
        if (c.is_zero())
            continue;
        for (int j = 0; j < f; ++j) {
            std::uint64_t pc = K_->poly_[static_cast<std::size_t>(j)];
            if (pc == 0)
                continue;
            prod[static_cast<std::size_t>(e - f + j)] -=
                c * PadicScalar::from_residue(K_->p(), K_->prec(), pc);
        }
    }
    prod.resize(static_cast<std::size_t>(f), PadicScalar::zero(K_->p(), K_->prec()));
    return UnramifiedElem(K_, std::move(prod));
}

UnramifiedElem UnramifiedElem::scale(const PadicScalar& s) const {
    std::vector<PadicScalar> c(c_);
    for (auto& x : c)
        x *= s;
    return UnramifiedElem(K_, std::move(c));
}

UnramifiedElem UnramifiedElem::mul_int(long long v) const {
    std::vector<PadicScalar> c(c_);
    for (auto& x : c)
        x = x.mul_int(v);
    return UnramifiedElem(K_, std::move(c));
}

UnramifiedElem UnramifiedElem::div_p_pow(int k) const {
    std::vector<PadicScalar> c(c_);
    for (auto& x : c)
        x = x.div_p_pow(k);
    return UnramifiedElem(K_, std::move(c));
}

UnramifiedElem UnramifiedElem::mul_p_pow(int k) const {
    std::vector<PadicScalar> c(c_);
    for (auto& x : c)
        x = x.mul_p_pow(k);
    return UnramifiedElem(K_, std::move(c));
}

UnramifiedElem UnramifiedElem::inv() const {
    // residue-field inverse, then Newton: z <- z(2 - xz)
    std::uint64_t p = K_->p();
    Poly xr(c_.size(), 0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].den_exp() > 0)
            throw std::domain_error("inverse needs an integral unit");
        xr[i] = c_[i].residue() % p;
    }
    Poly m(K_->poly_);
    for (auto& c : m)
        c %= p;
    // unit check: gcd with the defining polynomial must be trivial
    if (pdeg(xr) < 0)
        throw std::domain_error(is_zero() ? "inverse of zero" : "inverse of a non-unit element");
    Poly g = pgcd(xr, m, p);
    if (pdeg(g) != 0)
        throw std::domain_error("inverse of a non-unit element");
    // inverse mod p by Fermat in the residue field
    std::uint64_t q = 1;
    for (int i = 0; i < K_->degree(); ++i)
        q *= p;
    Poly z0 = ppowmod(xr, q - 2, m, p);
    std::vector<PadicScalar> zc(static_cast<std::size_t>(K_->degree()),
                                PadicScalar::zero(p, K_->prec()));
    for (std::size_t i = 0; i < z0.size() && i < zc.size(); ++i)
        zc[i] = PadicScalar::from_residue(p, K_->prec(), z0[i]);
    UnramifiedElem z(K_, std::move(zc));
    UnramifiedElem two = K_->from_int(2);
    int good = 1;
    while (good < K_->prec()) {
        z = z * (two - *this * z);
        good *= 2;
    }
    return z;
}

UnramifiedElem UnramifiedElem::pow(std::uint64_t e) const {
    UnramifiedElem acc = K_->one();
    UnramifiedElem base = *this;
    while (e) {
        if (e & 1)
            acc = acc * base;
        if (e >>= 1)
            base = base * base;
    }
    return acc;
}

UnramifiedElem UnramifiedElem::frobenius() const {
    int f = K_->degree();
    std::vector<PadicScalar> r(static_cast<std::size_t>(f), PadicScalar::zero(K_->p(), K_->prec()));
    for (int i = 0; i < f; ++i) {
        for (int j = 0; j < f; ++j) {
            std::uint64_t a = K_->frob_matrix()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (a == 0)
                continue;
            r[static_cast<std::size_t>(i)] +=
                c_[static_cast<std::size_t>(j)] * PadicScalar::from_residue(K_->p(), K_->prec(), a);
        }
    }
    return UnramifiedElem(K_, std::move(r));
}

UnramifiedElem UnramifiedElem::frobenius_inv() const {
    int f = K_->degree();
    std::vector<PadicScalar> r(static_cast<std::size_t>(f), PadicScalar::zero(K_->p(), K_->prec()));
    for (int i = 0; i < f; ++i) {
        for (int j = 0; j < f; ++j) {
            std::uint64_t a =
                K_->frob_inv_matrix()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (a == 0)
                continue;
            r[static_cast<std::size_t>(i)] +=
                c_[static_cast<std::size_t>(j)] * PadicScalar::from_residue(K_->p(), K_->prec(), a);
        }
    }
    return UnramifiedElem(K_, std::move(r));
}

UnramifiedElem UnramifiedElem::frobenius_pow(int k) const {
    int f = K_->degree();
    k %= f;
    if (k < 0)
        k += f;
    UnramifiedElem r = *this;
    for (int i = 0; i < k; ++i)
        r = r.frobenius();
    return r;
}

PadicScalar UnramifiedElem::trace_to_base() const {
    UnramifiedElem acc = *this;
    UnramifiedElem cur = *this;
    for (int i = 1; i < K_->degree(); ++i) {
        cur = cur.frobenius();
        acc += cur;
    }
    return acc.as_scalar();
}

UnramifiedElem UnramifiedElem::teichmuller() const {
    for (const auto& x : c_)
        if (x.den_exp() > 0)
            throw std::domain_error("teichmuller lift needs an integral element");
    std::uint64_t q = 1;
    for (int i = 0; i < K_->degree(); ++i)
        q *= K_->p();
    UnramifiedElem z = *this;
    for (int it = 0; it < K_->prec(); ++it)
        z = z.pow(q);
    return z;
}

bool UnramifiedElem::same_value(const UnramifiedElem& o) const {
    require_same_field(o);
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (!c_[i].same_value(o.c_[i]))
            return false;
    return true;
}

int UnramifiedElem::agree_digits(const UnramifiedElem& a, const UnramifiedElem& b) {
    a.require_same_field(b);
    int m = 1 << 20;
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        m = std::min(m, PadicScalar::agree_digits(a.c_[i], b.c_[i]));
    return m;
}

int UnramifiedElem::min_valuation() const {
    int m = 1 << 20;
    for (const auto& x : c_)
        m = std::min(m, x.valuation());
    return m;
}

std::string UnramifiedElem::to_string() const {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (i)
            out << ", ";
        out << c_[i].to_string();
    }
    out << "]";
    return out.str();
}

// --- UnramifiedEmbedding ---

UnramifiedEmbedding::UnramifiedEmbedding(UnramifiedField::Ptr sub, UnramifiedField::Ptr sup)
    : sub_(std::move(sub)), sup_(std::move(sup)) {
    if (sub_->p() != sup_->p() || sub_->prec() != sup_->prec())
        throw std::invalid_argument("embedding requires matching prime and precision");
    if (sup_->degree() % sub_->degree() != 0)
        throw std::invalid_argument("field degrees are not nested");
    m_ = sup_->degree() / sub_->degree();
    std::uint64_t p = sup_->p();
    int fs = sub_->degree(), fl = sup_->degree();

    // Root of the subfield polynomial in the big residue field, first match
    // in the fixed enumeration order, then Newton to full precision.
    std::uint64_t count = 1;
    for (int i = 0; i < fl; ++i)
        count *= p;
    auto Psub = [&](const UnramifiedElem& at) {
        UnramifiedElem acc = sup_->from_int(1);
        for (int i = fs - 1; i >= 0; --i)
            acc = acc * at + sup_->from_scalar(PadicScalar::from_residue(
                                 p, sup_->prec(), sub_->defining_poly()[static_cast<std::size_t>(i)]));
        return acc;
    };
    auto dPsub = [&](const UnramifiedElem& at) {
        UnramifiedElem acc = sup_->from_int(fs);
        for (int i = fs - 1; i >= 1; --i)
            acc = acc * at + sup_->from_scalar(
                                 PadicScalar::from_residue(p, sup_->prec(),
                                                           sub_->defining_poly()[static_cast<std::size_t>(i)]))
                                 .mul_int(i);
        return acc;
    };
    bool found = false;
    UnramifiedElem root = sup_->zero();
    for (std::uint64_t k = 0; k < count && !found; ++k) {
        UnramifiedElem cand = sup_->residue_rep(k);
        UnramifiedElem v = Psub(cand);
        if (v.min_valuation() >= 1) {
            root = cand;
            found = true;
        }
    }
    if (!found)
        throw std::logic_error("no residue root for the subfield polynomial");
    for (int it = 0; it < sup_->prec() + 2; ++it) {
        UnramifiedElem num = Psub(root);
        if (num.is_zero())
            break;
        root = root - num * dPsub(root).inv();
    }
    if (!Psub(root).is_zero())
        throw std::logic_error("embedding root did not converge");

    embed_cols_.assign(static_cast<std::size_t>(fl),
                       std::vector<std::uint64_t>(static_cast<std::size_t>(fs), 0));
    UnramifiedElem rp = sup_->from_int(1);
    for (int j = 0; j < fs; ++j) {
        for (int i = 0; i < fl; ++i)
            embed_cols_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                rp.coord(i).residue();
        if (j + 1 < fs)
            rp = rp * root;
    }

    // Select fs pivot rows whose square block is invertible mod p, by
    // Gaussian elimination on a residue copy.
    std::vector<std::vector<std::uint64_t>> work(embed_cols_);
    for (auto& row : work)
        for (auto& v : row)
            v %= p;
    std::vector<bool> used(static_cast<std::size_t>(fl), false);
    pivot_rows_.clear();
    for (int col = 0; col < fs; ++col) {
        int pr = -1;
        for (int r = 0; r < fl; ++r)
            if (!used[static_cast<std::size_t>(r)] &&
                work[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] % p != 0) {
                pr = r;
                break;
            }
        if (pr < 0)
            throw std::logic_error("embedding matrix lost rank");
        used[static_cast<std::size_t>(pr)] = true;
        pivot_rows_.push_back(pr);
        std::uint64_t piv = work[static_cast<std::size_t>(pr)][static_cast<std::size_t>(col)];
        std::uint64_t piv_inv = detail::powmod(piv, p - 2, p);
        for (int r = 0; r < fl; ++r) {
            if (r == pr)
                continue;
            std::uint64_t factor =
                mulmod(work[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)], piv_inv, p);
            if (!factor)
                continue;
            for (int cc = 0; cc < fs; ++cc) {
                auto& t = work[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)];
                t = submod(t,
                           mulmod(factor,
                                  work[static_cast<std::size_t>(pr)][static_cast<std::size_t>(cc)], p),
                           p);
            }
        }
    }

    // Invert the pivot block over Z/p^prec by Gauss-Jordan with unit pivots.
    std::uint64_t mod = sup_->modulus();
    int n = fs;
    std::vector<std::vector<std::uint64_t>> A(static_cast<std::size_t>(n),
                                              std::vector<std::uint64_t>(static_cast<std::size_t>(2 * n), 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                embed_cols_[static_cast<std::size_t>(pivot_rows_[static_cast<std::size_t>(i)])]
                           [static_cast<std::size_t>(j)];
        A[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + i)] = 1;
    }
    for (int col = 0; col < n; ++col) {
        int pr = -1;
        for (int r = col; r < n; ++r)
            if (A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] % p != 0) {
                pr = r;
                break;
            }
        if (pr < 0)
            throw std::logic_error("pivot block is singular");
        std::swap(A[static_cast<std::size_t>(pr)], A[static_cast<std::size_t>(col)]);
        std::uint64_t piv = A[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        std::uint64_t piv_inv = inv_unit_mod(piv, p, sup_->prec(), mod);
        for (int cc = 0; cc < 2 * n; ++cc)
            A[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)] =
                mulmod(A[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)], piv_inv, mod);
        for (int r = 0; r < n; ++r) {
            if (r == col)
                continue;
            std::uint64_t factor = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
            if (!factor)
                continue;
            for (int cc = 0; cc < 2 * n; ++cc) {
                auto& t = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)];
                t = submod(t,
                           mulmod(factor,
                                  A[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)], mod),
                           mod);
            }
        }
    }
    section_.assign(static_cast<std::size_t>(n), std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            section_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                A[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + j)];
}

UnramifiedElem UnramifiedEmbedding::embed(const UnramifiedElem& x) const {
    if (x.field() != sub_)
        throw std::invalid_argument("element does not belong to the subfield");
    int fl = sup_->degree(), fs = sub_->degree();
    std::vector<PadicScalar> r(static_cast<std::size_t>(fl),
                               PadicScalar::zero(sup_->p(), sup_->prec()));
    for (int i = 0; i < fl; ++i)
        for (int j = 0; j < fs; ++j) {
            std::uint64_t a = embed_cols_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!a)
                continue;
            r[static_cast<std::size_t>(i)] +=
                x.coord(j) * PadicScalar::from_residue(sup_->p(), sup_->prec(), a);
        }
    return sup_->element(std::move(r));
}

UnramifiedElem UnramifiedEmbedding::restrict(const UnramifiedElem& x) const {
    if (x.field() != sup_)
        throw std::invalid_argument("element does not belong to the big field");
    int fs = sub_->degree();
    std::vector<PadicScalar> y(static_cast<std::size_t>(fs),
                               PadicScalar::zero(sub_->p(), sub_->prec()));
    for (int i = 0; i < fs; ++i)
        for (int j = 0; j < fs; ++j) {
            std::uint64_t a = section_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!a)
                continue;
            y[static_cast<std::size_t>(i)] +=
                x.coord(pivot_rows_[static_cast<std::size_t>(j)]) *
                PadicScalar::from_residue(sub_->p(), sub_->prec(), a);
        }
    UnramifiedElem cand = sub_->element(std::move(y));
    if (!embed(cand).same_value(x))
        throw std::domain_error("element is not in the subfield image");
    return cand;
}

bool UnramifiedEmbedding::in_image(const UnramifiedElem& x) const {
    try {
        restrict(x);
        return true;
    } catch (const std::domain_error&) {
        return false;
    }
}

UnramifiedElem UnramifiedEmbedding::trace(const UnramifiedElem& x) const {
    if (x.field() != sup_)
        throw std::invalid_argument("element does not belong to the big field");
    UnramifiedElem acc = x;
    UnramifiedElem cur = x;
    for (int i = 1; i < m_; ++i) {
        cur = cur.frobenius_pow(sub_->degree());
        acc += cur;
    }
    return restrict(acc);
}

}  // namespace padiclab
