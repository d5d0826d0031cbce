#include "padiclab/rational_oracle.hpp"

#include <stdexcept>

#include "padiclab/modarith.hpp"

namespace padiclab {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

const BigRational& RationalOracle::bernoulli(int k) {
    if (k < 0)
        throw std::invalid_argument("Bernoulli index must be >= 0");
    if (bernoulli_cache_.empty()) {
        bernoulli_cache_.push_back(BigRational(1));
        bernoulli_cache_.push_back(BigRational(-1, 2));
    }
    while (static_cast<int>(bernoulli_cache_.size()) <= k) {
        int n = static_cast<int>(bernoulli_cache_.size());
        // sum_{j=0..n} binom(n+1, j) B_j = 0  =>  solve for B_n
        BigRational s(0);
        for (int j = 0; j < n; ++j)
            s += BigRational(binomial(n + 1, j)) * bernoulli_cache_[j];
        bernoulli_cache_.push_back(-s / BigRational(n + 1));
    }
    return bernoulli_cache_[k];
}

BigRational RationalOracle::zeta_one_minus(int k) {
    if (k < 1)
        throw std::invalid_argument("zeta(1-k) needs k >= 1");
    return -bernoulli(k) / k;
}

BigInt RationalOracle::binomial(long long n, long long k) {
    if (k < 0 || k > n)
        return BigInt(0);
    BigInt r(1);
    for (long long i = 0; i < k; ++i) {
        r *= BigInt(n - i);
        r /= BigInt(i + 1);  // exact at every step
    }
    return r;
}

BigInt RationalOracle::factorial(long long n) {
    BigInt r(1);
    for (long long i = 2; i <= n; ++i)
        r *= i;
    return r;
}

std::vector<BigRational> RationalOracle::log_ratio_series(long long a, int terms) {
    if (terms < 1)
        throw std::invalid_argument("need at least one series term");
    auto expm1_over_t = [&](long long c) {
        // (e^{ct} - 1)/t = sum_{k>=0} c^{k+1} t^k / (k+1)!
        std::vector<BigRational> s(terms + 1);
        BigInt cpow(c);
        BigInt fact(1);
        for (int k = 0; k <= terms; ++k) {
            fact *= (k + 1);
            s[k] = BigRational(cpow) / BigRational(fact);
            cpow *= c;
        }
        return s;
    };
    std::vector<BigRational> num = expm1_over_t(a);
    std::vector<BigRational> den = expm1_over_t(1);
    // quotient q = num/den by forward substitution; den[0] = 1
    std::vector<BigRational> q(terms + 1);
    for (int k = 0; k <= terms; ++k) {
        BigRational s = num[k];
        for (int j = 1; j <= k; ++j)
            s -= den[j] * q[k - j];
        q[k] = s;  // den[0] == 1
    }
    // w = q/a - 1, then log(1+w) term by term
    std::vector<BigRational> w(terms + 1);
    for (int k = 0; k <= terms; ++k)
        w[k] = q[k] / a;
    w[0] -= 1;
    if (w[0] != 0)
        throw std::logic_error("ratio series must start at the constant a");
    std::vector<BigRational> out(terms + 1);
    std::vector<BigRational> wk(terms + 1);
    wk[0] = 1;  // w^0
    for (int k = 1; k <= terms; ++k) {
        // wk <- wk * w (both have zero constant term after the first round)
        std::vector<BigRational> nxt(terms + 1);
        for (int i = 0; i <= terms; ++i) {
            if (wk[i] == 0)
                continue;
            for (int j = 0; i + j <= terms; ++j)
                nxt[i + j] += wk[i] * w[j];
        }
        wk = std::move(nxt);
        BigRational c = BigRational(k % 2 == 1 ? 1 : -1) / k;
        for (int i = k; i <= terms; ++i)
            out[i] += c * wk[i];
    }
    out[0] = 0;  // the dropped log(a)
    return out;
}

BigRational RationalOracle::regulator_moment(std::uint64_t p, long long a, int k) {
    if (k < 1)
        throw std::invalid_argument("closed-form moment needs k >= 1");
    if (k == 1)
        return BigRational(0);  // the Euler factor 1 - p^0 vanishes
    BigInt ppow(1);
    for (int i = 0; i < k - 1; ++i)
        ppow *= p;
    BigInt apow(1);
    for (int i = 0; i < k; ++i)
        apow *= a;
    return BigRational(1 - ppow) * BigRational(apow - 1) * bernoulli(k) / k;
}

int valuation_p(const BigRational& r, std::uint64_t p) {
    if (r == 0)
        throw std::invalid_argument("valuation of exact zero");
    BigInt n = numerator(r), d = denominator(r);
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    while (d % p == 0) {
        d /= p;
        --v;
    }
    return v;
}

PadicScalar reduce_mod_p(const BigRational& r, std::uint64_t p, int prec) {
    if (r == 0)
        return PadicScalar::zero(p, prec);
    BigInt n = numerator(r), d = denominator(r);
    int vn = 0, vd = 0;
    while (n % p == 0) {
        n /= p;
        ++vn;
    }
    while (d % p == 0) {
        d /= p;
        --vd;  // counts negatively below
    }
    vd = -vd;
    BigInt m(detail::upow_checked(p, prec));
    BigInt nr = n % m;
    if (nr < 0)
        nr += m;
    BigInt dr = d % m;
    if (dr < 0)
        dr += m;
    std::uint64_t un = static_cast<std::uint64_t>(nr);
    std::uint64_t ud = static_cast<std::uint64_t>(dr);
    std::uint64_t mm = detail::upow_checked(p, prec);
    std::uint64_t unit = detail::mulmod(un, detail::inv_unit_mod(ud, p, prec, mm), mm);
    PadicScalar s = PadicScalar::from_residue(p, prec, unit);
    return s.mul_p_pow(vn - vd);
}

}  // namespace padiclab
