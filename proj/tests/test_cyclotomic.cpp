#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "padiclab/cyclotomic.hpp"
#include "padiclab/unramified.hpp"

using namespace padiclab;

using CycS = CyclotomicElem<PadicScalar>;

namespace {

CycS random_cyc(std::uint64_t p, int level, int prec, std::minstd_rand& rng) {
    std::size_t d = CycS::dim(p, level);
    std::uint64_t mod = 1;
    for (int i = 0; i < prec; ++i)
        mod *= p;
    std::vector<PadicScalar> c;
    for (std::size_t i = 0; i < d; ++i)
        c.push_back(PadicScalar::from_residue(p, prec, rng() % mod));
    return CycS(p, level, std::move(c));
}

}  // namespace

TEST_CASE("root of unity relations") {
    struct Cfg {
        std::uint64_t p;
        int level;
    };
    for (Cfg cfg : {Cfg{3, 1}, Cfg{3, 2}, Cfg{5, 1}, Cfg{5, 2}, Cfg{7, 1}, Cfg{3, 3}}) {
        const std::uint64_t p = cfg.p;
        const int n = cfg.level;
        const PadicScalar proto = PadicScalar::zero(p, 5);
        std::uint64_t pn = 1;
        for (int i = 0; i < n; ++i)
            pn *= p;
        CycS z = CycS::zeta(p, n, proto);
        CHECK(z.pow(pn).same_value(CycS::one(p, n, proto)));
        if (n > 1)
            CHECK_FALSE(z.pow(pn / p).same_value(CycS::one(p, n, proto)));

        // minimal relation: the p-th roots inside the tower sum to zero
        CycS rel = CycS::zero(p, n, proto);
        for (std::uint64_t i = 0; i < p; ++i)
            rel += CycS::zeta(p, n, proto, static_cast<long long>(i * (pn / p)));
        CHECK(rel.is_zero());

        // all p^n-th roots of unity sum to zero
        CycS full = CycS::zero(p, n, proto);
        for (std::uint64_t t = 0; t < pn; ++t)
            full += CycS::zeta(p, n, proto, static_cast<long long>(t));
        CHECK(full.is_zero());

        // exponent arithmetic
        std::minstd_rand rng(3);
        for (int trial = 0; trial < 10; ++trial) {
            long long a = static_cast<long long>(rng() % (2 * pn)) - static_cast<long long>(pn);
            long long b = static_cast<long long>(rng() % pn);
            CHECK((CycS::zeta(p, n, proto, a) * CycS::zeta(p, n, proto, b))
                      .same_value(CycS::zeta(p, n, proto, a + b)));
        }
    }
}

TEST_CASE("product of zeta^u minus one over units is p") {
    struct Cfg {
        std::uint64_t p;
        int level;
    };
    for (Cfg cfg : {Cfg{3, 1}, Cfg{3, 2}, Cfg{5, 1}, Cfg{5, 2}, Cfg{7, 1}}) {
        const std::uint64_t p = cfg.p;
        const int n = cfg.level;
        const PadicScalar proto = PadicScalar::zero(p, 6);
        std::uint64_t pn = 1;
        for (int i = 0; i < n; ++i)
            pn *= p;
        CycS prod = CycS::one(p, n, proto);
        for (std::uint64_t u = 1; u < pn; ++u) {
            if (u % p == 0)
                continue;
            prod *= CycS::zeta(p, n, proto, static_cast<long long>(u)) - CycS::one(p, n, proto);
        }
        PadicScalar v = prod.descend();
        CHECK(v.same_value(PadicScalar::from_int(p, 6, static_cast<long long>(p))));
    }
}

TEST_CASE("ring laws") {
    std::minstd_rand rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        CycS a = random_cyc(5, 2, 4, rng);
        CycS b = random_cyc(5, 2, 4, rng);
        CycS c = random_cyc(5, 2, 4, rng);
        CHECK((a * b).same_value(b * a));
        CHECK(((a * b) * c).same_value(a * (b * c)));
        CHECK((a * (b + c)).same_value(a * b + a * c));
        CHECK((a + (-a)).is_zero());
    }
}

TEST_CASE("descend accepts only root-free elements") {
    const PadicScalar proto = PadicScalar::zero(3, 4);
    PadicScalar v = PadicScalar::from_int(3, 4, 7);
    CHECK(CycS::scalar(3, 2, v).descend().same_value(v));
    CHECK_THROWS_AS(CycS::zeta(3, 2, proto).descend(), std::domain_error);
}

TEST_CASE("coordinatewise maps") {
    const PadicScalar proto = PadicScalar::zero(3, 5);
    CycS z = CycS::zeta(3, 2, proto);
    CHECK(z.mul_int(3).div_p_pow(1).same_value(z));
    CHECK(z.scale(PadicScalar::from_int(3, 5, 2)).same_value(z + z));
}

TEST_CASE("frobenius acts on coefficients and fixes zeta") {
    auto K = UnramifiedField::make(3, 5, 2);
    using CycU = CyclotomicElem<UnramifiedElem>;
    const UnramifiedElem proto = K->zero();
    CycU z = CycU::zeta(3, 2, proto);
    CHECK(z.frobenius().same_value(z));

    std::minstd_rand rng(29);
    auto random_elem = [&](void) {
        std::vector<UnramifiedElem> c;
        for (std::size_t i = 0; i < CycU::dim(3, 2); ++i) {
            std::vector<PadicScalar> cc;
            for (int j = 0; j < K->degree(); ++j)
                cc.push_back(PadicScalar::from_residue(3, 5, rng() % K->modulus()));
            c.push_back(K->element(std::move(cc)));
        }
        return CycU(3, 2, std::move(c));
    };
    for (int trial = 0; trial < 10; ++trial) {
        CycU a = random_elem();
        CycU b = random_elem();
        CHECK((a * b).frobenius().same_value(a.frobenius() * b.frobenius()));
        CHECK(a.frobenius().frobenius().same_value(a));  // sigma has order f = 2
        CHECK(a.frobenius_inv().frobenius().same_value(a));
    }
}
