#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "padiclab/unramified.hpp"

using namespace padiclab;

namespace {

UnramifiedElem random_elem(const UnramifiedField::Ptr& K, std::minstd_rand& rng) {
    std::vector<PadicScalar> c;
    for (int i = 0; i < K->degree(); ++i)
        c.push_back(PadicScalar::from_residue(K->p(), K->prec(), rng() % K->modulus()));
    return K->element(std::move(c));
}

UnramifiedElem random_unit(const UnramifiedField::Ptr& K, std::minstd_rand& rng) {
    for (;;) {
        UnramifiedElem x = random_elem(K, rng);
        bool unit = false;
        for (int i = 0; i < K->degree(); ++i)
            if (x.coord(i).residue() % K->p() != 0)
                unit = true;
        if (unit)
            return x;
    }
}

}  // namespace

TEST_CASE("deterministic defining polynomials") {
    using V = std::vector<std::uint64_t>;
    CHECK(UnramifiedField::make(3, 4, 2)->defining_poly() == V{2, 1, 1});
    CHECK(UnramifiedField::make(3, 4, 3)->defining_poly() == V{1, 0, 2, 1});
    CHECK(UnramifiedField::make(5, 4, 2)->defining_poly() == V{2, 1, 1});
    CHECK(UnramifiedField::make(7, 4, 2)->defining_poly() == V{3, 1, 1});
    CHECK(UnramifiedField::make(7, 4, 3)->defining_poly() == V{2, 1, 1, 1});
    CHECK(UnramifiedField::make(5, 4, 2)->poly_string() == "y^2 + y + 2");
    // two constructions agree (no hidden state)
    CHECK(UnramifiedField::make(3, 6, 3)->defining_poly() ==
          UnramifiedField::make(3, 8, 3)->defining_poly());
}

TEST_CASE("degree nine search") {
    auto K = UnramifiedField::make(3, 4, 9);
    CHECK(K->defining_poly() == std::vector<std::uint64_t>{1, 0, 0, 0, 0, 0, 2, 1, 0, 1});
}

TEST_CASE("frobenius fixed root, quadratic case") {
    auto K = UnramifiedField::make(5, 6, 2);
    // the two roots of y^2 + y + 2 sum to -1, so sigma(y) = -1 - y exactly
    const auto& F = K->frob_matrix();
    CHECK(F[0][1] == 15624);
    CHECK(F[1][1] == 15624);
    CHECK(F[0][0] == 1);
    CHECK(F[1][0] == 0);
    auto K8 = UnramifiedField::make(5, 8, 2);
    CHECK(K8->gen().frobenius().same_value(-(K8->one() + K8->gen())));
}

TEST_CASE("frobenius is a ring automorphism fixing the base") {
    std::minstd_rand rng(11);
    struct Cfg {
        std::uint64_t p;
        int f, prec;
    };
    for (Cfg cfg : {Cfg{3, 3, 6}, Cfg{5, 2, 6}, Cfg{7, 3, 5}}) {
        auto [p, f, prec] = cfg;
        auto K = UnramifiedField::make(p, prec, f);
        for (int trial = 0; trial < 20; ++trial) {
            UnramifiedElem a = random_elem(K, rng);
            UnramifiedElem b = random_elem(K, rng);
            CHECK((a + b).frobenius().same_value(a.frobenius() + b.frobenius()));
            CHECK((a * b).frobenius().same_value(a.frobenius() * b.frobenius()));
            CHECK(a.frobenius().frobenius_inv().same_value(a));
            CHECK(a.frobenius_pow(-1).same_value(a.frobenius_inv()));
            CHECK(a.frobenius_pow(f).same_value(a));
        }
        UnramifiedElem s = K->from_int(-17);
        CHECK(s.frobenius().same_value(s));
    }
}

TEST_CASE("teichmuller representatives in the extension") {
    auto K = UnramifiedField::make(3, 6, 3);
    std::uint64_t q = 27;
    CHECK(K->zero().teichmuller().is_zero());
    CHECK(K->one().teichmuller().same_value(K->one()));
    for (std::uint64_t k = 1; k < q; ++k) {
        UnramifiedElem t = K->residue_rep(k).teichmuller();
        CHECK(t.pow(q - 1).same_value(K->one()));
        // the arithmetic frobenius acts as p-th power on the roots of unity
        CHECK(t.frobenius().same_value(t.pow(3)));
    }
    // multiplicativity: the lift only depends on the residue class
    std::minstd_rand rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        UnramifiedElem a = K->residue_rep(1 + rng() % (q - 1));
        UnramifiedElem b = K->residue_rep(1 + rng() % (q - 1));
        CHECK((a * b).teichmuller().same_value(a.teichmuller() * b.teichmuller()));
    }
}

TEST_CASE("trace to the base field") {
    // power sums from the defining polynomials by Newton's identities
    auto K52 = UnramifiedField::make(5, 6, 2);
    CHECK(K52->one().trace_to_base().same_value(PadicScalar::from_int(5, 6, 2)));
    CHECK(K52->gen().trace_to_base().same_value(PadicScalar::from_int(5, 6, -1)));
    CHECK((K52->gen() * K52->gen()).trace_to_base().same_value(PadicScalar::from_int(5, 6, -3)));
    auto K33 = UnramifiedField::make(3, 6, 3);
    CHECK(K33->one().trace_to_base().same_value(PadicScalar::from_int(3, 6, 3)));
    CHECK(K33->gen().trace_to_base().same_value(PadicScalar::from_int(3, 6, -2)));
    CHECK(K33->gen().pow(2).trace_to_base().same_value(PadicScalar::from_int(3, 6, 4)));
    CHECK(K33->gen().pow(3).trace_to_base().same_value(PadicScalar::from_int(3, 6, -11)));

    std::minstd_rand rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        UnramifiedElem a = random_elem(K33, rng);
        UnramifiedElem b = random_elem(K33, rng);
        CHECK(a.frobenius().trace_to_base().same_value(a.trace_to_base()));
        CHECK((a + b).trace_to_base().same_value(a.trace_to_base() + b.trace_to_base()));
        PadicScalar s = PadicScalar::from_residue(3, 6, rng() % 729);
        CHECK(a.scale(s).trace_to_base().same_value(a.trace_to_base() * s));
    }
}

TEST_CASE("unit inversion") {
    std::minstd_rand rng(41);
    auto K = UnramifiedField::make(3, 7, 3);
    for (int trial = 0; trial < 20; ++trial) {
        UnramifiedElem x = random_unit(K, rng);
        CHECK((x * x.inv()).same_value(K->one()));
    }
    CHECK_THROWS_AS(K->zero().inv(), std::domain_error);
    CHECK_THROWS_AS(K->gen().mul_p_pow(1).inv(), std::domain_error);
    CHECK_THROWS_AS(K->from_int(3).inv(), std::domain_error);
}

TEST_CASE("reducible seeds are rejected with a witness factor") {
    auto expect_factor = [](std::uint64_t p, std::vector<std::uint64_t> poly,
                            const std::string& witness) {
        try {
            UnramifiedField::make_with_poly(p, 4, std::move(poly));
            FAIL_CHECK("seed accepted");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find(witness) != std::string::npos);
        }
    };
    expect_factor(3, {1, 2, 1}, "factor: y + 1");  // (y+1)^2
    expect_factor(3, {2, 0, 1}, "factor: y + 1");  // (y+1)(y+2)
    expect_factor(3, {0, 2, 1}, "factor: y");      // y(y+2)
    expect_factor(3, {2, 0, 0, 1}, "y + 2");  // (y+2)^3, vanishing derivative
    expect_factor(5, {1, 0, 2, 0, 1}, "y^2");  // gcd with derivative is a square
    CHECK_THROWS_AS(UnramifiedField::make_with_poly(3, 4, {1, 1, 2}), std::invalid_argument);

    // irreducible but non-primitive seeds are fine: y^2 + 1 mod 3, sigma(y) = -y
    auto K = UnramifiedField::make_with_poly(3, 6, {1, 0, 1});
    CHECK(K->gen().frobenius().same_value(-K->gen()));
    CHECK((K->gen() * K->gen()).same_value(K->from_int(-1)));
}

TEST_CASE("subfield embeddings") {
    auto sub = UnramifiedField::make(3, 4, 3);
    auto sup = UnramifiedField::make(3, 4, 9);
    UnramifiedEmbedding emb(sub, sup);
    CHECK(emb.relative_degree() == 3);
    CHECK(emb.embed(sub->one()).same_value(sup->one()));

    std::minstd_rand rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        UnramifiedElem a = random_elem(sub, rng);
        UnramifiedElem b = random_elem(sub, rng);
        CHECK(emb.embed(a + b).same_value(emb.embed(a) + emb.embed(b)));
        CHECK(emb.embed(a * b).same_value(emb.embed(a) * emb.embed(b)));
        // the two frobenius lifts agree on the image
        CHECK(emb.embed(a.frobenius()).same_value(emb.embed(a).frobenius()));
        CHECK(emb.restrict(emb.embed(a)).same_value(a));
        CHECK(emb.in_image(emb.embed(a)));
        // relative trace of an embedded element is just multiplication by the degree
        CHECK(emb.trace(emb.embed(a)).same_value(a.mul_int(3)));
    }
    CHECK_FALSE(emb.in_image(sup->gen()));

    // trace tower: through the intermediate field or straight down, same answer
    for (int trial = 0; trial < 8; ++trial) {
        UnramifiedElem x = random_elem(sup, rng);
        CHECK(emb.trace(x).trace_to_base().same_value(x.trace_to_base()));
    }

    CHECK_THROWS_AS(UnramifiedEmbedding(UnramifiedField::make(3, 4, 2), sup),
                    std::invalid_argument);
}

TEST_CASE("degree one field embeds as scalars") {
    auto sub = UnramifiedField::make(5, 6, 1);
    CHECK(sub->defining_poly() == std::vector<std::uint64_t>{2, 1});
    CHECK(sub->gen().as_scalar().same_value(PadicScalar::from_int(5, 6, -2)));
    auto sup = UnramifiedField::make(5, 6, 2);
    UnramifiedEmbedding emb(sub, sup);
    CHECK(emb.embed(sub->gen()).same_value(sup->from_int(-2)));
    CHECK(emb.trace(sup->gen()).as_scalar().same_value(PadicScalar::from_int(5, 6, -1)));
}
