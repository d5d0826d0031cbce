#include <cstdint>
#include <vector>

#include "doctest.h"
#include "padiclab/epsilon.hpp"

using namespace padiclab;

namespace {

using Cyc = CyclotomicElem<PadicScalar>;

constexpr int kPrec = 8;

WeilCharacter make_char(std::uint64_t p, int tame, int wild_level,
                        std::uint64_t wild, int weight = 0) {
    return {CharacterSpec{p, tame, wild_level, wild, 0}, weight,
            PadicScalar::one(p, kPrec)};
}

Cyc scalar_elem(std::uint64_t p, int level, long long v) {
    return Cyc::scalar(p, level, PadicScalar::from_int(p, kPrec, v));
}

// Every primitive character of conductor p or p^2, at weight 0 with
// Frobenius value 1.
std::vector<WeilCharacter> primitive_chars(std::uint64_t p) {
    std::vector<WeilCharacter> out;
    for (int t = 1; t + 1 < static_cast<int>(p); ++t)
        out.push_back(make_char(p, t, 1, 0));
    for (std::uint64_t w = 1; w < p; ++w)
        for (int t = 0; t + 1 < static_cast<int>(p); ++t)
            out.push_back(make_char(p, t, 2, w));
    return out;
}

}  // namespace

TEST_CASE("the quadratic Gauss sum mod five squares to five") {
    // Independent oracle in plain integers: tau^2 = sum over unit pairs of
    // chi(a) chi(b) zeta^{a+b} with chi the quadratic residue symbol, written
    // on the redundant exponent basis. An element of the level-one ring is a
    // scalar s exactly when the slot vector is (s+t, t, t, t, t).
    int chi[5] = {0, 1, -1, -1, 1};
    long long slot[5] = {0, 0, 0, 0, 0};
    for (int a = 1; a < 5; ++a)
        for (int b = 1; b < 5; ++b)
            slot[(a + b) % 5] += chi[a] * chi[b];
    CHECK(slot[0] == 4);
    for (int k = 1; k < 5; ++k)
        CHECK(slot[k] == -1);
    CHECK(slot[0] - slot[1] == 5);

    WeilCharacter q = make_char(5, 2, 1, 0);
    Cyc tau = gauss_sum(q);
    CHECK((tau * tau).same_value(scalar_elem(5, 1, 5)));
}

TEST_CASE("Gauss sum pairs multiply to the sign times the conductor power") {
    for (std::uint64_t p : {3ull, 5ull}) {
        for (const WeilCharacter& w : primitive_chars(p)) {
            int n = w.conductor();
            Cyc t = gauss_sum(w);
            Cyc tbar = gauss_sum(w.inverse());
            int sign = w.finite.tame_norm() % 2 == 0 ? 1 : -1;
            PadicScalar rhs =
                PadicScalar::one(p, kPrec).mul_int(sign).mul_p_pow(n);
            CHECK((t * tbar).same_value(Cyc::scalar(p, n, rhs)));
        }
    }
}

TEST_CASE("replacing the root system by a power reindexes the sum") {
    std::vector<WeilCharacter> chars = {
        make_char(5, 1, 1, 0), make_char(3, 1, 2, 1), make_char(5, 2, 2, 3)};
    for (const WeilCharacter& w : chars) {
        std::uint64_t pn = detail::upow_checked(w.p(), w.conductor());
        for (long long g : {2ll, -1ll, 1 + static_cast<long long>(w.p())}) {
            std::uint64_t a = static_cast<std::uint64_t>(
                ((g % static_cast<long long>(pn)) + static_cast<long long>(pn)) %
                static_cast<long long>(pn));
            CHECK(gauss_sum(w, g).same_value(gauss_sum(w) * finite_value(w, a)));
        }
    }

    // Cross-check finite_value against the measure-side evaluator on a
    // Dirac mass, which reaches the same number through unrelated code.
    WeilCharacter w = make_char(3, 1, 2, 1);
    for (std::uint64_t a : {2ull, 4ull, 8ull}) {
        GroupAlgebraMeasure<PadicScalar> dirac(3, 2, PadicScalar::zero(3, kPrec));
        dirac.set(a, PadicScalar::one(3, kPrec));
        CHECK(raise_level(eval_character(dirac, w.finite), w.conductor())
                  .same_value(finite_value(w, a)));
    }
}

TEST_CASE("epsilon factors: special cases, dual routes, weight bookkeeping") {
    // Unramified characters have epsilon 1 regardless of weight and
    // Frobenius value.
    WeilCharacter unram{CharacterSpec{5, 0, 1, 0, 0}, 3,
                        PadicScalar::from_int(5, kPrec, 7)};
    CHECK(epsilon_factor(unram).same_value(
        Cyc::one(5, 1, PadicScalar::zero(5, kPrec))));

    // Quadratic mod 5 at weight 0: tau^2 = 5 makes epsilon equal tau itself.
    WeilCharacter q = make_char(5, 2, 1, 0);
    CHECK(epsilon_factor(q).same_value(gauss_sum(q)));

    // Both routes agree for every primitive character of conductor p, p^2,
    // across weights and a nontrivial unramified part; and the unramified
    // part enters only through its Frobenius value to the n-th power.
    for (std::uint64_t p : {3ull, 5ull}) {
        PadicScalar c = PadicScalar::from_residue(p, kPrec, 2).teichmuller();
        for (WeilCharacter w : primitive_chars(p)) {
            int n = w.conductor();
            for (int j : {0, 1, -1}) {
                w.weight = j;
                w.frob = PadicScalar::one(p, kPrec);
                EpsilonReport r = epsilon_routes(w);
                CHECK(r.closed.same_value(r.direct));
                WeilCharacter tw = w;
                tw.frob = c;
                CHECK(epsilon_factor(tw).same_value(
                    epsilon_factor(w).scale(c.pow(n))));
            }
        }
    }

    // Raising the weight by one scales epsilon by p^n, including across the
    // denominator boundary at weight -1.
    for (int j : {-1, 0, 2}) {
        WeilCharacter lo = make_char(3, 1, 2, 1, j);
        WeilCharacter hi = make_char(3, 1, 2, 1, j + 1);
        int n = lo.conductor();
        CHECK(epsilon_factor(hi).same_value(epsilon_factor(lo).scale(
            PadicScalar::one(3, kPrec).mul_p_pow(n))));
    }
}

TEST_CASE("epsilon times the Gauss sum recovers the conductor power") {
    // For weight j >= 0 and Frobenius value 1, epsilon(omega^{-1}) tau(omega)
    // must be the exact scalar p^{n(1+j)}.
    for (std::uint64_t wd : {1ull, 2ull})
        for (int t : {0, 1})
            for (int j : {0, 1, 2}) {
                WeilCharacter w = make_char(3, t, 2, wd, j);
                Cyc lhs = epsilon_factor(w) * gauss_sum(w);
                CHECK(lhs.same_value(Cyc::scalar(
                    3, 2,
                    PadicScalar::one(3, kPrec).mul_p_pow(2 * (1 + j)))));
            }
    for (int j : {0, 3}) {
        WeilCharacter w = make_char(5, 1, 2, 2, j);
        CHECK((epsilon_factor(w) * gauss_sum(w))
                  .same_value(Cyc::scalar(
                      5, 2,
                      PadicScalar::one(5, kPrec).mul_p_pow(2 * (1 + j)))));
    }
}

TEST_CASE("L-factors follow the crystalline line") {
    // Any ramification kills the factor down to the constant 1.
    CHECK(l_factor(make_char(5, 1, 1, 0)).is_one);
    CHECK(l_factor(make_char(3, 0, 2, 1, 2)).is_one);

    // Trivial character: 1 - X.
    LFactor triv = l_factor(make_char(5, 0, 1, 0));
    CHECK(!triv.is_one);
    CHECK(triv.u.same_value(PadicScalar::one(5, kPrec)));

    // Pure weight: u = p^{-j}, with honest denominators for j > 0.
    for (int j : {-2, -1, 1, 3}) {
        LFactor lf = l_factor(make_char(5, 0, 1, 0, j));
        PadicScalar expect = j >= 0 ? PadicScalar::one(5, kPrec).div_p_pow(j)
                                    : PadicScalar::one(5, kPrec).mul_p_pow(-j);
        CHECK(!lf.is_one);
        CHECK(lf.u.same_value(expect));
    }

    // Unramified finite part enters through the inverse Frobenius value.
    PadicScalar c = PadicScalar::from_residue(5, kPrec, 3).teichmuller();
    WeilCharacter w{CharacterSpec{5, 0, 1, 0, 0}, 0, c};
    CHECK(l_factor(w).u.same_value(c.inv()));
}

TEST_CASE("gamma star leading terms and the shifted factorial recurrence") {
    CHECK(gamma_star(1) == BigRational(1));
    CHECK(gamma_star(2) == BigRational(1));
    CHECK(gamma_star(3) == BigRational(2));
    CHECK(gamma_star(7) == BigRational(720));
    CHECK(gamma_star(0) == BigRational(1));
    CHECK(gamma_star(-1) == BigRational(-1));
    CHECK(gamma_star(-2) == BigRational(1, 2));
    CHECK(gamma_star(-3) == BigRational(-1, 6));
    for (long long m = -6; m <= 6; ++m) {
        if (m == 0)
            continue;
        CHECK(gamma_star(m + 1) == BigRational(m) * gamma_star(m));
    }
}

TEST_CASE("malformed inputs are rejected") {
    // No Gauss sum for unramified characters.
    CHECK_THROWS_AS(gauss_sum(make_char(5, 0, 1, 0)), std::domain_error);
    // The reindexing exponent must be a unit.
    CHECK_THROWS_AS(gauss_sum(make_char(5, 1, 1, 0), 10), std::invalid_argument);
    // Character values only exist on units.
    CHECK_THROWS_AS(finite_value(make_char(5, 1, 1, 0), 10), std::domain_error);
    // Weight must ride on the character, not its finite part.
    WeilCharacter bad{CharacterSpec{5, 1, 1, 0, 2}, 0,
                      PadicScalar::one(5, kPrec)};
    CHECK_THROWS_AS(gauss_sum(bad), std::invalid_argument);
    // The Frobenius value must be a unit over the right prime.
    WeilCharacter nonunit{CharacterSpec{5, 1, 1, 0, 0}, 0,
                          PadicScalar::from_int(5, kPrec, 10)};
    CHECK_THROWS_AS(epsilon_factor(nonunit), std::invalid_argument);
    WeilCharacter wrongp{CharacterSpec{5, 1, 1, 0, 0}, 0,
                         PadicScalar::one(3, kPrec)};
    CHECK_THROWS_AS(epsilon_factor(wrongp), std::invalid_argument);
}
