#include <doctest.h>

#include "wittlab/errors.hpp"
#include "wittlab/upoly.hpp"

using namespace wittlab;

namespace {

IntPoly X(int i, unsigned e = 1) { return IntPoly::variable(x_slot(i), e); }
IntPoly Y(int i, unsigned e = 1) { return IntPoly::variable(y_slot(i), e); }
IntPoly C(long c) { return IntPoly::constant(c); }

mpz_class binom(long n, long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

mpz_class ipow(long p, long k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, k);
    return r;
}

// substitute X_i -> X_i^p in a polynomial in X only
IntPoly frobenius_substitute(const IntPoly& f, int p) {
    IntPoly r;
    for (const auto& [e, c] : f.terms) {
        Exps e2 = e;
        for (auto& x : e2) x = static_cast<uint16_t>(x * p);
        r.terms.emplace(e2, c);
    }
    return r;
}

}  // namespace

TEST_CASE("ghost polynomials at small indices") {
    CHECK(ghost_poly(2, 0) == UniversalPoly(2, X(0)));
    CHECK(ghost_poly(2, 1) == UniversalPoly(2, X(0, 2) + C(2) * X(1)));
    CHECK(ghost_poly(3, 2) == UniversalPoly(3, X(0, 9) + C(3) * X(1, 3) + C(9) * X(2)));
}

TEST_CASE("ghost recursions") {
    for (int p : {2, 3, 5}) {
        for (int n = 0; n <= 3; ++n) {
            // fant_{n+1} = fant_n(X^p) + p^{n+1} X_{n+1}
            IntPoly lhs = ghost_int(p, n + 1);
            IntPoly rhs = frobenius_substitute(ghost_int(p, n), p) + X(n + 1).scaled(ipow(p, n + 1));
            CHECK(lhs == rhs);
            // fant_{n+1} = X_0^{p^{n+1}} + p * fant_n(X_1..X_{n+1})
            IntPoly shifted;
            for (const auto& [e, c] : ghost_int(p, n).terms) {
                Exps e2{};
                for (int i = 0; i + 1 < kYOffset; ++i) e2[i + 1] = e[i];
                shifted.terms.emplace(e2, c);
            }
            IntPoly rhs2 = X(0, ipow(p, n + 1).get_ui()) + shifted.scaled(p);
            CHECK(lhs == rhs2);
        }
    }
}

TEST_CASE("displayed low degree members") {
    for (int p : {2, 3, 5}) {
        auto S = structural_polys(PolyKind::Sum, p, 2);
        IntPoly s1 = X(1) + Y(1);
        for (int i = 1; i < p; ++i) s1 -= (X(0, i) * Y(0, p - i)).scaled(binom(p, i) / p);
        CHECK(S[0] == UniversalPoly(p, X(0) + Y(0)));
        CHECK(S[1] == UniversalPoly(p, s1));

        auto P = structural_polys(PolyKind::Prod, p, 2);
        CHECK(P[0] == UniversalPoly(p, X(0) * Y(0)));
        CHECK(P[1] == UniversalPoly(p, (X(1) * Y(1)).scaled(p) + X(0, p) * Y(1) + X(1) * Y(0, p)));

        auto F = structural_polys(PolyKind::Frob, p, 2);
        CHECK(F[0] == UniversalPoly(p, X(0, p) + X(1).scaled(p)));
        IntPoly f1 = X(1, p) + X(2).scaled(p);
        for (int i = 0; i < p; ++i) f1 -= (X(0, p * i) * X(1, p - i)).scaled(binom(p, i) * ipow(p, p - i - 1));
        CHECK(F[1] == UniversalPoly(p, f1));
    }
    auto I = structural_polys(PolyKind::Neg, 2, 3);
    CHECK(I[0] == UniversalPoly(2, -X(0)));
    CHECK(I[1] == UniversalPoly(2, -(X(0, 2) + X(1))));
    CHECK(I[2] == UniversalPoly(2, -X(0, 4) - X(0, 2) * X(1) - X(1, 2) - X(2)));
}

TEST_CASE("negation is -X_n for odd p") {
    for (int p : {3, 5, 7}) {
        auto I = structural_polys(PolyKind::Neg, p, 4);
        for (int n = 0; n < 4; ++n) CHECK(I[n] == UniversalPoly(p, -X(n)));
    }
}

TEST_CASE("ghost identities and Frobenius congruence at p = 2, 3") {
    for (int p : {2, 3}) {
        for (PolyKind k : {PolyKind::Sum, PolyKind::Prod, PolyKind::Neg, PolyKind::Frob}) {
            auto fam = structural_polys(k, p, 4);
            for (int n = 0; n < 4; ++n) {
                CHECK(fam[n].is_integral());
                CHECK(check_ghost_identity(k, p, fam, n));
            }
            if (k == PolyKind::Frob) {
                for (int n = 0; n < 4; ++n) {
                    IntPoly d = fam[n].to_int() - X(n, p);
                    for (const auto& [e, c] : d.terms) CHECK(mpz_divisible_ui_p(c.get_mpz_t(), p));
                }
            }
        }
    }
}

TEST_CASE("corrupted family fails the identity check") {
    auto fam = structural_polys(PolyKind::Prod, 2, 3);
    UniversalPoly bad = fam[2];
    bad.terms.begin()->second += 1;
    fam[2] = bad;
    CHECK_FALSE(check_ghost_identity(PolyKind::Prod, 2, fam, 2));
}

TEST_CASE("text and json round trips") {
    auto fam = structural_polys(PolyKind::Sum, 3, 3);
    for (const auto& f : fam) {
        CHECK(UniversalPoly::from_text(3, f.to_text()) == f);
        CHECK(UniversalPoly::from_json(3, f.to_json()) == f);
    }
    auto S = structural_polys(PolyKind::Sum, 2, 2);
    CHECK(S[1].to_text() == "-1 * X0^1 Y0^1\n1 * X1^1\n1 * Y1^1\n");
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(structural_polys(PolyKind::Sum, 4, 2), InvalidArgument);
    CHECK_THROWS_AS(structural_polys(PolyKind::Sum, 2, 0), InvalidArgument);
    CHECK_THROWS_AS(structural_polys(PolyKind::Sum, 11, 2), SizeLimitExceeded);
    CHECK_THROWS_AS(structural_polys(PolyKind::Sum, 2, 6), SizeLimitExceeded);
    CHECK_THROWS_AS(structural_polys(PolyKind::Frob, 5, 5), SizeLimitExceeded);
    CHECK_THROWS_AS(parse_kind("bogus"), InvalidArgument);
}
