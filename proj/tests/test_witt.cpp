#include <doctest.h>

#include "wittlab/errors.hpp"
#include "wittlab/witt.hpp"

using namespace wittlab;

namespace {

const Ring* ring(int p, int s, int m, int N) {
    return Ring::make(RingSpec{p, s, m, LubinTate::cyclotomic(p), N});
}

WittVec vec(const Ring* R, std::vector<long> xs) {
    WittVec v{R, {}};
    for (long x : xs) v.c.push_back(R->from_int(x));
    return v;
}

WittVec pw(const WittVec& a) { return witt_pow(a, static_cast<uint64_t>(a.R->p())); }

}  // namespace

TEST_CASE("basic arithmetic") {
    const Ring* F2 = ring(2, 1, -1, 1);
    CHECK(witt_add(vec(F2, {1, 0}), vec(F2, {1, 0})) == vec(F2, {0, 1}));
    std::mt19937_64 rng(1);
    for (const Ring* R : {ring(2, 1, -1, 10), ring(3, 1, -1, 8), ring(2, 2, -1, 1)}) {
        WittVec a = witt_random(R, 4, rng);
        CHECK(witt_add(a, witt_zero(R, 4)) == a);
        CHECK(witt_mul(a, witt_one(R, 4)) == a);
        CHECK(witt_add(a, witt_neg(a)) == witt_zero(R, 4));
    }
}

TEST_CASE("eval_poly") {
    const Ring* Z = ring(2, 1, -1, 5);
    auto S = structural_polys_cached(PolyKind::Sum, 2, 2);
    CHECK(eval_poly(S[0], {{x_slot(0), Z->from_int(3)}, {y_slot(0), Z->from_int(4)}}) == Z->from_int(7));
    const Ring* Z3 = ring(3, 1, -1, 5);
    CHECK(eval_poly(ghost_poly(3, 1), {{x_slot(0), Z3->one()}, {x_slot(1), Z3->zero()}}) == Z3->one());
    auto P = structural_polys_cached(PolyKind::Prod, 2, 2);
    CHECK(eval_poly(P[1], {{x_slot(0), Z->one()}, {x_slot(1), Z->zero()}, {y_slot(0), Z->one()}, {y_slot(1), Z->zero()}})
              .is_zero());
    CHECK_THROWS_AS(eval_poly(P[1], {{x_slot(0), Z->one()}}), MissingAssignment);
}

TEST_CASE("ghost map") {
    std::mt19937_64 rng(2);
    for (int p : {2, 3}) {
        const Ring* R = ring(p, 1, -1, 12);
        RingElem x = R->random(rng);
        GhostSeq g = ghost_map(tau(x, 4));
        uint64_t e = 1;
        for (int n = 0; n < 4; ++n, e *= p) CHECK(g[n] == x.pow(e));
        GhostSeq gv = ghost_map(versch(witt_one(R, 4)));
        CHECK(gv[0].is_zero());
        for (int n = 1; n < 4; ++n) CHECK(gv[n] == R->from_int(p));
        for (const auto& z : ghost_map(witt_zero(R, 4))) CHECK(z.is_zero());
        WittVec a = witt_random(R, 4, rng), b = witt_random(R, 4, rng);
        GhostSeq ga = ghost_map(a), gb = ghost_map(b), gs = ghost_map(witt_add(a, b)), gp = ghost_map(witt_mul(a, b));
        for (int n = 0; n < 4; ++n) {
            CHECK(gs[n] == ga[n] + gb[n]);
            CHECK(gp[n] == ga[n] * gb[n]);
        }
    }
}

TEST_CASE("ghost inversion") {
    std::mt19937_64 rng(4);
    const Ring* R = ring(3, 1, -1, 12);
    RingElem a = R->random(rng);
    GhostSolveInput in{R, ghost_map(tau(a, 4)), [](const RingElem& x) { return x; }, 4};
    WittVec t = ghost_invert(in);
    CHECK(t[0] == a);
    for (int n = 1; n < 4; ++n) CHECK(t[n].is_zero());

    GhostSolveInput pin{R, GhostSeq(3, R->from_int(3)), [](const RingElem& x) { return x; }, 3};
    WittVec d = ghost_invert(pin);
    CHECK(d[0] == R->from_int(3));
    CHECK(d[1] == R->from_int(1 - 9));

    WittVec w = witt_random(R, 4, rng);
    GhostSolveInput rin{R, ghost_map(w), nullptr, 4};
    WittVec back = ghost_invert(rin);
    for (int n = 0; n < 4; ++n) CHECK(back[n] == w[n]);

    GhostSolveInput bad{R, {R->one(), R->from_int(2)}, [](const RingElem& x) { return x; }, 2};
    CHECK_THROWS_AS(ghost_invert(bad), CongruenceFailure);
    GhostSolveInput low{R, GhostSeq(4, R->one()), nullptr, 1};
    CHECK_THROWS_AS(ghost_invert(low), PrecisionExhausted);
}

TEST_CASE("Delta") {
    const Ring* R = ring(2, 1, -1, 20);
    CHECK(delta(1, 4, R) == witt_one(R, 4));
    CHECK(delta(0, 4, R) == witt_zero(R, 4));
    for (int p : {2, 3, 5}) {
        auto d = delta_exact(p, 2, p);
        mpz_class pp;
        mpz_ui_pow_ui(pp.get_mpz_t(), p, p - 1);
        CHECK(d[0] == p);
        CHECK(d[1] == 1 - pp);
    }
    // ghost of Delta(x) is constant
    auto d = delta(12345, 5, R);
    for (const auto& g : ghost_map(d)) CHECK(g == R->from_int(12345));
    CHECK(witt_scalar(2, witt_one(R, 4)) == witt_add(witt_one(R, 4), witt_one(R, 4)));
    CHECK(delta(3, 4, R, 6)[3].prec() == 3);
}

TEST_CASE("Frobenius and Verschiebung") {
    std::mt19937_64 rng(7);
    for (const Ring* R : {ring(2, 1, -1, 10), ring(3, 1, -1, 8), ring(2, 2, -1, 1), ring(2, 1, 1, 10)}) {
        CAPTURE(R->spec().key());
        int p = R->p();
        for (int it = 0; it < 10; ++it) {
            WittVec a = witt_random(R, 4, rng), b = witt_random(R, 4, rng);
            RingElem x = R->random(rng);
            CHECK(frob(tau(x, 4)) == tau(x.pow(p), 3));
            CHECK(frob(versch(a)) == truncate_len(witt_scalar(p, a), 3));
            CHECK(witt_mul(versch(a), versch(b)) == witt_scalar(p, versch(witt_mul(a, b))));
            CHECK(versch(witt_mul(truncate_len(a, 3), frob(b))) == truncate_len(witt_mul(versch(a), b), 3));
            CHECK(versch(frob(a)) == truncate_len(witt_mul(versch(witt_one(R, 4)), a), 3));
            WittVec tx{R, {}};
            uint64_t e = 1;
            for (int n = 0; n < 4; ++n, e *= p) tx.c.push_back(x.pow(e) * a[n]);
            CHECK(witt_mul(tau(x, 4), a) == tx);
            RingElem y = R->random(rng);
            CHECK(tau(x * y, 4) == witt_mul(tau(x, 4), tau(y, 4)));
            GhostSeq gf = ghost_map(frob(a)), ga = ghost_map(a);
            auto shifted = ghost_shift(ga);
            for (int n = 0; n < 3; ++n) CHECK(gf[n] == shifted[n]);
            GhostSeq gv = ghost_map(versch(a)), vs = ghost_vshift(ga);
            for (int n = 0; n < 4; ++n) CHECK(gv[n] == vs[n]);
        }
    }
    const Ring* F4 = ring(2, 2, -1, 1);
    WittVec a = witt_random(F4, 4, rng);
    WittVec fa = frob(a);
    for (int n = 0; n < 3; ++n) CHECK(fa[n] == a[n].pow(2));
    CHECK(versch(witt_one(F4, 2)) == vec(F4, {0, 1}));
    CHECK_THROWS_AS(frob(witt_one(F4, 1)), TooShort);
}

TEST_CASE("Frobenius is a p-th power modulo pW") {
    std::mt19937_64 rng(8);
    for (int p : {2, 3}) {
        const Ring* R = ring(p, 1, -1, 16);
        for (int it = 0; it < 10; ++it) {
            WittVec a = witt_random(R, 4, rng);
            WittVec d = witt_sub(frob(a), truncate_len(pw(a), 3));
            // c with p*c = d, found through ghost components
            GhostSeq g = ghost_map(d);
            for (auto& x : g) x = x.exact_div_p(1);
            WittVec c = ghost_invert(GhostSolveInput{R, g, nullptr, 3});
            CHECK(witt_scalar(p, c) == d);
        }
    }
}

TEST_CASE("series development and truncation") {
    std::mt19937_64 rng(9);
    for (const Ring* R : {ring(2, 1, -1, 10), ring(3, 1, -1, 8), ring(2, 2, -1, 1)}) {
        WittVec a = witt_random(R, 4, rng), b = witt_random(R, 4, rng);
        WittVec sum = witt_zero(R, 4);
        for (size_t n = 0; n < 4; ++n) sum = witt_add(sum, versch(tau(a[n], 4), n));
        CHECK(sum == a);
        CHECK(truncate_len(witt_add(a, b), 2) == witt_add(truncate_len(a, 2), truncate_len(b, 2)));
        CHECK(truncate_len(witt_mul(a, b), 2) == witt_mul(truncate_len(a, 2), truncate_len(b, 2)));
        CHECK(truncate_len(versch(a, 2), 2) == witt_zero(R, 2));
    }
}

TEST_CASE("Witt ideals multiply") {
    std::mt19937_64 rng(10);
    const Ring* R = ring(2, 1, 1, 12);
    for (int v = 1; v < 4; ++v) {
        for (int w = 1; w < 4; ++w) {
            WittVec a{R, {}}, b{R, {}};
            for (int i = 0; i < 4; ++i) {
                a.c.push_back(R->random_in_ideal(rng, v));
                b.c.push_back(R->random_in_ideal(rng, w));
            }
            CHECK(witt_mul(a, b).valuation() >= v + w);
        }
    }
}

TEST_CASE("functoriality") {
    std::mt19937_64 rng(11);
    const Ring* Z = ring(3, 1, -1, 2);
    const Ring* F = Z->residue_field();
    auto red = [F](const RingElem& x) { return x.residue(); };
    for (int it = 0; it < 10; ++it) {
        WittVec a = witt_random(Z, 4, rng), b = witt_random(Z, 4, rng);
        CHECK(witt_map(red, F, frob(a)) == frob(witt_map(red, F, a)));
        CHECK(witt_map(red, F, witt_mul(a, b)) == witt_mul(witt_map(red, F, a), witt_map(red, F, b)));
        WittVec k{Z, {}};
        for (int i = 0; i < 4; ++i) k.c.push_back(Z->random_in_ideal(rng, 1));
        CHECK(witt_map(red, F, k) == witt_zero(F, 4));
    }
}

TEST_CASE("ghost transport beyond the universal range") {
    std::mt19937_64 rng(12);
    const Ring* R = ring(2, 1, -1, 40);
    WittVec a = witt_random(R, 7, rng), b = witt_random(R, 7, rng);
    WittVec s = witt_add(a, b), m = witt_mul(a, b);
    CHECK(truncate_len(s, 5) == witt_add(truncate_len(a, 5), truncate_len(b, 5)));
    CHECK(truncate_len(m, 5) == witt_mul(truncate_len(a, 5), truncate_len(b, 5)));
    CHECK(s[6].prec() == R->cap() - 6);
    CHECK(truncate_len(frob(a), 4) == frob(truncate_len(a, 5)));
}

TEST_CASE("trace and Teichmuller lift") {
    const Ring* F2 = ring(2, 1, -1, 1);
    const Ring* F4 = ring(2, 2, -1, 1);
    const Ring* F16 = ring(2, 4, -1, 1);
    std::mt19937_64 rng(13);
    WittVec y = witt_random(F4, 2, rng);
    CHECK(witt_trace(y, 2, 1) == y);
    for (uint64_t u = 0; u < 4; ++u) {
        for (uint64_t v = 0; v < 4; ++v) {
            WittVec z{F2, {fq_element(F2, u % 2), fq_element(F2, v % 2)}};
            WittVec zz = embed_fq(z, F4);
            CHECK(witt_trace(zz, 1, 2) == witt_add(z, z));
            WittVec t{F4, {fq_element(F4, u), F4->zero()}};
            RingElem tr = fq_element(F4, u) + fq_element(F4, u).pow(2);
            CHECK(embed_fq(witt_trace(t, 1, 2)[0], F4) == tr);
        }
    }
    for (uint64_t u = 0; u < 16; ++u) {
        WittVec t{F16, {fq_element(F16, u), fq_element(F16, (u * 7) % 16)}};
        CHECK(witt_trace(t, 2, 2).R == F4);
    }

    const Ring* W = ring(2, 2, -1, 10);
    CHECK(te_lift(witt_zero(F4, 2), W, 3) == witt_zero(W, 3));
    auto red = [F4](const RingElem& x) { return x.residue(); };
    for (int it = 0; it < 10; ++it) {
        WittVec a = witt_random(F4, 2, rng), b = witt_random(F4, 2, rng);
        WittVec ta = te_lift(a, W, 2);
        CHECK(witt_map(red, F4, ta) == a);
        WittVec d = witt_sub(te_lift(witt_add(a, b), W, 3), witt_add(te_lift(a, W, 3), te_lift(b, W, 3)));
        CHECK(d[0].valuation() >= 1);
        CHECK(d[1].valuation() >= 1);
    }
}

TEST_CASE("ghost sequence shifts") {
    const Ring* Z = ring(3, 1, -1, 6);
    GhostSeq u{Z->from_int(1), Z->from_int(2), Z->from_int(3)};
    GhostSeq f = ghost_shift(u);
    CHECK(f.size() == 2);
    CHECK(f[0] == Z->from_int(2));
    GhostSeq v = ghost_vshift(GhostSeq{Z->one(), Z->one()});
    CHECK(v.size() == 3);
    CHECK(v[0].is_zero());
    CHECK(v[1] == Z->from_int(3));
    CHECK(v[2] == Z->from_int(3));
}

TEST_CASE("json") {
    std::mt19937_64 rng(14);
    const Ring* R = ring(2, 2, 1, 8);
    WittVec a = witt_random(R, 3, rng);
    CHECK(WittVec::from_json(R, a.to_json()) == a);
}
