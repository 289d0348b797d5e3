#include <doctest.h>

#include <set>

#include "wittlab/characters.hpp"
#include "wittlab/errors.hpp"

using namespace wittlab;

namespace {

QSeries qmul(const QSeries& a, const QSeries& b, int D) {
    QSeries r(D + 1, 0);
    for (int i = 0; i <= D && i < static_cast<int>(a.size()); ++i)
        for (int j = 0; i + j <= D && j < static_cast<int>(b.size()); ++j) r[i + j] += a[i] * b[j];
    return r;
}

QSeries qcompose(const QSeries& outer, const QSeries& inner, int D) {
    QSeries r(D + 1, 0), pw(D + 1, 0);
    pw[0] = 1;
    for (size_t k = 0; k < outer.size() && static_cast<int>(k) <= D; ++k) {
        for (int n = 0; n <= D; ++n) r[n] += outer[k] * pw[n];
        pw = qmul(pw, inner, D);
    }
    return r;
}

CharParams params(int p, int s, int ell, LubinTate F = LubinTate::cyclotomic(2)) {
    CharParams P;
    P.p = p;
    P.s = s;
    P.ell = ell;
    P.F = F.name == "cyc" ? LubinTate::cyclotomic(p) : F;
    return P;
}

}  // namespace

TEST_CASE("Lubin-Tate to cyclotomic isomorphism") {
    for (int p : {2, 3}) {
        const int D = 16;
        QSeries u = lt_to_cyclotomic(LubinTate::cyclotomic(p), p, D);
        QSeries T(D + 1, 0);
        T[1] = 1;
        CHECK(u == T);
        for (LubinTate F : {LubinTate::plain(), LubinTate::custom({p == 2 ? 0L : 1L})}) {
            if (p == 2 && !F.G.empty()) continue;
            QSeries v = lt_to_cyclotomic(F, p, D);
            QSeries Fq;
            for (const auto& c : F.F_coeffs(p)) Fq.push_back(mpq_class(c));
            QSeries C(p + 1, 0);
            for (int j = 1; j <= p; ++j) {
                mpz_class b;
                mpz_bin_uiui(b.get_mpz_t(), p, j);
                C[j] = b;
            }
            CHECK(qcompose(v, Fq, D) == qcompose(C, v, D));
            for (const auto& c : v) CHECK(!mpz_divisible_ui_p(c.get_den().get_mpz_t(), p));
        }
    }
}

TEST_CASE("roots of unity of p-power order") {
    for (LubinTate F : {LubinTate::cyclotomic(2), LubinTate::plain()}) {
        for (auto [p, ell] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}, {2, 3}}) {
            LubinTate G = F.name == "cyc" ? LubinTate::cyclotomic(p) : F;
            const Ring* R = Ring::make(RingSpec{p, 1, ell - 1, G, p == 2 ? 20 : 12});
            CAPTURE(R->spec().key());
            RootTable T = mu_ppow_table(ell, R);
            uint64_t order = 1;
            for (int i = 0; i < ell; ++i) order *= static_cast<uint64_t>(p);
            CHECK(T.roots.size() == order);
            CHECK(T.roots[0] == R->one());
            for (const auto& z : T.roots) CHECK(z.pow(order) == R->one());
            for (size_t k = 1; k < T.roots.size(); ++k) {
                // exact order p^r gives v(zeta - 1) = e / (p^{r-1}(p-1))
                uint64_t o = order / std::gcd<uint64_t>(k, order);
                int r = 0;
                for (uint64_t x = o; x > 1; x /= static_cast<uint64_t>(p)) ++r;
                int denom = p - 1;
                for (int i = 1; i < r; ++i) denom *= p;
                CHECK((T.roots[k] - R->one()).valuation() == R->e() / denom);
            }
            // zeta^{p^{ell-1}} is a root of 1 + x + ... + x^{p-1}
            RingElem w = T.roots[order / static_cast<uint64_t>(p)], acc = R->zero(), pw = R->one();
            for (int i = 0; i < p; ++i, pw = pw * w) acc += pw;
            CHECK(acc.is_zero());
            if (G.name == "cyc") CHECK(T.roots[1] == R->one() + R->pi_level(ell - 1));
        }
    }
}

TEST_CASE("snapping refuses ambiguous values") {
    const Ring* R = Ring::make(RingSpec{2, 1, 1, LubinTate::cyclotomic(2), 20});
    RootTable T = mu_ppow_table(2, R);
    CHECK(T.vmax_pairwise == 2);
    CHECK(T.snap(T.roots[3]).index == 3);
    CHECK(T.snap(T.roots[1] + R->pi().pow(5)).index == 1);
    CHECK_THROWS_AS(T.snap(R->one() + R->pi().pow(3)), SnapAmbiguous);
    CHECK_THROWS_AS(T.snap(T.roots[2] + R->pi().pow(4)), SnapAmbiguous);
}

TEST_CASE("choice of t and its trace") {
    CHECK(default_t_residue(2, 1) == 1);
    CHECK(default_t_residue(3, 1) == 1);
    const Ring* R = Ring::make(RingSpec{3, 2, 1, LubinTate::cyclotomic(3), 10});
    const Ring* F9 = R->residue_field();
    int nondeg = 0;
    for (uint64_t u = 0; u < 9; ++u) {
        RingElem t = teichmuller(fq_element(F9, u), R);
        CHECK(trace_galois(t) == trace_powers(t));
        bool nd = trace_galois(t).is_unit();
        CHECK(nd == !trace_powers(fq_element(F9, u)).is_zero());
        nondeg += nd;
    }
    CHECK(nondeg == 6);
}

TEST_CASE("counting the roots near 1 + t pi") {
    for (auto [p, s, ell, expect] :
         std::vector<std::tuple<int, int, int, int>>{{2, 1, 1, 1}, {3, 1, 1, 1}, {2, 1, 2, 2}, {3, 1, 2, 3}, {2, 1, 3, 4}}) {
        CharParams P = params(p, s, ell);
        P.D = 32;
        CharContext ctx(P);
        CHECK(ctx.count_E_t_ell() == expect);
    }
    // every t of F_p, including 0, and an F_p-valued t inside a larger ring
    for (int p : {2, 3})
        for (uint64_t u = 1; u < static_cast<uint64_t>(p); ++u) {
            CharParams P = params(p, 1, 2);
            P.D = 32;
            P.t_residue = u;
            CHECK(CharContext(P).count_E_t_ell() == p);
        }
    CharParams P = params(2, 2, 2);
    P.D = 32;
    CHECK_THROWS_AS(CharContext(P).count_E_t_ell(), InvalidArgument);
}

TEST_CASE("local expansions at level ell - 1") {
    std::mt19937_64 rng(17);
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
        const Ring* R = Ring::make(RingSpec{p, s, 1, LubinTate::cyclotomic(p), p == 2 ? 24 : 16});
        int D = p == 2 ? 128 : 96;
        TruncSeries1 th = pulita_theta(1, witt_one(R, 1), D);
        TruncSeries1 ths = pulita_theta_ms(1, s, witt_one(R, 1), D);
        for (int it = 0; it < 20; ++it) {
            RingElem z = R->random(rng);
            RingElem pi = R->pi();
            CHECK((series_eval_unit(th, z, 2) - (R->one() + pi * z)).valuation() >= 2);
            RingElem sum = R->zero(), zp = z;
            for (int j = 0; j < s; ++j, zp = zp.pow(static_cast<uint64_t>(p))) sum += zp;
            CHECK((series_eval_unit(ths, z, 2) - (R->one() + pi * sum)).valuation() >= 2);
        }
    }
}

TEST_CASE("additive characters") {
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}}) {
        CharContext ctx(params(p, s, 2));
        CAPTURE(ctx.ring()->spec().key());
        CHECK(ctx.nondegenerate());
        CharacterTable T = character_table(ctx, PsiRoute::omega, 4);
        CHECK(T.rows.size() == ctx.q() * ctx.q());
        CHECK(T.rows[0].psi_index == 0);
        CharacterChecks c = check_character(ctx, T);
        CHECK(c.homomorphism);
        CHECK(c.full_image);
        CHECK(c.separates_points);
        CHECK(c.trace_routes_agree);
        // theta of the Teichmuller lift against the splitting function
        CharacterTable Td = character_table(ctx, PsiRoute::direct, 4);
        for (size_t i = 0; i < T.rows.size(); ++i) CHECK(Td.rows[i].psi_index == T.rows[i].psi_index);
        // first order: psi(y_0, 0) = 1 + pi sum (Teich(y0) t)^{p^j} mod pi^2
        const Ring* R = ctx.ring();
        for (uint64_t u = 0; u < ctx.q(); ++u) {
            WittVec y = ctx.vector_at(u * ctx.q());
            RingElem x = teichmuller(y[0], R) * ctx.t(), sum = R->zero();
            for (int j = 0; j < s; ++j, x = x.pow(static_cast<uint64_t>(p))) sum += x;
            CHECK((ctx.roots().roots[T.rows[u * ctx.q()].psi_index] - R->one() - R->pi() * sum).valuation() >= 2);
        }
    }
}

TEST_CASE("psi ignores lifts by the maximal ideal") {
    std::mt19937_64 rng(23);
    CharContext ctx(params(2, 1, 2));
    const Ring* R = ctx.ring();
    for (uint64_t row = 0; row < ctx.domain_size(); ++row) {
        WittVec y = ctx.vector_at(row);
        WittVec a = te_lift(y, R, 2);
        for (auto& c : a.c) c = c + R->random_in_ideal(rng, 1);
        CHECK(ctx.roots().snap(ctx.theta_value(a)).index == ctx.psi(y).index);
    }
}

TEST_CASE("a degenerate t is flagged") {
    CharParams P = params(3, 2, 2);
    const Ring* F9 = Ring::make(RingSpec{3, 2, -1, LubinTate::plain(), 1});
    for (uint64_t u = 1; u < 9; ++u)
        if (trace_powers(fq_element(F9, u)).is_zero()) {
            P.t_residue = u;
            break;
        }
    P.D = 48;
    CharContext ctx(P);
    CHECK_FALSE(ctx.nondegenerate());
}

TEST_CASE("multiplicative characters of W_2(F_q)") {
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}}) {
        CharContext ctx(params(p, s, 2));
        const Ring* R = ctx.ring();
        uint64_t q = ctx.q();
        std::vector<WittVec> units;
        for (uint64_t row = q; row < q * q; ++row) units.push_back(ctx.vector_at(row));
        for (const auto& z : units) CHECK(ctx.chi(0, 0, z) == R->one());
        for (uint64_t m = 0; m + 2 <= q; ++m)
            for (uint64_t b = 0; b < q; ++b) {
                for (const auto& z : units) {
                    RingElem c = ctx.chi(m, b, z);
                    if (b == 0) CHECK(c == teichmuller(z[0], R).pow(m));
                    for (const auto& w : units) CHECK(ctx.chi(m, b, witt_mul(z, w)) == c * ctx.chi(m, b, w));
                }
            }
        CHECK_THROWS_AS(ctx.chi(0, 0, ctx.vector_at(1)), NotUnit);
    }
}

TEST_CASE("splitting functions and transitivity") {
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}}) {
        CharContext ctx(params(p, s, 2));
        SplittingReport r1 = check_splitting(ctx, 1, 4);
        CHECK(r1.transitivity);
        SplittingReport r2 = check_splitting(ctx, 2, 4);
        CHECK(r2.vectors == ctx.q() * ctx.q() * ctx.q() * ctx.q());
        CHECK(r2.product_formula);
        CHECK(r2.transitivity);
    }
}

TEST_CASE("factorization of the splitting function") {
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}})
        CHECK(check_omega_factorization(params(p, s, 2), 2, 32));
    CharParams P = params(2, 1, 2);
    const Ring* R = Ring::make(RingSpec{2, 1, 1, LubinTate::cyclotomic(2), 24});
    TruncSeries2 om = omega2(R, 1, R->one(), 16);
    CHECK(om.at(0, 0) == R->one());
}
