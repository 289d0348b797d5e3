#include <doctest.h>

#include <fstream>

#include "wittlab/errors.hpp"
#include "wittlab/gauss.hpp"

using namespace wittlab;

namespace {

CharParams params(int p, int s, int D = 0) {
    CharParams P;
    P.p = p;
    P.s = s;
    P.F = LubinTate::cyclotomic(p);
    P.D = D;
    return P;
}

TruncSeries2 random_series(const Ring* R, int D, std::mt19937_64& rng) {
    TruncSeries2 H(R, D);
    for (int k = 0; k <= D; ++k)
        for (int n1 = 0; n1 <= k; ++n1) H.at(k - n1, n1) = R->random(rng);
    return H;
}

}  // namespace

TEST_CASE("Dwork operator") {
    const Ring* R = Ring::make(RingSpec{2, 2, 1, LubinTate::cyclotomic(2), 16});
    for (uint64_t q : {2u, 3u, 4u}) {
        CHECK(dwork_op(TruncSeries2::one(R, 20), q) == TruncSeries2::one(R, 20 / static_cast<int>(q)));
        int qi = static_cast<int>(q);
        CHECK(dwork_op(TruncSeries2::monomial(R->one(), qi, qi, 20), q) == TruncSeries2::monomial(R->one(), 1, 1, 20 / qi));
        CHECK(dwork_op(TruncSeries2::monomial(R->one(), qi + 1, qi, 20), q) == TruncSeries2(R, 20 / qi));
    }
    std::mt19937_64 rng(2);
    for (int it = 0; it < 10; ++it) {
        TruncSeries2 a = random_series(R, 16, rng), b = random_series(R, 16, rng);
        RingElem c = R->random(rng);
        CHECK(dwork_op(a + b.scaled(c), 4) == dwork_op(a, 4) + dwork_op(b, 4).scaled(c));
        TruncSeries2 sm = a.scaled(R->pi().pow(static_cast<uint64_t>(it % 4)));
        CHECK(dwork_op(sm, 4).min_valuation() >= sm.min_valuation());
    }
}

TEST_CASE("trace of alpha on simple kernels") {
    const Ring* R = Ring::make(RingSpec{3, 1, 1, LubinTate::cyclotomic(3), 10});
    std::mt19937_64 rng(8);
    for (uint64_t q : {2u, 3u}) {
        RingElem c = R->random(rng);
        CHECK(alpha_trace(TruncSeries2::monomial(c, 0, 0, 30), q, 6).value == c.with_prec(6));
        int d = static_cast<int>(q - 1);
        CHECK(alpha_trace(TruncSeries2::monomial(R->one(), d, d, 30), q, 6).value == R->one());
        if (q > 2) CHECK(alpha_trace(TruncSeries2::monomial(R->one(), d + 1, d, 30), q, 6).value == R->zero());
    }
    // a flat tail is refused
    TruncSeries2 flat(R, 30);
    for (int k = 0; k <= 30; ++k) flat.at(k, 0) = R->one();
    CHECK_THROWS_AS(alpha_trace(flat, 2, 6), TailNotCertified);
}

TEST_CASE("alpha matrix") {
    const Ring* R = Ring::make(RingSpec{2, 1, 1, LubinTate::cyclotomic(2), 16});
    std::mt19937_64 rng(4);
    const uint64_t q = 2;
    const int cutoff = 6, D = 12;
    Matrix I = alpha_matrix(TruncSeries2::one(R, D), q, cutoff);
    for (int k = 0; k <= cutoff; ++k)
        for (int m1 = 0; m1 <= k; ++m1)
            for (int j = 0; j <= cutoff; ++j)
                for (int n1 = 0; n1 <= j; ++n1) {
                    bool hit = 2 * (k - m1) == j - n1 && 2 * m1 == n1;
                    CHECK(I[TruncSeries2::index(k - m1, m1)][TruncSeries2::index(j - n1, n1)] == (hit ? R->one() : R->zero()));
                }
    CHECK_THROWS_AS(alpha_matrix(TruncSeries2::one(R, D), q, cutoff + 1), InvalidArgument);
    TruncSeries2 H = random_series(R, D, rng);
    Matrix A = alpha_matrix(H, q, cutoff);
    CHECK(matrix_trace(A) == alpha_trace_partial(H, q, cutoff));
    // column n against Dw_q(H x^n)
    for (int n0 = 0; n0 <= cutoff; ++n0)
        for (int n1 = 0; n0 + n1 <= cutoff; ++n1) {
            TruncSeries2 img = alpha_apply(H, TruncSeries2::monomial(R->one(), n0, n1, D), q);
            size_t c = TruncSeries2::index(n0, n1);
            for (int k = 0; k <= cutoff; ++k)
                for (int m1 = 0; m1 <= k; ++m1) CHECK(A[TruncSeries2::index(k - m1, m1)][c] == img.at(k - m1, m1));
        }
    // random G below the cutoff
    TruncSeries2 G(R, D);
    for (int k = 0; k <= cutoff; ++k)
        for (int n1 = 0; n1 <= k; ++n1) G.at(k - n1, n1) = R->random(rng);
    TruncSeries2 img = alpha_apply(H, G, q);
    for (size_t r = 0; r < A.size(); ++r) {
        RingElem acc = R->zero();
        for (int k = 0; k <= cutoff; ++k)
            for (int n1 = 0; n1 <= k; ++n1) acc += A[r][TruncSeries2::index(k - n1, n1)] * G.at(k - n1, n1);
        int k = 0;
        while (TruncSeries2::index(k + 1, 0) <= r) ++k;
        int m1 = static_cast<int>(r - TruncSeries2::index(k, 0));
        CHECK(acc == img.at(k - m1, m1));
    }
}

TEST_CASE("sums over the Teichmuller roots of unity") {
    for (const Ring* R : {Ring::make(RingSpec{2, 1, 1, LubinTate::cyclotomic(2), 16}),
                          Ring::make(RingSpec{3, 1, 1, LubinTate::cyclotomic(3), 10}),
                          Ring::make(RingSpec{2, 2, 1, LubinTate::cyclotomic(2), 16})}) {
        uint64_t qm1 = R->q() - 1;
        for (uint64_t n = 0; n <= 3 * qm1 + 1; ++n)
            CHECK(root_power_sum(R, n) == (n % qm1 == 0 ? R->from_int(static_cast<long>(qm1)) : R->zero()));
        std::mt19937_64 rng(31);
        for (int it = 0; it < 5; ++it) {
            TruncSeries2 H = random_series(R, 12, rng);
            CHECK(teichmuller_grid_sum(H) ==
                  alpha_trace_partial(H, R->q(), 12).scaled_mod(qm1 * qm1 % R->modulus()));
        }
    }
}

TEST_CASE("analytic kernel") {
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}}) {
        CharContext ctx(params(p, s));
        const Ring* R = ctx.ring();
        uint64_t q = ctx.q();
        CharacterTable T = character_table(ctx, PsiRoute::omega, 4);
        for (uint64_t m = 0; m + 2 <= q; ++m)
            for (uint64_t b = 0; b < q; ++b) {
                TruncSeries2 H = kernel_H(ctx, m, b);
                CHECK(H.at(0, 0) == (m == 0 ? R->from_int(-1) : R->zero()));
                // termwise against -psi chi at Teichmuller points
                for (uint64_t row = q; row < q * q; ++row) {
                    WittVec z = ctx.vector_at(row);
                    RingElem v = series2_eval_unit(H, teichmuller(z[0], R), teichmuller(z[1], R), ctx.snap_prec());
                    RingElem expect = -(ctx.roots().roots[T.rows[row].psi_index] * ctx.chi(m, b, z));
                    CHECK((v - expect).valuation() >= ctx.snap_prec());
                }
            }
        TruncSeries2 H0 = kernel_H(ctx, 0, 0);
        for (int n = 0; n <= ctx.params().D; ++n) CHECK(H0.at(n, 0) == -ctx.omega()[0][n]);
        CHECK_THROWS_AS(kernel_H(ctx, 0, 0, ctx.params().D + 1), TruncationTooSmall);
    }
    CharContext ctx(params(2, 2, 24));
    CHECK_THROWS_AS(kernel_H(ctx, 2, 1, 4), TruncationTooSmall);
}

TEST_CASE("brute-force Gauss sums") {
    CharContext ctx(params(2, 1));
    // trivial psi and trivial chi count the domain
    CharacterTable triv = character_table(ctx);
    for (auto& r : triv.rows) r.psi_index = 0;
    uint64_t q = ctx.q();
    CHECK(gauss_brute(ctx, triv, 0, 0, Convention::full) == ctx.ring()->from_int(-static_cast<long>(q * (q - 1))));
    CHECK(gauss_brute(ctx, triv, 0, 0, Convention::units) == ctx.ring()->from_int(-static_cast<long>((q - 1) * (q - 1))));

    std::ifstream in(std::string(WITTLAB_GOLDEN_DIR) + "/gauss_p2_s1.json");
    REQUIRE(in.good());
    nlohmann::json gold = nlohmann::json::parse(in);
    for (const auto& v : gold["values"]) {
        Convention c = v["convention"] == "full" ? Convention::full : Convention::units;
        RingElem g = gauss_brute(ctx, v["m"].get<uint64_t>(), v["b"].get<uint64_t>(), c);
        CHECK(g.identical(RingElem::from_json(ctx.ring(), v["g"])));
    }

    // chi and its inverse give sums of the same valuation
    for (auto [p, s] : std::vector<std::pair<int, int>>{{3, 1}, {2, 2}}) {
        CharContext cx(params(p, s));
        uint64_t qq = cx.q();
        CharacterTable T = character_table(cx, PsiRoute::omega, 4);
        const Ring* F = cx.residue();
        for (uint64_t m = 0; m + 2 <= qq; ++m)
            for (uint64_t b = 0; b < qq; ++b) {
                uint64_t mi = (qq - 1 - m) % (qq - 1);
                uint64_t bi = fq_index(-fq_element(F, b));
                for (uint64_t row = qq; row < qq * qq; ++row) {
                    WittVec z = cx.vector_at(row);
                    CHECK(cx.chi(m, b, z) * cx.chi(mi, bi, z) == cx.ring()->one());
                }
                for (Convention c : {Convention::full, Convention::units})
                    CHECK(gauss_brute(cx, T, m, b, c).valuation() == gauss_brute(cx, T, mi, bi, c).valuation());
            }
    }
}

TEST_CASE("trace formula at p = 2") {
    for (int s : {1, 2}) {
        CharContext ctx(params(2, s));
        CharacterTable T = character_table(ctx, PsiRoute::omega, 4);
        for (uint64_t m = 0; m + 2 <= ctx.q(); ++m)
            for (uint64_t b = 0; b < ctx.q(); ++b) {
                TraceReport r = trace_formula_check(ctx, T, m, b);
                CHECK(r.residual_units >= ctx.M());
                CHECK(r.matching == std::vector<std::string>{"units"});
            }
    }
}

TEST_CASE("trace formula at p = 3 needs more than degree 128") {
    CharParams P = params(3, 1, 128);
    CharContext ctx(P);
    CHECK_THROWS_AS(trace_formula_check(ctx, 0, 0), TailNotCertified);
    P.D = 243;
    for (uint64_t t : {1u, 2u}) {
        P.t_residue = t;
        CharContext big(P);
        CharacterTable T = character_table(big, PsiRoute::omega, 4);
        for (uint64_t m = 0; m < 2; ++m)
            for (uint64_t b = 0; b < 3; ++b) CHECK(trace_formula_check(big, T, m, b).residual_units >= big.M());
    }
}
