#include "wittlab/gauss.hpp"

#include <chrono>
#include <sstream>

#include "wittlab/errors.hpp"

namespace wittlab {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int residual(const RingElem& a, const RingElem& b, int M) {
    RingElem d = a - b;
    return std::min({d.valuation(), d.prec(), M});
}

}  // namespace

std::string convention_name(Convention c) { return c == Convention::full ? "full" : "units"; }

RingElem gauss_brute(const CharContext& ctx, const CharacterTable& psi, uint64_t m, uint64_t b, Convention conv) {
    if (ctx.params().ell != 2) throw InvalidArgument("Gauss sums are over W_2(F_q)");
    if (psi.rows.size() != ctx.domain_size()) throw InvalidArgument("character table does not cover W_2(F_q)");
    const Ring* R = ctx.ring();
    uint64_t q = ctx.q();
    RingElem acc = R->zero();
    for (uint64_t z0 = 1; z0 < q; ++z0)
        for (uint64_t z1 = conv == Convention::full ? 0 : 1; z1 < q; ++z1) {
            uint64_t row = z0 * q + z1;
            WittVec z = ctx.vector_at(row);
            acc += ctx.roots().roots[psi.rows[row].psi_index] * ctx.chi(m, b, z);
        }
    return -acc;
}

RingElem gauss_brute(const CharContext& ctx, uint64_t m, uint64_t b, Convention conv) {
    return gauss_brute(ctx, character_table(ctx), m, b, conv);
}

TruncSeries2 kernel_H(const CharContext& ctx, uint64_t m, uint64_t b, int D) {
    const CharParams& P = ctx.params();
    if (P.ell != 2) throw InvalidArgument("the kernel is defined for ell = 2");
    if (D <= 0) D = P.D;
    if (D > P.D) throw TruncationTooSmall("kernel degree above the series degree of the context");
    uint64_t q = ctx.q();
    if (m > q - 2 || b >= q) throw InvalidArgument("chi parameters out of range");
    long step0 = static_cast<long>(P.p) * static_cast<long>(q - 2);
    if (static_cast<long>(m) + step0 + 1 > D)
        throw TruncationTooSmall("x0^" + std::to_string(m + step0) + " x1 does not fit in total degree " + std::to_string(D));
    const Ring* R = ctx.ring();
    TruncSeries2 om = TruncSeries2::outer(ctx.omega()[0].truncated(D), ctx.omega()[1].truncated(D), D);
    RingElem Tb = teichmuller(fq_element(ctx.residue(), b), R);
    TruncSeries2 K(R, D);
    RingElem tb = R->one();
    for (long k = 0; static_cast<long>(m) + k * step0 + k <= D; ++k) {
        K.at(static_cast<int>(m + k * step0), static_cast<int>(k)) = ctx.omega1()[static_cast<int>(k)] * tb;
        tb = tb * Tb;
    }
    return (om * K).scaled(R->from_int(-1));
}

TruncSeries2 dwork_op(const TruncSeries2& G, uint64_t q) {
    if (q < 2) throw InvalidArgument("q must be at least 2");
    int D = G.degree() / static_cast<int>(q);
    TruncSeries2 r(G.ring(), D);
    int qi = static_cast<int>(q);
    for (int n0 = 0; n0 <= D; ++n0)
        for (int n1 = 0; n0 + n1 <= D; ++n1) r.at(n0, n1) = G.at(qi * n0, qi * n1);
    return r;
}

TruncSeries2 alpha_apply(const TruncSeries2& H, const TruncSeries2& G, uint64_t q) { return dwork_op(H * G, q); }

AlphaTrace alpha_trace(const TruncSeries2& H, uint64_t q, int M) {
    int d = static_cast<int>(q - 1);
    AlphaTrace out;
    out.shells = H.degree() / d;
    std::vector<int> vals(out.shells + 1, kInf);
    const Ring* R = H.ring();
    RingElem acc = R->zero();
    for (int k = 0; k <= out.shells; ++k)
        for (int n1 = 0; n1 <= k; ++n1) {
            const RingElem& c = H.at(d * (k - n1), d * n1);
            vals[k] = std::min(vals[k], std::min(c.valuation(), c.prec()));
            acc += c;
        }
    try {
        out.cert = certify_tail(vals, M);
    } catch (const TailNotCertified& e) {
        std::string msg = e.what();
        msg = msg.substr(msg.find(": ") + 2);
        throw TailNotCertified(msg + " (all indices, the estimate included, count diagonal shells; shell k sits at total degree " +
                               std::to_string(d) + "k, truncation " + std::to_string(H.degree()) + ")");
    }
    if (acc.prec() < M) throw PrecisionNotReached("diagonal sum known to " + std::to_string(acc.prec()) + " digits");
    out.value = acc.with_prec(M);
    return out;
}

RingElem alpha_trace_partial(const TruncSeries2& H, uint64_t q, int cutoff) {
    int d = static_cast<int>(q - 1);
    RingElem acc = H.ring()->zero();
    for (int k = 0; k <= cutoff && d * k <= H.degree(); ++k)
        for (int n1 = 0; n1 <= k; ++n1) acc += H.at(d * (k - n1), d * n1);
    return acc;
}

Matrix alpha_matrix(const TruncSeries2& H, uint64_t q, int cutoff) {
    int qi = static_cast<int>(q);
    if (cutoff < 0 || static_cast<long>(cutoff) * qi > H.degree())
        throw InvalidArgument("alpha_matrix needs cutoff * q <= D");
    size_t n = TruncSeries2::size_for(cutoff);
    std::vector<std::pair<int, int>> basis(n);
    for (int k = 0; k <= cutoff; ++k)
        for (int n1 = 0; n1 <= k; ++n1) basis[TruncSeries2::index(k - n1, n1)] = {k - n1, n1};
    Matrix A(n, std::vector<RingElem>(n, H.ring()->zero()));
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) {
            int i0 = qi * basis[r].first - basis[c].first, i1 = qi * basis[r].second - basis[c].second;
            if (i0 < 0 || i1 < 0) continue;
            A[r][c] = H.at(i0, i1);
        }
    return A;
}

RingElem matrix_trace(const Matrix& A) {
    if (A.empty()) throw InvalidArgument("empty matrix");
    RingElem acc = A[0][0].ring()->zero();
    for (size_t i = 0; i < A.size(); ++i) acc += A[i][i];
    return acc;
}

RingElem root_power_sum(const Ring* R, uint64_t n) {
    const Ring* Fq = R->residue_field();
    RingElem acc = R->zero();
    for (uint64_t u = 1; u < Fq->q(); ++u) acc += teichmuller(fq_element(Fq, u), R).pow(n);
    return acc;
}

RingElem teichmuller_grid_sum(const TruncSeries2& H) {
    const Ring* R = H.ring();
    const Ring* Fq = R->residue_field();
    std::vector<RingElem> mu;
    for (uint64_t u = 1; u < Fq->q(); ++u) mu.push_back(teichmuller(fq_element(Fq, u), R));
    RingElem acc = R->zero();
    for (const auto& x0 : mu)
        for (const auto& x1 : mu) acc += H.eval_partial(x0, x1);
    return acc;
}

nlohmann::json TraceReport::to_json() const {
    nlohmann::json j;
    j["p"] = p;
    j["s"] = s;
    j["t"] = t_residue;
    j["chi"] = {{"m", m}, {"b", b}};
    j["D"] = D;
    j["M"] = M;
    j["convention"] = matching;
    j["g_brute"] = {{"full", g_full.to_json()}, {"units", g_units.to_json()}};
    j["trace_value"] = trace_value.to_json();
    j["rhs"] = rhs.to_json();
    j["residual_valuation"] = {{"full", residual_full}, {"units", residual_units}};
    j["certificate"] = {{"window_begin", cert.window_begin}, {"v_mid", cert.vA}, {"v_last", cert.vB}, {"slope", cert.slope}};
    j["timing_ms"] = {{"brute", brute_ms}, {"trace", trace_ms}};
    return j;
}

TraceReport trace_formula_check(const CharContext& ctx, const CharacterTable& psi, uint64_t m, uint64_t b) {
    const CharParams& P = ctx.params();
    TraceReport rep;
    rep.p = P.p;
    rep.s = P.s;
    rep.t_residue = P.t_residue;
    rep.m = m;
    rep.b = b;
    rep.D = P.D;
    rep.M = P.M;
    auto t0 = std::chrono::steady_clock::now();
    rep.g_full = gauss_brute(ctx, psi, m, b, Convention::full);
    rep.g_units = gauss_brute(ctx, psi, m, b, Convention::units);
    rep.brute_ms = elapsed_ms(t0);
    t0 = std::chrono::steady_clock::now();
    TruncSeries2 H = kernel_H(ctx, m, b);
    AlphaTrace at = alpha_trace(H, ctx.q(), P.M);
    rep.trace_ms = elapsed_ms(t0);
    rep.cert = at.cert;
    rep.trace_value = at.value;
    long qm1 = static_cast<long>(ctx.q() - 1);
    rep.rhs = at.value * ctx.ring()->from_int(qm1 * qm1);
    rep.residual_full = residual(rep.g_full, rep.rhs, P.M);
    rep.residual_units = residual(rep.g_units, rep.rhs, P.M);
    if (rep.residual_full >= P.M) rep.matching.push_back("full");
    if (rep.residual_units >= P.M) rep.matching.push_back("units");
    if (rep.matching.empty()) {
        std::ostringstream os;
        os << "chi=(" << m << "," << b << "): residual valuations full " << rep.residual_full << ", units "
           << rep.residual_units << ", target " << P.M;
        throw NoConventionMatches(os.str());
    }
    return rep;
}

TraceReport trace_formula_check(const CharContext& ctx, uint64_t m, uint64_t b) {
    return trace_formula_check(ctx, character_table(ctx), m, b);
}

nlohmann::json bench(const CharParams& params, const std::vector<int>& degrees, uint64_t m, uint64_t b, int jobs) {
    nlohmann::json rows = nlohmann::json::array();
    CharParams base = params.resolved();
    for (int D : degrees) {
        CharParams P = base;
        P.D = D;
        nlohmann::json row;
        row["D"] = D;
        auto t0 = std::chrono::steady_clock::now();
        CharContext ctx(P);
        row["setup_ms"] = elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        CharacterTable psi = character_table(ctx, PsiRoute::omega, jobs);
        RingElem g = gauss_brute(ctx, psi, m, b, Convention::units);
        row["brute_ms"] = elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        TruncSeries2 H = kernel_H(ctx, m, b);
        try {
            AlphaTrace at = alpha_trace(H, ctx.q(), P.M);
            long qm1 = static_cast<long>(ctx.q() - 1);
            row["trace_ms"] = elapsed_ms(t0);
            row["certified"] = true;
            row["residual_valuation"] = residual(g, at.value * ctx.ring()->from_int(qm1 * qm1), P.M);
        } catch (const TailNotCertified& e) {
            row["trace_ms"] = elapsed_ms(t0);
            row["certified"] = false;
            row["reason"] = e.what();
        }
        rows.push_back(row);
    }
    return {{"config", {{"p", base.p}, {"s", base.s}, {"t", base.t_residue}, {"chi", {{"m", m}, {"b", b}}}, {"M", base.M}}},
            {"rows", rows}};
}

}  // namespace wittlab
