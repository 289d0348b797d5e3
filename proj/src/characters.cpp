#include "wittlab/characters.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "wittlab/errors.hpp"

namespace wittlab {

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& body) {
    size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

QSeries lt_to_cyclotomic(const LubinTate& F, int p, int D) {
    static std::mutex mu;
    static std::map<std::tuple<std::vector<long>, int, int>, QSeries> cache;
    auto key = std::make_tuple(F.G, p, D);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    // powers of F truncated at D
    ZSeries f = F.F_coeffs(p);
    f.resize(D + 1, 0);
    std::vector<ZSeries> fpow(D + 1);
    fpow[0] = ZSeries(D + 1, 0);
    fpow[0][0] = 1;
    for (int k = 1; k <= D; ++k) fpow[k] = zseries_mul(fpow[k - 1], f, D);

    QSeries u(D + 1, 0);
    if (D >= 1) u[1] = 1;
    // upow[j] = u^j, filled degree by degree
    std::vector<QSeries> upow(p + 1, QSeries(D + 1, 0));
    upow[0][0] = 1;
    if (D >= 1) upow[1][1] = 1;
    auto fill_powers = [&](int n) {
        for (int j = 2; j <= p; ++j) {
            mpq_class acc = 0;
            for (int i = 1; i < n; ++i)
                if (u[i] != 0 && upow[j - 1][n - i] != 0) acc += u[i] * upow[j - 1][n - i];
            upow[j][n] = acc;
        }
    };
    if (D >= 1) fill_powers(1);
    mpz_class binom_row[8];
    if (p > 7) throw InvalidArgument("primes above 7 are out of range");
    for (int j = 0; j <= p; ++j) mpz_bin_uiui(binom_row[j].get_mpz_t(), p, j);
    for (int n = 2; n <= D; ++n) {
        fill_powers(n);
        // C(u) at degree n without the p u_n term
        mpq_class c = 0;
        for (int j = 2; j <= p; ++j) c += mpq_class(binom_row[j]) * upow[j][n];
        // u(F) at degree n without the p^n u_n term
        mpq_class g = 0;
        for (int k = 1; k < n; ++k)
            if (u[k] != 0 && fpow[k][n] != 0) g += u[k] * fpow[k][n];
        mpz_class pn;
        mpz_ui_pow_ui(pn.get_mpz_t(), p, n);
        u[n] = (c - g) / mpq_class(pn - p);
        u[n].canonicalize();
        upow[1][n] = u[n];
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, u).first->second;
}

SnapResult RootTable::snap(const RingElem& x) const {
    if (x.ring() != R) throw RingMismatch("value and root table in different rings");
    SnapResult best;
    best.distance = -1;
    best.runner_up = -1;
    for (size_t k = 0; k < roots.size(); ++k) {
        RingElem d = x - roots[k];
        int v = std::min(d.valuation(), d.prec());
        if (v > best.distance) {
            best.runner_up = best.distance;
            best.distance = v;
            best.index = k;
        } else if (v > best.runner_up) {
            best.runner_up = v;
        }
    }
    if (!(best.distance > snap_threshold())) {
        std::ostringstream os;
        os << "closest root " << best.index << " at valuation " << best.distance << ", next at " << best.runner_up
           << ", need more than " << snap_threshold();
        throw SnapAmbiguous(os.str());
    }
    return best;
}

double RootTable::snap_threshold() const {
    return vmax_pairwise + R->e() * std::log(2.0) / std::log(static_cast<double>(R->p()));
}

namespace {

void fill_pairwise(RootTable& T) {
    T.vmax_pairwise = 0;
    for (size_t a = 0; a < T.roots.size(); ++a)
        for (size_t b = a + 1; b < T.roots.size(); ++b) {
            int v = (T.roots[a] - T.roots[b]).valuation();
            if (v >= T.R->cap()) throw SeedNotConverging("two table roots agree at full precision");
            T.vmax_pairwise = std::max(T.vmax_pairwise, v);
        }
}

RingElem primitive_ppow_root(int ell, const Ring* R) {
    if (ell < 1) throw InvalidArgument("ell must be at least 1");
    if (R->level() < ell - 1) throw SeedNotConverging("ring level below ell - 1");
    const QSeries& u = lt_to_cyclotomic(R->spec().F, R->p(), R->cap());
    RingElem pi = R->pi_level(ell - 1);
    RingElem acc = R->zero();
    for (int n = static_cast<int>(u.size()) - 1; n >= 1; --n) acc = (acc + R->from_mpq(u[n])) * pi;
    return R->one() + acc;
}

}  // namespace

RootTable mu_ppow_table(int ell, const Ring* R) {
    RingElem zeta = primitive_ppow_root(ell, R);
    RootTable T;
    T.R = R;
    T.order = 1;
    for (int i = 0; i < ell; ++i) T.order *= static_cast<uint64_t>(R->p());
    RingElem x = R->one();
    for (uint64_t k = 0; k < T.order; ++k) {
        T.roots.push_back(x);
        x = x * zeta;
    }
    if (x != R->one()) throw SeedNotConverging("zeta^{p^ell} differs from 1 at precision");
    fill_pairwise(T);
    return T;
}

RootTable mu_qm1_p_table(const Ring* R) {
    RingElem zp = primitive_ppow_root(1, R);
    const Ring* Fq = R->residue_field();
    RootTable T;
    T.R = R;
    T.order = (Fq->q() - 1) * static_cast<uint64_t>(R->p());
    for (uint64_t u = 1; u < Fq->q(); ++u) {
        RingElem tu = teichmuller(fq_element(Fq, u), R);
        RingElem x = tu;
        for (int k = 0; k < R->p(); ++k) {
            T.roots.push_back(x);
            x = x * zp;
        }
    }
    fill_pairwise(T);
    return T;
}

RingElem trace_galois(const RingElem& t) {
    RingElem acc = t.ring()->zero();
    for (int j = 0; j < t.ring()->s(); ++j) acc += t.phi_pow(j);
    return acc;
}

RingElem trace_powers(const RingElem& t) {
    RingElem acc = t.ring()->zero();
    RingElem x = t;
    for (int j = 0; j < t.ring()->s(); ++j) {
        acc += x;
        x = x.pow(static_cast<uint64_t>(t.ring()->p()));
    }
    return acc;
}

uint64_t default_t_residue(int p, int s) {
    const Ring* Fq = Ring::make(RingSpec{p, s, -1, LubinTate::plain(), 1});
    for (uint64_t u = 1; u < Fq->q(); ++u)
        if (!trace_powers(fq_element(Fq, u)).is_zero()) return u;
    throw InvalidArgument("no element of non-zero trace");
}

CharParams CharParams::resolved() const {
    CharParams r = *this;
    if (r.F.name == "cyc") r.F = LubinTate::cyclotomic(p);
    if (r.ell < 1) throw InvalidArgument("ell must be at least 1");
    if (r.N == 0) r.N = p == 2 ? 24 : p == 3 ? 16 : p == 5 ? 12 : 10;
    if (r.D == 0) r.D = p == 2 ? 128 : p == 3 ? 96 : 64;
    if (r.M == 0) {
        int e = p - 1;
        for (int i = 1; i < r.ell; ++i) e *= p;
        r.M = 3 * e;
    }
    if (r.t_residue == 0) r.t_residue = default_t_residue(p, s);
    return r;
}

std::vector<TruncSeries1> omega_factors(const Ring* R, int s, int ell, const RingElem& t, int D) {
    std::vector<TruncSeries1> out;
    RingElem tp = t;
    for (int j = 0; j < ell; ++j) {
        out.push_back(pulita_theta_ms(ell - j - 1, s, witt_one(R, 1), D).compose_scale(tp));
        tp = tp.pow(static_cast<uint64_t>(R->p()));
    }
    return out;
}

CharContext::CharContext(const CharParams& params) : P_(params.resolved()) {
    R_ = Ring::make(RingSpec{P_.p, P_.s, P_.ell - 1, P_.F, P_.N});
    Fq_ = R_->residue_field();
    if (P_.t_residue >= Fq_->q()) throw InvalidArgument("t residue out of range");
    t_ = teichmuller(fq_element(Fq_, P_.t_residue), R_);
    nondegenerate_ = trace_galois(t_).is_unit();
    mu_ = mu_ppow_table(P_.ell, R_);
    chi_roots_ = mu_qm1_p_table(R_);
    snap_prec_ = static_cast<int>(std::floor(std::max(mu_.snap_threshold(), chi_roots_.snap_threshold()))) + 1;
    if (P_.M > R_->cap() || snap_prec_ > R_->cap())
        throw InvalidArgument("target precision exceeds the ring precision");
    omega_ = omega_factors(R_, P_.s, P_.ell, t_, P_.D);
    omega1_ = pulita_theta_ms(0, P_.s, witt_one(R_, 1), P_.D).compose_scale(t_);
}

uint64_t CharContext::domain_size() const {
    uint64_t n = 1;
    for (int j = 0; j < P_.ell; ++j) n *= q();
    return n;
}

WittVec CharContext::vector_at(uint64_t row) const {
    WittVec y{Fq_, std::vector<RingElem>(static_cast<size_t>(P_.ell))};
    for (int j = P_.ell; j-- > 0;) {
        y.c[j] = fq_element(Fq_, row % q());
        row /= q();
    }
    return y;
}

uint64_t CharContext::row_of(const WittVec& y) const {
    if (y.R != Fq_ || y.len() != static_cast<size_t>(P_.ell)) throw InvalidArgument("vector outside W_ell(F_q)");
    uint64_t row = 0;
    for (const auto& c : y.c) row = row * q() + fq_index(c);
    return row;
}

RingElem CharContext::omega_value(const WittVec& y) const {
    if (y.len() != static_cast<size_t>(P_.ell)) throw InvalidArgument("vector length differs from ell");
    RingElem acc = R_->one();
    for (int j = 0; j < P_.ell; ++j)
        acc = acc * series_eval_unit(omega_[j], teichmuller(y[j], R_), snap_prec_);
    return acc.with_prec(snap_prec_);
}

RingElem CharContext::theta_value(const WittVec& a) const {
    if (a.R != R_) throw RingMismatch("Witt vector over another ring");
    return series_eval_unit(pulita_theta_ms(P_.ell - 1, P_.s, a, P_.D), t_, snap_prec_);
}

RingElem CharContext::theta_value_teich(const WittVec& y) const {
    return theta_value(te_lift(y, R_, static_cast<size_t>(P_.ell)));
}

SnapResult CharContext::psi(const WittVec& y) const { return mu_.snap(omega_value(y)); }

SnapResult CharContext::psi_direct(const WittVec& y) const { return mu_.snap(theta_value_teich(y)); }

RingElem CharContext::chi_raw(uint64_t m, uint64_t b, const WittVec& z) const {
    if (z.len() != 2 || z.R != Fq_) throw InvalidArgument("chi takes a vector of W_2(F_q)");
    if (z[0].is_zero()) throw NotUnit("first component is zero");
    if (m > q() - 2 || b >= q()) throw InvalidArgument("chi parameters out of range");
    RingElem T0 = teichmuller(z[0], R_), T1 = teichmuller(z[1], R_);
    RingElem Tb = teichmuller(fq_element(Fq_, b), R_);
    uint64_t ex = static_cast<uint64_t>(P_.p) * (q() - 2);
    RingElem arg = Tb * T1 * T0.pow(ex);
    return (T0.pow(m) * series_eval_unit(omega1_, arg, snap_prec_)).with_prec(snap_prec_);
}

RingElem CharContext::chi(uint64_t m, uint64_t b, const WittVec& z) const {
    return chi_roots_.roots[chi_roots_.snap(chi_raw(m, b, z)).index];
}

int CharContext::count_E_t_ell() const {
    if (t_.pow(static_cast<uint64_t>(P_.p)) != t_) throw InvalidArgument("count needs t in Z_p with t^p = t");
    RingElem base = R_->one() + t_ * R_->pi_level(P_.ell - 1);
    int count = 0;
    for (const auto& z : mu_.roots)
        if ((base - z).valuation() > 1) ++count;
    return count;
}

nlohmann::json CharacterTable::to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows) rs.push_back({{"vector", r.vector}, {"psi_index", r.psi_index}, {"raw_distance", r.raw_distance}});
    return {{"q", q}, {"ell", ell}, {"order", order}, {"rows", rs}};
}

std::string CharacterTable::to_csv() const {
    std::ostringstream os;
    os << "row";
    for (int j = 0; j < ell; ++j) os << ",y" << j;
    os << ",psi_index,raw_distance\n";
    for (const auto& r : rows) {
        os << r.row;
        for (auto v : r.vector) os << ',' << v;
        os << ',' << r.psi_index << ',' << r.raw_distance << '\n';
    }
    return os.str();
}

CharacterTable character_table(const CharContext& ctx, PsiRoute route, int jobs) {
    CharacterTable T;
    T.q = ctx.q();
    T.ell = ctx.params().ell;
    T.order = ctx.roots().order;
    T.rows.resize(ctx.domain_size());
    parallel_for(T.rows.size(), jobs, [&](size_t i) {
        WittVec y = ctx.vector_at(i);
        SnapResult s = route == PsiRoute::omega ? ctx.psi(y) : ctx.psi_direct(y);
        CharacterRow& r = T.rows[i];
        r.row = i;
        for (const auto& c : y.c) r.vector.push_back(fq_index(c));
        r.psi_index = s.index;
        r.raw_distance = s.distance;
    });
    return T;
}

namespace {

std::string describe(const WittVec& y) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < y.len(); ++i) os << (i ? "," : "") << fq_index(y[i]);
    os << ')';
    return os.str();
}

}  // namespace

CharacterChecks check_character(const CharContext& ctx, const CharacterTable& table) {
    CharacterChecks out;
    uint64_t n = ctx.domain_size(), ord = table.order;
    if (table.rows.size() != n) throw InvalidArgument("table does not cover the domain");
    std::vector<WittVec> vecs;
    for (uint64_t i = 0; i < n; ++i) vecs.push_back(ctx.vector_at(i));
    auto idx = [&](const WittVec& y) { return table.rows[ctx.row_of(y)].psi_index; };
    for (uint64_t a = 0; a < n; ++a)
        for (uint64_t b = 0; b < n; ++b) {
            uint64_t lhs = idx(witt_add(vecs[a], vecs[b]));
            uint64_t rhs = (table.rows[a].psi_index + table.rows[b].psi_index) % ord;
            ++out.pairs_checked;
            if (lhs != rhs)
                throw ReportedMismatch("psi(y+z) != psi(y)psi(z) at y=" + describe(vecs[a]) + " z=" + describe(vecs[b]));
        }
    out.homomorphism = true;
    std::set<uint64_t> image;
    for (const auto& r : table.rows) image.insert(r.psi_index);
    out.image_size = image.size();
    out.full_image = image.size() == ord;
    out.separates_points = true;
    for (uint64_t a = 1; a < n && out.separates_points; ++a) {
        bool hit = false;
        for (uint64_t y = 0; y < n && !hit; ++y) hit = idx(witt_mul(vecs[a], vecs[y])) != 0;
        if (!hit) out.separates_points = false;
    }
    out.trace_routes_agree = trace_galois(ctx.t()) == trace_powers(ctx.t());
    return out;
}

SplittingReport check_splitting(const CharContext& ctx, int r, int jobs, int D_big) {
    if (r < 1) throw InvalidArgument("r must be positive");
    const CharParams& P = ctx.params();
    SplittingReport rep;
    rep.r = r;
    CharParams bp = P;
    bp.s = P.s * r;
    bp.D = D_big > 0 ? D_big : P.D * r;
    const Ring* Fbig = Ring::make(RingSpec{P.p, bp.s, -1, P.F, 1});
    bp.t_residue = fq_index(embed_fq(fq_element(ctx.residue(), P.t_residue), Fbig));
    CharContext big(bp);
    if (big.residue() != Fbig) throw RingMismatch("residue field of the big ring is not the expected one");

    CharacterTable small = character_table(ctx, PsiRoute::omega, jobs);
    std::vector<TruncSeries1> fac = omega_factors(big.ring(), P.s, P.ell, big.t(), bp.D);
    uint64_t n = big.domain_size();
    rep.vectors = n;
    std::vector<uint64_t> via_trace(n), via_product(n), via_big(n);
    parallel_for(n, jobs, [&](size_t i) {
        WittVec y = big.vector_at(i);
        via_trace[i] = small.rows[ctx.row_of(witt_trace(y, P.s, r))].psi_index;
        RingElem acc = big.ring()->one();
        for (int j = 0; j < P.ell; ++j) {
            RingElem x = teichmuller(y[j], big.ring());
            for (int k = 0; k < r; ++k) {
                acc = acc * series_eval_unit(fac[j], x, ctx.snap_prec());
                x = x.pow(ctx.q());
            }
        }
        via_product[i] = big.roots().snap(acc.with_prec(ctx.snap_prec())).index;
        via_big[i] = big.psi(y).index;
    });
    for (uint64_t i = 0; i < n; ++i) {
        if (via_product[i] != via_trace[i])
            throw ReportedMismatch("product formula differs from psi o Tr at " + describe(big.vector_at(i)));
        if (via_big[i] != via_trace[i])
            throw ReportedMismatch("psi over F_{q^r} differs from psi o Tr at " + describe(big.vector_at(i)));
    }
    rep.product_formula = true;
    rep.transitivity = true;
    return rep;
}

TruncSeries2 omega2(const Ring* R, int s, const RingElem& t, int D) {
    std::vector<TruncSeries1> f = omega_factors(R, s, 2, t, D);
    return TruncSeries2::outer(f[0], f[1], D);
}

bool check_omega_factorization(const CharParams& params, int r, int D) {
    CharParams P = params.resolved();
    if (P.ell != 2) throw InvalidArgument("the bivariate factorization needs ell = 2");
    const Ring* Fq = Ring::make(RingSpec{P.p, P.s, -1, P.F, 1});
    const Ring* Fbig = Ring::make(RingSpec{P.p, P.s * r, -1, P.F, 1});
    const Ring* R = Ring::make(RingSpec{P.p, P.s * r, 1, P.F, P.N});
    RingElem t = teichmuller(embed_fq(fq_element(Fq, P.t_residue), Fbig), R);
    TruncSeries2 lhs = omega2(R, P.s * r, t, D);
    TruncSeries2 base = omega2(R, P.s, t, D);
    TruncSeries2 rhs = TruncSeries2::one(R, D);
    uint64_t qi = 1;
    for (int i = 0; i < r; ++i, qi *= Fq->q()) rhs = rhs * base.compose_xpow(static_cast<int>(qi), D);
    return lhs == rhs;
}

}  // namespace wittlab
