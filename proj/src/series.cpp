#include "wittlab/series.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include "wittlab/errors.hpp"

namespace wittlab {

namespace {

// zero at full precision, so dropping it loses nothing
bool exact_zero(const RingElem& x) {
    if (x.prec() < x.ring()->cap()) return false;
    for (auto c : x.coords())
        if (c) return false;
    return true;
}

void same_ring(const TruncSeries1& a, const TruncSeries1& b) {
    if (a.ring() != b.ring()) throw RingMismatch("series over different rings");
}

}  // namespace

TruncSeries1::TruncSeries1(const Ring* R, int D, std::string var)
    : R_(R), D_(D), var_(std::move(var)), c_(static_cast<size_t>(D + 1), R->zero()) {
    if (D < 0) throw InvalidArgument("negative truncation degree");
}

TruncSeries1 TruncSeries1::one(const Ring* R, int D, std::string var) {
    TruncSeries1 s(R, D, std::move(var));
    s.c_[0] = R->one();
    return s;
}

TruncSeries1 TruncSeries1::monomial(const RingElem& c, int k, int D, std::string var) {
    TruncSeries1 s(c.ring(), D, std::move(var));
    if (k <= D) s.c_[k] = c;
    return s;
}

TruncSeries1 TruncSeries1::operator+(const TruncSeries1& o) const {
    same_ring(*this, o);
    TruncSeries1 r = truncated(std::min(D_, o.D_));
    for (int n = 0; n <= r.D_; ++n) r.c_[n] += o.c_[n];
    return r;
}

TruncSeries1 TruncSeries1::operator-(const TruncSeries1& o) const {
    same_ring(*this, o);
    TruncSeries1 r = truncated(std::min(D_, o.D_));
    for (int n = 0; n <= r.D_; ++n) r.c_[n] -= o.c_[n];
    return r;
}

TruncSeries1 TruncSeries1::operator*(const TruncSeries1& o) const {
    same_ring(*this, o);
    int D = std::min(D_, o.D_);
    TruncSeries1 r(R_, D, var_);
    std::vector<char> za(D + 1), zb(D + 1);
    for (int i = 0; i <= D; ++i) {
        za[i] = exact_zero(c_[i]);
        zb[i] = exact_zero(o.c_[i]);
    }
    for (int i = 0; i <= D; ++i) {
        if (za[i]) continue;
        for (int j = 0; i + j <= D; ++j) {
            if (zb[j]) continue;
            r.c_[i + j] += c_[i] * o.c_[j];
        }
    }
    return r;
}

TruncSeries1 TruncSeries1::scaled(const RingElem& a) const {
    TruncSeries1 r = *this;
    for (auto& x : r.c_) x = x * a;
    return r;
}

TruncSeries1 TruncSeries1::compose_scale(const RingElem& alpha) const {
    TruncSeries1 r = *this;
    RingElem pw = R_->one();
    for (int n = 0; n <= D_; ++n) {
        r.c_[n] = c_[n] * pw;
        if (n < D_) pw = pw * alpha;
    }
    return r;
}

TruncSeries1 TruncSeries1::compose_xpow(int k, int D_out) const {
    if (k < 1) throw InvalidArgument("x^k substitution needs k >= 1");
    if (D_out < 0) D_out = D_;
    if (D_out / k > D_) throw TruncationTooSmall("series too short for the substitution");
    TruncSeries1 r(R_, D_out, var_);
    for (int n = 0; n * k <= D_out; ++n) r.c_[n * k] = c_[n];
    return r;
}

TruncSeries1 TruncSeries1::truncated(int D) const {
    if (D > D_) throw TruncationTooSmall("cannot extend a truncated series");
    TruncSeries1 r = *this;
    r.D_ = D;
    r.c_.resize(D + 1);
    return r;
}

TruncSeries1 TruncSeries1::inverse() const {
    RingElem g0 = c_[0].inverse();
    TruncSeries1 g(R_, D_, var_);
    g.c_[0] = g0;
    for (int n = 1; n <= D_; ++n) {
        RingElem acc = R_->zero();
        for (int k = 1; k <= n; ++k) acc += c_[k] * g.c_[n - k];
        g.c_[n] = -(acc * g0);
    }
    return g;
}

bool TruncSeries1::operator==(const TruncSeries1& o) const {
    same_ring(*this, o);
    int D = std::min(D_, o.D_);
    for (int n = 0; n <= D; ++n)
        if (c_[n] != o.c_[n]) return false;
    return true;
}

int TruncSeries1::coeff_valuation(int n) const { return std::min(c_[n].valuation(), c_[n].prec()); }

int TruncSeries1::min_valuation(int from) const {
    int m = kInf;
    for (int n = from; n <= D_; ++n) m = std::min(m, coeff_valuation(n));
    return m;
}

nlohmann::json TruncSeries1::to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& x : c_) cs.push_back(x.to_json());
    const RingSpec& sp = R_->spec();
    nlohmann::json ring = {{"p", sp.p}, {"s", sp.s}, {"m", sp.m}, {"N", sp.N}, {"lt", sp.F.G}};
    return {{"ring", ring}, {"var", var_}, {"D", D_}, {"coeffs", cs}};
}

QSeries exp_rational(const QSeries& f, int D) {
    if (!f.empty() && f[0] != 0) throw InvalidArgument("exp needs a series without constant term");
    QSeries e(D + 1, 0);
    e[0] = 1;
    for (int n = 1; n <= D; ++n) {
        mpq_class acc = 0;
        for (int k = 1; k <= n && k < static_cast<int>(f.size()); ++k) {
            if (f[k] == 0) continue;
            acc += k * f[k] * e[n - k];
        }
        e[n] = acc / n;
    }
    return e;
}

TruncSeries1 reduce_series(const QSeries& f, const Ring* R, std::string var) {
    TruncSeries1 s(R, static_cast<int>(f.size()) - 1, std::move(var));
    for (size_t n = 0; n < f.size(); ++n) {
        try {
            s[static_cast<int>(n)] = R->from_mpq(f[n]);
        } catch (const NotDivisible&) {
            throw NonIntegralResult("coefficient of degree " + std::to_string(n) + " is " + f[n].get_str());
        }
    }
    return s;
}

TruncSeries1 exp_zero_constant(const QSeries& f, int D, const Ring* R) { return reduce_series(exp_rational(f, D), R); }

const QSeries& artin_hasse_rational(int p, int D) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, QSeries> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, D);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    QSeries f(D + 1, 0);
    long pk = 1;
    for (int k = 0; pk <= D; ++k, pk *= p) f[pk] = mpq_class(1, pk);
    return cache.emplace(key, exp_rational(f, D)).first->second;
}

TruncSeries1 artin_hasse(int p, int D, const Ring* R) {
    if (R->p() != p) throw RingMismatch("ring has a different residue characteristic");
    return reduce_series(artin_hasse_rational(p, D), R);
}

int effective_length(int p, int D) {
    int L = 1;
    long pk = p;
    while (pk <= D) {
        pk *= p;
        ++L;
    }
    return L;
}

ZSeries zseries_mul(const ZSeries& a, const ZSeries& b, int D) {
    ZSeries r(D + 1, 0);
    for (int i = 0; i < static_cast<int>(a.size()) && i <= D; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < static_cast<int>(b.size()) && i + j <= D; ++j)
            mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
    return r;
}

ZSeries zseries_pow(const ZSeries& a, uint64_t k, int D) {
    ZSeries r(D + 1, 0);
    r[0] = 1;
    ZSeries base = a;
    base.resize(D + 1, 0);
    while (k) {
        if (k & 1u) r = zseries_mul(r, base, D);
        k >>= 1;
        if (k) base = zseries_mul(base, base, D);
    }
    return r;
}

ZSeries zseries_compose(const ZSeries& outer, const ZSeries& inner, int D) {
    ZSeries r(D + 1, 0);
    for (size_t k = outer.size(); k-- > 0;) {
        r = zseries_mul(r, inner, D);
        r[0] += outer[k];
    }
    return r;
}

ZSeries lt_iterate(const LubinTate& F, int p, int n, int D) {
    ZSeries f = F.F_coeffs(p);
    ZSeries r(D + 1, 0);
    if (D >= 1) r[1] = 1;
    for (int i = 0; i < n; ++i) r = zseries_compose(f, r, D);
    return r;
}

namespace {

struct ZSeriesOps {
    int p;
    int D;
    ZSeries sub(const ZSeries& a, const ZSeries& b) {
        ZSeries r = a;
        for (int i = 0; i <= D; ++i) r[i] -= b[i];
        return r;
    }
    ZSeries times_ppow(const ZSeries& a, int k) {
        mpz_class m;
        mpz_ui_pow_ui(m.get_mpz_t(), p, k);
        ZSeries r = a;
        for (auto& x : r) x *= m;
        return r;
    }
    ZSeries pow(const ZSeries& a, uint64_t k) { return zseries_pow(a, k, D); }
    ZSeries div_ppow(const ZSeries& a, int k) {
        mpz_class m;
        mpz_ui_pow_ui(m.get_mpz_t(), p, k);
        ZSeries r(a.size());
        for (size_t i = 0; i < a.size(); ++i) {
            if (!mpz_divisible_p(a[i].get_mpz_t(), m.get_mpz_t()))
                throw CongruenceFailure("coefficient " + std::to_string(i) + " not divisible by p^" + std::to_string(k));
            mpz_divexact(r[i].get_mpz_t(), a[i].get_mpz_t(), m.get_mpz_t());
        }
        return r;
    }
};

}  // namespace

std::vector<ZSeries> witt_w(const LubinTate& F, int p, int L, int D) {
    static std::mutex mu;
    static std::map<std::tuple<std::vector<long>, int, int, int>, std::vector<ZSeries>> cache;
    auto key = std::make_tuple(F.G, p, L, D);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::vector<ZSeries> u;
    for (int n = 0; n < L; ++n) u.push_back(lt_iterate(F, p, n, D));
    // sigma(T) = T^p is a Frobenius lift on Z_p[[T]]
    for (int n = 1; n < L; ++n) {
        mpz_class m;
        mpz_ui_pow_ui(m.get_mpz_t(), p, n);
        ZSeries prev = u[n - 1];
        ZSeries sig(D + 1, 0);
        for (int i = 0; i * p <= D; ++i) sig[i * p] = prev[i];
        for (int i = 0; i <= D; ++i) {
            mpz_class d = sig[i] - u[n][i];
            if (!mpz_divisible_p(d.get_mpz_t(), m.get_mpz_t()))
                throw CongruenceFailure("F^{o n}(T) fails the Frobenius congruence at degree " + std::to_string(i));
        }
    }
    ZSeriesOps ops{p, D};
    auto w = ghost_invert_generic(u, p, ops);
    for (const auto& c : w)
        if (c[0] != 0) throw IntegralityFailure("component of w has a constant term");
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, w);
    return w;
}

WittVec varpi(const Ring* R, int m, int L) {
    if (m < 0) return witt_zero(R, L);
    if (m > R->level()) throw InvalidArgument("ring level below the requested uniformizer");
    RingElem pi = R->pi_level(m);
    int D = R->cap();
    auto w = witt_w(R->spec().F, R->p(), L, D);
    WittVec r{R, {}};
    for (const auto& comp : w) {
        RingElem acc = R->zero();
        for (int k = D; k >= 0; --k) acc = acc * pi + R->from_mpz(comp[k]);
        r.c.push_back(acc);
    }
    return r;
}

std::vector<WittVec> F_delta(const Ring* R, int L) {
    std::vector<WittVec> out;
    for (const auto& f : R->spec().F.F_coeffs(R->p())) out.push_back(delta(f, L, R));
    return out;
}

std::vector<WittVec> G_delta(const Ring* R, int L) {
    std::vector<WittVec> out;
    for (long g : R->spec().F.G) out.push_back(delta(mpz_class(g), L, R));
    return out;
}

WittVec witt_series_eval(const std::vector<WittVec>& f, const WittVec& x, bool polynomial) {
    const Ring* R = x.R;
    size_t L = x.len();
    if (f.empty()) return witt_zero(R, L);
    WittVec acc = truncate_len(f[0], L);
    WittVec xp = x;
    for (size_t j = 1; j < f.size(); ++j) {
        acc = witt_add(acc, witt_mul(truncate_len(f[j], L), xp));
        if (j + 1 < f.size()) xp = witt_mul(xp, x);
    }
    if (!polynomial) {
        int v = x.valuation();
        if (v < 1) throw InvalidArgument("evaluation point needs components of positive valuation");
        long tail = static_cast<long>(f.size()) * v;
        if (tail < acc.min_prec())
            throw PrecisionNotReached("tail terms have valuation >= " + std::to_string(tail) + " but precision " +
                                      std::to_string(acc.min_prec()) + " is claimed");
    }
    return acc;
}

WittVec b_vector(const Ring* R, int m, int L) {
    WittVec w = varpi(R, m + 1, L);
    WittVec r = witt_pow(w, static_cast<uint64_t>(R->p() - 1));
    auto g = G_delta(R, L);
    if (!g.empty()) {
        WittVec gw = witt_series_eval(g, w, true);
        r = witt_add(r, witt_mul(delta(R->p(), L, R), witt_mul(w, gw)));
    }
    return r;
}

TruncSeries1 artin_hasse_E(const WittVec& a, int D) {
    const Ring* R = a.R;
    int p = R->p();
    long reach = 1;
    for (size_t i = 0; i < a.len() && reach <= D; ++i) reach *= p;
    if (reach <= D) throw TooShort("Witt vector of length " + std::to_string(a.len()) + " cannot reach degree " +
                                   std::to_string(D));
    TruncSeries1 ah = artin_hasse(p, D, R);
    TruncSeries1 acc = TruncSeries1::one(R, D);
    long step = 1;
    for (size_t i = 0; i < a.len() && step <= D; ++i, step *= p) {
        if (exact_zero(a[i])) continue;
        int K = static_cast<int>(D / step);
        std::vector<RingElem> t(K + 1);
        RingElem pw = R->one();
        for (int k = 0; k <= K; ++k) {
            t[k] = ah[k] * pw;
            if (k < K) pw = pw * a[i];
        }
        TruncSeries1 next(R, D);
        for (int n = 0; n <= D; ++n) {
            if (exact_zero(acc[n])) continue;
            for (int k = 0; n + k * step <= D; ++k) next[static_cast<int>(n + k * step)] += acc[n] * t[k];
        }
        acc = next;
    }
    return acc;
}

TruncSeries1 robba(const Ring* R, int m, int D) {
    return artin_hasse_E(varpi(R, m, effective_length(R->p(), D)), D);
}

namespace {

WittVec pad(const WittVec& a, size_t L) {
    if (a.len() >= L) return truncate_len(a, L);
    WittVec r = witt_zero(a.R, L);
    for (size_t i = 0; i < a.len(); ++i) r.c[i] = a.c[i];
    return r;
}

}  // namespace

TruncSeries1 pulita_theta_ms(int m, int s, const WittVec& a, int D) {
    const Ring* R = a.R;
    size_t L = static_cast<size_t>(effective_length(R->p(), D));
    WittVec x = pad(a, L);
    WittVec w = varpi(R, m, static_cast<int>(L));
    WittVec first = witt_mul(w, x);
    WittVec second = versch(witt_mul(w, witt_phi(x, s)), static_cast<size_t>(s));
    return artin_hasse_E(witt_sub(first, second), D);
}

TruncSeries1 pulita_theta(int m, const WittVec& a, int D) { return pulita_theta_ms(m, 1, a, D); }

TruncSeries1 pulita_theta_ms_product(int m, int s, const WittVec& a, int D) {
    const Ring* R = a.R;
    TruncSeries1 acc = TruncSeries1::one(R, D);
    int pk = 1;
    for (int i = 0; i < s; ++i, pk *= R->p()) {
        if (pk > D) break;
        acc = acc * pulita_theta(m, witt_phi(a, i), D).compose_xpow(pk);
    }
    return acc;
}

EvalCertificate certify_tail(const std::vector<int>& vals, int M) {
    int D = static_cast<int>(vals.size()) - 1;
    if (D < 5) throw TailNotCertified("series too short to certify");
    EvalCertificate c;
    c.target = M;
    // minima over the middle and the last third; dips at p-power degrees
    // make a fit inside a single window unreliable
    int third = std::max(1, D / 3);
    c.window_begin = D - third;
    int mid_begin = std::max(0, c.window_begin - third);
    c.vA = kInf;
    c.vB = kInf;
    for (int n = mid_begin; n < c.window_begin; ++n) c.vA = std::min(c.vA, vals[n]);
    for (int n = c.window_begin; n <= D; ++n) c.vB = std::min(c.vB, vals[n]);
    c.slope = (static_cast<double>(c.vB) - c.vA) / third;
    std::ostringstream diag;
    diag << "minimal valuations " << c.vA << " on [" << mid_begin << "," << c.window_begin << ") and " << c.vB
         << " on [" << c.window_begin << "," << D << "], slope " << c.slope << " per degree, target " << M;
    if (c.vB < M) {
        if (c.slope > 0) diag << ", needs degree about " << static_cast<long>(D + (M - c.vB) / c.slope) + 1;
        throw TailNotCertified(diag.str());
    }
    if (c.vB >= 2 * M) return c;
    if (c.slope > 0 && c.vB + c.slope * D >= 2.0 * M) return c;
    throw TailNotCertified(diag.str() + ", extrapolation to degree 2D misses the safety margin");
}

RingElem series_eval_unit(const TruncSeries1& g, const RingElem& z, int M, EvalCertificate* cert) {
    if (z.ring() != g.ring()) throw RingMismatch("evaluation point in another ring");
    if (z.valuation() < 0) throw InvalidArgument("evaluation point must be integral");
    std::vector<int> vals(g.degree() + 1);
    for (int n = 0; n <= g.degree(); ++n) vals[n] = g.coeff_valuation(n);
    EvalCertificate c = certify_tail(vals, M);
    if (cert) *cert = c;
    RingElem acc = g.ring()->zero();
    for (int n = g.degree(); n >= 0; --n) acc = acc * z + g[n];
    if (acc.prec() < M)
        throw PrecisionNotReached("partial sum known to " + std::to_string(acc.prec()) + " digits, " +
                                  std::to_string(M) + " requested");
    return acc.with_prec(M);
}

namespace {

void same_ring2(const TruncSeries2& a, const TruncSeries2& b) {
    if (a.ring() != b.ring()) throw RingMismatch("series over different rings");
}

}  // namespace

TruncSeries2::TruncSeries2(const Ring* R, int D) : R_(R), D_(D) {
    if (D < 0) throw InvalidArgument("negative truncation degree");
    c_.assign(size_for(D), R->zero());
}

TruncSeries2 TruncSeries2::one(const Ring* R, int D) {
    TruncSeries2 s(R, D);
    s.c_[0] = R->one();
    return s;
}

TruncSeries2 TruncSeries2::monomial(const RingElem& c, int n0, int n1, int D) {
    TruncSeries2 s(c.ring(), D);
    if (n0 < 0 || n1 < 0) throw InvalidArgument("negative exponent");
    if (n0 + n1 <= D) s.at(n0, n1) = c;
    return s;
}

TruncSeries2 TruncSeries2::outer(const TruncSeries1& f, const TruncSeries1& g, int D) {
    if (f.ring() != g.ring()) throw RingMismatch("series over different rings");
    if (f.degree() < D || g.degree() < D) throw TruncationTooSmall("factor shorter than the target degree");
    TruncSeries2 r(f.ring(), D);
    for (int a = 0; a <= D; ++a) {
        if (exact_zero(f[a])) continue;
        for (int b = 0; a + b <= D; ++b) r.at(a, b) = f[a] * g[b];
    }
    return r;
}

TruncSeries2 TruncSeries2::operator+(const TruncSeries2& o) const {
    same_ring2(*this, o);
    TruncSeries2 r = truncated(std::min(D_, o.D_));
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += o.c_[i];
    return r;
}

TruncSeries2 TruncSeries2::operator-(const TruncSeries2& o) const {
    same_ring2(*this, o);
    TruncSeries2 r = truncated(std::min(D_, o.D_));
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= o.c_[i];
    return r;
}

TruncSeries2 TruncSeries2::operator*(const TruncSeries2& o) const {
    same_ring2(*this, o);
    int D = std::min(D_, o.D_);
    TruncSeries2 r(R_, D);
    struct Term {
        int n0, n1;
        const RingElem* c;
    };
    auto nonzero = [D](const TruncSeries2& s) {
        std::vector<Term> t;
        for (int k = 0; k <= D; ++k)
            for (int n1 = 0; n1 <= k; ++n1) {
                const RingElem& c = s.at(k - n1, n1);
                if (!exact_zero(c)) t.push_back({k - n1, n1, &c});
            }
        return t;
    };
    std::vector<Term> ta = nonzero(*this), tb = nonzero(o);
    for (const Term& a : ta)
        for (const Term& b : tb) {
            if (a.n0 + a.n1 + b.n0 + b.n1 > D) continue;
            r.at(a.n0 + b.n0, a.n1 + b.n1) += *a.c * *b.c;
        }
    return r;
}

TruncSeries2 TruncSeries2::scaled(const RingElem& a) const {
    TruncSeries2 r = *this;
    for (auto& x : r.c_) x = x * a;
    return r;
}

TruncSeries2 TruncSeries2::truncated(int D) const {
    if (D > D_) throw TruncationTooSmall("cannot extend a truncated series");
    TruncSeries2 r = *this;
    r.D_ = D;
    r.c_.resize(size_for(D));
    return r;
}

TruncSeries2 TruncSeries2::compose_xpow(int k, int D_out) const {
    if (k < 1) throw InvalidArgument("x^k substitution needs k >= 1");
    if (D_out < 0) D_out = D_;
    if (D_out / k > D_) throw TruncationTooSmall("series too short for the substitution");
    TruncSeries2 r(R_, D_out);
    for (int n0 = 0; n0 * k <= D_out; ++n0)
        for (int n1 = 0; (n0 + n1) * k <= D_out; ++n1) r.at(n0 * k, n1 * k) = at(n0, n1);
    return r;
}

bool TruncSeries2::operator==(const TruncSeries2& o) const {
    same_ring2(*this, o);
    size_t n = size_for(std::min(D_, o.D_));
    for (size_t i = 0; i < n; ++i)
        if (c_[i] != o.c_[i]) return false;
    return true;
}

int TruncSeries2::shell_valuation(int k) const {
    int m = kInf;
    for (int n1 = 0; n1 <= k; ++n1) {
        const RingElem& c = at(k - n1, n1);
        m = std::min(m, std::min(c.valuation(), c.prec()));
    }
    return m;
}

int TruncSeries2::min_valuation() const {
    int m = kInf;
    for (int k = 0; k <= D_; ++k) m = std::min(m, shell_valuation(k));
    return m;
}

RingElem TruncSeries2::eval_partial(const RingElem& x0, const RingElem& x1) const {
    std::vector<RingElem> p0(D_ + 1), p1(D_ + 1);
    p0[0] = R_->one();
    p1[0] = R_->one();
    for (int n = 1; n <= D_; ++n) {
        p0[n] = p0[n - 1] * x0;
        p1[n] = p1[n - 1] * x1;
    }
    RingElem acc = R_->zero();
    for (int k = 0; k <= D_; ++k)
        for (int n1 = 0; n1 <= k; ++n1) {
            const RingElem& c = at(k - n1, n1);
            if (exact_zero(c)) continue;
            acc += c * p0[k - n1] * p1[n1];
        }
    return acc;
}

nlohmann::json TruncSeries2::to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (int k = 0; k <= D_; ++k)
        for (int n1 = 0; n1 <= k; ++n1) {
            const RingElem& c = at(k - n1, n1);
            if (exact_zero(c)) continue;
            cs.push_back({{"n", {k - n1, n1}}, {"c", c.to_json()}});
        }
    const RingSpec& sp = R_->spec();
    nlohmann::json ring = {{"p", sp.p}, {"s", sp.s}, {"m", sp.m}, {"N", sp.N}, {"lt", sp.F.G}};
    return {{"ring", ring}, {"vars", {"x0", "x1"}}, {"D", D_}, {"coeffs", cs}};
}

RingElem series2_eval_unit(const TruncSeries2& g, const RingElem& x0, const RingElem& x1, int M,
                           EvalCertificate* cert) {
    if (x0.ring() != g.ring() || x1.ring() != g.ring()) throw RingMismatch("evaluation point in another ring");
    if (x0.valuation() < 0 || x1.valuation() < 0) throw InvalidArgument("evaluation point must be integral");
    std::vector<int> vals(g.degree() + 1);
    for (int k = 0; k <= g.degree(); ++k) vals[k] = g.shell_valuation(k);
    EvalCertificate c = certify_tail(vals, M);
    if (cert) *cert = c;
    RingElem acc = g.eval_partial(x0, x1);
    if (acc.prec() < M)
        throw PrecisionNotReached("partial sum known to " + std::to_string(acc.prec()) + " digits, " +
                                  std::to_string(M) + " requested");
    return acc.with_prec(M);
}

}  // namespace wittlab
