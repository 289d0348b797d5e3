#include "wittlab/ring.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "wittlab/errors.hpp"

namespace wittlab {

namespace {

bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

mpz_class binom(long n, long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

void trim(ZPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// F_p polynomial arithmetic for the irreducibility search
using FpPoly = std::vector<long>;

FpPoly fp_mod(FpPoly a, const FpPoly& b, long p) {
    // b monic
    while (a.size() >= b.size()) {
        long c = a.back() % p;
        size_t shift = a.size() - b.size();
        if (c) {
            for (size_t i = 0; i < b.size(); ++i) a[shift + i] = ((a[shift + i] - c * b[i]) % p + p) % p;
        }
        a.pop_back();
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

FpPoly monic_from_code(long code, int deg, long p) {
    FpPoly f(deg + 1, 0);
    for (int i = 0; i < deg; ++i) {
        f[i] = code % p;
        code /= p;
    }
    f[deg] = 1;
    return f;
}

bool fp_irreducible(const FpPoly& f, long p) {
    int deg = static_cast<int>(f.size()) - 1;
    for (int d = 1; 2 * d <= deg; ++d) {
        long count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (long code = 0; code < count; ++code) {
            if (fp_mod(f, monic_from_code(code, d, p), p).empty()) return false;
        }
    }
    return true;
}

}  // namespace

LubinTate LubinTate::cyclotomic(int p) {
    LubinTate lt;
    lt.name = "cyc";
    for (int j = 0; j + 2 <= p - 1; ++j) {
        mpz_class c = binom(p, j + 2) / p;
        lt.G.push_back(c.get_si());
    }
    return lt;
}

LubinTate LubinTate::plain() {
    LubinTate lt;
    lt.name = "plain";
    return lt;
}

LubinTate LubinTate::custom(std::vector<long> g) {
    LubinTate lt;
    lt.name = "custom";
    lt.G = std::move(g);
    while (!lt.G.empty() && lt.G.back() == 0) lt.G.pop_back();
    return lt;
}

std::vector<mpz_class> LubinTate::F_coeffs(int p) const {
    std::vector<long> g = G;
    while (!g.empty() && g.back() == 0) g.pop_back();
    if (!g.empty() && static_cast<int>(g.size()) - 1 > p - 3)
        throw InvalidArgument("G must have degree at most p-3 so that F is monic of degree p");
    std::vector<mpz_class> f(p + 1, 0);
    f[1] += p;
    f[p] += 1;
    for (size_t j = 0; j < g.size(); ++j) f[j + 2] += mpz_class(p) * g[j];
    return f;
}

std::string RingSpec::key() const {
    std::ostringstream os;
    os << p << ',' << s << ',' << m << ',' << N;
    if (m >= 0) {
        os << ",G";
        for (long g : F.G) os << ':' << g;
    }
    return os.str();
}

ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j)
            mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
    trim(r);
    return r;
}

ZPoly zpoly_compose(const ZPoly& outer, const ZPoly& inner) {
    ZPoly r;
    for (size_t k = outer.size(); k-- > 0;) {
        r = zpoly_mul(r, inner);
        if (r.empty()) r.push_back(0);
        r[0] += outer[k];
        trim(r);
    }
    return r;
}

ZPoly zpoly_divexact(const ZPoly& num, const ZPoly& den) {
    if (den.empty() || den.back() != 1) throw InvalidArgument("divisor must be monic");
    ZPoly rem = num;
    trim(rem);
    if (rem.size() < den.size()) {
        if (rem.empty()) return {};
        throw NonEisenstein("polynomial division leaves a remainder");
    }
    ZPoly quo(rem.size() - den.size() + 1, 0);
    for (size_t k = quo.size(); k-- > 0;) {
        mpz_class c = rem[k + den.size() - 1];
        quo[k] = c;
        if (c == 0) continue;
        for (size_t i = 0; i < den.size(); ++i) rem[k + i] -= c * den[i];
    }
    trim(rem);
    if (!rem.empty()) throw NonEisenstein("polynomial division leaves a remainder");
    return quo;
}

ZPoly lt_iterate_exact(const LubinTate& F, int p, int n) {
    ZPoly f = F.F_coeffs(p);
    ZPoly r = {0, 1};
    for (int i = 0; i < n; ++i) r = zpoly_compose(f, r);
    return r;
}

ZPoly eisenstein_poly(const LubinTate& F, int p, int m) {
    ZPoly top = lt_iterate_exact(F, p, m + 1);
    ZPoly bot = lt_iterate_exact(F, p, m);
    ZPoly E = zpoly_divexact(top, bot);
    long e = 1;
    for (int i = 0; i < m; ++i) e *= p;
    e *= (p - 1);
    if (static_cast<long>(E.size()) != e + 1 || E.back() != 1)
        throw NonEisenstein("quotient is not monic of degree p^m(p-1)");
    for (long i = 0; i < e; ++i)
        if (E[i] % p != 0) throw NonEisenstein("non-leading coefficient not divisible by p");
    if (E[0] % (p * p) == 0) throw NonEisenstein("constant term divisible by p^2");
    return E;
}

const Ring* Ring::make(const RingSpec& spec) {
    static std::recursive_mutex mu;
    static std::map<std::string, std::unique_ptr<Ring>> rings;
    std::lock_guard<std::recursive_mutex> lock(mu);
    std::string k = spec.key();
    auto it = rings.find(k);
    if (it != rings.end()) return it->second.get();
    auto r = std::make_unique<Ring>(spec);
    const Ring* out = r.get();
    rings.emplace(k, std::move(r));
    return out;
}

Ring::Ring(const RingSpec& spec) : spec_(spec) {
    if (!is_prime(spec.p)) throw InvalidArgument("p must be prime");
    if (spec.s < 1 || spec.m < -1 || spec.N < 1) throw InvalidArgument("invalid ring spec " + spec.key());
    double bits = spec.N * std::log2(static_cast<double>(spec.p));
    if (bits > 62.0) throw InvalidArgument("p^N must stay below 2^62");
    ppow_.resize(spec.N + 1);
    ppow_[0] = 1;
    for (int i = 1; i <= spec.N; ++i) ppow_[i] = ppow_[i - 1] * static_cast<uint64_t>(spec.p);
    mod_ = ppow_[spec.N];
    q_ = 1;
    for (int i = 0; i < spec.s; ++i) q_ *= static_cast<uint64_t>(spec.p);
    e_ = 1;
    if (spec.m >= 0) {
        for (int i = 0; i < spec.m; ++i) e_ *= spec.p;
        e_ *= spec.p - 1;
    }
    Fz_ = spec_.F.F_coeffs(spec.p);
    build_unramified();
    build_eisenstein();
    build_sigma();
}

void Ring::build_unramified() {
    int s = spec_.s;
    long p = spec_.p;
    if (s == 1) {
        h_ = {0, 1};
        return;
    }
    long count = 1;
    for (int i = 0; i < s; ++i) count *= p;
    FpPoly f;
    for (long code = 0; code < count; ++code) {
        FpPoly cand = monic_from_code(code, s, p);
        if (cand[0] == 0) continue;
        if (fp_irreducible(cand, p)) {
            f = cand;
            break;
        }
    }
    h_.assign(s + 1, 0);
    for (int i = 0; i <= s; ++i) h_[i] = static_cast<uint64_t>(f[i]);
    // y^{s+t} as combinations of 1..y^{s-1}
    std::vector<uint64_t> cur(s);
    for (int i = 0; i < s; ++i) cur[i] = submod(0, h_[i] % mod_);
    for (int t = 0; t <= s - 2; ++t) {
        hred_.push_back(cur);
        std::vector<uint64_t> nxt(s, 0);
        uint64_t top = cur[s - 1];
        for (int i = s - 1; i >= 1; --i) nxt[i] = cur[i - 1];
        for (int i = 0; i < s; ++i) nxt[i] = addmod(nxt[i], mulmod(top, submod(0, h_[i] % mod_)));
        cur = nxt;
    }
}

void Ring::build_eisenstein() {
    if (spec_.m < 0) return;
    ZPoly E = eisenstein_poly(spec_.F, spec_.p, spec_.m);
    eis_.resize(E.size());
    for (size_t i = 0; i < E.size(); ++i) eis_[i] = reduce_mpz(E[i]);
    int e = e_;
    std::vector<uint64_t> cur(e);
    for (int i = 0; i < e; ++i) cur[i] = submod(0, eis_[i]);
    for (int k = e; k <= 2 * e - 2; ++k) {
        red_.push_back(cur);
        std::vector<uint64_t> nxt(e, 0);
        uint64_t top = cur[e - 1];
        for (int i = e - 1; i >= 1; --i) nxt[i] = cur[i - 1];
        for (int i = 0; i < e; ++i) nxt[i] = addmod(nxt[i], mulmod(top, submod(0, eis_[i])));
        cur = nxt;
    }
}

void Ring::build_sigma() {
    int s = spec_.s;
    sigma_pow_.clear();
    if (s == 1) {
        sigma_pow_.push_back({1});
        return;
    }
    RingElem z = gen_y().pow(static_cast<uint64_t>(spec_.p));
    if (spec_.N > 1) {
        for (int it = 0; it < 128; ++it) {
            RingElem hz = zero(), dh = zero();
            for (int i = s; i >= 0; --i) {
                hz = hz * z + from_int(static_cast<long>(h_[i]));
                if (i >= 1) dh = dh * z + from_int(static_cast<long>(h_[i]) * i);
            }
            if (hz.is_zero()) break;
            z = z - hz * dh.inverse();
            if (it == 127) throw Error("Hensel iteration for sigma(y) did not settle");
        }
    }
    RingElem acc = one();
    for (int j = 0; j < s; ++j) {
        std::vector<uint64_t> v(s);
        for (int k = 0; k < s; ++k) v[k] = acc.coord(0, k);
        sigma_pow_.push_back(v);
        acc = acc * z;
    }
}

uint64_t Ring::reduce_signed(long v) const {
    if (v >= 0) return static_cast<uint64_t>(v) % mod_;
    uint64_t a = static_cast<uint64_t>(-(v + 1)) % mod_;
    return submod(mod_ - 1, a);
}

uint64_t Ring::reduce_mpz(const mpz_class& v) const {
    return mpz_fdiv_ui(v.get_mpz_t(), mod_);
}

int Ring::vp(uint64_t c) const {
    if (c == 0) return kInf;
    int k = 0;
    uint64_t p = static_cast<uint64_t>(spec_.p);
    if (p == 2) return __builtin_ctzll(c);
    while (c % p == 0) {
        c /= p;
        ++k;
    }
    return k;
}

void Ring::y_mul_acc(const uint64_t* a, const uint64_t* b, unsigned __int128* acc) const {
    int s = spec_.s;
    for (int i = 0; i < s; ++i) {
        if (!a[i]) continue;
        for (int j = 0; j < s; ++j) acc[i + j] += static_cast<unsigned __int128>(a[i]) * b[j];
    }
}

void Ring::y_reduce(unsigned __int128* acc, uint64_t* out) const {
    int s = spec_.s;
    std::vector<uint64_t> r(2 * s - 1);
    for (int i = 0; i < 2 * s - 1; ++i) r[i] = static_cast<uint64_t>(acc[i] % mod_);
    for (int t = s - 2; t >= 0; --t) {
        uint64_t c = r[s + t];
        if (!c) continue;
        for (int i = 0; i < s; ++i) r[i] = addmod(r[i], mulmod(c, hred_[t][i]));
    }
    for (int i = 0; i < s; ++i) out[i] = r[i];
}

RingElem Ring::zero() const { return RingElem(this); }

RingElem Ring::one() const { return from_int(1); }

RingElem Ring::from_int(long v) const {
    RingElem r(this);
    RingElem::Coords c(dim(), 0);
    c[0] = reduce_signed(v);
    return RingElem(this, std::move(c), cap());
}

RingElem Ring::from_mpz(const mpz_class& v) const {
    RingElem::Coords c(dim(), 0);
    c[0] = reduce_mpz(v);
    return RingElem(this, std::move(c), cap());
}

RingElem Ring::from_mpq(const mpq_class& v) const {
    mpz_class den = v.get_den();
    if (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(spec_.p)))
        throw NotDivisible("denominator divisible by p: " + v.get_str());
    mpz_class inv, m = mod_;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
    mpz_class num = v.get_num();
    return from_mpz(num * inv % m);
}

RingElem Ring::gen_y() const {
    RingElem::Coords c(dim(), 0);
    if (spec_.s > 1) c[1] = 1;
    return RingElem(this, std::move(c), cap());
}

RingElem Ring::pi() const {
    if (spec_.m < 0) throw InvalidArgument("ring has no Lubin-Tate level");
    RingElem::Coords c(dim(), 0);
    if (e_ >= 2)
        c[spec_.s] = 1;
    else
        c[0] = submod(0, eis_[0]);
    return RingElem(this, std::move(c), cap());
}

RingElem Ring::apply_F(const RingElem& x) const {
    RingElem r = zero();
    for (size_t k = Fz_.size(); k-- > 0;) r = r * x + from_mpz(Fz_[k]);
    return r;
}

RingElem Ring::pi_level(int k) const {
    if (k > spec_.m) throw InvalidArgument("pi level above ring level");
    if (k < 0) return zero();
    RingElem x = pi();
    for (int i = k; i < spec_.m; ++i) x = apply_F(x);
    return x;
}

RingElem Ring::random(std::mt19937_64& rng) const {
    RingElem::Coords c(dim());
    for (auto& x : c) x = rng() % mod_;
    return RingElem(this, std::move(c), cap());
}

RingElem Ring::random_in_ideal(std::mt19937_64& rng, int v) const {
    RingElem::Coords c(dim(), 0);
    int s = spec_.s;
    for (int i = 0; i < e_; ++i) {
        int d = v - i <= 0 ? 0 : (v - i + e_ - 1) / e_;
        if (d >= spec_.N) continue;
        for (int j = 0; j < s; ++j) c[i * s + j] = mulmod(ppow_[d], rng() % mod_);
    }
    return RingElem(this, std::move(c), cap());
}

const Ring* Ring::residue_field() const {
    RingSpec sp = spec_;
    sp.m = -1;
    sp.N = 1;
    return make(sp);
}

const Ring* Ring::with_level(int m) const {
    RingSpec sp = spec_;
    sp.m = m;
    return make(sp);
}

const Ring* Ring::with_N(int N) const {
    RingSpec sp = spec_;
    sp.N = N;
    return make(sp);
}

const Ring* Ring::with_s(int s) const {
    RingSpec sp = spec_;
    sp.s = s;
    return make(sp);
}

RingElem::RingElem(const Ring* R) : R_(R), c_(R->dim(), 0), prec_(R->cap()) {}

RingElem::RingElem(const Ring* R, Coords c, int prec) : R_(R), c_(std::move(c)), prec_(std::min(prec, R->cap())) {
    if (prec_ < R_->cap()) truncate();
}

void RingElem::truncate() {
    int e = R_->e(), s = R_->s(), N = R_->N();
    if (prec_ >= R_->cap()) return;
    if (prec_ < 0) prec_ = 0;
    for (int i = 0; i < e; ++i) {
        int d = prec_ - i <= 0 ? 0 : (prec_ - i + e - 1) / e;
        if (d >= N) continue;
        uint64_t m = R_->ppow(d);
        for (int j = 0; j < s; ++j) c_[i * s + j] %= m;
    }
}

int RingElem::valuation() const {
    int e = R_->e(), s = R_->s();
    int best = kInf;
    for (int i = 0; i < e; ++i) {
        for (int j = 0; j < s; ++j) {
            uint64_t c = c_[i * s + j];
            if (!c) continue;
            int v = i + e * R_->vp(c);
            if (v < best) best = v;
        }
    }
    if (best >= prec_) return kInf;
    return best;
}

bool RingElem::equals(const RingElem& o) const {
    if (R_ != o.R_) throw RingMismatch("comparing elements of different rings");
    int P = std::min(prec_, o.prec_);
    return (*this - o).with_prec(P).valuation() >= kInf;
}

bool RingElem::identical(const RingElem& o) const {
    return R_ == o.R_ && prec_ == o.prec_ && c_ == o.c_;
}

static void check_same(const RingElem& a, const RingElem& b) {
    if (a.ring() != b.ring()) throw RingMismatch("operands live in different rings");
}

RingElem RingElem::operator+(const RingElem& o) const {
    RingElem r = *this;
    r += o;
    return r;
}

RingElem RingElem::operator-(const RingElem& o) const {
    RingElem r = *this;
    r -= o;
    return r;
}

RingElem& RingElem::operator+=(const RingElem& o) {
    check_same(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] = R_->addmod(c_[i], o.c_[i]);
    if (o.prec_ < prec_) {
        prec_ = o.prec_;
        truncate();
    }
    return *this;
}

RingElem& RingElem::operator-=(const RingElem& o) {
    check_same(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] = R_->submod(c_[i], o.c_[i]);
    if (o.prec_ < prec_) {
        prec_ = o.prec_;
        truncate();
    }
    return *this;
}

RingElem RingElem::operator-() const {
    RingElem r = *this;
    for (auto& x : r.c_) x = R_->submod(0, x);
    return r;
}

RingElem RingElem::operator*(const RingElem& o) const {
    check_same(*this, o);
    const Ring& R = *R_;
    int e = R.e(), s = R.s();
    Coords out(R.dim(), 0);
    const uint64_t mod = R.modulus();
    const bool pow2 = R.p() == 2;
    const uint64_t mask = mod - 1;
    if (s == 1) {
        uint64_t acc[2 * 64];
        std::vector<uint64_t> big;
        uint64_t* a = acc;
        if (2 * e - 1 > 128) {
            big.assign(2 * e - 1, 0);
            a = big.data();
        } else {
            std::fill(acc, acc + 2 * e - 1, 0);
        }
        for (int i = 0; i < e; ++i) {
            uint64_t x = c_[i];
            if (!x) continue;
            for (int k = 0; k < e; ++k) {
                uint64_t y = o.c_[k];
                if (!y) continue;
                if (pow2)
                    a[i + k] = (a[i + k] + x * y) & mask;
                else
                    a[i + k] = R.addmod(a[i + k], R.mulmod(x, y));
            }
        }
        const auto& red = R.pi_reduction();
        for (int k = 2 * e - 2; k >= e; --k) {
            uint64_t ck = a[k];
            if (!ck) continue;
            const auto& row = red[k - e];
            for (int i = 0; i < e; ++i) {
                if (pow2)
                    a[i] = (a[i] + ck * row[i]) & mask;
                else
                    a[i] = R.addmod(a[i], R.mulmod(ck, row[i]));
            }
        }
        for (int i = 0; i < e; ++i) out[i] = a[i];
    } else {
        int w = 2 * s - 1;
        std::vector<uint64_t> acc((2 * e - 1) * s, 0);
        std::vector<unsigned __int128> tmp(w);
        std::vector<uint64_t> prod(s);
        for (int i = 0; i < e; ++i) {
            const uint64_t* x = &c_[i * s];
            bool nz = false;
            for (int j = 0; j < s; ++j) nz = nz || x[j];
            if (!nz) continue;
            for (int k = 0; k < e; ++k) {
                const uint64_t* y = &o.c_[k * s];
                bool nzy = false;
                for (int j = 0; j < s; ++j) nzy = nzy || y[j];
                if (!nzy) continue;
                std::fill(tmp.begin(), tmp.end(), 0);
                for (int u = 0; u < s; ++u) {
                    if (!x[u]) continue;
                    for (int v = 0; v < s; ++v)
                        tmp[u + v] += static_cast<unsigned __int128>(x[u]) * y[v] % mod;
                }
                R.y_reduce(tmp.data(), prod.data());
                for (int j = 0; j < s; ++j) acc[(i + k) * s + j] = R.addmod(acc[(i + k) * s + j], prod[j]);
            }
        }
        const auto& red = R.pi_reduction();
        for (int k = 2 * e - 2; k >= e; --k) {
            const auto& row = red[k - e];
            for (int j = 0; j < s; ++j) {
                uint64_t ck = acc[k * s + j];
                if (!ck) continue;
                for (int i = 0; i < e; ++i) acc[i * s + j] = R.addmod(acc[i * s + j], R.mulmod(ck, row[i]));
            }
        }
        for (int i = 0; i < e * s; ++i) out[i] = acc[i];
    }
    int cap = R.cap();
    int prec = cap;
    if (prec_ < cap || o.prec_ < cap) {
        int va = std::min(valuation(), prec_);
        int vb = std::min(o.valuation(), o.prec_);
        long pa = static_cast<long>(prec_) + vb;
        long pb = static_cast<long>(o.prec_) + va;
        prec = static_cast<int>(std::min<long>({pa, pb, cap}));
    }
    return RingElem(R_, std::move(out), prec);
}

RingElem& RingElem::operator*=(const RingElem& o) {
    *this = *this * o;
    return *this;
}

RingElem RingElem::scaled_mod(uint64_t c) const {
    RingElem r = *this;
    for (auto& x : r.c_) x = R_->mulmod(x, c);
    return r;
}

RingElem RingElem::scaled(long c) const {
    if (c == 0) return R_->zero();
    int v = 0;
    long a = c < 0 ? -c : c;
    while (a % R_->p() == 0) {
        a /= R_->p();
        ++v;
    }
    RingElem r = scaled_mod(R_->reduce_signed(c));
    long np = static_cast<long>(prec_) + static_cast<long>(v) * R_->e();
    r.prec_ = static_cast<int>(std::min<long>(np, R_->cap()));
    return r;
}

RingElem RingElem::times_ppow(int k) const {
    if (k >= R_->N()) return R_->zero();
    RingElem r = scaled_mod(R_->ppow(k));
    long np = static_cast<long>(prec_) + static_cast<long>(k) * R_->e();
    r.prec_ = static_cast<int>(std::min<long>(np, R_->cap()));
    return r;
}

RingElem RingElem::pow(uint64_t k) const {
    RingElem result = R_->one();
    RingElem base = *this;
    while (k) {
        if (k & 1u) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

RingElem RingElem::exact_div_p(int k) const {
    if (k == 0) return *this;
    int e = R_->e();
    if (prec_ < k * e) throw NotDivisible("precision " + std::to_string(prec_) + " too low to divide by p^" + std::to_string(k));
    int v = std::min(valuation(), prec_);
    if (v < k * e) throw NotDivisible("valuation " + std::to_string(v) + " below " + std::to_string(k * e));
    RingElem r = *this;
    uint64_t d = R_->ppow(k);
    for (auto& x : r.c_) {
        if (x % d != 0) throw NotDivisible("coordinate not divisible");
        x /= d;
    }
    r.prec_ = prec_ - k * e;
    r.truncate();
    return r;
}

RingElem RingElem::with_prec(int P) const {
    RingElem r = *this;
    if (P < r.prec_) {
        r.prec_ = P;
        r.truncate();
    }
    return r;
}

RingElem RingElem::phi() const {
    int s = R_->s();
    if (s == 1) return *this;
    const auto& sp = R_->sigma_powers();
    RingElem r = *this;
    for (int i = 0; i < R_->e(); ++i) {
        for (int k = 0; k < s; ++k) {
            uint64_t acc = 0;
            for (int j = 0; j < s; ++j) acc = R_->addmod(acc, R_->mulmod(c_[i * s + j], sp[j][k]));
            r.c_[i * s + k] = acc;
        }
    }
    return r;
}

RingElem RingElem::phi_pow(int k) const {
    RingElem r = *this;
    int s = R_->s();
    k %= s;
    for (int i = 0; i < k; ++i) r = r.phi();
    return r;
}

RingElem RingElem::residue() const {
    if (prec_ < 1) throw PrecisionExhausted("no residue information left");
    const Ring* F = R_->residue_field();
    Coords c(F->dim(), 0);
    uint64_t p = static_cast<uint64_t>(R_->p());
    for (int j = 0; j < R_->s(); ++j) c[j] = c_[j] % p;
    return RingElem(F, std::move(c), F->cap());
}

RingElem RingElem::inverse() const {
    if (valuation() != 0) throw NotUnit("element is not a unit");
    RingElem r = residue();
    RingElem rinv = r.pow(R_->q() - 2);
    RingElem x = lift_into(rinv, R_);
    x.prec_ = R_->cap();
    RingElem two = R_->from_int(2);
    for (int it = 0; it < 80; ++it) {
        RingElem nx = x * (two - *this * x);
        if (nx.identical(x)) break;
        x = nx;
    }
    return x.with_prec(prec_);
}

nlohmann::json RingElem::to_json() const {
    nlohmann::json coords = nlohmann::json::array();
    int s = R_->s();
    for (int i = 0; i < R_->e(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < s; ++j) row.push_back(c_[i * s + j]);
        coords.push_back(row);
    }
    return {{"p", R_->p()}, {"level", R_->level()}, {"s", s}, {"N", R_->N()}, {"coords", coords}, {"prec", prec_}};
}

RingElem RingElem::from_json(const Ring* R, const nlohmann::json& j) {
    if (j.at("level").get<int>() != R->level() || j.at("s").get<int>() != R->s() || j.at("N").get<int>() != R->N())
        throw RingMismatch("serialized element belongs to another ring");
    Coords c(R->dim(), 0);
    const auto& rows = j.at("coords");
    int s = R->s();
    for (int i = 0; i < R->e(); ++i)
        for (int k = 0; k < s; ++k) c[i * s + k] = rows.at(i).at(k).get<uint64_t>() % R->modulus();
    return RingElem(R, std::move(c), j.at("prec").get<int>());
}

std::string RingElem::to_string() const {
    std::ostringstream os;
    int s = R_->s();
    bool first = true;
    for (int i = 0; i < R_->e(); ++i) {
        for (int j = 0; j < s; ++j) {
            uint64_t c = c_[i * s + j];
            if (!c) continue;
            if (!first) os << " + ";
            first = false;
            os << c;
            if (i) os << "*pi^" << i;
            if (j) os << "*y^" << j;
        }
    }
    if (first) os << '0';
    os << " [prec " << prec_ << ']';
    return os.str();
}

RingElem lift_into(const RingElem& x, const Ring* target) {
    const Ring* S = x.ring();
    if (S->level() >= 0) throw RingMismatch("source has a ramified part");
    if (S->p() != target->p() || (S->s() != target->s() && S->s() != 1))
        throw RingMismatch("incompatible unramified parts");
    RingElem::Coords c(target->dim(), 0);
    for (int j = 0; j < S->s(); ++j) c[j] = x.coords()[j] % target->modulus();
    long prec = static_cast<long>(std::min(x.prec(), S->cap())) * target->e();
    return RingElem(target, std::move(c), static_cast<int>(std::min<long>(prec, target->cap())));
}

RingElem embed_lower(const RingElem& x, const Ring* target) {
    const Ring* S = x.ring();
    if (S->level() + 1 != target->level() || S->p() != target->p() || S->s() != target->s() ||
        S->N() != target->N() || !(S->spec().F == target->spec().F))
        throw RingMismatch("embed_lower needs the ring one level up with the same data");
    RingElem Pi = S->level() >= 0 ? target->apply_F(target->pi()) : target->zero();
    int s = S->s();
    RingElem r = target->zero();
    for (int i = S->e(); i-- > 0;) {
        RingElem::Coords c(target->dim(), 0);
        for (int j = 0; j < s; ++j) c[j] = x.coords()[i * s + j];
        r = r * Pi + RingElem(target, std::move(c), target->cap());
    }
    long prec = static_cast<long>(x.prec()) * target->p();
    return r.with_prec(static_cast<int>(std::min<long>(prec, target->cap())));
}

RingElem teichmuller(const RingElem& u, const Ring* target) {
    const Ring* F = u.ring();
    if (F->N() != 1 || F->level() >= 0) throw InvalidArgument("teichmuller expects a residue field element");
    if (F->s() != target->s() || F->p() != target->p()) throw RingMismatch("residue field does not match target");
    RingElem x = lift_into(u, target);
    RingElem::Coords c = x.coords();
    x = RingElem(target, std::move(c), target->cap());
    for (int it = 0; it < 2 * target->N() + 4; ++it) {
        RingElem nx = x.pow(target->q());
        if (nx.identical(x)) return x;
        x = nx;
    }
    throw Error("Teichmuller iteration did not settle");
}

RingElem fq_element(const Ring* fq, uint64_t index) {
    if (fq->N() != 1 || fq->level() >= 0) throw InvalidArgument("not a residue field");
    if (index >= fq->q()) throw InvalidArgument("field element index out of range");
    RingElem::Coords c(fq->dim(), 0);
    for (int j = 0; j < fq->s(); ++j) {
        c[j] = index % static_cast<uint64_t>(fq->p());
        index /= static_cast<uint64_t>(fq->p());
    }
    return RingElem(fq, std::move(c), fq->cap());
}

uint64_t fq_index(const RingElem& u) {
    const Ring* fq = u.ring();
    if (fq->N() != 1 || fq->level() >= 0) throw InvalidArgument("not a residue field element");
    uint64_t idx = 0;
    for (int j = fq->s(); j-- > 0;) idx = idx * static_cast<uint64_t>(fq->p()) + u.coords()[j];
    return idx;
}

}  // namespace wittlab
