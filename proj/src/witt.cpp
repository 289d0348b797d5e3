#include "wittlab/witt.hpp"

#include <mutex>
#include <tuple>

#include "wittlab/errors.hpp"

namespace wittlab {

bool WittVec::operator==(const WittVec& o) const {
    if (R != o.R) throw RingMismatch("Witt vectors over different rings");
    if (c.size() != o.c.size()) return false;
    for (size_t i = 0; i < c.size(); ++i)
        if (c[i] != o.c[i]) return false;
    return true;
}

int WittVec::min_prec() const {
    int m = kInf;
    for (const auto& x : c) m = std::min(m, x.prec());
    return m;
}

int WittVec::valuation() const {
    int m = kInf;
    for (const auto& x : c) m = std::min(m, x.valuation());
    return m;
}

nlohmann::json WittVec::to_json() const {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& x : c) comps.push_back(x.to_json());
    const RingSpec& sp = R->spec();
    nlohmann::json ring = {{"p", sp.p}, {"s", sp.s}, {"m", sp.m}, {"N", sp.N}, {"lt", sp.F.G}};
    return {{"ring", ring}, {"length", c.size()}, {"components", comps}};
}

WittVec WittVec::from_json(const Ring* R, const nlohmann::json& j) {
    WittVec v{R, {}};
    for (const auto& x : j.at("components")) v.c.push_back(RingElem::from_json(R, x));
    if (v.c.size() != j.at("length").get<size_t>()) throw InvalidArgument("length field disagrees with components");
    return v;
}

WittVec witt_zero(const Ring* R, size_t L) { return WittVec{R, std::vector<RingElem>(L, R->zero())}; }

WittVec witt_one(const Ring* R, size_t L) {
    WittVec v = witt_zero(R, L);
    if (L) v.c[0] = R->one();
    return v;
}

WittVec witt_random(const Ring* R, size_t L, std::mt19937_64& rng) {
    WittVec v{R, {}};
    for (size_t i = 0; i < L; ++i) v.c.push_back(R->random(rng));
    return v;
}

RingElem eval_poly(const UniversalPoly& poly, const std::map<int, RingElem>& assignment) {
    if (assignment.empty()) throw MissingAssignment("empty assignment");
    const Ring* R = assignment.begin()->second.ring();
    RingElem acc = R->zero();
    for (const auto& [ex, coef] : poly.terms) {
        if (coef.get_den() != 1) throw NonIntegralResult("coefficient " + coef.get_str() + " is not integral");
        RingElem t = R->from_mpz(coef.get_num());
        for (int s = 0; s < kMaxVars; ++s) {
            if (!ex[s]) continue;
            auto it = assignment.find(s);
            if (it == assignment.end()) throw MissingAssignment("no value for " + var_name(s));
            t *= it->second.pow(ex[s]);
        }
        acc += t;
    }
    return acc;
}

namespace {

// Universal polynomials specialised to one coefficient ring.
struct CompiledFamily {
    struct Term {
        RingElem coef;
        std::vector<std::pair<int, int>> vars;
    };
    std::vector<std::vector<Term>> polys;
    std::array<int, kMaxVars> max_exp{};
};

std::shared_ptr<const CompiledFamily> compiled(const Ring* R, PolyKind kind, int len) {
    static std::mutex mu;
    static std::map<std::tuple<const Ring*, int, int>, std::shared_ptr<const CompiledFamily>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({R, static_cast<int>(kind), len});
        if (it != cache.end()) return it->second;
    }
    const auto& src = structural_polys_cached(kind, R->p(), len);
    auto fam = std::make_shared<CompiledFamily>();
    for (const auto& up : src) {
        std::vector<CompiledFamily::Term> terms;
        for (const auto& [ex, coef] : up.terms) {
            uint64_t c = R->reduce_mpz(coef.get_num());
            if (!c) continue;
            CompiledFamily::Term t{R->from_mpz(coef.get_num()), {}};
            for (int s = 0; s < kMaxVars; ++s) {
                if (!ex[s]) continue;
                t.vars.emplace_back(s, ex[s]);
                fam->max_exp[s] = std::max<int>(fam->max_exp[s], ex[s]);
            }
            terms.push_back(std::move(t));
        }
        fam->polys.push_back(std::move(terms));
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(std::make_tuple(R, static_cast<int>(kind), len), fam).first->second;
}

// powers of each assigned variable, filled on demand
class PowerCache {
public:
    PowerCache(const Ring* R, const std::array<const RingElem*, kMaxVars>& vals) : R_(R), vals_(vals) {}
    const RingElem& get(int slot, int k) {
        auto& v = pw_[slot];
        if (v.empty()) v.push_back(R_->one());
        while (static_cast<int>(v.size()) <= k) v.push_back(v.back() * *vals_[slot]);
        return v[k];
    }

private:
    const Ring* R_;
    std::array<const RingElem*, kMaxVars> vals_;
    std::array<std::vector<RingElem>, kMaxVars> pw_;
};

bool universal_available(int p, size_t len) {
    return p <= kMaxPrime && len >= 1 && len <= static_cast<size_t>(kMaxLen);
}

// nullptr when the family is out of reach
std::shared_ptr<const CompiledFamily> try_compiled(const Ring* R, PolyKind kind, size_t len) {
    if (!universal_available(R->p(), len)) return nullptr;
    try {
        return compiled(R, kind, static_cast<int>(len));
    } catch (const SizeLimitExceeded&) {
        return nullptr;
    }
}

WittVec apply_family(const CompiledFamily& fam, const WittVec& a, const WittVec* b, size_t outlen) {
    const Ring* R = a.R;
    std::array<const RingElem*, kMaxVars> vals{};
    for (size_t i = 0; i < a.len() && i < static_cast<size_t>(kYOffset); ++i) vals[i] = &a.c[i];
    if (b)
        for (size_t i = 0; i < b->len() && i < static_cast<size_t>(kYOffset); ++i) vals[kYOffset + i] = &b->c[i];
    PowerCache pc(R, vals);
    WittVec out{R, {}};
    for (size_t n = 0; n < outlen; ++n) {
        RingElem acc = R->zero();
        for (const auto& t : fam.polys[n]) {
            RingElem m = t.coef;
            for (const auto& [slot, ex] : t.vars) {
                if (!vals[slot]) throw MissingAssignment("no value for " + var_name(slot));
                m *= pc.get(slot, ex);
            }
            acc += m;
        }
        out.c.push_back(acc);
    }
    return out;
}

void same_ring(const WittVec& a, const WittVec& b) {
    if (a.R != b.R) throw RingMismatch("Witt vectors over different rings");
}

struct RingOps {
    const Ring* R;
    RingElem sub(const RingElem& a, const RingElem& b) { return a - b; }
    RingElem times_ppow(const RingElem& a, int k) { return k ? a.times_ppow(k) : a; }
    RingElem pow(const RingElem& a, uint64_t k) { return a.pow(k); }
    RingElem div_ppow(const RingElem& a, int k) {
        if (k == 0) return a;
        if (a.prec() < k * R->e())
            throw PrecisionExhausted("component needs " + std::to_string(k * R->e()) + " digits, has " +
                                     std::to_string(a.prec()));
        try {
            return a.exact_div_p(k);
        } catch (const NotDivisible& e) {
            throw CongruenceFailure(std::string("ghost sequence is not a ghost vector: ") + e.what());
        }
    }
};

WittVec from_ghost(const Ring* R, const GhostSeq& u) {
    GhostSolveInput in{R, u, nullptr, static_cast<int>(u.size())};
    return ghost_invert(in);
}

}  // namespace

GhostSeq ghost_map(const WittVec& a) {
    GhostSeq u;
    const Ring* R = a.R;
    for (size_t n = 0; n < a.len(); ++n) {
        RingElem acc = R->zero();
        for (size_t i = 0; i <= n; ++i) {
            uint64_t ex = 1;
            for (size_t k = i; k < n; ++k) ex *= static_cast<uint64_t>(R->p());
            RingElem t = a.c[i].pow(ex);
            acc += i ? t.times_ppow(static_cast<int>(i)) : t;
        }
        u.push_back(acc);
    }
    return u;
}

WittVec ghost_invert(const GhostSolveInput& in) {
    const Ring* R = in.R;
    size_t L = in.u.size();
    if (L == 0) return WittVec{R, {}};
    if (in.headroom < static_cast<int>(L) - 1)
        throw PrecisionExhausted("headroom " + std::to_string(in.headroom) + " below L-1 = " + std::to_string(L - 1));
    for (const auto& x : in.u)
        if (x.ring() != R) throw RingMismatch("ghost entries over different rings");
    if (in.sigma) {
        for (size_t n = 1; n < L; ++n) {
            RingElem d = in.sigma(in.u[n - 1]) - in.u[n];
            int need = static_cast<int>(n) * R->e();
            if (d.prec() < need) throw PrecisionExhausted("cannot test congruence at index " + std::to_string(n));
            if (d.valuation() < need)
                throw CongruenceFailure("sigma(u_" + std::to_string(n - 1) + ") - u_" + std::to_string(n) +
                                        " not divisible by p^" + std::to_string(n));
        }
    }
    RingOps ops{R};
    return WittVec{R, ghost_invert_generic(in.u, R->p(), ops)};
}

WittVec witt_add(const WittVec& a, const WittVec& b) {
    same_ring(a, b);
    size_t L = std::min(a.len(), b.len());
    if (L == 0) return WittVec{a.R, {}};
    if (auto fam = try_compiled(a.R, PolyKind::Sum, L)) return apply_family(*fam, a, &b, L);
    GhostSeq ga = ghost_map(truncate_len(a, L)), gb = ghost_map(truncate_len(b, L));
    for (size_t i = 0; i < L; ++i) ga[i] += gb[i];
    return from_ghost(a.R, ga);
}

WittVec witt_mul(const WittVec& a, const WittVec& b) {
    same_ring(a, b);
    size_t L = std::min(a.len(), b.len());
    if (L == 0) return WittVec{a.R, {}};
    if (auto fam = try_compiled(a.R, PolyKind::Prod, L)) return apply_family(*fam, a, &b, L);
    GhostSeq ga = ghost_map(truncate_len(a, L)), gb = ghost_map(truncate_len(b, L));
    for (size_t i = 0; i < L; ++i) ga[i] *= gb[i];
    return from_ghost(a.R, ga);
}

WittVec witt_neg(const WittVec& a) {
    size_t L = a.len();
    if (L == 0) return a;
    if (auto fam = try_compiled(a.R, PolyKind::Neg, L)) return apply_family(*fam, a, nullptr, L);
    GhostSeq ga = ghost_map(a);
    for (auto& x : ga) x = -x;
    return from_ghost(a.R, ga);
}

WittVec witt_sub(const WittVec& a, const WittVec& b) { return witt_add(a, witt_neg(b)); }

WittVec witt_pow(const WittVec& a, uint64_t k) {
    WittVec r = witt_one(a.R, a.len());
    WittVec base = a;
    while (k) {
        if (k & 1u) r = witt_mul(r, base);
        k >>= 1;
        if (k) base = witt_mul(base, base);
    }
    return r;
}

WittVec witt_scalar(long k, const WittVec& a) { return witt_mul(delta(mpz_class(k), a.len(), a.R), a); }

WittVec frob(const WittVec& a) {
    if (a.len() < 2) throw TooShort("Frobenius needs length at least 2");
    size_t L = a.len() - 1;
    if (auto fam = try_compiled(a.R, PolyKind::Frob, L)) return apply_family(*fam, a, nullptr, L);
    GhostSeq g = ghost_map(a);
    return from_ghost(a.R, ghost_shift(g));
}

WittVec versch(const WittVec& a, size_t k) {
    WittVec r = witt_zero(a.R, a.len());
    for (size_t i = k; i < a.len(); ++i) r.c[i] = a.c[i - k];
    return r;
}

WittVec tau(const RingElem& x, size_t L) {
    WittVec r = witt_zero(x.ring(), L);
    if (L) r.c[0] = x;
    return r;
}

WittVec witt_map(const std::function<RingElem(const RingElem&)>& rho, const Ring* target, const WittVec& a) {
    WittVec r{target, {}};
    for (const auto& x : a.c) {
        RingElem y = rho(x);
        if (y.ring() != target) throw RingMismatch("morphism lands outside the declared target");
        r.c.push_back(y);
    }
    return r;
}

WittVec witt_phi(const WittVec& a, int k) {
    WittVec r = a;
    for (auto& x : r.c) x = x.phi_pow(k);
    return r;
}

WittVec truncate_len(const WittVec& a, size_t L) {
    if (L > a.len()) throw TooShort("cannot truncate to a longer length");
    return WittVec{a.R, std::vector<RingElem>(a.c.begin(), a.c.begin() + L)};
}

namespace {
struct ZOps {
    int p;
    mpz_class sub(const mpz_class& a, const mpz_class& b) { return a - b; }
    mpz_class times_ppow(const mpz_class& a, int k) {
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
        return a * r;
    }
    mpz_class pow(const mpz_class& a, uint64_t k) {
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), a.get_mpz_t(), k);
        return r;
    }
    mpz_class div_ppow(const mpz_class& a, int k) {
        mpz_class d;
        mpz_ui_pow_ui(d.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
        if (!mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t())) throw CongruenceFailure("integer ghost inversion failed");
        mpz_class r;
        mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t());
        return r;
    }
};
}  // namespace

std::vector<mpz_class> delta_exact(const mpz_class& x, size_t L, int p) {
    ZOps ops{p};
    std::vector<mpz_class> u(L, x);
    return ghost_invert_generic(u, p, ops);
}

WittVec delta(const mpz_class& x, size_t L, const Ring* R, std::optional<int> known_digits) {
    auto comps = delta_exact(x, L, R->p());
    WittVec r{R, {}};
    for (size_t n = 0; n < L; ++n) {
        int prec = R->cap();
        if (known_digits) {
            if (*known_digits <= static_cast<int>(n))
                throw PrecisionExhausted("Delta component " + std::to_string(n) + " has no known digits");
            prec = std::min(prec, (*known_digits - static_cast<int>(n)) * R->e());
        }
        r.c.push_back(R->from_mpz(comps[n]).with_prec(prec));
    }
    return r;
}

namespace {

// root of h_s inside F_{q^r} chosen as the one with the smallest index
RingElem embedding_root(const Ring* small, const Ring* big) {
    static std::mutex mu;
    static std::map<std::pair<const Ring*, const Ring*>, RingElem> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(small, big);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const auto& h = small->h();
    for (uint64_t idx = 0; idx < big->q(); ++idx) {
        RingElem z = fq_element(big, idx);
        RingElem acc = big->zero();
        for (size_t k = h.size(); k-- > 0;) acc = acc * z + big->from_int(static_cast<long>(h[k]));
        if (acc.is_zero()) return cache.emplace(key, z).first->second;
    }
    throw NotGaloisStable("no root of the defining polynomial of F_q in the larger field");
}

}  // namespace

RingElem embed_fq(const RingElem& u, const Ring* big) {
    const Ring* small = u.ring();
    if (small->N() != 1 || big->N() != 1 || small->level() >= 0 || big->level() >= 0)
        throw InvalidArgument("embed_fq works between residue fields");
    if (big->s() % small->s() != 0 || big->p() != small->p()) throw RingMismatch("F_q is not a subfield");
    if (small->s() == 1) return lift_into(u, big);
    RingElem rho = embedding_root(small, big);
    RingElem acc = big->zero();
    for (int j = small->s(); j-- > 0;) acc = acc * rho + big->from_int(static_cast<long>(u.coords()[j]));
    return acc;
}

WittVec embed_fq(const WittVec& y, const Ring* big) {
    WittVec r{big, {}};
    for (const auto& x : y.c) r.c.push_back(embed_fq(x, big));
    return r;
}

WittVec witt_trace(const WittVec& y, int s, int r) {
    const Ring* big = y.R;
    if (big->s() != s * r) throw InvalidArgument("vector does not live over F_{q^r}");
    if (big->N() != 1 || big->level() >= 0) throw InvalidArgument("witt_trace works over finite fields");
    RingSpec ssp = big->spec();
    ssp.s = s;
    const Ring* small = Ring::make(ssp);
    WittVec acc = y;
    for (int i = 1; i < r; ++i) acc = witt_add(acc, witt_phi(y, i * s));
    // pull back through the embedding
    std::map<std::vector<uint64_t>, uint64_t> back;
    for (uint64_t idx = 0; idx < small->q(); ++idx) {
        RingElem img = embed_fq(fq_element(small, idx), big);
        back.emplace(std::vector<uint64_t>(img.coords().begin(), img.coords().end()), idx);
    }
    WittVec out{small, {}};
    for (const auto& c : acc.c) {
        if (c.pow(small->q()) != c) throw NotGaloisStable("trace component not fixed by x -> x^q");
        auto it = back.find(std::vector<uint64_t>(c.coords().begin(), c.coords().end()));
        if (it == back.end()) throw NotGaloisStable("trace component outside the image of F_q");
        out.c.push_back(fq_element(small, it->second));
    }
    return out;
}

WittVec te_lift(const WittVec& y, const Ring* target, size_t L) {
    if (L < y.len()) throw InvalidArgument("te_lift length shorter than the input");
    WittVec r = witt_zero(target, L);
    for (size_t j = 0; j < y.len(); ++j) r.c[j] = teichmuller(y.c[j], target);
    return r;
}

GhostSeq ghost_shift(const GhostSeq& u) {
    if (u.empty()) throw TooShort("empty ghost sequence");
    return GhostSeq(u.begin() + 1, u.end());
}

GhostSeq ghost_vshift(const GhostSeq& u) {
    if (u.empty()) throw TooShort("empty ghost sequence");
    const Ring* R = u[0].ring();
    GhostSeq r{R->zero()};
    for (const auto& x : u) r.push_back(x.times_ppow(1));
    return r;
}

}  // namespace wittlab
