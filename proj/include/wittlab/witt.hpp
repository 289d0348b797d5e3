#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "wittlab/ring.hpp"
#include "wittlab/upoly.hpp"

namespace wittlab {

// a_0..a_{L-1} over one ring
struct WittVec {
    const Ring* R = nullptr;
    std::vector<RingElem> c;

    size_t len() const { return c.size(); }
    const RingElem& operator[](size_t i) const { return c[i]; }
    RingElem& operator[](size_t i) { return c[i]; }
    // componentwise equality at precision
    bool operator==(const WittVec& o) const;
    bool operator!=(const WittVec& o) const { return !(*this == o); }
    int min_prec() const;
    // smallest component valuation
    int valuation() const;

    nlohmann::json to_json() const;
    static WittVec from_json(const Ring* R, const nlohmann::json& j);
};

using GhostSeq = std::vector<RingElem>;

WittVec witt_zero(const Ring* R, size_t L);
WittVec witt_one(const Ring* R, size_t L);
WittVec witt_random(const Ring* R, size_t L, std::mt19937_64& rng);

// slot -> value; throws MissingAssignment
RingElem eval_poly(const UniversalPoly& poly, const std::map<int, RingElem>& assignment);

// fant_n(a_0..a_n) for n < len
GhostSeq ghost_map(const WittVec& a);

// Recovers a with fant_n(a) = u_n. When sigma is given, checks
// sigma(u_{n-1}) = u_n mod p^n first. Division consumes n*e digits of
// component n; headroom must cover L-1 p-digits.
struct GhostSolveInput {
    const Ring* R = nullptr;
    GhostSeq u;
    std::function<RingElem(const RingElem&)> sigma;
    int headroom = 0;
};
WittVec ghost_invert(const GhostSolveInput& in);

// Generic form shared with the power series code.
template <class T, class Ops>
std::vector<T> ghost_invert_generic(const std::vector<T>& u, int p, Ops& ops) {
    std::vector<T> a;
    for (size_t n = 0; n < u.size(); ++n) {
        T acc = u[n];
        for (size_t i = 0; i < n; ++i) {
            uint64_t ex = 1;
            for (size_t k = i; k < n; ++k) ex *= static_cast<uint64_t>(p);
            acc = ops.sub(acc, ops.times_ppow(ops.pow(a[i], ex), static_cast<int>(i)));
        }
        a.push_back(ops.div_ppow(acc, static_cast<int>(n)));
    }
    return a;
}

// Witt arithmetic. Universal polynomials up to length 5; longer vectors go
// through ghost components, which needs p to be a non-zero-divisor.
WittVec witt_add(const WittVec& a, const WittVec& b);
WittVec witt_sub(const WittVec& a, const WittVec& b);
WittVec witt_mul(const WittVec& a, const WittVec& b);
WittVec witt_neg(const WittVec& a);
WittVec witt_pow(const WittVec& a, uint64_t k);
// k * a through Delta(k)
WittVec witt_scalar(long k, const WittVec& a);

// length L-1
WittVec frob(const WittVec& a);
WittVec versch(const WittVec& a, size_t k = 1);
WittVec tau(const RingElem& x, size_t L);
WittVec witt_map(const std::function<RingElem(const RingElem&)>& rho, const Ring* target, const WittVec& a);
// componentwise phi^k
WittVec witt_phi(const WittVec& a, int k = 1);
WittVec truncate_len(const WittVec& a, size_t L);

// Delta(x) over Z computed exactly from an integer representative
std::vector<mpz_class> delta_exact(const mpz_class& x, size_t L, int p);
// Delta(x) reduced into R, component n known to p^{N-n} when x is only known mod p^N
WittVec delta(const mpz_class& x, size_t L, const Ring* R, std::optional<int> known_digits = std::nullopt);

// Sum of the r twists by phi^{is}; y over F_{q^r}, result over F_q
WittVec witt_trace(const WittVec& y, int s, int r);
// F_q -> F_{q^r}: y mapped to a fixed root of h_s inside F_{q^r}
RingElem embed_fq(const RingElem& u, const Ring* big);
WittVec embed_fq(const WittVec& y, const Ring* big);

// Teichmuller lift of each component, zero padded to length L
WittVec te_lift(const WittVec& y, const Ring* target, size_t L);

GhostSeq ghost_shift(const GhostSeq& u);
GhostSeq ghost_vshift(const GhostSeq& u);

}  // namespace wittlab
