#pragma once

#include <climits>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <gmpxx.h>
#include <json.hpp>

namespace wittlab {

constexpr int kInf = INT_MAX / 4;

struct LubinTate {
    std::string name = "cyc";
    std::vector<long> G;

    static LubinTate cyclotomic(int p);
    static LubinTate plain();
    static LubinTate custom(std::vector<long> g);

    // F(T) = pT + T^p + pT^2 G(T), ascending coefficients
    std::vector<mpz_class> F_coeffs(int p) const;
    bool operator==(const LubinTate& o) const { return G == o.G; }
};

struct RingSpec {
    int p = 2;
    int s = 1;
    int m = -1;
    LubinTate F;
    int N = 24;

    std::string key() const;
    bool operator==(const RingSpec& o) const {
        return p == o.p && s == o.s && m == o.m && N == o.N && (m < 0 || F == o.F);
    }
};

class RingElem;

// Integer polynomial helpers shared by the Lubin-Tate code.
using ZPoly = std::vector<mpz_class>;
ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b);
ZPoly zpoly_compose(const ZPoly& outer, const ZPoly& inner);
// exact quotient by a monic divisor; throws if the remainder is not zero
ZPoly zpoly_divexact(const ZPoly& num, const ZPoly& den);
ZPoly lt_iterate_exact(const LubinTate& F, int p, int n);
ZPoly eisenstein_poly(const LubinTate& F, int p, int m);

// Z/p^N[y]/(h)[pi]/(E_m); level m = -1 has no pi, s = 1 has no y.
class Ring {
public:
    // interned; the returned pointer lives for the whole process
    static const Ring* make(const RingSpec& spec);

    const RingSpec& spec() const { return spec_; }
    int p() const { return spec_.p; }
    int s() const { return spec_.s; }
    int level() const { return spec_.m; }
    int N() const { return spec_.N; }
    int e() const { return e_; }
    uint64_t q() const { return q_; }
    uint64_t modulus() const { return mod_; }
    uint64_t ppow(int k) const { return ppow_[k]; }
    int dim() const { return e_ * spec_.s; }
    int cap() const { return spec_.N * e_; }

    const std::vector<uint64_t>& h() const { return h_; }
    const std::vector<uint64_t>& eis() const { return eis_; }

    RingElem zero() const;
    RingElem one() const;
    RingElem from_int(long v) const;
    RingElem from_mpz(const mpz_class& v) const;
    RingElem from_mpq(const mpq_class& v) const;
    RingElem gen_y() const;
    // pi_m of this ring
    RingElem pi() const;
    // pi_k = F^{o(m-k)}(pi_m), zero for k < 0
    RingElem pi_level(int k) const;
    // evaluates F at x
    RingElem apply_F(const RingElem& x) const;
    RingElem random(std::mt19937_64& rng) const;
    // element whose valuation is at least v
    RingElem random_in_ideal(std::mt19937_64& rng, int v) const;

    const Ring* residue_field() const;
    const Ring* with_level(int m) const;
    const Ring* with_N(int N) const;
    const Ring* with_s(int s) const;

    uint64_t mulmod(uint64_t a, uint64_t b) const {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % mod_);
    }
    uint64_t addmod(uint64_t a, uint64_t b) const {
        uint64_t r = a + b;
        return r >= mod_ ? r - mod_ : r;
    }
    uint64_t submod(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + mod_ - b; }
    uint64_t reduce_signed(long v) const;
    uint64_t reduce_mpz(const mpz_class& v) const;
    int vp(uint64_t c) const;

    // y-polynomial helpers
    void y_mul_acc(const uint64_t* a, const uint64_t* b, unsigned __int128* acc) const;
    void y_reduce(unsigned __int128* acc, uint64_t* out) const;

    const std::vector<std::vector<uint64_t>>& pi_reduction() const { return red_; }
    const std::vector<std::vector<uint64_t>>& y_reduction() const { return hred_; }
    const std::vector<std::vector<uint64_t>>& sigma_powers() const { return sigma_pow_; }

    explicit Ring(const RingSpec& spec);

private:
    void build_unramified();
    void build_eisenstein();
    void build_sigma();

    RingSpec spec_;
    int e_ = 1;
    uint64_t q_ = 0;
    uint64_t mod_ = 0;
    std::vector<uint64_t> ppow_;
    std::vector<uint64_t> h_;
    std::vector<uint64_t> eis_;
    std::vector<ZPoly> F_iter_;
    std::vector<mpz_class> Fz_;
    std::vector<std::vector<uint64_t>> red_;
    std::vector<std::vector<uint64_t>> hred_;
    std::vector<std::vector<uint64_t>> sigma_pow_;
};

class RingElem {
public:
    using Coords = boost::container::small_vector<uint64_t, 12>;

    RingElem() = default;
    explicit RingElem(const Ring* R);
    RingElem(const Ring* R, Coords c, int prec);

    const Ring* ring() const { return R_; }
    bool valid() const { return R_ != nullptr; }
    const Coords& coords() const { return c_; }
    uint64_t coord(int i, int j) const { return c_[i * R_->s() + j]; }
    int prec() const { return prec_; }

    // pi-adic valuation, kInf when indistinguishable from zero
    int valuation() const;
    bool is_zero() const { return valuation() >= kInf; }
    bool is_unit() const { return valuation() == 0; }
    bool equals(const RingElem& o) const;
    bool operator==(const RingElem& o) const { return equals(o); }
    bool operator!=(const RingElem& o) const { return !equals(o); }
    // exact coordinate equality, precision included
    bool identical(const RingElem& o) const;

    RingElem operator+(const RingElem& o) const;
    RingElem operator-(const RingElem& o) const;
    RingElem operator*(const RingElem& o) const;
    RingElem operator-() const;
    RingElem& operator+=(const RingElem& o);
    RingElem& operator-=(const RingElem& o);
    RingElem& operator*=(const RingElem& o);
    RingElem scaled(long c) const;
    RingElem scaled_mod(uint64_t c) const;
    // multiplication by p^k, gaining k*e digits of precision
    RingElem times_ppow(int k) const;
    RingElem pow(uint64_t k) const;

    RingElem exact_div_p(int k) const;
    RingElem with_prec(int P) const;
    RingElem phi() const;
    RingElem phi_pow(int k) const;
    RingElem inverse() const;

    // reduction mod (pi, p), as an element of the residue field
    RingElem residue() const;

    nlohmann::json to_json() const;
    static RingElem from_json(const Ring* R, const nlohmann::json& j);
    std::string to_string() const;

private:
    void truncate();

    const Ring* R_ = nullptr;
    Coords c_;
    int prec_ = 0;
};

// Maps an element of a ring without pi part (level -1, s dividing the target
// embedding only when equal or 1) into target's constant pi coordinate.
RingElem lift_into(const RingElem& x, const Ring* target);
// pi_{m-1} -> F(pi_m)
RingElem embed_lower(const RingElem& x, const Ring* target);
RingElem teichmuller(const RingElem& u, const Ring* target);
// element of F_q from its base-p digit index
RingElem fq_element(const Ring* fq, uint64_t index);
uint64_t fq_index(const RingElem& u);

}  // namespace wittlab
