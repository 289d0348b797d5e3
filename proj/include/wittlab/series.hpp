#pragma once

#include <string>
#include <vector>

#include "wittlab/witt.hpp"

namespace wittlab {

// c_0 + c_1 x + ... + c_D x^D over one ring
class TruncSeries1 {
public:
    TruncSeries1() = default;
    TruncSeries1(const Ring* R, int D, std::string var = "x");

    static TruncSeries1 one(const Ring* R, int D, std::string var = "x");
    static TruncSeries1 monomial(const RingElem& c, int k, int D, std::string var = "x");

    const Ring* ring() const { return R_; }
    int degree() const { return D_; }
    const std::string& var() const { return var_; }
    const RingElem& operator[](int n) const { return c_[n]; }
    RingElem& operator[](int n) { return c_[n]; }
    const std::vector<RingElem>& coeffs() const { return c_; }

    TruncSeries1 operator+(const TruncSeries1& o) const;
    TruncSeries1 operator-(const TruncSeries1& o) const;
    TruncSeries1 operator*(const TruncSeries1& o) const;
    TruncSeries1 scaled(const RingElem& a) const;
    // f(alpha x)
    TruncSeries1 compose_scale(const RingElem& alpha) const;
    // f(x^k), truncated at D_out (default: own degree)
    TruncSeries1 compose_xpow(int k, int D_out = -1) const;
    TruncSeries1 truncated(int D) const;
    // multiplicative inverse, constant term must be a unit
    TruncSeries1 inverse() const;

    bool operator==(const TruncSeries1& o) const;
    bool operator!=(const TruncSeries1& o) const { return !(*this == o); }
    // min over n >= from of v(c_n), clamped by precision
    int min_valuation(int from = 0) const;
    int coeff_valuation(int n) const;

    nlohmann::json to_json() const;

private:
    const Ring* R_ = nullptr;
    int D_ = 0;
    std::string var_ = "x";
    std::vector<RingElem> c_;
};

using QSeries = std::vector<mpq_class>;
using ZSeries = std::vector<mpz_class>;

// exp(f) over Q for f(0) = 0, to degree D
QSeries exp_rational(const QSeries& f, int D);
// reduces a rational series into R; NonIntegralResult when a denominator is divisible by p
TruncSeries1 reduce_series(const QSeries& f, const Ring* R, std::string var = "x");
TruncSeries1 exp_zero_constant(const QSeries& f, int D, const Ring* R);

// exact coefficients of AH(x) up to x^D, memoised
const QSeries& artin_hasse_rational(int p, int D);
TruncSeries1 artin_hasse(int p, int D, const Ring* R);

// smallest L with p^L > D
int effective_length(int p, int D);

ZSeries zseries_mul(const ZSeries& a, const ZSeries& b, int D);
ZSeries zseries_pow(const ZSeries& a, uint64_t k, int D);
ZSeries zseries_compose(const ZSeries& outer, const ZSeries& inner, int D);
// F^{o n}(T) truncated at T^D
ZSeries lt_iterate(const LubinTate& F, int p, int n, int D);
// components of w, exact over Z[[T]] up to T^D
std::vector<ZSeries> witt_w(const LubinTate& F, int p, int L, int D);

// w(pi_m) inside R, which must sit at level >= m; zero when m < 0
WittVec varpi(const Ring* R, int m, int L);
// coefficients Delta(f_k) of F^Delta and G^Delta
std::vector<WittVec> F_delta(const Ring* R, int L);
std::vector<WittVec> G_delta(const Ring* R, int L);
// sum f_j x^j in W_L; a polynomial f is summed exactly, a truncated series
// needs its tail to vanish at precision (components of x of positive valuation)
WittVec witt_series_eval(const std::vector<WittVec>& f, const WittVec& x, bool polynomial);
// varpi_{m+1}^{p-1} + p varpi_{m+1} G^Delta(varpi_{m+1})
WittVec b_vector(const Ring* R, int m, int L);

// prod AH(a_i x^{p^i}) mod x^{D+1}; needs p^len > D
TruncSeries1 artin_hasse_E(const WittVec& a, int D);
TruncSeries1 robba(const Ring* R, int m, int D);
// E(varpi_m a - V^s(varpi_m a^{phi^s})) with a padded to the effective length
TruncSeries1 pulita_theta_ms(int m, int s, const WittVec& a, int D);
TruncSeries1 pulita_theta(int m, const WittVec& a, int D);
// prod_{i<s} theta_m(a^{phi^i}) o x^{p^i}
TruncSeries1 pulita_theta_ms_product(int m, int s, const WittVec& a, int D);

struct EvalCertificate {
    int window_begin = 0;  // start of the last third
    int vA = 0;            // min valuation on the middle third
    int vB = 0;            // min valuation on the last third
    double slope = 0;
    int target = 0;
};

// partial sum of g at z with declared precision M after certifying the tail
RingElem series_eval_unit(const TruncSeries1& g, const RingElem& z, int M, EvalCertificate* cert = nullptr);
// the tail test on its own, applied to a valuation profile
EvalCertificate certify_tail(const std::vector<int>& vals, int M);

// sum b_{n0,n1} x0^n0 x1^n1 over n0 + n1 <= D, stored by total degree with x0^k first
class TruncSeries2 {
public:
    TruncSeries2() = default;
    TruncSeries2(const Ring* R, int D);

    static TruncSeries2 one(const Ring* R, int D);
    static TruncSeries2 monomial(const RingElem& c, int n0, int n1, int D);
    // f(x0) g(x1)
    static TruncSeries2 outer(const TruncSeries1& f, const TruncSeries1& g, int D);
    static size_t index(int n0, int n1) {
        size_t k = static_cast<size_t>(n0 + n1);
        return k * (k + 1) / 2 + static_cast<size_t>(n1);
    }
    static size_t size_for(int D) { return static_cast<size_t>(D + 1) * static_cast<size_t>(D + 2) / 2; }

    const Ring* ring() const { return R_; }
    int degree() const { return D_; }
    const RingElem& at(int n0, int n1) const { return c_[index(n0, n1)]; }
    RingElem& at(int n0, int n1) { return c_[index(n0, n1)]; }

    TruncSeries2 operator+(const TruncSeries2& o) const;
    TruncSeries2 operator-(const TruncSeries2& o) const;
    // skips exactly-zero coefficients, so sparse factors are cheap
    TruncSeries2 operator*(const TruncSeries2& o) const;
    TruncSeries2 scaled(const RingElem& a) const;
    TruncSeries2 truncated(int D) const;
    // f(x0^k, x1^k)
    TruncSeries2 compose_xpow(int k, int D_out = -1) const;

    bool operator==(const TruncSeries2& o) const;
    bool operator!=(const TruncSeries2& o) const { return !(*this == o); }
    // min valuation over n0 + n1 = k
    int shell_valuation(int k) const;
    int min_valuation() const;
    // the full finite sum at (x0, x1), no tail claim
    RingElem eval_partial(const RingElem& x0, const RingElem& x1) const;

    nlohmann::json to_json() const;

private:
    const Ring* R_ = nullptr;
    int D_ = 0;
    std::vector<RingElem> c_;
};

// partial sum at (x0, x1) with precision M, tail certified on total-degree shells
RingElem series2_eval_unit(const TruncSeries2& g, const RingElem& x0, const RingElem& x1, int M,
                           EvalCertificate* cert = nullptr);


}  // namespace wittlab
