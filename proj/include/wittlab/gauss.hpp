#pragma once

#include <string>
#include <vector>

#include "wittlab/characters.hpp"

namespace wittlab {

// full: z_1 over F_q; units: z_1 over F_q^*
enum class Convention { full, units };
std::string convention_name(Convention c);

// -sum psi(z) chi(z) over z_0 in F_q^*, z_1 per the convention, from snapped values
RingElem gauss_brute(const CharContext& ctx, const CharacterTable& psi, uint64_t m, uint64_t b, Convention conv);
RingElem gauss_brute(const CharContext& ctx, uint64_t m, uint64_t b, Convention conv);

// -Omega_2(x0, x1) x0^m Omega_1(Teich(b) x1 x0^{p(q-2)}) to total degree D <= ctx D
TruncSeries2 kernel_H(const CharContext& ctx, uint64_t m, uint64_t b, int D = 0);

// b_{q n0, q n1} at (n0, n1), degree floor(D/q)
TruncSeries2 dwork_op(const TruncSeries2& G, uint64_t q);
// Dw_q(H G)
TruncSeries2 alpha_apply(const TruncSeries2& H, const TruncSeries2& G, uint64_t q);

struct AlphaTrace {
    RingElem value;
    EvalCertificate cert;
    int shells = 0;
};

// sum of b_{(q-1)n0,(q-1)n1}, certified on shells n0 + n1 = k to precision M
AlphaTrace alpha_trace(const TruncSeries2& H, uint64_t q, int M);
// the same sum without certification, over n0 + n1 <= cutoff
RingElem alpha_trace_partial(const TruncSeries2& H, uint64_t q, int cutoff);

// rows and columns indexed by monomials of total degree <= cutoff in graded-lex
// order; entry (m, n) = b_{q m0 - n0, q m1 - n1}
using Matrix = std::vector<std::vector<RingElem>>;
Matrix alpha_matrix(const TruncSeries2& H, uint64_t q, int cutoff);
RingElem matrix_trace(const Matrix& A);

// sum over x in mu_{q-1} of x^n
RingElem root_power_sum(const Ring* R, uint64_t n);
// sum of H over mu_{q-1} x mu_{q-1}, finite sum of the truncation
RingElem teichmuller_grid_sum(const TruncSeries2& H);

struct TraceReport {
    int p = 0;
    int s = 0;
    uint64_t t_residue = 0;
    uint64_t m = 0;
    uint64_t b = 0;
    int D = 0;
    int M = 0;
    RingElem g_full;
    RingElem g_units;
    RingElem trace_value;
    RingElem rhs;  // (q-1)^2 Tr(alpha)
    int residual_full = 0;
    int residual_units = 0;
    std::vector<std::string> matching;
    EvalCertificate cert;
    double brute_ms = 0;
    double trace_ms = 0;

    nlohmann::json to_json() const;
};

// both conventions against (q-1)^2 Tr(alpha); NoConventionMatches when neither reaches M
TraceReport trace_formula_check(const CharContext& ctx, const CharacterTable& psi, uint64_t m, uint64_t b);
TraceReport trace_formula_check(const CharContext& ctx, uint64_t m, uint64_t b);

// timings of gauss_brute and alpha_trace over several truncation degrees
nlohmann::json bench(const CharParams& params, const std::vector<int>& degrees, uint64_t m, uint64_t b, int jobs);

}  // namespace wittlab
