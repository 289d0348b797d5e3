#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wittlab/series.hpp"

namespace wittlab {

// Runs body(i) for i < n on up to jobs threads; rethrows the first exception.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& body);

// Lubin-Tate F -> cyclotomic (1+T)^p - 1, the unique u(T) = T + ... with u o F = C o u
QSeries lt_to_cyclotomic(const LubinTate& F, int p, int D);

struct SnapResult {
    size_t index = 0;
    int distance = 0;  // valuation of x - root
    int runner_up = 0;
};

// Finite set of roots of unity inside one ring, with exact snapping.
struct RootTable {
    const Ring* R = nullptr;
    uint64_t order = 0;
    std::vector<RingElem> roots;
    // largest valuation of a difference of two distinct roots
    int vmax_pairwise = 0;

    // nearest root; SnapAmbiguous unless strictly inside half the minimal distance
    SnapResult snap(const RingElem& x) const;
    // required valuation of x - root for a snap to be accepted
    double snap_threshold() const;
};

// mu_{p^ell} in a ring at level ell-1, roots[k] = zeta^k with zeta = 1 + u(pi_{ell-1})
RootTable mu_ppow_table(int ell, const Ring* R);
// Teich(u) zeta_p^k, indexed by (u - 1) * p + k over the non-zero residues u
RootTable mu_qm1_p_table(const Ring* R);

// sum of phi^j(t) over j < s, and the same through t^{p^j}
RingElem trace_galois(const RingElem& t);
RingElem trace_powers(const RingElem& t);
// smallest residue index with non-zero absolute trace
uint64_t default_t_residue(int p, int s);

struct CharParams {
    int p = 2;
    int s = 1;
    int ell = 2;
    LubinTate F = LubinTate::cyclotomic(2);
    int N = 0;  // 0 picks a default from p
    int D = 0;  // 0 picks 128 for p = 2, 96 for p = 3, 64 above
    int M = 0;  // 0 picks 3e
    uint64_t t_residue = 0;  // 0 picks default_t_residue

    CharParams resolved() const;
};

// theta_{ell-j-1,s}(1)(t^{p^j} x) for j < ell, computed in R
std::vector<TruncSeries1> omega_factors(const Ring* R, int s, int ell, const RingElem& t, int D);

// psi_{ell,s,t} on W_ell(F_q) and the related objects.
class CharContext {
public:
    explicit CharContext(const CharParams& params);

    const CharParams& params() const { return P_; }
    const Ring* ring() const { return R_; }
    const Ring* residue() const { return Fq_; }
    uint64_t q() const { return Fq_->q(); }
    int M() const { return P_.M; }
    // precision used for psi and chi values, just above the snap threshold
    int snap_prec() const { return snap_prec_; }
    const RingElem& t() const { return t_; }
    bool nondegenerate() const { return nondegenerate_; }
    const RootTable& roots() const { return mu_; }
    const std::vector<TruncSeries1>& omega() const { return omega_; }
    // Omega_{1,s,t}(x) = theta_{0,s}(1)(t x)
    const TruncSeries1& omega1() const { return omega1_; }
    const RootTable& chi_roots() const { return chi_roots_; }

    // lexicographic enumeration of W_ell(F_q), y_0 most significant
    uint64_t domain_size() const;
    WittVec vector_at(uint64_t row) const;
    uint64_t row_of(const WittVec& y) const;

    // Omega at the Teichmuller point of y, precision snap_prec
    RingElem omega_value(const WittVec& y) const;
    // theta_{ell-1,s}(a)(t) for an integral Witt vector a over the ring
    RingElem theta_value(const WittVec& a) const;
    RingElem theta_value_teich(const WittVec& y) const;

    SnapResult psi(const WittVec& y) const;
    SnapResult psi_direct(const WittVec& y) const;

    // Teich(z0)^m Omega_1(Teich(b) Teich(z1) Teich(z0)^{p(q-2)}), level ell-1 ring
    RingElem chi_raw(uint64_t m, uint64_t b, const WittVec& z) const;
    RingElem chi(uint64_t m, uint64_t b, const WittVec& z) const;

    // needs t^p = t
    int count_E_t_ell() const;

private:
    int snap_prec_ = 0;
    CharParams P_;
    const Ring* R_ = nullptr;
    const Ring* Fq_ = nullptr;
    RingElem t_;
    bool nondegenerate_ = false;
    RootTable mu_;
    RootTable chi_roots_;
    std::vector<TruncSeries1> omega_;
    TruncSeries1 omega1_;
};

struct CharacterRow {
    uint64_t row = 0;
    std::vector<uint64_t> vector;
    uint64_t psi_index = 0;
    int raw_distance = 0;
};

struct CharacterTable {
    std::vector<CharacterRow> rows;
    uint64_t q = 0;
    int ell = 0;
    uint64_t order = 0;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

enum class PsiRoute { omega, direct };

CharacterTable character_table(const CharContext& ctx, PsiRoute route = PsiRoute::omega, int jobs = 1);

struct CharacterChecks {
    bool homomorphism = false;
    size_t image_size = 0;
    bool full_image = false;
    bool separates_points = false;
    bool trace_routes_agree = false;
    uint64_t pairs_checked = 0;
};

// exhaustive checks; ReportedMismatch names the first offending pair
CharacterChecks check_character(const CharContext& ctx, const CharacterTable& table);

struct SplittingReport {
    int r = 1;
    uint64_t vectors = 0;
    bool product_formula = false;
    bool transitivity = false;
};

// psi_{ell,sr,t} = psi_{ell,s,t} o Tr and the product formula over W_ell(F_{q^r}).
// Series over the s*r ring decay about r times more slowly; D_big = 0 picks D r.
SplittingReport check_splitting(const CharContext& ctx, int r, int jobs = 1, int D_big = 0);

// Omega_{2,s,t}(x0, x1) in the ring of ctx, total degree D
TruncSeries2 omega2(const Ring* R, int s, const RingElem& t, int D);
// Omega_{2,sr,t}(x) against prod_i Omega_{2,s,t}(x^{q^i}) over the s*r ring
bool check_omega_factorization(const CharParams& params, int r, int D);

}  // namespace wittlab
