#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace wittlab {

// Indeterminates X_0..X_5 live at slots 0..5, Y_0..Y_5 at slots 6..11.
constexpr int kMaxVars = 12;
constexpr int kYOffset = 6;
constexpr int kMaxLen = 5;
constexpr int kMaxPrime = 7;

using Exps = std::array<uint16_t, kMaxVars>;

struct ExpsHash {
    size_t operator()(const Exps& e) const noexcept;
};

// total degree first, then lexicographic with X_0 most significant; larger terms first
struct GradedLexGreater {
    bool operator()(const Exps& a, const Exps& b) const;
};

std::string var_name(int slot);
int x_slot(int i);
int y_slot(int i);

class IntPoly {
public:
    std::unordered_map<Exps, mpz_class, ExpsHash> terms;

    static IntPoly constant(const mpz_class& c);
    static IntPoly variable(int slot, unsigned exp = 1);

    size_t size() const { return terms.size(); }
    bool is_zero() const { return terms.empty(); }

    IntPoly& operator+=(const IntPoly& o);
    IntPoly& operator-=(const IntPoly& o);
    IntPoly operator+(const IntPoly& o) const;
    IntPoly operator-(const IntPoly& o) const;
    IntPoly operator*(const IntPoly& o) const;
    IntPoly operator-() const;
    IntPoly scaled(const mpz_class& c) const;
    // square-and-multiply
    IntPoly pow(unsigned k) const;
    bool operator==(const IntPoly& o) const;
};

class UniversalPoly {
public:
    int p = 0;
    std::map<Exps, mpq_class, GradedLexGreater> terms;

    UniversalPoly() = default;
    UniversalPoly(int prime, const IntPoly& src);

    bool is_integral() const;
    IntPoly to_int() const;
    // highest slot index that appears, or -1
    int max_slot() const;
    size_t size() const { return terms.size(); }
    bool operator==(const UniversalPoly& o) const { return p == o.p && terms == o.terms; }

    std::string to_text() const;
    nlohmann::json to_json() const;
    static UniversalPoly from_json(int prime, const nlohmann::json& j);
    static UniversalPoly from_text(int prime, const std::string& text);
};

enum class PolyKind { Sum, Prod, Neg, Frob };

PolyKind parse_kind(const std::string& s);
std::string kind_name(PolyKind k);

// fant_n in X_0..X_n (slot offset lets the same polynomial be written in Y)
IntPoly ghost_int(int p, int n, int offset = 0);
UniversalPoly ghost_poly(int p, int n);

// Upper bound on the number of monomials of the n-th member of a family.
double monomial_bound(PolyKind kind, int p, int n);

struct BuildLimits {
    double max_terms = 5.0e5;
};

std::vector<UniversalPoly> structural_polys(PolyKind kind, int p, int len,
                                            const BuildLimits& lim = {});

// process-wide memo; thread safe
const std::vector<UniversalPoly>& structural_polys_cached(PolyKind kind, int p, int len);

// Re-expands fant_n(Q_0..Q_n) by naive substitution and compares with the
// defining right hand side.
bool check_ghost_identity(PolyKind kind, int p, const std::vector<UniversalPoly>& polys, int n);

}  // namespace wittlab
