#include "wittlab/upoly.hpp"

#include <mutex>
#include <sstream>
#include <tuple>

#include "wittlab/errors.hpp"

namespace wittlab {

size_t ExpsHash::operator()(const Exps& e) const noexcept {
    uint64_t h = 1469598103934665603ull;
    for (uint16_t x : e) {
        h ^= x;
        h *= 1099511628211ull;
    }
    return static_cast<size_t>(h ^ (h >> 29));
}

bool GradedLexGreater::operator()(const Exps& a, const Exps& b) const {
    unsigned da = 0, db = 0;
    for (int i = 0; i < kMaxVars; ++i) {
        da += a[i];
        db += b[i];
    }
    if (da != db) return da > db;
    return a > b;
}

std::string var_name(int slot) {
    if (slot < kYOffset) return "X" + std::to_string(slot);
    return "Y" + std::to_string(slot - kYOffset);
}

int x_slot(int i) {
    if (i < 0 || i >= kYOffset) throw InvalidArgument("X index out of range");
    return i;
}

int y_slot(int i) {
    if (i < 0 || i >= kMaxVars - kYOffset) throw InvalidArgument("Y index out of range");
    return kYOffset + i;
}

IntPoly IntPoly::constant(const mpz_class& c) {
    IntPoly r;
    if (c != 0) r.terms.emplace(Exps{}, c);
    return r;
}

IntPoly IntPoly::variable(int slot, unsigned exp) {
    IntPoly r;
    Exps e{};
    e[slot] = static_cast<uint16_t>(exp);
    r.terms.emplace(e, mpz_class(1));
    return r;
}

static void prune(IntPoly& p) {
    for (auto it = p.terms.begin(); it != p.terms.end();) {
        if (it->second == 0)
            it = p.terms.erase(it);
        else
            ++it;
    }
}

IntPoly& IntPoly::operator+=(const IntPoly& o) {
    for (const auto& [e, c] : o.terms) terms[e] += c;
    prune(*this);
    return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& o) {
    for (const auto& [e, c] : o.terms) terms[e] -= c;
    prune(*this);
    return *this;
}

IntPoly IntPoly::operator+(const IntPoly& o) const {
    IntPoly r = *this;
    r += o;
    return r;
}

IntPoly IntPoly::operator-(const IntPoly& o) const {
    IntPoly r = *this;
    r -= o;
    return r;
}

IntPoly IntPoly::operator-() const {
    IntPoly r = *this;
    for (auto& [e, c] : r.terms) c = -c;
    return r;
}

IntPoly IntPoly::operator*(const IntPoly& o) const {
    IntPoly r;
    r.terms.reserve(terms.size() * 2 + o.terms.size() * 2);
    for (const auto& [ea, ca] : terms) {
        for (const auto& [eb, cb] : o.terms) {
            Exps e;
            for (int i = 0; i < kMaxVars; ++i) e[i] = static_cast<uint16_t>(ea[i] + eb[i]);
            mpz_class& slot = r.terms[e];
            mpz_addmul(slot.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
        }
    }
    prune(r);
    return r;
}

IntPoly IntPoly::scaled(const mpz_class& c) const {
    if (c == 0) return {};
    IntPoly r = *this;
    for (auto& [e, x] : r.terms) x *= c;
    return r;
}

IntPoly IntPoly::pow(unsigned k) const {
    IntPoly result = constant(1);
    IntPoly base = *this;
    while (k) {
        if (k & 1u) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

bool IntPoly::operator==(const IntPoly& o) const {
    if (terms.size() != o.terms.size()) return false;
    for (const auto& [e, c] : terms) {
        auto it = o.terms.find(e);
        if (it == o.terms.end() || it->second != c) return false;
    }
    return true;
}

UniversalPoly::UniversalPoly(int prime, const IntPoly& src) : p(prime) {
    for (const auto& [e, c] : src.terms)
        if (c != 0) terms.emplace(e, mpq_class(c));
}

bool UniversalPoly::is_integral() const {
    for (const auto& [e, c] : terms)
        if (c.get_den() != 1) return false;
    return true;
}

IntPoly UniversalPoly::to_int() const {
    IntPoly r;
    for (const auto& [e, c] : terms) {
        if (c.get_den() != 1) throw IntegralityFailure("coefficient " + c.get_str());
        r.terms.emplace(e, c.get_num());
    }
    return r;
}

int UniversalPoly::max_slot() const {
    int m = -1;
    for (const auto& [e, c] : terms)
        for (int i = 0; i < kMaxVars; ++i)
            if (e[i] && i > m) m = i;
    return m;
}

std::string UniversalPoly::to_text() const {
    std::ostringstream os;
    for (const auto& [e, c] : terms) {
        os << c.get_str() << " *";
        bool any = false;
        for (int i = 0; i < kMaxVars; ++i) {
            if (!e[i]) continue;
            os << ' ' << var_name(i) << '^' << e[i];
            any = true;
        }
        if (!any) os << " 1";
        os << '\n';
    }
    return os.str();
}

nlohmann::json UniversalPoly::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [e, c] : terms) {
        nlohmann::json ex = nlohmann::json::object();
        for (int i = 0; i < kMaxVars; ++i)
            if (e[i]) ex[var_name(i)] = e[i];
        arr.push_back({{"coeff", c.get_str()}, {"exps", ex}});
    }
    return arr;
}

static int parse_var(const std::string& name) {
    if (name.size() < 2 || (name[0] != 'X' && name[0] != 'Y'))
        throw InvalidArgument("bad indeterminate '" + name + "'");
    int idx = std::stoi(name.substr(1));
    return name[0] == 'X' ? x_slot(idx) : y_slot(idx);
}

UniversalPoly UniversalPoly::from_json(int prime, const nlohmann::json& j) {
    UniversalPoly r;
    r.p = prime;
    for (const auto& t : j) {
        Exps e{};
        for (auto it = t.at("exps").begin(); it != t.at("exps").end(); ++it)
            e[parse_var(it.key())] = it.value().get<uint16_t>();
        mpq_class c(t.at("coeff").get<std::string>());
        c.canonicalize();
        if (c != 0) r.terms[e] += c;
    }
    return r;
}

UniversalPoly UniversalPoly::from_text(int prime, const std::string& text) {
    UniversalPoly r;
    r.p = prime;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string coeff, star, tok;
        ls >> coeff >> star;
        if (star != "*") throw InvalidArgument("malformed term: " + line);
        Exps e{};
        while (ls >> tok) {
            if (tok == "1") continue;
            auto caret = tok.find('^');
            if (caret == std::string::npos) throw InvalidArgument("malformed factor: " + tok);
            e[parse_var(tok.substr(0, caret))] = static_cast<uint16_t>(std::stoi(tok.substr(caret + 1)));
        }
        mpq_class c(coeff);
        c.canonicalize();
        if (c != 0) r.terms[e] += c;
    }
    return r;
}

PolyKind parse_kind(const std::string& s) {
    if (s == "sum") return PolyKind::Sum;
    if (s == "prod") return PolyKind::Prod;
    if (s == "neg") return PolyKind::Neg;
    if (s == "frob") return PolyKind::Frob;
    throw InvalidArgument("unknown polynomial kind '" + s + "'");
}

std::string kind_name(PolyKind k) {
    switch (k) {
        case PolyKind::Sum: return "sum";
        case PolyKind::Prod: return "prod";
        case PolyKind::Neg: return "neg";
        case PolyKind::Frob: return "frob";
    }
    return "?";
}

static mpz_class ipow(long base, unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
    return r;
}

IntPoly ghost_int(int p, int n, int offset) {
    IntPoly r;
    for (int i = 0; i <= n; ++i) {
        Exps e{};
        mpz_class ex = ipow(p, n - i);
        if (ex > 65535) throw SizeLimitExceeded("exponent too large");
        e[offset + i] = static_cast<uint16_t>(ex.get_ui());
        r.terms.emplace(e, ipow(p, i));
    }
    return r;
}

UniversalPoly ghost_poly(int p, int n) {
    if (p < 2) throw InvalidArgument("p must be prime");
    if (n + 1 > kYOffset) throw SizeLimitExceeded("ghost index beyond available indeterminates");
    return UniversalPoly(p, ghost_int(p, n));
}

// number of exponent vectors (e_0..e_k) with sum e_i p^i = w, for w = 0..W
static std::vector<double> weighted_counts(int p, int k, long W) {
    std::vector<double> c(W + 1, 0.0);
    c[0] = 1.0;
    long coin = 1;
    for (int i = 0; i <= k; ++i) {
        for (long w = coin; w <= W; ++w) c[w] += c[w - coin];
        coin *= p;
    }
    return c;
}

double monomial_bound(PolyKind kind, int p, int n) {
    long W = ipow(p, n).get_si();
    switch (kind) {
        case PolyKind::Neg: return weighted_counts(p, n, W)[W];
        case PolyKind::Prod: {
            double c = weighted_counts(p, n, W)[W];
            return c * c;
        }
        case PolyKind::Sum: {
            auto c = weighted_counts(p, n, W);
            double s = 0;
            for (long k = 0; k <= W; ++k) s += c[k] * c[W - k];
            return s;
        }
        case PolyKind::Frob: {
            long W1 = W * p;
            return weighted_counts(p, n + 1, W1)[W1];
        }
    }
    return 0;
}

static IntPoly target(PolyKind kind, int p, int n) {
    switch (kind) {
        case PolyKind::Sum: return ghost_int(p, n, 0) + ghost_int(p, n, kYOffset);
        case PolyKind::Prod: return ghost_int(p, n, 0) * ghost_int(p, n, kYOffset);
        case PolyKind::Neg: return -ghost_int(p, n, 0);
        case PolyKind::Frob: return ghost_int(p, n + 1, 0);
    }
    return {};
}

static bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

std::vector<UniversalPoly> structural_polys(PolyKind kind, int p, int len, const BuildLimits& lim) {
    if (!is_prime(p)) throw InvalidArgument("p must be prime");
    if (len < 1) throw InvalidArgument("length must be positive");
    if (p > kMaxPrime || len > kMaxLen)
        throw SizeLimitExceeded("universal polynomials are generated only for p <= 7 and length <= 5");

    std::vector<UniversalPoly> out;
    std::vector<IntPoly> polys;
    // powers[i] holds Q_i^{p^{n-i}} for the current n
    std::vector<IntPoly> powers;
    for (int n = 0; n < len; ++n) {
        double bound = monomial_bound(kind, p, n);
        if (bound > lim.max_terms) {
            std::ostringstream os;
            os << kind_name(kind) << " polynomial " << n << " for p=" << p << " may have up to "
               << bound << " terms (limit " << lim.max_terms << ")";
            throw SizeLimitExceeded(os.str());
        }
        for (auto& pw : powers) pw = pw.pow(static_cast<unsigned>(p));
        if (n > 0) powers.push_back(polys[n - 1].pow(static_cast<unsigned>(p)));

        IntPoly num = target(kind, p, n);
        for (int i = 0; i < n; ++i) num -= powers[i].scaled(ipow(p, i));

        mpz_class pn = ipow(p, n);
        IntPoly q;
        q.terms.reserve(num.terms.size());
        for (const auto& [e, c] : num.terms) {
            if (!mpz_divisible_p(c.get_mpz_t(), pn.get_mpz_t())) {
                mpq_class bad(c, pn);
                bad.canonicalize();
                throw IntegralityFailure(kind_name(kind) + " polynomial " + std::to_string(n) +
                                         " has coefficient " + bad.get_str());
            }
            mpz_class qc;
            mpz_divexact(qc.get_mpz_t(), c.get_mpz_t(), pn.get_mpz_t());
            q.terms.emplace(e, std::move(qc));
        }
        out.emplace_back(p, q);
        polys.push_back(std::move(q));
    }
    return out;
}

const std::vector<UniversalPoly>& structural_polys_cached(PolyKind kind, int p, int len) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::vector<UniversalPoly>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(static_cast<int>(kind), p, len);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // a longer cached family serves shorter requests
    for (int longer = kMaxLen; longer > len; --longer) {
        auto lt = cache.find(std::make_tuple(static_cast<int>(kind), p, longer));
        if (lt != cache.end()) {
            std::vector<UniversalPoly> head(lt->second.begin(), lt->second.begin() + len);
            return cache.emplace(key, std::move(head)).first->second;
        }
    }
    return cache.emplace(key, structural_polys(kind, p, len)).first->second;
}

bool check_ghost_identity(PolyKind kind, int p, const std::vector<UniversalPoly>& polys, int n) {
    if (n >= static_cast<int>(polys.size())) throw InvalidArgument("identity index beyond family");
    IntPoly lhs;
    mpz_class scale = 1;
    for (int i = 0; i <= n; ++i) {
        IntPoly q = polys[i].to_int();
        long k = ipow(p, n - i).get_si();
        IntPoly acc = q;
        for (long j = 1; j < k; ++j) acc = acc * q;
        lhs += acc.scaled(scale);
        scale *= p;
    }
    return lhs == target(kind, p, n);
}

}  // namespace wittlab
