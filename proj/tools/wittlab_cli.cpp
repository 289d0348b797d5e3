#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

#include "selftest.hpp"
#include "wittlab/errors.hpp"
#include "wittlab/gauss.hpp"

using namespace wittlab;
using json = nlohmann::json;

namespace {

struct RunConfig {
    int p = 2;
    int s = 1;
    int ell = 2;
    int N = 0;
    int D = 0;
    int M = 0;
    std::string lt = "cyc";
    std::vector<long> lt_g;
    uint64_t t_residue = 0;
    int chi_m = -1;
    int chi_b = -1;
    std::string convention = "both";
    std::string format = "json";
    int jobs = 0;
    bool timing = false;

    CharParams params() const {
        CharParams P;
        P.p = p;
        P.s = s;
        P.ell = ell;
        if (!lt_g.empty())
            P.F = LubinTate::custom(lt_g);
        else
            P.F = lt == "plain" ? LubinTate::plain() : LubinTate::cyclotomic(p);
        P.N = N;
        P.D = D;
        P.M = M;
        P.t_residue = t_residue;
        return P.resolved();
    }
    int workers() const {
        if (jobs > 0) return jobs;
        return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
    }
};

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--p", cfg.p, "prime")->check(CLI::IsMember({2, 3, 5, 7}));
    sub->add_option("--s", cfg.s, "residue degree, q = p^s")->check(CLI::Range(1, 6));
    sub->add_option("--ell", cfg.ell, "Witt length of the character")->check(CLI::Range(1, 3));
    sub->add_option("--prec", cfg.N, "p-adic precision N (0: default)");
    sub->add_option("--deg", cfg.D, "series truncation degree D (0: default)");
    sub->add_option("--target-prec", cfg.M, "target pi-adic precision M (0: 3e)");
    sub->add_option("--lt", cfg.lt, "Lubin-Tate series")->check(CLI::IsMember({"cyc", "plain"}));
    sub->add_option("--lt-g", cfg.lt_g, "custom G coefficients, F = pT + T^p + pT^2 G(T)")->delimiter(',');
    sub->add_option("--t-residue", cfg.t_residue, "index of t in F_q (0: smallest with non-zero trace)");
    sub->add_option("--jobs", cfg.jobs, "worker threads (0: hardware, at most 8)");
}

void add_format(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "text"}));
}

json config_json(const CharParams& P) {
    return {{"p", P.p}, {"s", P.s}, {"ell", P.ell}, {"N", P.N}, {"D", P.D}, {"M", P.M}, {"lt", P.F.name}, {"t", P.t_residue}};
}

void emit(const json& j, const std::string& format, const std::string& text) {
    if (format == "json")
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

// ---- gen-polys

int cmd_gen_polys(int p, int len, const std::string& kind_s, const std::string& format, const std::string& out_dir) {
    PolyKind kind = parse_kind(kind_s);
    std::vector<UniversalPoly> fam = structural_polys(kind, p, len);
    for (const auto& f : fam)
        if (!f.is_integral()) throw IntegralityFailure("non-integral member in " + kind_name(kind));
    json j = {{"schema", 1}, {"p", p}, {"kind", kind_name(kind)}, {"len", len}, {"polys", json::array()}};
    std::string text;
    for (size_t n = 0; n < fam.size(); ++n) {
        j["polys"].push_back({{"n", n}, {"terms", fam[n].to_json()}});
        text += "# " + kind_name(kind) + " " + std::to_string(n) + "\n" + fam[n].to_text();
    }
    if (!out_dir.empty()) {
        for (size_t n = 0; n < fam.size(); ++n) {
            std::string base = out_dir + "/" + kind_name(kind) + "_p" + std::to_string(p) + "_" + std::to_string(n);
            std::ofstream(base + ".txt") << fam[n].to_text();
            std::ofstream(base + ".json") << fam[n].to_json().dump() << "\n";
        }
    }
    emit(j, format, text);
    return 0;
}

// ---- witt

std::vector<long> parse_ints(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) out.push_back(std::stol(tok));
    return out;
}

int cmd_witt(const RunConfig& cfg, const std::string& op, const std::string& a_s, const std::string& b_s) {
    const Ring* R = Ring::make(RingSpec{cfg.p, 1, -1, LubinTate::cyclotomic(cfg.p), cfg.N > 0 ? cfg.N : 10});
    auto vec = [R](const std::string& s) {
        WittVec v{R, {}};
        for (long x : parse_ints(s)) v.c.push_back(R->from_int(x));
        if (v.c.empty()) throw InvalidArgument("empty Witt vector");
        return v;
    };
    WittVec a = vec(a_s);
    WittVec res;
    if (op == "frob")
        res = frob(a);
    else if (op == "versch")
        res = versch(a);
    else if (op == "neg")
        res = witt_neg(a);
    else if (op == "ghost") {
        WittVec g{R, ghost_map(a)};
        res = g;
    } else {
        WittVec b = vec(b_s);
        if (b.len() != a.len()) throw InvalidArgument("vectors of different length");
        res = op == "add" ? witt_add(a, b) : op == "sub" ? witt_sub(a, b) : witt_mul(a, b);
    }
    json j = {{"schema", 1}, {"p", cfg.p}, {"N", R->N()}, {"op", op}, {"result", res.to_json()}};
    std::string text;
    for (const auto& c : res.c) text += c.to_string() + "\n";
    emit(j, cfg.format, text);
    return 0;
}

// ---- char-table

int cmd_char_table(const RunConfig& cfg, int splitting_r, bool csv) {
    CharParams P = cfg.params();
    CharContext ctx(P);
    CharacterTable T = character_table(ctx, PsiRoute::omega, cfg.workers());
    json j = {{"schema", 1}, {"config", config_json(P)}, {"nondegenerate", ctx.nondegenerate()}};
    if (!ctx.nondegenerate()) j["warning"] = "t has trace in pZ_p: psi is degenerate";
    int rc = 0;
    std::string text;
    try {
        CharacterChecks c = check_character(ctx, T);
        j["checks"] = {{"homomorphism", c.homomorphism},     {"image_size", c.image_size},
                       {"full_image", c.full_image},         {"separates_points", c.separates_points},
                       {"trace_routes_agree", c.trace_routes_agree}, {"pairs_checked", c.pairs_checked}};
        text += "homomorphism: " + std::string(c.homomorphism ? "yes" : "no") + "\nimage size: " +
                std::to_string(c.image_size) + "\nseparates points: " + (c.separates_points ? "yes" : "no") + "\n";
        if (ctx.nondegenerate() && !(c.full_image && c.separates_points && c.trace_routes_agree)) rc = 1;
    } catch (const ReportedMismatch& e) {
        j["checks"] = {{"homomorphism", false}, {"error", e.what()}};
        text += std::string(e.what()) + "\n";
        rc = 1;
    }
    if (splitting_r > 0) {
        SplittingReport sp = check_splitting(ctx, splitting_r, cfg.workers());
        j["splitting"] = {{"r", sp.r}, {"vectors", sp.vectors}, {"product_formula", sp.product_formula},
                          {"transitivity", sp.transitivity}};
        text += "transitivity over r=" + std::to_string(sp.r) + ": " + (sp.transitivity ? "yes" : "no") + "\n";
    }
    j["table"] = T.to_json();
    if (!ctx.nondegenerate()) text = "warning: degenerate t\n" + text;
    emit(j, cfg.format, text + (csv ? T.to_csv() : ""));
    return rc;
}

// ---- gauss

int cmd_gauss(const RunConfig& cfg) {
    CharParams P = cfg.params();
    if (P.ell != 2) throw InvalidArgument("gauss works with ell = 2");
    CharContext ctx(P);
    uint64_t q = ctx.q();
    if (cfg.chi_m >= 0 && static_cast<uint64_t>(cfg.chi_m) > q - 2) throw InvalidArgument("--chi-m must be at most q-2");
    if (cfg.chi_b >= 0 && static_cast<uint64_t>(cfg.chi_b) >= q) throw InvalidArgument("--chi-b must be below q");
    CharacterTable T = character_table(ctx, PsiRoute::omega, cfg.workers());
    json runs = json::array();
    std::string text;
    int rc = 0;
    for (uint64_t m = 0; m + 2 <= q; ++m) {
        if (cfg.chi_m >= 0 && m != static_cast<uint64_t>(cfg.chi_m)) continue;
        for (uint64_t b = 0; b < q; ++b) {
            if (cfg.chi_b >= 0 && b != static_cast<uint64_t>(cfg.chi_b)) continue;
            std::string tag = "chi=(" + std::to_string(m) + "," + std::to_string(b) + ")";
            try {
                TraceReport rep = trace_formula_check(ctx, T, m, b);
                json r = rep.to_json();
                if (!cfg.timing) r.erase("timing_ms");
                bool ok = cfg.convention == "both" ||
                          std::find(rep.matching.begin(), rep.matching.end(), cfg.convention) != rep.matching.end();
                r["ok"] = ok;
                if (!ok) rc = 1;
                runs.push_back(r);
                std::string conv;
                for (const auto& c : rep.matching) conv += (conv.empty() ? "" : ",") + c;
                text += tag + ": residual full " + std::to_string(rep.residual_full) + ", units " +
                        std::to_string(rep.residual_units) + ", target " + std::to_string(rep.M) + ", matches " + conv + "\n";
            } catch (const Error& e) {
                rc = 1;
                runs.push_back({{"chi", {{"m", m}, {"b", b}}}, {"ok", false}, {"error", e.what()}});
                text += tag + ": " + e.what() + "\n";
            }
        }
    }
    json j = {{"schema", 1}, {"config", config_json(P)}, {"convention", cfg.convention}, {"runs", runs}};
    emit(j, cfg.format, text);
    return rc;
}

// ---- bench

int cmd_bench(const RunConfig& cfg, const std::vector<int>& degrees) {
    CharParams P = cfg.params();
    uint64_t m = cfg.chi_m >= 0 ? static_cast<uint64_t>(cfg.chi_m) : 0;
    uint64_t b = cfg.chi_b >= 0 ? static_cast<uint64_t>(cfg.chi_b) : 0;
    json rep = bench(P, degrees, m, b, cfg.workers());
    rep["schema"] = 1;
    std::string text;
    for (const auto& row : rep["rows"]) {
        text += "D=" + std::to_string(row["D"].get<int>()) + " setup " + std::to_string(row["setup_ms"].get<double>()) +
                " ms, brute " + std::to_string(row["brute_ms"].get<double>()) + " ms, trace " +
                std::to_string(row["trace_ms"].get<double>()) + " ms, " +
                (row["certified"].get<bool>() ? "certified" : "not certified") + "\n";
    }
    emit(rep, cfg.format, text);
    return 0;
}

// ---- selftest

int cmd_selftest(const RunConfig& cfg, const std::vector<int>& only) {
    SelftestOptions opt;
    opt.jobs = cfg.workers();
    opt.only = only;
    bool text = cfg.format == "text";
    auto results = run_selftest(opt, [&](const CriterionResult& r) {
        if (text) std::cout << r.line() << std::endl;
    });
    size_t passed = 0;
    json arr = json::array();
    for (const auto& r : results) {
        passed += r.pass;
        arr.push_back(r.to_json());
    }
    if (text)
        std::cout << passed << " of " << results.size() << " criteria passed\n";
    else
        std::cout << json{{"schema", 1}, {"passed", passed}, {"total", results.size()}, {"criteria", arr}}.dump(2) << "\n";
    return passed == results.size() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Witt vector, Pulita exponential and Gauss sum computations"};
    app.require_subcommand(1);
    RunConfig cfg;

    int gp_p = 2, gp_len = 3;
    std::string gp_kind = "sum", gp_out;
    auto* gen = app.add_subcommand("gen-polys", "universal Witt polynomials");
    gen->add_option("--p", gp_p, "prime")->check(CLI::IsMember({2, 3, 5, 7}));
    gen->add_option("--len", gp_len, "number of members")->check(CLI::Range(1, 5));
    gen->add_option("--kind", gp_kind, "sum|prod|neg|frob")->check(CLI::IsMember({"sum", "prod", "neg", "frob"}));
    gen->add_option("--out", gp_out, "also write one .txt and one .json file per member into this directory");
    add_format(gen, cfg);

    std::string w_op = "add", w_a, w_b;
    auto* witt = app.add_subcommand("witt", "Witt vector arithmetic over Z/p^N");
    witt->add_option("--p", cfg.p, "prime")->check(CLI::IsMember({2, 3, 5, 7}));
    witt->add_option("--prec", cfg.N, "N");
    witt->add_option("--op", w_op, "add|sub|mul|neg|frob|versch|ghost")
        ->check(CLI::IsMember({"add", "sub", "mul", "neg", "frob", "versch", "ghost"}));
    witt->add_option("--a", w_a, "components, comma separated")->required();
    witt->add_option("--b", w_b, "components, comma separated");
    add_format(witt, cfg);

    int split_r = 0;
    bool csv = false;
    auto* table = app.add_subcommand("char-table", "additive character of W_ell(F_q) and its checks");
    add_common(table, cfg);
    add_format(table, cfg);
    table->add_option("--splitting", split_r, "also check transitivity and the product formula over F_{q^r}");
    table->add_flag("--csv", csv, "append the table as CSV to text output");

    auto* gauss = app.add_subcommand("gauss", "Gauss sums against the trace of the Dwork operator");
    add_common(gauss, cfg);
    add_format(gauss, cfg);
    gauss->add_option("--chi-m", cfg.chi_m, "m of chi (default: all)");
    gauss->add_option("--chi-b", cfg.chi_b, "b of chi (default: all)");
    gauss->add_option("--convention", cfg.convention, "convention that must match")
        ->check(CLI::IsMember({"full", "units", "both"}));
    gauss->add_flag("--timing", cfg.timing, "include timings in the report");

    std::vector<int> degrees{64, 96, 128};
    auto* bnch = app.add_subcommand("bench", "timings over several truncation degrees");
    add_common(bnch, cfg);
    add_format(bnch, cfg);
    bnch->add_option("--D,--degrees", degrees, "comma separated degrees")->delimiter(',');
    bnch->add_option("--chi-m", cfg.chi_m, "m of chi");
    bnch->add_option("--chi-b", cfg.chi_b, "b of chi");

    std::vector<int> only;
    auto* self = app.add_subcommand("selftest", "pinned acceptance suite");
    self->add_option("--only", only, "criterion numbers")->delimiter(',');
    self->add_option("--jobs", cfg.jobs, "worker threads");
    std::string self_format = "text";
    self->add_option("--format", self_format, "output format")->check(CLI::IsMember({"json", "text"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_polys(gp_p, gp_len, gp_kind, cfg.format, gp_out);
        if (witt->parsed()) return cmd_witt(cfg, w_op, w_a, w_b);
        if (table->parsed()) return cmd_char_table(cfg, split_r, csv);
        if (gauss->parsed()) return cmd_gauss(cfg);
        if (bnch->parsed()) return cmd_bench(cfg, degrees);
        if (self->parsed()) {
            cfg.format = self_format;
            return cmd_selftest(cfg, only);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
