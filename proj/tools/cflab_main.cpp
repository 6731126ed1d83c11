// cflab: single command-line entry point for the continued-fraction lab.
//
// One binary, subcommand style. Parameters come from flags, from a strict
// JSON config file (--config), or both; flags override the file. Results go
// to --out (or the config's output_path), else to stdout; a one-line summary
// always goes to stderr. Exit codes: 0 success, 2 validation/usage error,
// 3 budget exceeded, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cflab/bigfloat.hpp"
#include "cflab/cantor_lab.hpp"
#include "cflab/cf_core.hpp"
#include "cflab/errors.hpp"
#include "cflab/format.hpp"
#include "cflab/measure_lab.hpp"
#include "cflab/pressure.hpp"
#include "cflab/primes.hpp"

namespace {

using cflab::BigFloat;
using cflab::Integer;
using cflab::Rational;
using cflab::ValidationError;
using json = nlohmann::json;

// ---------------------------------------------------------------- parsing

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

// Exact rational from "p/q", a decimal string ("0.25"), or an integer string.
Rational parse_exact_rational(const std::string& s) {
    if (s.empty()) throw ValidationError("x: empty value");
    Rational r;
    if (s.find('/') != std::string::npos) {
        if (r.set_str(s, 10) != 0) throw ValidationError("x: cannot parse rational '" + s + "'");
        if (r.get_den() == 0) throw ValidationError("x: zero denominator in '" + s + "'");
        r.canonicalize();
        return r;
    }
    const size_t dot = s.find('.');
    if (dot == std::string::npos) {
        Integer z;
        if (z.set_str(s, 10) != 0) throw ValidationError("x: cannot parse integer '" + s + "'");
        return Rational(z);
    }
    bool neg = false;
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) {
        neg = ip[0] == '-';
        ip.erase(0, 1);
    }
    if (fp.empty()) throw ValidationError("x: malformed decimal '" + s + "'");
    for (char c : ip + fp)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ValidationError("x: malformed decimal '" + s + "'");
    Integer i_part(ip.empty() ? "0" : ip), f_part(fp);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    Integer num = i_part * den + f_part;
    if (neg) num = -num;
    Rational r2(num, den);
    r2.canonicalize();
    return r2;
}

std::vector<Integer> parse_word_digits(const std::string& s) {
    std::vector<Integer> out;
    for (const std::string& tok : split_commas(s)) {
        if (tok.empty()) throw ValidationError("word: empty digit in '" + s + "'");
        Integer z;
        if (z.set_str(tok, 10) != 0) throw ValidationError("word: bad digit '" + tok + "'");
        out.push_back(z);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& tok : split_commas(s)) {
        try {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw ValidationError("bad numeric list entry '" + tok + "'");
            out.push_back(v);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError("bad numeric list entry '" + tok + "'");
        }
    }
    return out;
}

std::vector<uint64_t> parse_u64_list(const std::string& s) {
    std::vector<uint64_t> out;
    for (const std::string& tok : split_commas(s)) {
        try {
            size_t pos = 0;
            unsigned long long v = std::stoull(tok, &pos);
            if (pos != tok.size()) throw ValidationError("bad integer list entry '" + tok + "'");
            out.push_back(v);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError("bad integer list entry '" + tok + "'");
        }
    }
    return out;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

// Strict reader for the params object of one command: every key present in
// the config must be claimed by some fetch, and flags override the file.
class JsonParams {
  public:
    JsonParams(const json& obj, const CLI::App* sub) : obj_(obj), sub_(sub) {
        if (!obj_.is_object() && !obj_.is_null())
            throw ValidationError("config: params must be an object");
    }

    template <class T>
    void fetch(const std::string& flag, const std::string& key, T& var) {
        seen_.push_back(key);
        if (sub_ != nullptr && sub_->count(flag) > 0) return;
        if (obj_.is_null() || !obj_.contains(key)) return;
        try {
            var = obj_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ValidationError("config: bad value for params." + key);
        }
    }

    bool has(const std::string& key) const { return obj_.is_object() && obj_.contains(key); }
    const json& at(const std::string& key) {
        seen_.push_back(key);
        return obj_.at(key);
    }
    void claim(const std::string& key) { seen_.push_back(key); }

    void finish() const {
        if (!obj_.is_object()) return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            bool known = false;
            for (const std::string& k : seen_)
                if (k == it.key()) known = true;
            if (!known) throw ValidationError("config: unknown key params." + it.key());
        }
    }

  private:
    const json& obj_;
    const CLI::App* sub_;
    std::vector<std::string> seen_;
};

// ------------------------------------------------------------------- phi

// Flag-side phi description; json side is a nested object under params.phi
// with form-specific keys (power: c,k; geometric: C,B; doubly: c,b;
// table: values). If any --phi-* flag is present the flags define phi
// completely; otherwise the config object does.
struct PhiFlags {
    std::string form;
    double a = 0, b = 0;
    std::string table;
};

bool phi_flags_used(const CLI::App* sub) {
    return sub != nullptr && (sub->count("--phi-form") > 0 || sub->count("--phi-a") > 0 ||
                              sub->count("--phi-b") > 0 || sub->count("--phi-table") > 0);
}

cflab::PhiSpec phi_from_flags(const CLI::App* sub, const PhiFlags& f) {
    if (f.form == "power" || f.form == "geometric" || f.form == "doubly") {
        if (sub->count("--phi-a") == 0 || sub->count("--phi-b") == 0)
            throw ValidationError("phi: form '" + f.form + "' needs --phi-a and --phi-b");
        if (f.form == "power") return cflab::PhiSpec::power(f.a, f.b);
        if (f.form == "geometric") return cflab::PhiSpec::geometric(f.a, f.b);
        return cflab::PhiSpec::doubly(f.a, f.b);
    }
    if (f.form == "table") {
        if (sub->count("--phi-table") == 0) throw ValidationError("phi: table form needs --phi-table");
        return cflab::PhiSpec::table(parse_double_list(f.table));
    }
    throw ValidationError("phi: unknown form '" + f.form + "' (power|geometric|doubly|table)");
}

cflab::PhiSpec phi_from_json(const json& o) {
    if (!o.is_object() || !o.contains("form"))
        throw ValidationError("config: params.phi must be an object with a 'form' key");
    const std::string form = o.at("form").get<std::string>();
    auto need = [&](const char* k) -> double {
        if (!o.contains(k))
            throw ValidationError(std::string("config: params.phi missing key '") + k + "'");
        return o.at(k).get<double>();
    };
    auto only = [&](std::initializer_list<const char*> keys) {
        for (auto it = o.begin(); it != o.end(); ++it) {
            if (it.key() == "form") continue;
            bool known = false;
            for (const char* k : keys)
                if (it.key() == k) known = true;
            if (!known) throw ValidationError("config: unknown key params.phi." + it.key());
        }
    };
    if (form == "power") {
        only({"c", "k"});
        return cflab::PhiSpec::power(need("c"), need("k"));
    }
    if (form == "geometric") {
        only({"C", "B"});
        return cflab::PhiSpec::geometric(need("C"), need("B"));
    }
    if (form == "doubly") {
        only({"c", "b"});
        return cflab::PhiSpec::doubly(need("c"), need("b"));
    }
    if (form == "table") {
        only({"values"});
        if (!o.contains("values")) throw ValidationError("config: params.phi missing 'values'");
        return cflab::PhiSpec::table(o.at("values").get<std::vector<double>>());
    }
    throw ValidationError("config: unknown phi form '" + form + "'");
}

cflab::PhiSpec resolve_phi(const CLI::App* sub, const PhiFlags& f, JsonParams& jp) {
    jp.claim("phi");
    if (phi_flags_used(sub)) return phi_from_flags(sub, f);
    if (jp.has("phi")) return phi_from_json(jp.at("phi"));
    throw ValidationError("phi: missing (give --phi-form ... or params.phi in the config)");
}

// ---------------------------------------------------------------- output

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ValidationError("cannot open output file '" + out_path + "'");
    f << content;
    if (!f) throw ValidationError("failed writing output file '" + out_path + "'");
}

std::string rat_str(const Rational& r) { return r.get_str(); }

// ------------------------------------------------------------------ main

struct GlobalOpts {
    std::string config_path, out;
    uint64_t seed = 0;
    bool seed_set = false;
    unsigned workers = 1;
    unsigned precision_bits = 80;
};

int run(int argc, char** argv) {
    CLI::App app{"continued-fraction laboratory: exact cylinders, prime tails, "
                 "pressure roots, event measures, Cantor-support audits"};
    app.require_subcommand(0, 1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file (strict keys; flags override)");
    app.add_option("--out", g.out, "output file path (default: stdout)");
    app.add_option("--seed", g.seed, "RNG seed (required for stochastic commands)");
    app.add_option("--workers", g.workers, "worker thread count (default 1; never affects output bytes)");
    app.add_option("--precision-bits", g.precision_bits, "BigFloat mantissa bits (>= 80, default 80)");

    // ---- expand
    auto* c_expand = app.add_subcommand("expand", "continued-fraction expansion of an exact rational");
    struct {
        std::string x;
        uint64_t max_terms = 64;
    } ex;
    c_expand->add_option("--x", ex.x, "value in (0,1): 'p/q', decimal, or integer string");
    c_expand->add_option("--max-terms", ex.max_terms, "truncation length (default 64)");

    // ---- cylinder
    auto* c_cyl = app.add_subcommand("cylinder", "exact cylinder interval and digit-event measures");
    struct {
        std::string word;
        uint64_t M = 1;
    } cy;
    c_cyl->add_option("--word", cy.word, "comma-separated partial quotients, e.g. 3,7,16");
    c_cyl->add_option("--M", cy.M, "digit bound for tail/slice measures (default 1)");

    // ---- sn
    auto* c_sn = app.add_subcommand("sn", "root s_n(B, M) of the finite cylinder-sum equation");
    struct {
        unsigned n = 1;
        uint64_t M = 1;
        double B = 2;
        double tol = 1e-10;
        uint64_t cap = 10000000;
    } sn;
    c_sn->add_option("--n", sn.n, "word length n >= 1");
    c_sn->add_option("--M", sn.M, "alphabet bound M >= 1");
    c_sn->add_option("--B", sn.B, "growth base B");
    c_sn->add_option("--tol", sn.tol, "bisection tolerance (default 1e-10)");
    c_sn->add_option("--cap", sn.cap, "enumeration budget for M^n (default 1e7)");

    // ---- dimension
    auto* c_dim = app.add_subcommand("dimension", "Hausdorff-dimension evaluator by growth regime");
    struct {
        PhiFlags phi;
        unsigned n_budget = 3;
        uint64_t M_budget = 64;
        double tol = 1e-10;
        uint64_t horizon = 1024;
    } dm;
    c_dim->add_option("--phi-form", dm.phi.form, "power|geometric|doubly|table");
    c_dim->add_option("--phi-a", dm.phi.a, "first phi parameter (c / C / c)");
    c_dim->add_option("--phi-b", dm.phi.b, "second phi parameter (k / B / b)");
    c_dim->add_option("--phi-table", dm.phi.table, "comma-separated phi values (table form)");
    c_dim->add_option("--n-budget", dm.n_budget, "s_n depth in the finite-B regime (default 3)");
    c_dim->add_option("--M-budget", dm.M_budget, "alphabet bound in the finite-B regime (default 64)");
    c_dim->add_option("--tol", dm.tol, "bisection tolerance (default 1e-10)");
    c_dim->add_option("--horizon", dm.horizon, "liminf horizon for table-form phi (default 1024)");

    // ---- prime-tail
    auto* c_tail = app.add_subcommand("prime-tail", "bracket of the prime tail sum_{p >= M} 1/p^2");
    struct {
        uint64_t M = 2;
        uint64_t limit = 1000000;
    } pt;
    c_tail->add_option("--M", pt.M, "tail start");
    c_tail->add_option("--limit", pt.limit, "sieve limit (tail above it bounded by 1/limit)");

    // ---- mc-measure
    auto* c_mc = app.add_subcommand("mc-measure", "Monte Carlo measure of a digit event");
    struct {
        std::string kind = "Eprime";
        unsigned n = 1;
        PhiFlags phi;
        uint64_t samples = 100000;
    } mc;
    c_mc->add_option("--kind", mc.kind, "Eprime | E | Fprime");
    c_mc->add_option("--n", mc.n, "event index n >= 1");
    c_mc->add_option("--phi-form", mc.phi.form, "power|geometric|doubly|table");
    c_mc->add_option("--phi-a", mc.phi.a, "first phi parameter");
    c_mc->add_option("--phi-b", mc.phi.b, "second phi parameter");
    c_mc->add_option("--phi-table", mc.phi.table, "comma-separated phi values");
    c_mc->add_option("--samples", mc.samples, "sample count (default 1e5)");

    // ---- series
    auto* c_ser = app.add_subcommand("series", "convergence classification of the zero-one series");
    struct {
        PhiFlags phi;
        uint64_t horizon = 10000;
    } se;
    c_ser->add_option("--phi-form", se.phi.form, "power|geometric|doubly|table");
    c_ser->add_option("--phi-a", se.phi.a, "first phi parameter");
    c_ser->add_option("--phi-b", se.phi.b, "second phi parameter");
    c_ser->add_option("--phi-table", se.phi.table, "comma-separated phi values");
    c_ser->add_option("--horizon", se.horizon, "partial-sum horizon (default 1e4)");

    // ---- ce-ratio
    auto* c_ce = app.add_subcommand("ce-ratio", "second-moment lower-bound diagnostic");
    struct {
        unsigned N = 64;
        PhiFlags phi;
        uint64_t samples = 100000;
    } ce;
    c_ce->add_option("--N", ce.N, "index horizon N >= 1");
    c_ce->add_option("--phi-form", ce.phi.form, "power|geometric|doubly|table");
    c_ce->add_option("--phi-a", ce.phi.a, "first phi parameter");
    c_ce->add_option("--phi-b", ce.phi.b, "second phi parameter");
    c_ce->add_option("--phi-table", ce.phi.table, "comma-separated phi values");
    c_ce->add_option("--samples", ce.samples, "sample count (default 1e5)");

    // ---- cantor-audit
    auto* c_ca = app.add_subcommand("cantor-audit", "level-by-level audit of the Cantor mass distribution");
    struct {
        double Btilde = 2, s = 0.6, delta = 0.05;
        uint64_t M = 2;
        unsigned N = 2;
        std::string ell, i_seq;
        int64_t max_level = -1;
        uint64_t node_cap = 1000000;
        uint64_t sample_primes = 0;
    } ca;
    c_ca->add_option("--Btilde", ca.Btilde, "prime-window base > 1");
    c_ca->add_option("--M", ca.M, "free-digit alphabet bound >= 2");
    c_ca->add_option("--N", ca.N, "free-word length >= 1");
    c_ca->add_option("--s", ca.s, "mass exponent in (1/2, 1)");
    c_ca->add_option("--delta", ca.delta, "Hoelder slack delta > 0");
    c_ca->add_option("--ell", ca.ell, "comma-separated word counts per block (required)");
    c_ca->add_option("--i-seq", ca.i_seq, "comma-separated filler offsets i_k in [0, N)");
    c_ca->add_option("--max-level", ca.max_level, "deepest audited level (default: whole schedule)");
    c_ca->add_option("--node-cap", ca.node_cap, "per-level node budget (default 1e6)");
    c_ca->add_option("--sample-primes", ca.sample_primes,
                     "stratified picks per prime level (0 = exhaustive)");

    // Let the global flags (--out, --seed, ...) appear after the subcommand.
    for (CLI::App* s : {c_expand, c_cyl, c_sn, c_dim, c_tail, c_mc, c_ser, c_ce, c_ca})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // Config file: strict top-level schema, flags win on overlap.
    json config;
    if (!g.config_path.empty()) {
        std::ifstream f(g.config_path);
        if (!f) throw ValidationError("cannot open config file '" + g.config_path + "'");
        try {
            f >> config;
        } catch (const json::exception& e) {
            throw ValidationError(std::string("config: ") + e.what());
        }
        if (!config.is_object()) throw ValidationError("config: top level must be an object");
        for (auto it = config.begin(); it != config.end(); ++it) {
            const std::string& k = it.key();
            if (k != "command" && k != "params" && k != "output_path" && k != "seed" &&
                k != "precision_bits")
                throw ValidationError("config: unknown key '" + k + "'");
        }
        if (app.count("--out") == 0 && config.contains("output_path"))
            g.out = config.at("output_path").get<std::string>();
        if (app.count("--seed") == 0 && config.contains("seed")) {
            g.seed = config.at("seed").get<uint64_t>();
            g.seed_set = true;
        }
        if (app.count("--precision-bits") == 0 && config.contains("precision_bits"))
            g.precision_bits = config.at("precision_bits").get<unsigned>();
    }
    if (app.count("--seed") > 0) g.seed_set = true;

    // Resolve the command: typed subcommand, else the config's.
    std::string cmd;
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : {c_expand, c_cyl, c_sn, c_dim, c_tail, c_mc, c_ser, c_ce, c_ca}) {
        if (s->parsed()) {
            cmd = s->get_name();
            sub = s;
        }
    }
    if (config.contains("command")) {
        const std::string cc = config.at("command").get<std::string>();
        if (cmd.empty()) {
            cmd = cc;
            for (const CLI::App* s : {c_expand, c_cyl, c_sn, c_dim, c_tail, c_mc, c_ser, c_ce, c_ca})
                if (s->get_name() == cc) sub = s;
            if (sub == nullptr) throw ValidationError("config: unknown command '" + cc + "'");
        } else if (cc != cmd) {
            throw ValidationError("config command '" + cc + "' conflicts with subcommand '" + cmd +
                                  "'");
        }
    }
    if (cmd.empty()) throw ValidationError("no command given (subcommand or config 'command')");

    if (g.precision_bits < 80)
        throw ValidationError("--precision-bits must be >= 80");
    cflab::BigFloat::set_default_precision(g.precision_bits);
    if (g.workers < 1) throw ValidationError("--workers must be >= 1");

    const json params_json = config.contains("params") ? config.at("params") : json();
    JsonParams jp(params_json, sub);

    if (cmd == "expand") {
        jp.fetch("--x", "x", ex.x);
        jp.fetch("--max-terms", "max_terms", ex.max_terms);
        jp.finish();
        if (ex.x.empty()) throw ValidationError("expand: missing --x");
        cflab::Word w = cflab::expand(parse_exact_rational(ex.x), ex.max_terms);
        std::string csv = "k,a_k,p_k,q_k\n";
        for (size_t k = 1; k <= w.size(); ++k) {
            csv += std::to_string(k) + ',' + w.digit(k).get_str() + ',' +
                   w.p(static_cast<long>(k)).get_str() + ',' + w.q(static_cast<long>(k)).get_str() +
                   '\n';
        }
        emit(g.out, csv);
        std::cerr << "expand: " << w.size() << " terms"
                  << (w.empty() ? "" : ", value " + rat_str(w.value())) << "\n";
        return 0;
    }

    if (cmd == "cylinder") {
        jp.fetch("--word", "word", cy.word);
        jp.fetch("--M", "M", cy.M);
        jp.finish();
        if (cy.word.empty()) throw ValidationError("cylinder: missing --word");
        if (cy.M < 1) throw ValidationError("cylinder: M must be >= 1");
        cflab::Word w(parse_word_digits(cy.word));
        cflab::Cylinder c = cflab::cylinder(w);
        const Integer M(static_cast<unsigned long>(cy.M));
        const Rational tail = cflab::tail_union_measure(w, M);
        const Rational slice = cflab::digit_slice_measure(w, M);
        std::string csv = "n,lo,hi,closed_left,length,M,tail_union,digit_slice\n";
        csv += std::to_string(w.size()) + ',' + rat_str(c.lo) + ',' + rat_str(c.hi) + ',' +
               (c.closed_left ? "true" : "false") + ',' + rat_str(c.length()) + ',' +
               std::to_string(cy.M) + ',' + rat_str(tail) + ',' + rat_str(slice) + '\n';
        emit(g.out, csv);
        std::cerr << "cylinder: n=" << w.size() << " length=" << rat_str(c.length()) << "\n";
        return 0;
    }

    if (cmd == "sn") {
        jp.fetch("--n", "n", sn.n);
        jp.fetch("--M", "M", sn.M);
        jp.fetch("--B", "B", sn.B);
        jp.fetch("--tol", "tol", sn.tol);
        jp.fetch("--cap", "cap", sn.cap);
        jp.finish();
        const double s = cflab::solve_sn(sn.n, sn.M, sn.B, sn.tol, sn.cap);
        std::string csv = "n,M,B,tol,s\n";
        csv += std::to_string(sn.n) + ',' + std::to_string(sn.M) + ',' + cflab::format_double(sn.B) +
               ',' + cflab::format_double(sn.tol) + ',' + cflab::format_double(s) + '\n';
        emit(g.out, csv);
        std::cerr << "sn: s_" << sn.n << "(B=" << cflab::format_double(sn.B) << ", M=" << sn.M
                  << ") = " << cflab::format_double(s) << "\n";
        return 0;
    }

    if (cmd == "dimension") {
        cflab::PhiSpec phi = resolve_phi(sub, dm.phi, jp);
        jp.fetch("--n-budget", "n_budget", dm.n_budget);
        jp.fetch("--M-budget", "M_budget", dm.M_budget);
        jp.fetch("--tol", "tol", dm.tol);
        jp.fetch("--horizon", "horizon", dm.horizon);
        jp.finish();
        cflab::DimensionResult r = cflab::dimension(phi, dm.n_budget, dm.M_budget, dm.tol, dm.horizon);
        std::string sseq;
        for (size_t i = 0; i < r.s_seq.size(); ++i) {
            if (i) sseq += ';';
            sseq += cflab::format_double(r.s_seq[i]);
        }
        std::string csv = "regime,logB,logb,liminf_exact,dim,method,n_budget,M_budget,s_seq\n";
        csv += cflab::regime_name(r.regime) + ',' + cflab::format_double(r.logB) + ',' +
               cflab::format_double(r.logb) + ',' + (r.liminf_exact ? "true" : "false") + ',' +
               cflab::format_double(r.dim) + ',' + r.method + ',' + std::to_string(r.n_budget) +
               ',' + std::to_string(r.M_budget) + ',' + sseq + '\n';
        emit(g.out, csv);
        std::cerr << "dimension: regime=" << cflab::regime_name(r.regime)
                  << " dim=" << cflab::format_double(r.dim) << " (" << r.method << ")\n";
        return 0;
    }

    if (cmd == "prime-tail") {
        jp.fetch("--M", "M", pt.M);
        jp.fetch("--limit", "limit", pt.limit);
        jp.finish();
        cflab::PrimeTable table = cflab::sieve_with_cache(pt.limit);
        cflab::TailSum t = cflab::prime_square_tail(table, pt.M);
        std::string csv = "M,limit,lower,upper,normalized\n";
        csv += std::to_string(t.M) + ',' + std::to_string(t.limit) + ',' + t.lower.str() + ',' +
               t.upper.str() + ',' + cflab::format_double(t.normalized) + '\n';
        emit(g.out, csv);
        std::cerr << "prime-tail: M=" << t.M << " normalized=" << cflab::format_double(t.normalized)
                  << "\n";
        return 0;
    }

    if (cmd == "mc-measure") {
        jp.fetch("--kind", "kind", mc.kind);
        jp.fetch("--n", "n", mc.n);
        jp.fetch("--samples", "samples", mc.samples);
        cflab::PhiSpec phi = resolve_phi(sub, mc.phi, jp);
        jp.finish();
        if (!g.seed_set) throw ValidationError("mc-measure: --seed is required");
        cflab::McReport r = cflab::mc_measure(cflab::event_kind_from_string(mc.kind), phi, mc.n,
                                              mc.samples, g.seed, g.workers);
        emit(g.out, cflab::mc_report_csv(r));
        std::cerr << "mc-measure: kind=" << cflab::event_kind_name(r.kind) << " n=" << r.n
                  << " estimate=" << cflab::format_double(r.estimate) << " ci=["
                  << cflab::format_double(r.ci_lo) << "," << cflab::format_double(r.ci_hi) << "]\n";
        return 0;
    }

    if (cmd == "series") {
        cflab::PhiSpec phi = resolve_phi(sub, se.phi, jp);
        jp.fetch("--horizon", "horizon", se.horizon);
        jp.finish();
        cflab::SeriesReport r = cflab::series_classifier(phi, se.horizon);
        const double last = r.partial_sums.empty() ? 0.0 : r.partial_sums.back();
        std::string csv = "verdict,first_term,horizon,partial_sum,rationale\n";
        csv += cflab::series_verdict_name(r.verdict) + ',' + std::to_string(r.first_term) + ',' +
               std::to_string(r.horizon) + ',' + cflab::format_double(last) + ',' +
               csv_quote(r.rationale) + '\n';
        emit(g.out, csv);
        std::cerr << "series: verdict=" << cflab::series_verdict_name(r.verdict) << "\n";
        return 0;
    }

    if (cmd == "ce-ratio") {
        jp.fetch("--N", "N", ce.N);
        jp.fetch("--samples", "samples", ce.samples);
        cflab::PhiSpec phi = resolve_phi(sub, ce.phi, jp);
        jp.finish();
        if (!g.seed_set) throw ValidationError("ce-ratio: --seed is required");
        cflab::CeReport r = cflab::chung_erdos_ratio(phi, ce.N, ce.samples, g.seed, g.workers);
        emit(g.out, cflab::ce_report_csv(r));
        std::cerr << "ce-ratio: N=" << r.N << " ratio=" << cflab::format_double(r.ratio)
                  << (r.zero_denominator ? " (zero denominator)" : "") << "\n";
        return 0;
    }

    if (cmd == "cantor-audit") {
        jp.fetch("--Btilde", "Btilde", ca.Btilde);
        jp.fetch("--M", "M", ca.M);
        jp.fetch("--N", "N", ca.N);
        jp.fetch("--s", "s", ca.s);
        jp.fetch("--delta", "delta", ca.delta);
        jp.fetch("--max-level", "max_level", ca.max_level);
        jp.fetch("--node-cap", "node_cap", ca.node_cap);
        jp.fetch("--sample-primes", "sample_primes", ca.sample_primes);
        std::vector<uint64_t> ell, i_seq;
        jp.claim("ell");
        if (sub != nullptr && sub->count("--ell") > 0)
            ell = parse_u64_list(ca.ell);
        else if (jp.has("ell"))
            ell = jp.at("ell").get<std::vector<uint64_t>>();
        jp.claim("i_seq");
        if (sub != nullptr && sub->count("--i-seq") > 0)
            i_seq = parse_u64_list(ca.i_seq);
        else if (jp.has("i_seq"))
            i_seq = jp.at("i_seq").get<std::vector<uint64_t>>();
        jp.finish();
        if (ca.sample_primes > 0 && !g.seed_set)
            throw ValidationError("cantor-audit: --seed is required when --sample-primes > 0");

        cflab::CantorParams p;
        p.Btilde = ca.Btilde;
        p.M = ca.M;
        p.N = ca.N;
        p.s = ca.s;
        p.delta = ca.delta;
        p.ell = std::move(ell);
        p.i_seq = std::move(i_seq);
        cflab::AuditOptions opt;
        opt.max_level = ca.max_level;
        opt.node_cap = ca.node_cap;
        opt.sample_primes = ca.sample_primes;
        opt.seed = g.seed;
        opt.workers = g.workers;
        cflab::CantorAudit a = cflab::run_audit(p, opt);
        emit(g.out, cflab::audit_report_json(a));
        std::cerr << "cantor-audit: levels=" << a.levels.size()
                  << " audit_mode=" << (a.vp.audit_mode ? "true" : "false")
                  << " max_growth=" << cflab::format_double(a.max_growth_factor) << "\n";
        return 0;
    }

    throw ValidationError("unknown command '" + cmd + "'");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cflab::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const cflab::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
