#include "cflab/cantor_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include <json.hpp>

#include "cflab/errors.hpp"
#include "cflab/measure_lab.hpp"
#include "cflab/pressure.hpp"
#include "cflab/primes.hpp"

namespace cflab {

std::string pos_class_name(PosClass c) {
    switch (c) {
        case PosClass::free_digit:
            return "free";
        case PosClass::filler:
            return "filler";
        case PosClass::prime1:
            return "prime1";
        case PosClass::prime2:
            return "prime2";
    }
    return "?";
}

namespace {

struct PosInfo {
    PosClass cls = PosClass::free_digit;
    unsigned block = 0;      // 1-based block index; K+1 for the open tail
    int64_t word_off = 0;    // 0-based offset inside the free word in progress
};

PosInfo position_info(const Schedule& s, int64_t pos, unsigned N) {
    const size_t K = s.n.size() - 1;
    for (size_t k = 1; k <= K; ++k) {
        if (pos <= s.m[k]) {
            const int64_t start = s.n[k - 1] + 3;  // first free position of block k
            return {PosClass::free_digit, static_cast<unsigned>(k), (pos - start) % N};
        }
        if (pos <= s.n[k]) return {PosClass::filler, static_cast<unsigned>(k), 0};
        if (pos == s.n[k] + 1) return {PosClass::prime1, static_cast<unsigned>(k), 0};
        if (pos == s.n[k] + 2) return {PosClass::prime2, static_cast<unsigned>(k), 0};
    }
    const int64_t start = s.n[K] + 3;
    return {PosClass::free_digit, static_cast<unsigned>(K + 1), (pos - start) % N};
}

}  // namespace

PosClass classify_position(const Schedule& s, int64_t pos) {
    if (pos < 1) throw ValidationError("classify_position: pos must be >= 1");
    // N only affects the word offset, which classification does not expose.
    return position_info(s, pos, 1).cls;
}

ValidatedParams validate_params(const CantorParams& p) {
    if (!(p.Btilde > 1)) throw ValidationError("cantor: Btilde must be > 1");
    if (p.M < 2) throw ValidationError("cantor: M must be >= 2");
    if (p.N < 1) throw ValidationError("cantor: N must be >= 1");
    if (!(p.s > 0.5) || !(p.s < 1)) throw ValidationError("cantor: s must lie in (1/2, 1)");
    if (!(p.delta > 0)) throw ValidationError("cantor: delta must be > 0");
    if (!(p.s - p.delta > 0.5)) throw ValidationError("cantor: s - delta must exceed 1/2");
    if (p.ell.empty()) throw ValidationError("cantor: ell must contain at least one entry");
    for (uint64_t l : p.ell)
        if (l < 1) throw ValidationError("cantor: ell entries must be >= 1");
    if (p.i_seq.size() > p.ell.size()) throw ValidationError("cantor: i_seq longer than ell");
    for (uint64_t i : p.i_seq)
        if (i >= p.N) throw ValidationError("cantor: i_k must satisfy 0 <= i_k < N");

    ValidatedParams vp;
    vp.p = p;
    vp.p.i_seq.resize(p.ell.size(), 0);

    const size_t K = p.ell.size();
    vp.sched.n.resize(K + 1);
    vp.sched.m.resize(K + 1);
    vp.sched.n[0] = -2;
    vp.sched.m[0] = 0;
    for (size_t k = 1; k <= K; ++k) {
        vp.sched.m[k] =
            vp.sched.n[k - 1] + 2 + static_cast<int64_t>(p.ell[k - 1]) * static_cast<int64_t>(p.N);
        vp.sched.n[k] = vp.sched.m[k] + static_cast<int64_t>(p.N) +
                        static_cast<int64_t>(vp.p.i_seq[k - 1]);
    }
    vp.sched.max_level = vp.sched.n[K] + 2;

    auto add = [&](std::string name, bool pass, std::string detail) {
        if (!pass) vp.audit_mode = true;
        vp.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    const double sN = solve_sn(p.N, p.M, p.Btilde, 1e-9);
    add("pressure_s_below_sN", p.s < sN,
        "s = " + std::to_string(p.s) + ", s_N(Btilde, M) = " + std::to_string(sN));
    const double n_min = std::max(std::exp(20.0), 2.0 / p.delta + 1.0);
    add("N_size", static_cast<double>(p.N) > n_min,
        "N = " + std::to_string(p.N) + ", required > " + std::to_string(n_min));
    for (size_t k = 1; k <= K; ++k) {
        const double nk = static_cast<double>(vp.sched.n[k]);
        const double lk = static_cast<double>(p.ell[k - 1]);
        const std::string kk = std::to_string(k);
        add("sparsity_ratio_k" + kk, p.N * lk / nk >= 1.0 - p.delta,
            "N ell_k / n_k = " + std::to_string(p.N * lk / nk));
        add("sparsity_log_k" + kk, std::log(nk) / nk < p.delta,
            "log(n_k)/n_k = " + std::to_string(std::log(nk) / nk));
        add("ell_ge_24N_k" + kk, p.ell[k - 1] >= 24ULL * p.N,
            "ell_k = " + std::to_string(p.ell[k - 1]) + ", 24N = " + std::to_string(24 * p.N));
    }
    return vp;
}

namespace {

constexpr uint64_t kSieveCap = 1ULL << 31;  // desk-scale prime-window ceiling
constexpr uint64_t kWTableCap = 1ULL << 21; // M^N ceiling for the weight table

uint64_t checked_pow_count(uint64_t M, unsigned N, uint64_t cap, const char* what) {
    uint64_t v = 1;
    for (unsigned i = 0; i < N; ++i) {
        if (v > cap / M) throw BudgetError(std::string(what) + " exceeds its budget");
        v *= M;
    }
    return v;
}

// Integer window [ceil(Bt^n), floor(2 Bt^n)] computed in high precision so a
// near-integer power cannot flip the rounding.
void prime_window(double Btilde, int64_t n, uint64_t& lo, uint64_t& hi) {
    BigFloat v = pow(BigFloat(Btilde), BigFloat(static_cast<unsigned long>(n)));
    BigFloat two_v = v + v;
    Integer zlo, zhi;
    mpfr_get_z(zlo.get_mpz_t(), v.raw(), MPFR_RNDU);
    mpfr_get_z(zhi.get_mpz_t(), two_v.raw(), MPFR_RNDD);
    if (zlo < 2) zlo = 2;
    if (zhi > Integer(static_cast<unsigned long>(kSieveCap)))
        throw ValidationError("cantor: prime window exceeds the desk-scale sieve ceiling");
    lo = mpz_get_ui(zlo.get_mpz_t());
    hi = mpz_get_ui(zhi.get_mpz_t());
}

struct BuildCtx {
    ValidatedParams vp;
    AuditOptions opt;
    BigFloat u;
    BigFloat Q;                                // u^{-1} Btilde^{-(3s-1)N}
    std::vector<std::vector<BigFloat>> W;      // W[r][code], r = 0..N
    std::vector<PrimeBlockInfo> blocks;        // audited blocks, by j ascending
    std::vector<std::vector<uint64_t>> primes; // window primes per audited block
    std::vector<BigFloat> inv_count;           // 1/#P per audited block
};

const PrimeBlockInfo& block_info(const BuildCtx& ctx, unsigned j) {
    for (size_t i = 0; i < ctx.blocks.size(); ++i)
        if (ctx.blocks[i].j == j) return ctx.blocks[i];
    throw NumericalError("cantor: internal block lookup failure");
}

size_t block_index(const BuildCtx& ctx, unsigned j) {
    for (size_t i = 0; i < ctx.blocks.size(); ++i)
        if (ctx.blocks[i].j == j) return i;
    throw NumericalError("cantor: internal block lookup failure");
}

// W[r][code] = sum over completions v of the partial free word pi (|pi| = r)
// of q_N(pi v)^{-2s}; W[N] holds the per-word weights themselves. Mass
// conservation at free levels is exact because W[r][pi] = sum_d W[r+1][pi d]
// holds by construction.
void build_weight_table(BuildCtx& ctx) {
    const uint64_t M = ctx.vp.p.M;
    const unsigned N = ctx.vp.p.N;
    const double s = ctx.vp.p.s;
    checked_pow_count(M, N, kWTableCap, "cantor free-word weight table M^N");
    ctx.W.resize(N + 1);
    for (unsigned r = 0; r <= N; ++r) ctx.W[r].resize(checked_pow_count(M, r, kWTableCap, "table"));

    // Leaf weights by DFS over {1..M}^N, continuants in 64-bit (q_N <= (M+1)^N,
    // which the table cap keeps far below 2^63).
    const BigFloat minus2s(-2.0 * s);
    struct Rec {
        std::vector<BigFloat>* leaf;
        uint64_t M;
        unsigned N;
        const BigFloat* e;
        void walk(unsigned depth, uint64_t code, uint64_t q_prev, uint64_t q_cur) {
            if (depth == N) {
                BigFloat t(static_cast<unsigned long>(q_cur));
                (*leaf)[code] = pow(t, *e);
                return;
            }
            for (uint64_t d = 1; d <= M; ++d)
                walk(depth + 1, code * M + (d - 1), q_cur, d * q_cur + q_prev);
        }
    } rec{&ctx.W[N], M, N, &minus2s};
    rec.walk(0, 0, 0, 1);

    for (unsigned r = N; r-- > 0;) {
        for (uint64_t c = 0; c < ctx.W[r].size(); ++c) {
            BigFloat acc;
            for (uint64_t d = 0; d < M; ++d) acc += ctx.W[r + 1][c * M + d];
            ctx.W[r][c] = acc;
        }
    }
}

void prepare(BuildCtx& ctx, int64_t max_level) {
    const CantorParams& p = ctx.vp.p;
    ctx.u = cylinder_sum(p.N, p.M, p.Btilde, p.s);
    // Q = u^{-1} Btilde^{-(3s-1)N}
    ctx.Q = pow(BigFloat(p.Btilde), BigFloat(-(3.0 * p.s - 1.0) * p.N)) / ctx.u;
    build_weight_table(ctx);

    // Prime windows for every block the audit reaches (position max_level + 1
    // still shapes the hull of level max_level).
    const size_t K = p.ell.size();
    uint64_t sieve_limit = 0;
    std::vector<unsigned> needed;
    for (size_t j = 1; j <= K; ++j) {
        if (ctx.vp.sched.n[j] > max_level) break;
        uint64_t lo = 0, hi = 0;
        prime_window(p.Btilde, ctx.vp.sched.n[j], lo, hi);
        sieve_limit = std::max(sieve_limit, hi);
        needed.push_back(static_cast<unsigned>(j));
    }
    if (needed.empty()) return;
    PrimeTable table = sieve_with_cache(sieve_limit);
    for (unsigned j : needed) {
        PrimeBlockInfo b;
        b.j = j;
        b.n_j = ctx.vp.sched.n[j];
        prime_window(p.Btilde, b.n_j, b.lo, b.hi);
        std::vector<uint64_t> ps = table.primes_in(b.lo, b.hi);
        if (ps.empty())
            throw ValidationError("cantor: empty prime window at block " + std::to_string(j) +
                                  " — Btilde^n_j too small");
        b.p_lo = ps.front();
        b.p_hi = ps.back();
        b.count = ps.size();
        b.c_n = interval_constant(table, p.Btilde, static_cast<unsigned>(b.n_j));
        if (!(b.c_n < 2))
            throw ValidationError("cantor: interval constant c_{n_j}(Btilde) = " +
                                  std::to_string(b.c_n) + " >= 2 at block " + std::to_string(j) +
                                  "; the construction requires c < 2");
        ctx.inv_count.push_back(BigFloat(1.0) / BigFloat(static_cast<unsigned long>(b.count)));
        ctx.blocks.push_back(b);
        ctx.primes.push_back(std::move(ps));
    }
}

struct LevelScratch {
    std::vector<Rational> len;     // |J| per node
    std::vector<uint32_t> order;   // node indices sorted by lo
};

// Digit choices for one expansion step.
struct Branch {
    PosClass cls;
    unsigned block = 0;    // for prime classes
    int64_t word_off = 0;  // for free class
    std::vector<uint64_t> digits;   // explicit digit list (filler/prime exact)
    bool stratified = false;        // prime level with sampling
    uint64_t prime_count = 0;       // #P of the block (stratified)
};

// Fills child fields derived from (parent, digit d): continuants, hull, mass
// multiplier everything except the mass itself, which the caller scales.
void make_child(const BuildCtx& ctx, const MassNode& parent, uint64_t d, int64_t child_level,
                MassNode& c) {
    c.last_digit = d;
    c.p = parent.p * d + parent.p_prev;
    c.q = parent.q * d + parent.q_prev;
    c.p_prev = parent.p;
    c.q_prev = parent.q;

    // Hull of the admissible digit range at the next position.
    const PosInfo nx = position_info(ctx.vp.sched, child_level + 1, ctx.vp.p.N);
    uint64_t dmin = 1, dmax = ctx.vp.p.M;
    if (nx.cls == PosClass::filler) {
        dmin = dmax = 2;
    } else if (nx.cls == PosClass::prime1 || nx.cls == PosClass::prime2) {
        const PrimeBlockInfo& b = block_info(ctx, nx.block);
        dmin = b.p_lo;
        dmax = b.p_hi;
    }
    Integer n1 = c.p * dmin + c.p_prev;
    Integer d1 = c.q * dmin + c.q_prev;
    Integer n2 = c.p * (dmax + 1) + c.p_prev;
    Integer d2 = c.q * (dmax + 1) + c.q_prev;
    Rational e1(n1, d1);
    e1.canonicalize();
    Rational e2(n2, d2);
    e2.canonicalize();
    if (e1 < e2) {
        c.lo = e1;
        c.hi = e2;
    } else {
        c.lo = e2;
        c.hi = e1;
    }
    if (cmp(c.lo, parent.lo) < 0 || cmp(c.hi, parent.hi) > 0)
        throw NumericalError("cantor: child interval escapes its parent (construction bug)");
}

struct ExpandStats {
    double child_sum_max_rel_err = 0;
};

// Expands parents into children for one level. Deterministic regardless of
// worker count: the children vector is pre-sized and each parent's chunk is
// written by index.
ExpandStats expand_level(const BuildCtx& ctx, const std::vector<MassNode>& parents,
                         std::vector<MassNode>& children, const Branch& br, int64_t child_level) {
    const uint64_t per_parent = br.stratified ? ctx.opt.sample_primes : br.digits.size();
    children.resize(parents.size() * per_parent);

    const size_t bi = (br.cls == PosClass::prime1 || br.cls == PosClass::prime2)
                          ? block_index(ctx, br.block)
                          : 0;

    std::vector<ExpandStats> stats(std::max(1u, ctx.opt.workers));
    auto run = [&](unsigned wi, size_t plo, size_t phi) {
        BigFloat childsum, diff;
        for (size_t gi = plo; gi < phi; ++gi) {
            const MassNode& par = parents[gi];
            childsum = BigFloat(0.0);
            for (uint64_t ci = 0; ci < per_parent; ++ci) {
                MassNode& c = children[gi * per_parent + ci];
                uint64_t d;
                BigFloat mult;
                if (br.stratified) {
                    // Stratified pick: bucket ci of the ascending prime list,
                    // representative weighted by its bucket size.
                    const std::vector<uint64_t>& ps = ctx.primes[bi];
                    const uint64_t lo_i = ps.size() * ci / per_parent;
                    const uint64_t hi_i = ps.size() * (ci + 1) / per_parent;
                    const uint64_t pick =
                        lo_i + rng_word(ctx.opt.seed, gi, static_cast<uint64_t>(child_level), ci) %
                                   (hi_i - lo_i);
                    d = ps[pick];
                    mult = BigFloat(static_cast<unsigned long>(hi_i - lo_i)) /
                           BigFloat(static_cast<unsigned long>(ps.size()));
                } else {
                    d = br.digits[ci];
                    switch (br.cls) {
                        case PosClass::free_digit: {
                            if (br.word_off == 0) {
                                mult = ctx.Q * ctx.W[1][d - 1];
                                c.word_code = d - 1;
                            } else {
                                const uint64_t r = static_cast<uint64_t>(br.word_off);
                                const uint64_t code = par.word_code * ctx.vp.p.M + (d - 1);
                                mult = ctx.W[r + 1][code] / ctx.W[r][par.word_code];
                                c.word_code = (r + 1 == ctx.vp.p.N) ? 0 : code;
                            }
                            break;
                        }
                        case PosClass::filler:
                            mult = BigFloat(1.0);
                            break;
                        case PosClass::prime1:
                        case PosClass::prime2:
                            mult = ctx.inv_count[bi];
                            break;
                    }
                }
                make_child(ctx, par, d, child_level, c);
                c.mass = par.mass * mult;
                childsum += c.mass;
            }
            diff = childsum - par.mass;
            const double rel = std::fabs(diff.to_double()) / par.mass.to_double();
            stats[wi].child_sum_max_rel_err = std::max(stats[wi].child_sum_max_rel_err, rel);
        }
    };

    const unsigned workers = std::max(1u, ctx.opt.workers);
    if (workers == 1 || parents.size() < 2) {
        run(0, 0, parents.size());
    } else {
        std::vector<std::thread> pool;
        for (unsigned wi = 0; wi < workers; ++wi) {
            const size_t plo = parents.size() * wi / workers;
            const size_t phi = parents.size() * (wi + 1) / workers;
            pool.emplace_back(run, wi, plo, phi);
        }
        for (auto& th : pool) th.join();
    }

    ExpandStats out;
    for (const ExpandStats& st : stats)
        out.child_sum_max_rel_err = std::max(out.child_sum_max_rel_err, st.child_sum_max_rel_err);
    return out;
}

// The per-level audits: totals, length bands, gaps, Hoelder ratios.
void audit_level(const BuildCtx& ctx, std::vector<MassNode>& nodes, int64_t level, bool sampled,
                 double child_sum_rel_err, LevelAudit& la) {
    const PosInfo nx = position_info(ctx.vp.sched, level + 1, ctx.vp.p.N);
    la.level = level;
    la.next_class = nx.cls;
    la.count = nodes.size();
    la.sampled = sampled;
    la.child_sum_rel_err = child_sum_rel_err;

    BigFloat total;
    for (const MassNode& n : nodes) total += n.mass;
    la.mass_total = total.to_double();
    la.mass_rel_err = std::fabs((total - BigFloat(1.0)).to_double());

    std::vector<Rational> len(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) len[i] = nodes[i].hi - nodes[i].lo;

    // Length bands. Non-prime next positions are checked against the cylinder
    // band [1/(2 q^2), 1/q^2] (reported value |I_n| q^2 = q/(q+q')); filler
    // hulls additionally live in [1/12, 1/6] of q^{-2}; prime hulls are
    // checked against |J| Bt^{n_j} q^2 in [1/64, 8].
    la.len_lo = std::numeric_limits<double>::infinity();
    la.len_hi = 0;
    la.length_band_pass = true;
    const bool prime_next = nx.cls == PosClass::prime1 || nx.cls == PosClass::prime2;
    BigFloat scale;  // Bt^{n_j} for prime-next levels
    if (prime_next)
        scale = pow(BigFloat(ctx.vp.p.Btilde),
                    BigFloat(static_cast<unsigned long>(block_info(ctx, nx.block).n_j)));
    for (size_t i = 0; i < nodes.size(); ++i) {
        const MassNode& nd = nodes[i];
        double norm;
        if (prime_next) {
            BigFloat v = BigFloat(len[i]) * scale * BigFloat(nd.q) * BigFloat(nd.q);
            norm = v.to_double();
            if (!(v >= BigFloat(1.0 / 64.0) && v <= BigFloat(8.0))) la.length_band_pass = false;
        } else {
            // |I_n| q^2 = q / (q + q'), in [1/2, 1] exactly when q' <= q.
            Rational r(nd.q, nd.q + nd.q_prev);
            r.canonicalize();
            norm = mpq_get_d(r.get_mpq_t());
            if (nd.q_prev > nd.q) la.length_band_pass = false;
            if (nx.cls == PosClass::filler) {
                // Forced digit 2: |J| q^2 in [1/12, 1/6] exactly.
                Rational jn = len[i] * nd.q * nd.q;
                if (cmp(jn * 12, 1) < 0 || cmp(jn * 6, 1) > 0) la.length_band_pass = false;
            }
        }
        la.len_lo = std::min(la.len_lo, norm);
        la.len_hi = std::max(la.len_hi, norm);
    }

    // Nearest-neighbor gaps (exact; skipped on sampled levels where missing
    // siblings would fake wider gaps).
    if (!sampled && nodes.size() >= 2) {
        std::vector<uint32_t> order(nodes.size());
        for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            return cmp(nodes[a].lo, nodes[b].lo) < 0;
        });
        la.has_gap = true;
        la.gap_pass = true;
        la.min_gap_ratio = std::numeric_limits<double>::infinity();
        const unsigned long eightM = 8UL * static_cast<unsigned long>(ctx.vp.p.M);
        Rational gap, scaled;
        for (size_t i = 0; i + 1 < order.size(); ++i) {
            const MassNode& a = nodes[order[i]];
            const MassNode& b = nodes[order[i + 1]];
            gap = b.lo - a.hi;
            if (mpq_sgn(gap.get_mpq_t()) < 0)
                throw NumericalError("cantor: overlapping intervals at level " +
                                     std::to_string(level));
            const Rational& ml =
                cmp(len[order[i]], len[order[i + 1]]) >= 0 ? len[order[i]] : len[order[i + 1]];
            scaled = gap * eightM;
            if (cmp(scaled, ml) < 0) la.gap_pass = false;
            const double ratio = mpq_get_d(gap.get_mpq_t()) / mpq_get_d(ml.get_mpq_t());
            la.min_gap_ratio = std::min(la.min_gap_ratio, ratio);
        }
    }

    // Hoelder ratios mu(J)/|J|^beta.
    const double beta = ctx.vp.p.s * (1.0 - ctx.vp.p.delta) - ctx.vp.p.delta;
    double mh = 0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        BigFloat ratio = nodes[i].mass / pow(BigFloat(len[i]), beta);
        mh = std::max(mh, ratio.to_double());
    }
    la.max_holder = mh;
}

struct BuildResult {
    CantorAudit audit;
    std::vector<MassNode> last_level;
};

BuildResult build(const CantorParams& params, const AuditOptions& opt, bool keep_last,
                  bool do_audits) {
    BuildCtx ctx;
    ctx.vp = validate_params(params);
    ctx.opt = opt;
    const CantorParams& p = ctx.vp.p;

    int64_t max_level = opt.max_level < 0 ? ctx.vp.sched.max_level : opt.max_level;
    if (max_level < 1) throw ValidationError("cantor: max_level must be >= 1");
    if (max_level > ctx.vp.sched.max_level)
        throw ValidationError("cantor: max_level exceeds the scheduled blocks (n_K + 2)");

    prepare(ctx, max_level);

    CantorAudit audit;
    audit.vp = ctx.vp;
    audit.u = ctx.u.str();
    audit.u_gt_1 = ctx.u > BigFloat(1.0);
    audit.beta = p.s * (1.0 - p.delta) - p.delta;
    audit.node_cap = opt.node_cap;
    audit.sample_primes = opt.sample_primes;
    audit.seed = opt.seed;
    audit.blocks = ctx.blocks;
    if (!audit.u_gt_1) {
        audit.vp.audit_mode = true;
        audit.vp.checks.push_back(
            {"u_gt_1", false,
             "u = " + ctx.u.str(8) + " <= 1 (follows from s >= s_N; masses stay normalized)"});
    }

    std::vector<MassNode> parents(1);
    parents[0].p = 0;
    parents[0].q = 1;
    parents[0].p_prev = 1;
    parents[0].q_prev = 0;
    parents[0].lo = Rational(0);
    parents[0].hi = Rational(1);
    parents[0].mass = BigFloat(1.0);

    std::vector<MassNode> children;
    bool sampled_so_far = false;

    for (int64_t level = 1; level <= max_level; ++level) {
        const PosInfo here = position_info(ctx.vp.sched, level, p.N);
        Branch br;
        br.cls = here.cls;
        br.block = here.block;
        br.word_off = here.word_off;
        uint64_t per_parent = 0;
        switch (here.cls) {
            case PosClass::free_digit:
                br.digits.resize(p.M);
                for (uint64_t d = 1; d <= p.M; ++d) br.digits[d - 1] = d;
                per_parent = p.M;
                break;
            case PosClass::filler:
                br.digits = {2};
                per_parent = 1;
                break;
            case PosClass::prime1:
            case PosClass::prime2: {
                const size_t bi = block_index(ctx, here.block);
                const uint64_t cnt = ctx.blocks[bi].count;
                if (opt.sample_primes > 0 && opt.sample_primes < cnt) {
                    br.stratified = true;
                    br.prime_count = cnt;
                    per_parent = opt.sample_primes;
                    sampled_so_far = true;
                } else {
                    br.digits = ctx.primes[bi];
                    per_parent = cnt;
                }
                break;
            }
        }
        if (parents.size() > opt.node_cap / per_parent)
            throw BudgetError("cantor: level " + std::to_string(level) + " needs " +
                              std::to_string(parents.size()) + " x " + std::to_string(per_parent) +
                              " nodes, over the cap " + std::to_string(opt.node_cap));

        ExpandStats st = expand_level(ctx, parents, children, br, level);

        if (do_audits) {
            LevelAudit la;
            audit_level(ctx, children, level, sampled_so_far, st.child_sum_max_rel_err, la);
            audit.levels.push_back(la);
        }
        parents.swap(children);
        children.clear();
    }

    audit.max_growth_factor = 0;
    for (size_t i = 0; i + 1 < audit.levels.size(); ++i) {
        if (audit.levels[i].max_holder > 0)
            audit.max_growth_factor =
                std::max(audit.max_growth_factor,
                         audit.levels[i + 1].max_holder / audit.levels[i].max_holder);
    }

    BuildResult res;
    res.audit = std::move(audit);
    if (keep_last) res.last_level = std::move(parents);
    return res;
}

}  // namespace

CantorAudit run_audit(const CantorParams& p, const AuditOptions& opt) {
    return build(p, opt, false, true).audit;
}

std::vector<MassNode> enumerate_level(const CantorParams& p, int64_t level, uint64_t cap) {
    AuditOptions opt;
    opt.max_level = level;
    opt.node_cap = cap;
    return build(p, opt, true, false).last_level;
}

std::string audit_report_json(const CantorAudit& a) {
    using json = nlohmann::ordered_json;
    json j;
    j["params"] = {{"Btilde", a.vp.p.Btilde}, {"M", a.vp.p.M},         {"N", a.vp.p.N},
                   {"s", a.vp.p.s},           {"delta", a.vp.p.delta}, {"ell", a.vp.p.ell},
                   {"i_seq", a.vp.p.i_seq}};
    j["schedule"] = {{"n", std::vector<int64_t>(a.vp.sched.n.begin() + 1, a.vp.sched.n.end())},
                     {"m", std::vector<int64_t>(a.vp.sched.m.begin() + 1, a.vp.sched.m.end())},
                     {"max_level", a.vp.sched.max_level}};
    j["checks"] = json::array();
    for (const ParamCheck& c : a.vp.checks)
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["audit_mode"] = a.vp.audit_mode;
    j["u"] = a.u;
    j["u_gt_1"] = a.u_gt_1;
    j["beta"] = a.beta;
    j["node_cap"] = a.node_cap;
    j["sample_primes"] = a.sample_primes;
    j["seed"] = a.seed;
    j["blocks"] = json::array();
    for (const PrimeBlockInfo& b : a.blocks)
        j["blocks"].push_back({{"j", b.j},
                               {"n_j", b.n_j},
                               {"window_lo", b.lo},
                               {"window_hi", b.hi},
                               {"p_lo", b.p_lo},
                               {"p_hi", b.p_hi},
                               {"count", b.count},
                               {"c_n", b.c_n}});
    j["levels"] = json::array();
    for (const LevelAudit& l : a.levels) {
        json row = {{"level", l.level},
                    {"next_class", pos_class_name(l.next_class)},
                    {"count", l.count},
                    {"sampled", l.sampled},
                    {"mass_total", l.mass_total},
                    {"mass_rel_err", l.mass_rel_err},
                    {"child_sum_rel_err", l.child_sum_rel_err}};
        if (l.has_gap) {
            row["min_gap_ratio"] = l.min_gap_ratio;
            row["gap_pass"] = l.gap_pass;
        } else {
            row["min_gap_ratio"] = nullptr;
            row["gap_pass"] = nullptr;
        }
        row["max_holder"] = l.max_holder;
        row["len_lo"] = l.len_lo;
        row["len_hi"] = l.len_hi;
        row["length_band_pass"] = l.length_band_pass;
        j["levels"].push_back(row);
    }
    j["max_growth_factor"] = a.max_growth_factor;
    return j.dump(2) + "\n";
}

}  // namespace cflab
