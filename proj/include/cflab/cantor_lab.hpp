#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cflab/bigfloat.hpp"
#include "cflab/cf_core.hpp"

namespace cflab {

// Parameters of the nested Cantor construction: digit positions are laid out
// in blocks k = 1, 2, ... as
//   free area  (n_{k-1}+2, m_k]   — ell_k words of length N, digits in {1..M}
//   filler     (m_k, n_k]         — N + i_k forced digits equal to 2
//   primes     n_k + 1, n_k + 2   — digits drawn from P cap [Bt^{n_k}, 2 Bt^{n_k}]
// with n_0 = -2, m_k = n_{k-1} + 2 + ell_k N, n_k = m_k + N + i_k.
struct CantorParams {
    double Btilde = 2;
    uint64_t M = 2;
    unsigned N = 2;
    double s = 0.6;
    double delta = 0.05;
    std::vector<uint64_t> ell;    // ell_1..ell_K, each >= 1
    std::vector<uint64_t> i_seq;  // i_1..i_K in [0, N); missing entries default to 0
};

struct ParamCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Schedule {
    std::vector<int64_t> n;  // n[k] = n_k, n[0] = -2
    std::vector<int64_t> m;  // m[k] = m_k, m[0] unused
    int64_t max_level = 0;   // n_K + 2
};

enum class PosClass { free_digit, filler, prime1, prime2 };
std::string pos_class_name(PosClass c);

// Class of digit position pos >= 1; positions beyond n_K + 2 belong to the
// free area of the (unscheduled) next block.
PosClass classify_position(const Schedule& s, int64_t pos);

struct ValidatedParams {
    CantorParams p;
    Schedule sched;
    std::vector<ParamCheck> checks;  // soft conditions: pass or warn
    bool audit_mode = false;         // true when any soft condition failed
};

// Hard constraint violations (Btilde <= 1, M < 2, N < 1, s outside (1/2, 1),
// delta <= 0, s - delta <= 1/2, empty or invalid ell / i_seq) throw
// ValidationError. Infeasible-at-desk-scale hypotheses — the pressure
// condition s < s_N(Btilde, M), the size condition N > max(e^20, 2/delta+1),
// and the per-k sparsity conditions (N ell_k / n_k >= 1 - delta,
// log(n_k)/n_k < delta, ell_k >= 24 N) — are reported as warnings.
ValidatedParams validate_params(const CantorParams& p);

// A fundamental set J_n at level n: the digit word is implicit in the path,
// the interval is the hull of the admissible next-digit cylinders.
struct MassNode {
    uint64_t last_digit = 0;
    Integer p, q;            // convergents p_n/q_n of the node's word
    Integer p_prev, q_prev;  // p_{n-1}/q_{n-1}
    Rational lo, hi;         // J_n hull, lo < hi
    BigFloat mass;           // mu(J_n)
    uint64_t word_code = 0;  // lex code of the free word in progress
};

struct LevelAudit {
    int64_t level = 0;
    PosClass next_class = PosClass::free_digit;  // class of position level+1
    uint64_t count = 0;
    bool sampled = false;          // stratified prime sampling was applied at or
                                   // before this level
    double mass_total = 0;         // sum of node masses (target: exactly 1)
    double mass_rel_err = 0;       // |mass_total - 1|
    double child_sum_rel_err = 0;  // max over parents of |sum(children) - parent| / parent
    bool has_gap = false;
    double min_gap_ratio = 0;      // min over adjacent pairs of gap / max(|J|, |J'|)
    bool gap_pass = false;         // min_gap_ratio >= 1/(8M), exact comparison
    double max_holder = 0;         // max over nodes of mass / |J|^beta
    double len_lo = 0, len_hi = 0; // observed normalized-length extremes
    bool length_band_pass = true;
};

struct PrimeBlockInfo {
    unsigned j = 0;      // block index, 1-based
    int64_t n_j = 0;
    uint64_t lo = 0, hi = 0;        // integer window [ceil(Bt^n_j), floor(2 Bt^n_j)]
    uint64_t p_lo = 0, p_hi = 0;    // extreme primes in the window
    uint64_t count = 0;             // #(P cap window)
    double c_n = 0;                 // interval constant c_{n_j}(Btilde)
};

struct AuditOptions {
    int64_t max_level = -1;      // -1: through n_K + 2
    uint64_t node_cap = 1000000; // BudgetError beyond
    unsigned sample_primes = 0;  // 0: exact; K > 0: stratified picks per parent
    uint64_t seed = 0;           // keys the stratified picks
    unsigned workers = 1;
};

struct CantorAudit {
    ValidatedParams vp;
    std::string u;        // level-N normalizer (decimal, high precision)
    bool u_gt_1 = false;
    double beta = 0;      // Hoelder exponent s(1 - delta) - delta
    uint64_t node_cap = 0;
    unsigned sample_primes = 0;
    uint64_t seed = 0;
    std::vector<PrimeBlockInfo> blocks;  // blocks reached by the audit
    std::vector<LevelAudit> levels;
    double max_growth_factor = 0;  // max over consecutive levels of
                                   // max_holder[l+1] / max_holder[l]
};

// Level-by-level enumeration with mass bookkeeping and the four audits
// (mass conservation, nearest-neighbor gaps, length bands, Hoelder table).
// Prime positions multiply the node count by the sieve count of the window;
// with sample_primes = K > 0 each parent instead keeps K stratified picks
// whose masses are weighted by bucket size, so conservation stays exact and
// the affected levels are flagged sampled (their gap audit is skipped).
CantorAudit run_audit(const CantorParams& p, const AuditOptions& opt);

// Exact nodes of one level (levels 1..level built internally, no sampling).
std::vector<MassNode> enumerate_level(const CantorParams& p, int64_t level, uint64_t cap);

// Deterministic JSON rendering of the audit (stable key order).
std::string audit_report_json(const CantorAudit& a);

}  // namespace cflab
