#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "cflab/cf_core.hpp"
#include "cflab/pressure.hpp"

namespace cflab {

// Digit events at index n, thresholded by phi(n) (the same threshold applies
// to the earlier-index clause):
//   Eprime_n: a_n prime with a_n >= phi(n), and some a_k (k < n) prime with
//             a_k >= phi(n)  (two large prime partial quotients)
//   E_n:      same shape without the primality requirements
//   Fprime_n: a_n prime with a_n >= phi(n) (index-n condition only)
enum class EventKind { Eprime_n, E_n, Fprime_n };

std::string event_kind_name(EventKind k);
// Accepts "Eprime", "E", "Fprime" and the _n-suffixed tags.
EventKind event_kind_from_string(const std::string& s);

// Exact event check on a fully known word. Throws ValidationError when the
// word has fewer than n digits or n < 1.
bool check_event(const Word& w, EventKind kind, const PhiSpec& phi, unsigned n);

struct McReport {
    EventKind kind;
    unsigned n = 0;
    double phi_n = 0;
    uint64_t samples = 0;
    uint64_t hits = 0;
    double estimate = 0;
    double ci_lo = 0, ci_hi = 0;  // two-sided 95% Wilson interval
    uint64_t seed = 0;
};

// Monte Carlo estimate of the Lebesgue measure of the event set. Samples are
// uniform reals in (0,1) whose bits come from a counter-based generator keyed
// (seed, sample index), so the report is a pure function of the inputs and in
// particular independent of the worker count. Requires samples >= 1 and
// phi(n) >= 2.
McReport mc_measure(EventKind kind, const PhiSpec& phi, unsigned n, uint64_t samples,
                    uint64_t seed, unsigned workers = 1);

// CSV (header + one row): kind,n,phi_n,samples,hits,estimate,ci_lo,ci_hi,seed
std::string mc_report_csv(const McReport& r);

enum class SeriesVerdict { convergent, divergent, inconclusive };
std::string series_verdict_name(SeriesVerdict v);

struct SeriesReport {
    SeriesVerdict verdict = SeriesVerdict::inconclusive;
    std::string rationale;
    // Cumulative sums of t_n = n / (phi(n)^2 log^2 phi(n)) for n in
    // [first_term, horizon]; indices with phi(n) < 2 are skipped.
    std::vector<double> partial_sums;
    uint64_t first_term = 0;
    uint64_t horizon = 0;
};

// Convergence classification of sum_n n / (phi(n)^2 log^2 phi(n)).
// Symbolic forms are decided analytically (power: divergent iff k < 1, the
// k = 1 boundary is convergent by the integral test against 1/(n log^2 n);
// geometric with B > 1 and doubly with c, b > 1 are convergent); table form
// reports partial sums and is inconclusive. Requires phi(horizon) >= 2.
SeriesReport series_classifier(const PhiSpec& phi, uint64_t horizon);

struct CeReport {
    unsigned N = 0;
    uint64_t samples = 0;
    uint64_t seed = 0;
    uint64_t s1 = 0;  // sum over samples of r_s = #{n <= N : Eprime_n holds}
    uint64_t s2 = 0;  // sum over samples of r_s^2
    double ratio = 0;
    bool zero_denominator = false;
};

// Second-moment (Chung-Erdos style) lower-bound diagnostic
//   (sum_{n<=N} L(Eprime_n))^2 / sum_{m,n<=N} L(Eprime_m cap Eprime_n)
// estimated from one hit matrix per sampled trajectory: ratio =
// s1^2 / (samples * s2), reported as 0 with zero_denominator set when no
// trajectory hits any event. The aggregates s1, s2 are exact integers, so the
// ratio is bit-identical across worker counts. The phi(n) >= 2 precondition is
// enforced at n = N (earlier indices need no log phi).
CeReport chung_erdos_ratio(const PhiSpec& phi, unsigned N, uint64_t samples, uint64_t seed,
                           unsigned workers = 1);

// CSV (header + one row): N,samples,seed,s1,s2,ratio,zero_denominator
std::string ce_report_csv(const CeReport& r);

// ---- sampling machinery (exposed for white-box tests) ----

// j-th 64-bit word of the random bit stream for (seed, sample, attempt):
// a pure function, no state.
uint64_t rng_word(uint64_t seed, uint64_t sample, uint64_t attempt, uint64_t index);

// Lazy exact partial-quotient extractor for a uniform x in (0,1). The value
// is held as a homographic image x = (A y + B) / (C y + D) of the unread
// uniform tail y in [0,1); 64-bit words are folded in on demand until the
// next digit is pinned (floor agreement at both ends of the y-interval).
// The first 64 bits match a one-shot dyadic mantissa draw; further words
// refine the same sample instead of declaring its expansion exhausted, so
// arbitrary digit depths are reachable. A sample whose digits stop resolving
// (a dyadic corner case) exhausts the per-digit refill budget and is
// resampled by the caller under the next attempt key.
class DigitStream {
  public:
    DigitStream();
    ~DigitStream();
    DigitStream(const DigitStream&) = delete;
    DigitStream& operator=(const DigitStream&) = delete;

    // (Re)keys the stream; reuses allocations, cheap enough per sample.
    void reset(uint64_t seed, uint64_t sample, uint64_t attempt = 0);

    // Extracts the next partial quotient into `out` (always >= 1).
    // Returns false when the per-digit refill budget is exhausted.
    bool next(Integer& out);

    uint64_t words_used() const { return word_idx_; }

  private:
    void refill();
    mpz_t A_, B_, C_, D_;
    mpz_t s1_, s2_, f1_, f2_;  // scratch
    uint64_t seed_ = 0, sample_ = 0, attempt_ = 0, word_idx_ = 0;
};

}  // namespace cflab
