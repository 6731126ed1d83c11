#include "cflab/measure_lab.hpp"

#include <cmath>
#include <thread>

#include "cflab/errors.hpp"
#include "cflab/format.hpp"
#include "cflab/primes.hpp"

namespace cflab {

namespace {

constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile
constexpr unsigned kMaxRefillsPerDigit = 48;
constexpr unsigned kMaxAttempts = 16;

uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

struct Wilson {
    double lo, hi;
};

Wilson wilson95(uint64_t hits, uint64_t samples) {
    const double n = static_cast<double>(samples);
    const double ph = static_cast<double>(hits) / n;
    const double z2n = kZ95 * kZ95 / n;
    const double denom = 1.0 + z2n;
    const double center = (ph + z2n / 2.0) / denom;
    const double half = kZ95 * std::sqrt(ph * (1.0 - ph) / n + z2n / (4.0 * n)) / denom;
    Wilson w;
    w.lo = std::max(0.0, center - half);
    w.hi = std::min(1.0, center + half);
    return w;
}

}  // namespace

uint64_t rng_word(uint64_t seed, uint64_t sample, uint64_t attempt, uint64_t index) {
    uint64_t k = mix64(seed ^ 0x6A09E667F3BCC909ULL);
    k = mix64(k ^ (sample * 0x9E3779B97F4A7C15ULL));
    k = mix64(k ^ (attempt * 0xC2B2AE3D27D4EB4FULL));
    return mix64(k + index * 0x9E3779B97F4A7C15ULL);
}

DigitStream::DigitStream() {
    mpz_inits(A_, B_, C_, D_, s1_, s2_, f1_, f2_, nullptr);
}

DigitStream::~DigitStream() {
    mpz_clears(A_, B_, C_, D_, s1_, s2_, f1_, f2_, nullptr);
}

void DigitStream::reset(uint64_t seed, uint64_t sample, uint64_t attempt) {
    seed_ = seed;
    sample_ = sample;
    attempt_ = attempt;
    word_idx_ = 0;
    // x = y: identity homography.
    mpz_set_ui(A_, 1);
    mpz_set_ui(B_, 0);
    mpz_set_ui(C_, 0);
    mpz_set_ui(D_, 1);
}

void DigitStream::refill() {
    const uint64_t w = rng_word(seed_, sample_, attempt_, word_idx_++);
    // y = (w + y') / 2^64:  B <- A w + B 2^64,  D <- C w + D 2^64.
    mpz_mul_2exp(B_, B_, 64);
    mpz_addmul_ui(B_, A_, w);
    mpz_mul_2exp(D_, D_, 64);
    mpz_addmul_ui(D_, C_, w);
}

bool DigitStream::next(Integer& out) {
    for (unsigned refills = 0;; ++refills) {
        // 1/x spans between D/B (y = 0) and (C+D)/(A+B) (y -> 1); the digit is
        // pinned once both floors agree.
        if (mpz_sgn(B_) > 0) {
            mpz_add(f1_, A_, B_);
            if (mpz_sgn(f1_) > 0) {
                mpz_fdiv_q(s1_, D_, B_);
                mpz_add(f2_, C_, D_);
                mpz_fdiv_q(s2_, f2_, f1_);
                if (mpz_cmp(s1_, s2_) == 0 && mpz_sgn(s1_) > 0) {
                    // Emit a = s1: (A,B,C,D) <- (C - aA, D - aB, A, B).
                    mpz_submul(C_, s1_, A_);
                    mpz_submul(D_, s1_, B_);
                    mpz_swap(A_, C_);
                    mpz_swap(B_, D_);
                    mpz_set(out.get_mpz_t(), s1_);
                    return true;
                }
            }
        }
        if (refills >= kMaxRefillsPerDigit) return false;
        refill();
    }
}

std::string event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Eprime_n:
            return "Eprime_n";
        case EventKind::E_n:
            return "E_n";
        case EventKind::Fprime_n:
            return "Fprime_n";
    }
    return "?";
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "Eprime" || s == "Eprime_n") return EventKind::Eprime_n;
    if (s == "E" || s == "E_n") return EventKind::E_n;
    if (s == "Fprime" || s == "Fprime_n") return EventKind::Fprime_n;
    throw ValidationError("unknown event kind: " + s);
}

namespace {

// Shared event semantics for both the exact word checker and the MC sampler.
// Feed digits a_1..a_n in order; prefix flags cover indices k < n.
struct EventEval {
    EventKind kind;
    const Integer* threshold;
    bool plain_prefix = false;
    bool prime_prefix = false;

    void feed_prefix(const Integer& a) {
        if (a < *threshold) return;
        plain_prefix = true;
        if (!prime_prefix && is_prime_integer(a)) prime_prefix = true;
    }
    bool finish(const Integer& a_n) const {
        if (a_n < *threshold) return false;
        switch (kind) {
            case EventKind::Eprime_n:
                return prime_prefix && is_prime_integer(a_n);
            case EventKind::E_n:
                return plain_prefix;
            case EventKind::Fprime_n:
                return is_prime_integer(a_n);
        }
        return false;
    }
};

}  // namespace

bool check_event(const Word& w, EventKind kind, const PhiSpec& phi, unsigned n) {
    if (n < 1) throw ValidationError("check_event: n must be >= 1");
    if (w.size() < n) throw ValidationError("check_event: word shorter than n");
    const Integer t = phi.threshold(n);
    EventEval ev{kind, &t};
    for (unsigned k = 1; k < n; ++k) ev.feed_prefix(w.digit(k));
    return ev.finish(w.digit(n));
}

namespace {

// One sample's hit for mc_measure; resamples under the next attempt key when
// the digit stream stalls (dyadic corner case).
bool sample_hit(DigitStream& ds, Integer& a, uint64_t seed, uint64_t sample, EventKind kind,
                const Integer& threshold, unsigned n) {
    for (unsigned attempt = 0; attempt < kMaxAttempts; ++attempt) {
        ds.reset(seed, sample, attempt);
        EventEval ev{kind, &threshold};
        bool ok = true;
        for (unsigned i = 1; i < n; ++i) {
            if (!ds.next(a)) {
                ok = false;
                break;
            }
            // Fprime needs nothing from the prefix.
            if (kind != EventKind::Fprime_n) ev.feed_prefix(a);
        }
        if (!ok) continue;
        if (!ds.next(a)) continue;
        return ev.finish(a);
    }
    throw NumericalError("mc sample failed to yield " + std::to_string(n) +
                         " digits after " + std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace

McReport mc_measure(EventKind kind, const PhiSpec& phi, unsigned n, uint64_t samples,
                    uint64_t seed, unsigned workers) {
    if (samples < 1) throw ValidationError("mc_measure: samples must be >= 1");
    if (n < 1) throw ValidationError("mc_measure: n must be >= 1");
    const double phi_n = phi.value(n);
    if (!(phi_n >= 2)) throw ValidationError("mc_measure: phi(n) must be >= 2");
    if (workers < 1) workers = 1;
    if (workers > samples) workers = static_cast<unsigned>(samples);
    const Integer threshold = phi.threshold(n);

    std::vector<uint64_t> part(workers, 0);
    auto run = [&](unsigned wi) {
        const uint64_t lo = samples * wi / workers;
        const uint64_t hi = samples * (wi + 1) / workers;
        DigitStream ds;
        Integer a;
        uint64_t h = 0;
        for (uint64_t s = lo; s < hi; ++s)
            if (sample_hit(ds, a, seed, s, kind, threshold, n)) ++h;
        part[wi] = h;
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned wi = 0; wi < workers; ++wi) pool.emplace_back(run, wi);
        for (auto& th : pool) th.join();
    }
    uint64_t hits = 0;
    for (uint64_t h : part) hits += h;

    McReport r;
    r.kind = kind;
    r.n = n;
    r.phi_n = phi_n;
    r.samples = samples;
    r.hits = hits;
    r.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    Wilson w = wilson95(hits, samples);
    r.ci_lo = w.lo;
    r.ci_hi = w.hi;
    r.seed = seed;
    return r;
}

std::string mc_report_csv(const McReport& r) {
    std::string s = "kind,n,phi_n,samples,hits,estimate,ci_lo,ci_hi,seed\n";
    s += event_kind_name(r.kind);
    s += ',';
    s += std::to_string(r.n);
    s += ',';
    s += format_double(r.phi_n);
    s += ',';
    s += std::to_string(r.samples);
    s += ',';
    s += std::to_string(r.hits);
    s += ',';
    s += format_double(r.estimate);
    s += ',';
    s += format_double(r.ci_lo);
    s += ',';
    s += format_double(r.ci_hi);
    s += ',';
    s += std::to_string(r.seed);
    s += '\n';
    return s;
}

std::string series_verdict_name(SeriesVerdict v) {
    switch (v) {
        case SeriesVerdict::convergent:
            return "convergent";
        case SeriesVerdict::divergent:
            return "divergent";
        case SeriesVerdict::inconclusive:
            return "inconclusive";
    }
    return "?";
}

SeriesReport series_classifier(const PhiSpec& phi, uint64_t horizon) {
    if (horizon < 1) throw ValidationError("series_classifier: horizon must be >= 1");
    const double tail_value = phi.value(horizon);  // +inf is fine
    if (!(tail_value >= 2))
        throw ValidationError("series_classifier: phi must reach 2 on the horizon (log^2 phi)");

    SeriesReport rep;
    rep.horizon = horizon;

    // Partial sums of t_n = n / (phi^2 log^2 phi), from the first index with
    // phi(n) >= 2. Doubly-exponential phi overflows t_n to 0 harmlessly.
    double acc = 0;
    for (uint64_t n = 1; n <= horizon; ++n) {
        const double v = phi.value(n);
        if (!(v >= 2)) continue;
        if (rep.first_term == 0) rep.first_term = n;
        const double lg = std::log(v);
        const double t = std::isinf(v) ? 0.0
                                       : static_cast<double>(n) / (v * v * lg * lg);
        acc += t;
        rep.partial_sums.push_back(acc);
        if (rep.partial_sums.size() >= 100000) break;  // table cap; trend is set long before
    }

    switch (phi.form()) {
        case PhiSpec::Form::power: {
            const double k = phi.param2();
            if (k > 1) {
                rep.verdict = SeriesVerdict::convergent;
                rep.rationale = "t_n ~ n^(1-2k)/log^2 n with 1-2k < -1: summable";
            } else if (k == 1) {
                rep.verdict = SeriesVerdict::convergent;
                rep.rationale = "t_n ~ 1/(n log^2 n): convergent by the integral test";
            } else if (k > 0) {
                rep.verdict = SeriesVerdict::divergent;
                rep.rationale = "t_n ~ n^(1-2k)/log^2 n with 1-2k > -1: terms not summable";
            } else {
                rep.verdict = SeriesVerdict::divergent;
                rep.rationale = "phi constant: t_n ~ n grows without bound";
            }
            return rep;
        }
        case PhiSpec::Form::geometric: {
            if (phi.param2() > 1) {
                rep.verdict = SeriesVerdict::convergent;
                rep.rationale = "t_n ~ n B^(-2n)/(n^2 log^2 B): geometric decay";
            } else {
                rep.verdict = SeriesVerdict::divergent;
                rep.rationale = "phi constant: t_n ~ n grows without bound";
            }
            return rep;
        }
        case PhiSpec::Form::doubly: {
            if (phi.param1() > 1 && phi.param2() > 1) {
                rep.verdict = SeriesVerdict::convergent;
                rep.rationale = "t_n decays doubly exponentially";
            } else {
                rep.verdict = SeriesVerdict::divergent;
                rep.rationale = "phi constant: t_n ~ n grows without bound";
            }
            return rep;
        }
        case PhiSpec::Form::table: {
            rep.verdict = SeriesVerdict::inconclusive;
            const size_t m = rep.partial_sums.size();
            double last_gap = m >= 2 ? rep.partial_sums[m - 1] - rep.partial_sums[m - 2] : 0.0;
            rep.rationale = "table form: no symbolic bound; last term " + format_double(last_gap);
            return rep;
        }
    }
    return rep;
}

namespace {

struct CePartial {
    uint64_t s1 = 0;
    uint64_t s2 = 0;
};

// r_s for one trajectory: the count of n <= N with Eprime_n. The earlier-index
// clause for each n compares the running maximum prime digit against the
// (non-decreasing) threshold t_n, so one pass suffices. Primality is only
// tested where it can matter: at a potential hit, or at a new record digit.
uint64_t trajectory_hits(DigitStream& ds, Integer& a, Integer& prime_max, uint64_t seed,
                         uint64_t sample, const std::vector<Integer>& thr, unsigned N) {
    for (unsigned attempt = 0; attempt < kMaxAttempts; ++attempt) {
        ds.reset(seed, sample, attempt);
        prime_max = 0;
        uint64_t r = 0;
        bool ok = true;
        for (unsigned i = 1; i <= N; ++i) {
            if (!ds.next(a)) {
                ok = false;
                break;
            }
            const Integer& t = thr[i - 1];
            int prime_state = -1;  // lazily computed: 0 no, 1 yes
            if (a >= t && prime_max >= t) {
                prime_state = is_prime_integer(a) ? 1 : 0;
                if (prime_state == 1) ++r;
            }
            if (a > prime_max) {
                if (prime_state < 0) prime_state = is_prime_integer(a) ? 1 : 0;
                if (prime_state == 1) prime_max = a;
            }
        }
        if (ok) return r;
    }
    throw NumericalError("ce sample failed to yield " + std::to_string(N) +
                         " digits after " + std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace

CeReport chung_erdos_ratio(const PhiSpec& phi, unsigned N, uint64_t samples, uint64_t seed,
                           unsigned workers) {
    if (samples < 1) throw ValidationError("chung_erdos_ratio: samples must be >= 1");
    if (N < 1) throw ValidationError("chung_erdos_ratio: N must be >= 1");
    if (!(phi.value(N) >= 2))
        throw ValidationError("chung_erdos_ratio: phi(N) must be >= 2");
    if (workers < 1) workers = 1;
    if (workers > samples) workers = static_cast<unsigned>(samples);

    std::vector<Integer> thr;
    thr.reserve(N);
    for (unsigned i = 1; i <= N; ++i) thr.push_back(phi.threshold(i));

    std::vector<CePartial> part(workers);
    auto run = [&](unsigned wi) {
        const uint64_t lo = samples * wi / workers;
        const uint64_t hi = samples * (wi + 1) / workers;
        DigitStream ds;
        Integer a, prime_max;
        CePartial acc;
        for (uint64_t s = lo; s < hi; ++s) {
            const uint64_t r = trajectory_hits(ds, a, prime_max, seed, s, thr, N);
            acc.s1 += r;
            acc.s2 += r * r;
        }
        part[wi] = acc;
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned wi = 0; wi < workers; ++wi) pool.emplace_back(run, wi);
        for (auto& th : pool) th.join();
    }

    CeReport r;
    r.N = N;
    r.samples = samples;
    r.seed = seed;
    for (const CePartial& p : part) {
        r.s1 += p.s1;
        r.s2 += p.s2;
    }
    if (r.s2 == 0) {
        r.ratio = 0;
        r.zero_denominator = true;
    } else {
        r.ratio = static_cast<double>(r.s1) * static_cast<double>(r.s1) /
                  (static_cast<double>(samples) * static_cast<double>(r.s2));
    }
    return r;
}

std::string ce_report_csv(const CeReport& r) {
    std::string s = "N,samples,seed,s1,s2,ratio,zero_denominator\n";
    s += std::to_string(r.N);
    s += ',';
    s += std::to_string(r.samples);
    s += ',';
    s += std::to_string(r.seed);
    s += ',';
    s += std::to_string(r.s1);
    s += ',';
    s += std::to_string(r.s2);
    s += ',';
    s += format_double(r.ratio);
    s += ',';
    s += r.zero_denominator ? "1" : "0";
    s += '\n';
    return s;
}

}  // namespace cflab
