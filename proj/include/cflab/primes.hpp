#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cflab/bigfloat.hpp"
#include "cflab/cf_core.hpp"

namespace cflab {

// Bit table of primality on [0, limit], built by a segmented sieve of
// Eratosthenes, with cumulative counts per 64-integer block so that pi(x)
// queries are O(1).
class PrimeTable {
  public:
    explicit PrimeTable(uint64_t limit);  // sieves

    uint64_t limit() const { return limit_; }
    bool is_prime(uint64_t v) const;
    uint64_t count_leq(uint64_t x) const;                       // pi(x), x <= limit
    uint64_t count_interval(uint64_t lo, uint64_t hi) const;    // #(P intersect [lo, hi])
    std::vector<uint64_t> primes_in(uint64_t lo, uint64_t hi) const;

    // Calls f(p) for each prime p in [lo, hi] in ascending order.
    template <typename F>
    void for_each_prime(uint64_t lo, uint64_t hi, F&& f) const {
        if (hi > limit_) hi = limit_;
        for (uint64_t p = lo < 2 ? 2 : lo; p <= hi; ++p)
            if (is_prime(p)) f(p);
    }

    // On-disk cache (little-endian): 8-byte magic "CFLSIEVE", u32 version,
    // u64 limit, then the bit blocks. Returns false on absent/mismatched file.
    bool load_cache(const std::string& path);
    void save_cache(const std::string& path) const;

  private:
    PrimeTable() = default;
    void rebuild_counts();
    friend PrimeTable sieve_with_cache(uint64_t limit);
    uint64_t limit_ = 0;
    std::vector<uint64_t> bits_;  // bit v of word v/64 <=> v prime
    std::vector<uint64_t> cum_;   // cum_[w] = #primes < 64*w
};

// Builds a PrimeTable, honoring the CFML_SIEVE_CACHE environment variable:
// when set to a directory, sieve bits are loaded from / saved to
// "<dir>/sieve_<limit>.bits".
PrimeTable sieve_with_cache(uint64_t limit);

// Deterministic Miller-Rabin for 64-bit integers (fixed witness set, proven
// complete below 3.3e24, in particular for all uint64_t).
bool is_prime_u64(uint64_t v);

// Primality for arbitrary Integers: bit-table lookup is the caller's fast
// path; this uses deterministic Miller-Rabin for values that fit in 64 bits
// and mpz_probab_prime_p (fixed rep count, deterministic per build) above.
bool is_prime_integer(const Integer& v);

struct TailSum {
    uint64_t M = 0;
    uint64_t limit = 0;
    BigFloat lower;      // sum over primes p in [M, limit] of 1/p^2, ascending p
    BigFloat upper;      // lower + 1/limit (integer-tail bound for p > limit)
    double normalized;   // midpoint * M * log M (0 when M < 2)
};

// High-precision bracket of the prime tail sum_{p >= M} 1/p^2, with the
// asymptotic normalization S(M) * M * log M (-> 1) reported alongside.
TailSum prime_square_tail(const PrimeTable& t, uint64_t M);

// c_n(gamma) defined by #(P intersect [gamma^n, 2 gamma^n]) = c_n(gamma) *
// gamma^n / (n log gamma); requires 2*gamma^n <= limit.
double interval_constant(const PrimeTable& t, double gamma, unsigned n);

// Whether P intersect [0.999 x, x) is nonempty (the claim holds for x > e^20;
// empirically testable for far smaller x).
bool short_interval_nonempty(const PrimeTable& t, uint64_t x);

}  // namespace cflab
