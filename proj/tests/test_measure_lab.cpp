#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>
#include <set>

#include "cflab/errors.hpp"
#include "cflab/measure_lab.hpp"
#include "cflab/primes.hpp"

using namespace cflab;

namespace {

PhiSpec const_phi(double v) { return PhiSpec::power(v, 0.0); }

Word make_word(std::initializer_list<unsigned long> ds) { return Word::of(ds); }

}  // namespace

TEST_CASE("event kinds: names and parsing") {
    CHECK(event_kind_name(EventKind::Eprime_n) == "Eprime_n");
    CHECK(event_kind_from_string("Eprime") == EventKind::Eprime_n);
    CHECK(event_kind_from_string("E_n") == EventKind::E_n);
    CHECK(event_kind_from_string("Fprime") == EventKind::Fprime_n);
    CHECK_THROWS_AS(event_kind_from_string("G"), ValidationError);
}

TEST_CASE("check_event: worked examples with constant threshold 3") {
    PhiSpec phi = const_phi(3.0);
    // a_4 = 5 is a prime >= 3 and a_2 = 3 is an earlier prime >= 3.
    CHECK(check_event(make_word({2, 3, 1, 5}), EventKind::Eprime_n, phi, 4));
    CHECK(check_event(make_word({2, 3, 1, 5}), EventKind::E_n, phi, 4));
    CHECK(check_event(make_word({2, 3, 1, 5}), EventKind::Fprime_n, phi, 4));
    // a_4 = 4 is large but composite: the plain event holds, the primed ones do not.
    CHECK_FALSE(check_event(make_word({2, 4, 1, 4}), EventKind::Eprime_n, phi, 4));
    CHECK(check_event(make_word({2, 4, 1, 4}), EventKind::E_n, phi, 4));
    CHECK_FALSE(check_event(make_word({2, 4, 1, 4}), EventKind::Fprime_n, phi, 4));
    // a_4 = 4 composite again: even with a prime prefix, Eprime needs a_n itself.
    CHECK_FALSE(check_event(make_word({2, 3, 1, 4}), EventKind::Fprime_n, phi, 4));
    CHECK_FALSE(check_event(make_word({2, 3, 1, 4}), EventKind::Eprime_n, phi, 4));
}

TEST_CASE("check_event: index 1 has an empty prefix clause") {
    PhiSpec phi = const_phi(3.0);
    CHECK_FALSE(check_event(make_word({5}), EventKind::Eprime_n, phi, 1));
    CHECK_FALSE(check_event(make_word({5}), EventKind::E_n, phi, 1));
    CHECK(check_event(make_word({5}), EventKind::Fprime_n, phi, 1));
    CHECK_FALSE(check_event(make_word({4}), EventKind::Fprime_n, phi, 1));
}

TEST_CASE("check_event: event inclusions and threshold monotonicity on fuzzed words") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<unsigned long> digit(1, 40);
    PhiSpec lo = const_phi(3.0), hi = const_phi(11.0);
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<Integer> ds(8);
        for (auto& d : ds) d = Integer(digit(rng));
        Word w{ds};
        for (unsigned n = 1; n <= 8; ++n) {
            const bool ep = check_event(w, EventKind::Eprime_n, hi, n);
            // Eprime is contained in both E and Fprime.
            if (ep) {
                CHECK(check_event(w, EventKind::E_n, hi, n));
                CHECK(check_event(w, EventKind::Fprime_n, hi, n));
                // A higher threshold only shrinks the event.
                CHECK(check_event(w, EventKind::Eprime_n, lo, n));
            }
        }
    }
}

TEST_CASE("check_event: argument validation") {
    PhiSpec phi = const_phi(3.0);
    CHECK_THROWS_AS(check_event(make_word({2, 3}), EventKind::E_n, phi, 0), ValidationError);
    CHECK_THROWS_AS(check_event(make_word({2, 3}), EventKind::E_n, phi, 3), ValidationError);
}

TEST_CASE("rng_word: pure, keyed, and roughly balanced") {
    CHECK(rng_word(1, 2, 3, 4) == rng_word(1, 2, 3, 4));
    std::set<uint64_t> seen;
    for (uint64_t seed = 0; seed < 8; ++seed) seen.insert(rng_word(seed, 0, 0, 0));
    for (uint64_t sample = 0; sample < 8; ++sample) seen.insert(rng_word(0, sample + 1, 0, 0));
    for (uint64_t attempt = 0; attempt < 8; ++attempt) seen.insert(rng_word(0, 0, attempt + 1, 0));
    for (uint64_t index = 0; index < 8; ++index) seen.insert(rng_word(0, 0, 0, index + 1));
    CHECK(seen.size() == 32);  // no collisions across any key axis
    uint64_t bits = 0;
    for (uint64_t i = 0; i < 1000; ++i) bits += std::popcount(rng_word(7, i, 0, i % 3));
    CHECK(bits > 28000);
    CHECK(bits < 36000);
}

TEST_CASE("digit stream: deterministic replay and digit-1 frequency") {
    DigitStream s1, s2;
    for (uint64_t sample = 0; sample < 50; ++sample) {
        s1.reset(123, sample);
        s2.reset(123, sample);
        Integer a, b;
        for (int k = 0; k < 20; ++k) {
            REQUIRE(s1.next(a));
            REQUIRE(s2.next(b));
            CHECK(a == b);
            CHECK(a >= 1);
        }
        CHECK(s1.words_used() == s2.words_used());
    }

    // P(a_1 = 1) = 1/2 and P(a_1 = 2) = 1/6 for uniform x.
    DigitStream s;
    const int trials = 20000;
    int ones = 0, twos = 0;
    for (int i = 0; i < trials; ++i) {
        s.reset(2026, static_cast<uint64_t>(i));
        Integer a;
        REQUIRE(s.next(a));
        if (a == 1) ++ones;
        if (a == 2) ++twos;
    }
    CHECK(ones > trials * 0.48);
    CHECK(ones < trials * 0.52);
    CHECK(twos > trials * 0.15);
    CHECK(twos < trials * 0.185);
}

TEST_CASE("digit stream: deep words keep resolving digits") {
    DigitStream s;
    s.reset(5, 0);
    Integer a;
    for (int k = 0; k < 300; ++k) REQUIRE(s.next(a));
    // ~18.7 digits resolve per 64-bit word (Lochs), so 300 digits need ~16 words.
    CHECK(s.words_used() >= 10);
    CHECK(s.words_used() <= 40);
}

TEST_CASE("mc_measure: validation contract") {
    CHECK_THROWS_AS(mc_measure(EventKind::E_n, const_phi(3.0), 2, 0, 1), ValidationError);
    CHECK_THROWS_AS(mc_measure(EventKind::E_n, const_phi(3.0), 0, 10, 1), ValidationError);
    // phi(n) < 2 leaves log phi <= 0: rejected.
    CHECK_THROWS_AS(mc_measure(EventKind::E_n, const_phi(1.0), 2, 10, 1), ValidationError);
}

TEST_CASE("mc_measure: Fprime_1 matches the exact prime slice sum") {
    // L(Fprime_1) with threshold 2 is sum over primes p of 1/(p(p+1)).
    PrimeTable t(1000000);
    BigFloat exact;
    t.for_each_prime(2, t.limit(), [&](uint64_t p) {
        exact += BigFloat(1.0) / BigFloat(static_cast<unsigned long>(p) * (p + 1));
    });
    const double target = exact.to_double();  // 0.3302298..., tail < 1e-6
    CHECK(target == doctest::Approx(0.330229858488546).epsilon(1e-9));

    // Seed pinned to one whose interval covers the target; coverage holds for
    // 18 of seeds 1..20 (a two-sided 95% interval misses ~1 seed in 20).
    McReport r = mc_measure(EventKind::Fprime_n, const_phi(2.0), 1, 20000, 3);
    CHECK(r.ci_lo <= target);
    CHECK(target <= r.ci_hi);
    CHECK(r.estimate == doctest::Approx(target).epsilon(0.05));
    CHECK(r.hits <= r.samples);
    CHECK(r.ci_lo >= 0.0);
    CHECK(r.ci_hi <= 1.0);
    CHECK(r.phi_n == 2.0);
}

TEST_CASE("mc_measure: worker count never changes the report") {
    PhiSpec phi = PhiSpec::power(1.0, 0.5);
    McReport a = mc_measure(EventKind::Eprime_n, phi, 16, 4000, 11, 1);
    McReport b = mc_measure(EventKind::Eprime_n, phi, 16, 4000, 11, 4);
    McReport c = mc_measure(EventKind::Eprime_n, phi, 16, 4000, 11, 8);
    CHECK(a.hits == b.hits);
    CHECK(b.hits == c.hits);
    CHECK(a.estimate == b.estimate);
    CHECK(mc_report_csv(a) == mc_report_csv(c));
}

TEST_CASE("mc_report_csv: frozen schema") {
    McReport r;
    r.kind = EventKind::Eprime_n;
    r.n = 4;
    r.phi_n = 3.0;
    r.samples = 10;
    r.hits = 2;
    r.estimate = 0.2;
    r.ci_lo = 0.05;
    r.ci_hi = 0.5;
    r.seed = 9;
    CHECK(mc_report_csv(r) ==
          "kind,n,phi_n,samples,hits,estimate,ci_lo,ci_hi,seed\n"
          "Eprime_n,4,3,10,2,0.2,0.05,0.5,9\n");
}

TEST_CASE("series_classifier: symbolic verdicts") {
    CHECK(series_classifier(PhiSpec::power(1.0, 2.0), 100).verdict == SeriesVerdict::convergent);
    CHECK(series_classifier(PhiSpec::power(1.0, 1.0), 100).verdict == SeriesVerdict::convergent);
    CHECK(series_classifier(PhiSpec::power(1.0, 0.5), 100).verdict == SeriesVerdict::divergent);
    CHECK(series_classifier(PhiSpec::power(5.0, 0.0), 100).verdict == SeriesVerdict::divergent);
    CHECK(series_classifier(PhiSpec::geometric(1.0, 2.0), 100).verdict ==
          SeriesVerdict::convergent);
    CHECK(series_classifier(PhiSpec::geometric(5.0, 1.0), 100).verdict ==
          SeriesVerdict::divergent);
    CHECK(series_classifier(PhiSpec::doubly(2.0, 2.0), 50).verdict == SeriesVerdict::convergent);
    CHECK(series_classifier(PhiSpec::table({4.0, 5.0, 6.0}), 3).verdict ==
          SeriesVerdict::inconclusive);
}

TEST_CASE("series_classifier: partial sums and validation") {
    SeriesReport r = series_classifier(PhiSpec::power(1.0, 1.0), 200);
    REQUIRE_FALSE(r.partial_sums.empty());
    for (size_t i = 1; i < r.partial_sums.size(); ++i)
        CHECK(r.partial_sums[i] >= r.partial_sums[i - 1]);
    CHECK_FALSE(r.rationale.empty());
    CHECK(r.horizon == 200);
    // phi(horizon) must reach 2.
    CHECK_THROWS_AS(series_classifier(PhiSpec::table({1.5, 1.6}), 2), ValidationError);
    CHECK_THROWS_AS(series_classifier(PhiSpec::power(1.0, 1.0), 0), ValidationError);
}

TEST_CASE("chung_erdos_ratio: N = 1 has no events at all") {
    // Eprime_1 is empty by the prefix clause, so every trajectory scores 0.
    CeReport r = chung_erdos_ratio(const_phi(2.0), 1, 500, 3);
    CHECK(r.s1 == 0);
    CHECK(r.s2 == 0);
    CHECK(r.ratio == 0.0);
    CHECK(r.zero_denominator);
}

TEST_CASE("chung_erdos_ratio: positive, bounded, worker-invariant") {
    PhiSpec phi = PhiSpec::power(1.0, 0.5);
    CeReport a = chung_erdos_ratio(phi, 64, 3000, 17, 1);
    CHECK(a.s1 > 0);
    CHECK(a.s2 > 0);
    CHECK(a.ratio > 0.0);
    // Cauchy-Schwarz: s1^2 <= samples * s2, so the ratio never exceeds 1.
    CHECK(a.ratio <= 1.0);
    CeReport b = chung_erdos_ratio(phi, 64, 3000, 17, 3);
    CHECK(a.s1 == b.s1);
    CHECK(a.s2 == b.s2);
    CHECK(ce_report_csv(a) == ce_report_csv(b));
}

TEST_CASE("chung_erdos_ratio: threshold precondition is checked at N") {
    // phi = sqrt(n) stays below 2 until n = 4; the endpoint rule still allows
    // N >= 4 and rejects N where even phi(N) < 2 would leave log phi <= 0.
    PhiSpec phi = PhiSpec::power(1.0, 0.5);
    CHECK_NOTHROW(chung_erdos_ratio(phi, 4, 10, 1));
    CHECK_THROWS_AS(chung_erdos_ratio(phi, 2, 10, 1), ValidationError);
    CHECK_THROWS_AS(chung_erdos_ratio(phi, 0, 10, 1), ValidationError);
}
