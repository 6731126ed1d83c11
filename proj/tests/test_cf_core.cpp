#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cflab/cf_core.hpp"
#include "cflab/errors.hpp"

using namespace cflab;

namespace {

Word make_word(std::initializer_list<unsigned long> ds) { return Word::of(ds); }

Rational rat(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

}  // namespace

TEST_CASE("expand: Euclidean oracle 113/355") {
    Word w = expand(rat(113, 355), 10);
    REQUIRE(w.size() == 3);
    CHECK(w.digit(1) == 3);
    CHECK(w.digit(2) == 7);
    CHECK(w.digit(3) == 16);
    CHECK(w.value() == rat(113, 355));
}

TEST_CASE("expand: truncation keeps a prefix") {
    Word w = expand(rat(113, 355), 2);
    REQUIRE(w.size() == 2);
    CHECK(w.digit(1) == 3);
    CHECK(w.digit(2) == 7);
}

TEST_CASE("expand: domain and argument validation") {
    CHECK_THROWS_AS(expand(rat(0, 1), 5), ValidationError);
    CHECK_THROWS_AS(expand(rat(1, 1), 5), ValidationError);
    CHECK_THROWS_AS(expand(rat(3, 2), 5), ValidationError);
    CHECK_THROWS_AS(expand(rat(-1, 3), 5), ValidationError);
    CHECK_THROWS_AS(expand(rat(1, 3), 0), ValidationError);
}

TEST_CASE("expand: canonical form never ends in digit 1 (position >= 2)") {
    // 2/3 = [1,2], not [1,1,1]; 3/4 = [1,3]; 5/8 = [1,1,1,2].
    Word a = expand(rat(2, 3), 10);
    REQUIRE(a.size() == 2);
    CHECK(a.digit(1) == 1);
    CHECK(a.digit(2) == 2);
    Word b = expand(rat(3, 4), 10);
    REQUIRE(b.size() == 2);
    CHECK(b.digit(2) == 3);
    Word c = expand(rat(5, 8), 10);
    REQUIRE(c.size() == 4);
    CHECK(c.digit(4) == 2);
}

TEST_CASE("word: convergents of [2,3,1]") {
    Word w = make_word({2, 3, 1});
    CHECK(w.p(3) == 4);
    CHECK(w.q(3) == 9);
    CHECK(w.value() == rat(4, 9));
    w.check_invariants();
}

TEST_CASE("word: all-ones continuants are Fibonacci numbers") {
    std::vector<Integer> ones(12, Integer(1));
    Word w{ones};
    // q_n = F_{n+1} with F_1 = F_2 = 1.
    Integer f_prev = 1, f = 1;
    for (size_t n = 1; n <= 12; ++n) {
        CHECK(w.q(static_cast<long>(n)) == f);
        Integer nx = f + f_prev;
        f_prev = f;
        f = nx;
    }
}

TEST_CASE("cylinder: I_1(1) = (1/2, 1]") {
    Cylinder c = cylinder(make_word({1}));
    CHECK(c.lo == rat(1, 2));
    CHECK(c.hi == rat(1, 1));
    CHECK_FALSE(c.closed_left);  // n odd: half-open on the left
    CHECK(c.length() == rat(1, 2));
}

TEST_CASE("cylinder: I_2(1,1) = [1/2, 2/3)") {
    Cylinder c = cylinder(make_word({1, 1}));
    CHECK(c.lo == rat(1, 2));
    CHECK(c.hi == rat(2, 3));
    CHECK(c.closed_left);  // n even: closed on the left
    CHECK(c.length() == rat(1, 6));
}

TEST_CASE("cylinder: parity rule over lengths 1..6") {
    Word w;
    for (unsigned long d = 2; d <= 7; ++d) {
        w = w.extended(Integer(d));
        Cylinder c = cylinder(w);
        CHECK(c.closed_left == (w.size() % 2 == 0));
        // |I_n| = 1/(q_n (q_n + q_{n-1})) exactly.
        const long n = static_cast<long>(w.size());
        Rational expect(Integer(1), w.q(n) * (w.q(n) + w.q(n - 1)));
        expect.canonicalize();
        CHECK(c.length() == expect);
    }
}

TEST_CASE("tail_union_measure: closed form and two-sided bracket") {
    Word w = make_word({1, 1});
    // 1/(q_n (M q_n + q_{n-1})) with q_2 = 2, q_1 = 1, M = 3.
    Rational t = tail_union_measure(w, Integer(3));
    CHECK(t == rat(1, 14));
    // L/(2M) <= tail <= L/M with L = |I_2| = 1/6 is loose; the sharp ratio is
    // (q+q')/(Mq+q') = 3/7 here, inside [1/3, 2/3].
    Rational L = cylinder(w).length();
    CHECK(t * 3 >= L);
    CHECK(t * 3 <= L * 2);
}

TEST_CASE("digit_slice_measure: empty-word slices") {
    Word empty;
    CHECK(digit_slice_measure(empty, Integer(1)) == rat(1, 2));
    CHECK(digit_slice_measure(empty, Integer(2)) == rat(1, 6));
    // {x : a_1 = M} = (1/(M+1), 1/M], length 1/(M(M+1)).
    for (unsigned long m = 1; m <= 12; ++m) {
        Rational expect(Integer(1), Integer(m) * Integer(m + 1));
        expect.canonicalize();
        CHECK(digit_slice_measure(empty, Integer(m)) == expect);
    }
}

TEST_CASE("tail_union_measure: empty word is the digit >= M tail of (0,1)") {
    Word empty;
    CHECK(tail_union_measure(empty, Integer(1)) == rat(1, 1));
    CHECK(tail_union_measure(empty, Integer(4)) == rat(1, 4));
}

TEST_CASE("word: without() removes one digit and recomputes") {
    Word w = make_word({3, 7, 16});
    Word v = w.without(2);
    REQUIRE(v.size() == 2);
    CHECK(v.digit(1) == 3);
    CHECK(v.digit(2) == 16);
    v.check_invariants();
    CHECK_THROWS_AS(w.without(0), ValidationError);
    CHECK_THROWS_AS(w.without(4), ValidationError);
}

TEST_CASE("fuzz: identities on random words") {
    std::mt19937_64 rng(20260821);
    std::uniform_int_distribution<unsigned long> digit(1, 1000000);
    std::uniform_int_distribution<size_t> len(1, 60);
    for (int iter = 0; iter < 1000; ++iter) {
        const size_t n = len(rng);
        std::vector<Integer> ds(n);
        for (auto& d : ds) d = Integer(digit(rng));
        Word w{ds};
        const long ln = static_cast<long>(n);

        // Determinant identity.
        Integer det = w.p(ln) * w.q(ln - 1) - w.p(ln - 1) * w.q(ln);
        CHECK((det == 1 || det == -1));

        // Exact length formula.
        Cylinder c = cylinder(w);
        Rational expect(Integer(1), w.q(ln) * (w.q(ln) + w.q(ln - 1)));
        expect.canonicalize();
        CHECK(c.length() == expect);

        // Quasi-multiplicativity: q_m q'_{n-m} <= q_n <= 2 q_m q'_{n-m}.
        if (n >= 2) {
            std::uniform_int_distribution<size_t> cut(1, n - 1);
            const size_t m = cut(rng);
            Word suffix{std::vector<Integer>(ds.begin() + static_cast<long>(m), ds.end())};
            Integer prod = w.q(static_cast<long>(m)) * suffix.q(static_cast<long>(n - m));
            CHECK(w.q(ln) >= prod);
            CHECK(w.q(ln) <= prod * 2);
        }

        // Digit removal: q_n / q_{n-1}(w minus a_k) in [(a_k+1)/2, a_k+1].
        if (n >= 2) {
            std::uniform_int_distribution<size_t> pick(1, n);
            const size_t k = pick(rng);
            Word v = w.without(k);
            const Integer& a = w.digit(k);
            CHECK(w.q(ln) * 2 >= (a + 1) * v.q(static_cast<long>(n - 1)));
            CHECK(w.q(ln) <= (a + 1) * v.q(static_cast<long>(n - 1)));
        }

        // Partition: sum of digit slices below M plus the M-tail is the length.
        std::uniform_int_distribution<unsigned long> mdist(1, 10);
        const unsigned long M = mdist(rng);
        Rational sum = tail_union_measure(w, Integer(M));
        for (unsigned long j = 1; j < M; ++j) sum += digit_slice_measure(w, Integer(j));
        CHECK(sum == c.length());

        // Round trip through the exact value.
        Word back = expand(w.value(), n + 5);
        CHECK(back.value() == w.value());
    }
}
