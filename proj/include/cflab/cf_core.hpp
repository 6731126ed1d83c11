#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace cflab {

using Integer = mpz_class;
using Rational = mpq_class;  // always canonical: den > 0, gcd(num, den) = 1

// Finite admissible word (a_1, ..., a_n) of partial quotients, a_i >= 1.
// Immutable after construction. Convergents are cached at construction via
//   p_{i+1} = a_{i+1} p_i + p_{i-1},  q_{i+1} = a_{i+1} q_i + q_{i-1}
// with p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1, so the determinant identity
//   p_i q_{i-1} - p_{i-1} q_i = (-1)^(i-1)
// holds for every i by induction. The empty word is allowed and stands for
// the unit interval I_0 = [0, 1).
class Word {
  public:
    Word();  // empty word
    explicit Word(std::vector<Integer> digits);
    static Word of(std::initializer_list<unsigned long> digits);

    size_t size() const { return digits_.size(); }
    bool empty() const { return digits_.empty(); }
    // 1-based digit access: digit(k) = a_k, 1 <= k <= n.
    const Integer& digit(size_t k) const;
    const std::vector<Integer>& digits() const { return digits_; }

    // Convergent access for i in [-1, n].
    const Integer& p(long i) const;
    const Integer& q(long i) const;

    // New word with one more digit appended (O(n) copy + O(1) convergent step).
    Word extended(const Integer& a) const;
    // New word with the k-th digit removed (1-based); convergents recomputed.
    Word without(size_t k) const;

    // p_n / q_n as an exact rational; requires a nonempty word.
    Rational value() const;

    // Re-derives the convergent recurrence and the determinant identity from
    // the digits; throws NumericalError on any mismatch. Test/debug hook.
    void check_invariants() const;

  private:
    std::vector<Integer> digits_;
    std::vector<Integer> p_, q_;  // index i+1 holds p_i / q_i, i in [-1, n]
    void push_digit(const Integer& a);
};

// Cylinder interval I_n(a_1..a_n): endpoints p_n/q_n and (p_n+p_{n-1})/(q_n+q_{n-1}),
// half-open on the side given by the parity of n (closed on the left iff n even).
// lo < hi always; length() = hi - lo = 1/(q_n (q_n + q_{n-1})) exactly.
struct Cylinder {
    Word word;
    Rational lo, hi;
    bool closed_left;  // true: [lo, hi); false: (lo, hi]
    Rational length() const { return hi - lo; }
};

// Exact finite expansion of a rational x in (0, 1) by the Euclidean algorithm,
// truncated at max_terms. The floor algorithm never emits a terminal digit 1
// at position >= 2, so the result is canonical.
Word expand(const Rational& x, size_t max_terms);

// Cylinder of a nonempty word.
Cylinder cylinder(const Word& w);

// Lebesgue measure of { x in I_n(w) : a_{n+1}(x) >= M }, M >= 1, exact.
// Evaluated from the Mobius parameterization h(t) = (p_n + p_{n-1} t)/(q_n + q_{n-1} t)
// at t = 1/M and t = 0; equals 1/(q_n (M q_n + q_{n-1})) in closed form.
Rational tail_union_measure(const Word& w, const Integer& M);

// Lebesgue measure of { x in I_n(w) : a_{n+1}(x) = M }, M >= 1, exact
// (|h(1/M) - h(1/(M+1))|).
Rational digit_slice_measure(const Word& w, const Integer& M);

}  // namespace cflab
