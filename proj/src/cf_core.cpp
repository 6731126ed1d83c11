#include "cflab/cf_core.hpp"

#include <utility>

#include "cflab/errors.hpp"

namespace cflab {

Word::Word() {
    p_.reserve(2);
    q_.reserve(2);
    p_.emplace_back(1);  // p_{-1}
    p_.emplace_back(0);  // p_0
    q_.emplace_back(0);  // q_{-1}
    q_.emplace_back(1);  // q_0
}

void Word::push_digit(const Integer& a) {
    if (a < 1) throw ValidationError("partial quotient must be a positive integer");
    const size_t i = p_.size();
    digits_.push_back(a);
    p_.push_back(a * p_[i - 1] + p_[i - 2]);
    q_.push_back(a * q_[i - 1] + q_[i - 2]);
}

Word::Word(std::vector<Integer> digits) : Word() {
    digits_.reserve(digits.size());
    p_.reserve(digits.size() + 2);
    q_.reserve(digits.size() + 2);
    for (const Integer& a : digits) push_digit(a);
}

Word Word::of(std::initializer_list<unsigned long> digits) {
    std::vector<Integer> v;
    v.reserve(digits.size());
    for (unsigned long a : digits) v.emplace_back(a);
    return Word(std::move(v));
}

const Integer& Word::digit(size_t k) const {
    if (k < 1 || k > digits_.size()) throw ValidationError("digit index out of range");
    return digits_[k - 1];
}

const Integer& Word::p(long i) const {
    if (i < -1 || i > static_cast<long>(digits_.size())) throw ValidationError("convergent index out of range");
    return p_[static_cast<size_t>(i + 1)];
}

const Integer& Word::q(long i) const {
    if (i < -1 || i > static_cast<long>(digits_.size())) throw ValidationError("convergent index out of range");
    return q_[static_cast<size_t>(i + 1)];
}

Word Word::extended(const Integer& a) const {
    Word w(*this);
    w.push_digit(a);
    return w;
}

Word Word::without(size_t k) const {
    if (k < 1 || k > digits_.size()) throw ValidationError("digit index out of range");
    std::vector<Integer> d;
    d.reserve(digits_.size() - 1);
    for (size_t i = 0; i < digits_.size(); ++i)
        if (i != k - 1) d.push_back(digits_[i]);
    return Word(std::move(d));
}

Rational Word::value() const {
    if (empty()) throw ValidationError("value() of the empty word is undefined");
    const long n = static_cast<long>(size());
    Rational r(p(n), q(n));
    r.canonicalize();
    return r;
}

void Word::check_invariants() const {
    const long n = static_cast<long>(size());
    for (long i = 1; i <= n; ++i) {
        if (p(i) != digit(i) * p(i - 1) + p(i - 2)) throw NumericalError("convergent recurrence violated (p)");
        if (q(i) != digit(i) * q(i - 1) + q(i - 2)) throw NumericalError("convergent recurrence violated (q)");
    }
    for (long i = 0; i <= n; ++i) {
        Integer det = p(i) * q(i - 1) - p(i - 1) * q(i);
        Integer expect = (i % 2 == 1) ? 1 : -1;  // (-1)^(i-1)
        if (det != expect) throw NumericalError("determinant identity violated");
    }
}

Word expand(const Rational& x, size_t max_terms) {
    if (max_terms == 0) throw ValidationError("expand: max_terms must be >= 1");
    if (x <= 0 || x >= 1) throw ValidationError("expand: x must lie in (0, 1)");
    // Euclidean algorithm on num/den: at each step a = floor(den/num),
    // remainder (den - a*num)/num is the next tail.
    Integer num = x.get_num(), den = x.get_den();
    std::vector<Integer> digits;
    while (num != 0 && digits.size() < max_terms) {
        Integer a, r;
        mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
        digits.push_back(a);
        den = num;
        num = r;
    }
    return Word(std::move(digits));
}

Cylinder cylinder(const Word& w) {
    if (w.empty()) throw ValidationError("cylinder: word must be nonempty");
    const long n = static_cast<long>(w.size());
    Rational a(w.p(n), w.q(n));
    a.canonicalize();
    Rational b(w.p(n) + w.p(n - 1), w.q(n) + w.q(n - 1));
    b.canonicalize();
    Cylinder c;
    c.word = w;
    c.closed_left = (n % 2 == 0);  // closed on the left iff n is even
    if (c.closed_left) {           // n even: [p_n/q_n, (p_n+p_{n-1})/(q_n+q_{n-1}))
        c.lo = a;
        c.hi = b;
    } else {  // n odd: ((p_n+p_{n-1})/(q_n+q_{n-1}), p_n/q_n]
        c.lo = b;
        c.hi = a;
    }
    return c;
}

namespace {
// h(t) = (p_n + p_{n-1} t) / (q_n + q_{n-1} t), the homeomorphism [0,1] -> closure(I_n)
// induced by the word's Mobius action; t is the value of the continued-fraction tail.
Rational mobius_at(const Word& w, const Rational& t) {
    const long n = static_cast<long>(w.size());
    Rational num = Rational(w.p(n)) + Rational(w.p(n - 1)) * t;
    Rational den = Rational(w.q(n)) + Rational(w.q(n - 1)) * t;
    Rational r = num / den;
    r.canonicalize();
    return r;
}
}  // namespace

Rational tail_union_measure(const Word& w, const Integer& M) {
    if (M < 1) throw ValidationError("tail_union_measure: M must be >= 1");
    Rational at_M = mobius_at(w, Rational(Integer(1), M));
    Rational at_0 = mobius_at(w, Rational(0));
    Rational r = at_M - at_0;
    if (r < 0) r = -r;
    r.canonicalize();
    return r;
}

Rational digit_slice_measure(const Word& w, const Integer& M) {
    if (M < 1) throw ValidationError("digit_slice_measure: M must be >= 1");
    Rational at_M = mobius_at(w, Rational(Integer(1), M));
    Rational at_M1 = mobius_at(w, Rational(Integer(1), Integer(M + 1)));
    Rational r = at_M - at_M1;
    if (r < 0) r = -r;
    r.canonicalize();
    return r;
}

}  // namespace cflab
