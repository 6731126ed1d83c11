#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <string>

namespace cflab {

// Thin value-semantics wrapper around an mpfr_t. All high-precision real
// accumulation in the project goes through this type so that the mantissa
// width (>= 80 bits, settable once at startup) and the rounding mode
// (round-to-nearest) are pinned in a single place. MPFR operations are
// correctly rounded, hence bit-reproducible across runs and thread counts
// for a fixed precision and a fixed order of operations.
class BigFloat {
  public:
    static void set_default_precision(unsigned bits);
    static unsigned default_precision();

    BigFloat();
    BigFloat(const BigFloat& o);
    BigFloat(BigFloat&& o) noexcept;
    BigFloat& operator=(const BigFloat& o);
    BigFloat& operator=(BigFloat&& o) noexcept;
    ~BigFloat();

    explicit BigFloat(double v);
    explicit BigFloat(unsigned long v);
    explicit BigFloat(long v);
    explicit BigFloat(const mpz_class& v);
    explicit BigFloat(const mpq_class& v);

    BigFloat& operator+=(const BigFloat& o);
    BigFloat& operator-=(const BigFloat& o);
    BigFloat& operator*=(const BigFloat& o);
    BigFloat& operator/=(const BigFloat& o);

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }

    BigFloat operator-() const;

    int cmp(const BigFloat& o) const;
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return a.cmp(b) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return a.cmp(b) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) >= 0; }
    friend bool operator==(const BigFloat& a, const BigFloat& b) { return a.cmp(b) == 0; }
    friend bool operator!=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) != 0; }

    double to_double() const;
    // Decimal string with the given number of significant digits ("%.*Rg").
    std::string str(int significant_digits = 25) const;

    friend BigFloat abs(const BigFloat& a);
    friend BigFloat sqrt(const BigFloat& a);
    friend BigFloat log(const BigFloat& a);
    friend BigFloat exp(const BigFloat& a);
    // a^b for a > 0 (a <= 0 with non-integer b is a domain error upstream).
    friend BigFloat pow(const BigFloat& a, const BigFloat& b);
    friend BigFloat pow(const BigFloat& a, double b);

    // Raw handle for the few call sites that drive mpfr directly.
    mpfr_ptr raw() { return x_; }
    mpfr_srcptr raw() const { return x_; }

  private:
    mpfr_t x_;
};

}  // namespace cflab
