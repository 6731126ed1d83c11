#include "cflab/bigfloat.hpp"

#include <atomic>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace cflab {

namespace {
std::atomic<unsigned> g_prec{128};  // default mantissa bits; CLI may override (>= 80)
}

void BigFloat::set_default_precision(unsigned bits) {
    if (bits < 80) throw std::invalid_argument("BigFloat precision must be >= 80 bits");
    g_prec.store(bits, std::memory_order_relaxed);
}

unsigned BigFloat::default_precision() { return g_prec.load(std::memory_order_relaxed); }

BigFloat::BigFloat() {
    mpfr_init2(x_, g_prec.load(std::memory_order_relaxed));
    mpfr_set_zero(x_, 1);
}

BigFloat::BigFloat(const BigFloat& o) {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_set(x_, o.x_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_swap(x_, o.x_);
}

BigFloat& BigFloat::operator=(const BigFloat& o) {
    if (this != &o) mpfr_set(x_, o.x_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
    if (this != &o) mpfr_swap(x_, o.x_);
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(x_); }

BigFloat::BigFloat(double v) : BigFloat() { mpfr_set_d(x_, v, MPFR_RNDN); }
BigFloat::BigFloat(unsigned long v) : BigFloat() { mpfr_set_ui(x_, v, MPFR_RNDN); }
BigFloat::BigFloat(long v) : BigFloat() { mpfr_set_si(x_, v, MPFR_RNDN); }
BigFloat::BigFloat(const mpz_class& v) : BigFloat() { mpfr_set_z(x_, v.get_mpz_t(), MPFR_RNDN); }
BigFloat::BigFloat(const mpq_class& v) : BigFloat() { mpfr_set_q(x_, v.get_mpq_t(), MPFR_RNDN); }

BigFloat& BigFloat::operator+=(const BigFloat& o) {
    mpfr_add(x_, x_, o.x_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator-=(const BigFloat& o) {
    mpfr_sub(x_, x_, o.x_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator*=(const BigFloat& o) {
    mpfr_mul(x_, x_, o.x_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator/=(const BigFloat& o) {
    mpfr_div(x_, x_, o.x_, MPFR_RNDN);
    return *this;
}

BigFloat BigFloat::operator-() const {
    BigFloat r(*this);
    mpfr_neg(r.x_, r.x_, MPFR_RNDN);
    return r;
}

int BigFloat::cmp(const BigFloat& o) const { return mpfr_cmp(x_, o.x_); }

double BigFloat::to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

std::string BigFloat::str(int significant_digits) const {
    // mpfr_snprintf sizes the buffer for us on the first probe call.
    int need = mpfr_snprintf(nullptr, 0, "%.*Rg", significant_digits, x_);
    std::vector<char> buf(static_cast<size_t>(need) + 1);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", significant_digits, x_);
    return std::string(buf.data());
}

BigFloat abs(const BigFloat& a) {
    BigFloat r(a);
    mpfr_abs(r.x_, r.x_, MPFR_RNDN);
    return r;
}

BigFloat sqrt(const BigFloat& a) {
    BigFloat r(a);
    mpfr_sqrt(r.x_, r.x_, MPFR_RNDN);
    return r;
}

BigFloat log(const BigFloat& a) {
    BigFloat r(a);
    mpfr_log(r.x_, r.x_, MPFR_RNDN);
    return r;
}

BigFloat exp(const BigFloat& a) {
    BigFloat r(a);
    mpfr_exp(r.x_, r.x_, MPFR_RNDN);
    return r;
}

BigFloat pow(const BigFloat& a, const BigFloat& b) {
    BigFloat r(a);
    mpfr_pow(r.x_, a.raw(), b.raw(), MPFR_RNDN);
    return r;
}

BigFloat pow(const BigFloat& a, double b) { return pow(a, BigFloat(b)); }

}  // namespace cflab
