#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cflab/bigfloat.hpp"
#include "cflab/cf_core.hpp"

namespace cflab {

// Non-decreasing rate function phi: N -> R+, in one of four forms:
//   power:     phi(n) = c * n^k          (c > 0, k >= 0)
//   geometric: phi(n) = C * B^n          (C > 0, B >= 1)
//   doubly:    phi(n) = c^(b^n)          (c >= 1, b >= 1)
//   table:     explicit values on 1..horizon
// The symbolic forms admit exact liminf exponents; tables are approximate.
class PhiSpec {
  public:
    enum class Form { power, geometric, doubly, table };

    static PhiSpec power(double c, double k);
    static PhiSpec geometric(double C, double B);
    static PhiSpec doubly(double c, double b);
    static PhiSpec table(std::vector<double> values);

    Form form() const { return form_; }
    double param1() const { return a_; }  // c / C / c
    double param2() const { return b_; }  // k / B / b
    uint64_t horizon() const;             // table only

    double value(uint64_t n) const;       // phi(n); may overflow to +inf
    double log_value(uint64_t n) const;   // log phi(n), computed in log space
    double loglog_value(uint64_t n) const;  // log log phi(n); requires phi(n) > 1

    // Smallest Integer >= phi(n); exact for thresholds below 2^4096, otherwise
    // a ValidationError (no event in this lab needs larger thresholds).
    Integer threshold(uint64_t n) const;

    std::string describe() const;  // short human-readable tag for reports

  private:
    PhiSpec() = default;
    Form form_ = Form::power;
    double a_ = 0, b_ = 0;
    std::vector<double> table_;
};

struct LiminfExponents {
    double logB = 0;  // liminf log(phi(n)) / n       (may be +inf)
    double logb = 0;  // liminf log(log phi(n)) / n   (may be +inf)
    bool exact = true;  // false for table form (horizon minimum)
};

// Exact for symbolic forms; horizon minimum for tables (flagged approximate).
LiminfExponents liminf_exponents(const PhiSpec& phi, uint64_t horizon = 0);

// sum over words (a_1..a_n) in {1..M}^n of B^(-(3s-1)n) * q_n^(-2s),
// accumulated in lexicographic word order in high precision.
// Throws BudgetError when M^n exceeds cap (default 10^7).
BigFloat cylinder_sum(unsigned n, uint64_t M, double B, double s, uint64_t cap = 10000000);

// Unique root s of cylinder_sum(n, M, B, s) = 1, by bisection on the initial
// bracket [1/3, 2] using strict monotone decrease in s (B > 1). M = 1 is the
// degenerate case, short-circuited to exactly 1/3. Bracket failure at either
// end raises NumericalError.
double solve_sn(unsigned n, uint64_t M, double B, double tol = 1e-10, uint64_t cap = 10000000);

struct PressureApprox {
    double value;  // (1/n) log cylinder_sum — the sup-Birkhoff approximant
    double lo, hi;  // bounded-distortion band: true value in [value - (s/n)log4, value]
};

// Finite-level pressure approximant for f = -(3s-1) log B - s log|T'| using
// exp(sup S_n(-s log|T'|)) ~ q_n^(-2s) on each cylinder.
PressureApprox pressure_approx(unsigned n, uint64_t M, double s, double B, uint64_t cap = 10000000);

enum class DimRegime { B_eq_1, B_finite, B_inf_b_finite, B_inf_b_inf };

struct DimensionResult {
    double logB = 0, logb = 0;
    bool liminf_exact = true;
    DimRegime regime = DimRegime::B_eq_1;
    double dim = 0;
    std::string method;          // "closed_form" or "sn_extrapolation"
    std::vector<double> s_seq;   // s_k(B, M) for k = 1..n_budget (finite-B regime)
    unsigned n_budget = 0;
    uint64_t M_budget = 0;
    double tol = 0;
};

// Hausdorff-dimension evaluator for E'(phi) by regime:
//   logB = 0        -> dim 1 (closed form)
//   0 < logB < inf  -> s_n(B, M) at the given budget, diagnostics attached
//   logB = inf      -> 1/(b+1) with b = exp(logb) (0 when logb = inf)
DimensionResult dimension(const PhiSpec& phi, unsigned n_budget = 3, uint64_t M_budget = 64,
                          double tol = 1e-10, uint64_t horizon = 1024);

std::string regime_name(DimRegime r);

}  // namespace cflab
