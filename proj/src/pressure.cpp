#include "cflab/pressure.hpp"

#include <cmath>
#include <limits>

#include "cflab/errors.hpp"

namespace cflab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PhiSpec PhiSpec::power(double c, double k) {
    if (!(c > 0)) throw ValidationError("phi power form: c must be > 0");
    if (!(k >= 0)) throw ValidationError("phi power form: k must be >= 0 (non-decreasing)");
    PhiSpec s;
    s.form_ = Form::power;
    s.a_ = c;
    s.b_ = k;
    return s;
}

PhiSpec PhiSpec::geometric(double C, double B) {
    if (!(C > 0)) throw ValidationError("phi geometric form: C must be > 0");
    if (!(B >= 1)) throw ValidationError("phi geometric form: B must be >= 1 (non-decreasing)");
    PhiSpec s;
    s.form_ = Form::geometric;
    s.a_ = C;
    s.b_ = B;
    return s;
}

PhiSpec PhiSpec::doubly(double c, double b) {
    if (!(c >= 1)) throw ValidationError("phi doubly form: c must be >= 1 (non-decreasing)");
    if (!(b >= 1)) throw ValidationError("phi doubly form: b must be >= 1 (non-decreasing)");
    PhiSpec s;
    s.form_ = Form::doubly;
    s.a_ = c;
    s.b_ = b;
    return s;
}

PhiSpec PhiSpec::table(std::vector<double> values) {
    if (values.empty()) throw ValidationError("phi table form: values must be nonempty");
    for (size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0)) throw ValidationError("phi table form: values must be positive");
        if (i > 0 && values[i] < values[i - 1])
            throw ValidationError("phi table form: values must be non-decreasing");
    }
    PhiSpec s;
    s.form_ = Form::table;
    s.table_ = std::move(values);
    return s;
}

uint64_t PhiSpec::horizon() const {
    if (form_ != Form::table) throw ValidationError("horizon() is defined for table form only");
    return table_.size();
}

double PhiSpec::value(uint64_t n) const {
    if (n < 1) throw ValidationError("phi is defined on n >= 1");
    const double nd = static_cast<double>(n);
    switch (form_) {
        case Form::power:
            return a_ * std::pow(nd, b_);
        case Form::geometric:
            return a_ * std::pow(b_, nd);
        case Form::doubly:
            return std::exp(log_value(n));  // may overflow to +inf, as documented
        case Form::table:
            if (n > table_.size()) throw ValidationError("phi table: n beyond horizon");
            return table_[n - 1];
    }
    return 0;
}

double PhiSpec::log_value(uint64_t n) const {
    if (n < 1) throw ValidationError("phi is defined on n >= 1");
    const double nd = static_cast<double>(n);
    switch (form_) {
        case Form::power:
            return std::log(a_) + b_ * std::log(nd);
        case Form::geometric:
            return std::log(a_) + nd * std::log(b_);
        case Form::doubly:
            // log phi = b^n log c; overflows to +inf for large n, which the
            // comparison helpers treat correctly.
            return std::pow(b_, nd) * std::log(a_);
        case Form::table: {
            if (n > table_.size()) throw ValidationError("phi table: n beyond horizon");
            return std::log(table_[n - 1]);
        }
    }
    return 0;
}

double PhiSpec::loglog_value(uint64_t n) const {
    switch (form_) {
        case Form::power: {
            double lv = log_value(n);
            if (!(lv > 0)) throw ValidationError("log log phi undefined: phi(n) <= 1");
            return std::log(lv);
        }
        case Form::geometric: {
            double lv = log_value(n);
            if (!(lv > 0)) throw ValidationError("log log phi undefined: phi(n) <= 1");
            return std::log(lv);
        }
        case Form::doubly: {
            // log log phi = n log b + log log c (exact in log space).
            if (a_ == 1.0) throw ValidationError("log log phi undefined: phi(n) <= 1");
            return static_cast<double>(n) * std::log(b_) + std::log(std::log(a_));
        }
        case Form::table: {
            double lv = log_value(n);
            if (!(lv > 0)) throw ValidationError("log log phi undefined: phi(n) <= 1");
            return std::log(lv);
        }
    }
    return 0;
}

Integer PhiSpec::threshold(uint64_t n) const {
    double lv = log_value(n);
    if (lv <= 0) return Integer(1);  // phi(n) <= 1: every digit qualifies
    if (lv > 4096 * std::log(2.0)) throw ValidationError("phi threshold beyond 2^4096");
    // Exact ceil via MPFR at generous precision: the double-valued phi is the
    // contract, so rounding the IEEE value is the semantics, not an error.
    BigFloat v;
    switch (form_) {
        case Form::power: {
            BigFloat base(static_cast<unsigned long>(n));
            v = BigFloat(a_) * pow(base, BigFloat(b_));
            break;
        }
        case Form::geometric: {
            v = BigFloat(a_) * pow(BigFloat(b_), BigFloat(static_cast<unsigned long>(n)));
            break;
        }
        case Form::doubly: {
            BigFloat e = pow(BigFloat(b_), BigFloat(static_cast<unsigned long>(n)));
            v = exp(e * log(BigFloat(a_)));
            break;
        }
        case Form::table:
            v = BigFloat(value(n));
            break;
    }
    Integer r;
    mpfr_get_z(r.get_mpz_t(), v.raw(), MPFR_RNDU);
    if (r < 1) r = 1;
    return r;
}

std::string PhiSpec::describe() const {
    char buf[128];
    switch (form_) {
        case Form::power:
            std::snprintf(buf, sizeof buf, "power(c=%g,k=%g)", a_, b_);
            break;
        case Form::geometric:
            std::snprintf(buf, sizeof buf, "geometric(C=%g,B=%g)", a_, b_);
            break;
        case Form::doubly:
            std::snprintf(buf, sizeof buf, "doubly(c=%g,b=%g)", a_, b_);
            break;
        case Form::table:
            std::snprintf(buf, sizeof buf, "table(%zu)", table_.size());
            break;
    }
    return buf;
}

LiminfExponents liminf_exponents(const PhiSpec& phi, uint64_t horizon) {
    LiminfExponents r;
    switch (phi.form()) {
        case PhiSpec::Form::power:
            r.logB = 0;
            r.logb = 0;
            return r;
        case PhiSpec::Form::geometric:
            r.logB = std::log(phi.param2());  // log B; 0 when B = 1
            r.logb = 0;
            return r;
        case PhiSpec::Form::doubly: {
            const double c = phi.param1(), b = phi.param2();
            if (c == 1.0 || b == 1.0) {
                // Degenerate: phi is constant, so both exponents vanish.
                r.logB = 0;
                r.logb = 0;
                return r;
            }
            r.logB = kInf;
            r.logb = std::log(b);
            return r;
        }
        case PhiSpec::Form::table: {
            uint64_t H = horizon == 0 ? phi.horizon() : std::min<uint64_t>(horizon, phi.horizon());
            if (H < 1) throw ValidationError("liminf over an empty horizon");
            double mB = kInf, mb = kInf;
            for (uint64_t n = 1; n <= H; ++n) {
                double lv = phi.log_value(n);
                if (lv <= 0)
                    throw ValidationError("liminf: table phi must exceed 1 on the horizon");
                mB = std::min(mB, lv / static_cast<double>(n));
                mb = std::min(mb, std::log(lv) / static_cast<double>(n));
            }
            r.logB = mB;
            r.logb = mb;
            r.exact = false;
            return r;
        }
    }
    return r;
}

namespace {

// Depth-first enumeration of q_n over {1..M}^n in lexicographic order,
// accumulating B^(-(3s-1)n) * q^(-2s) in high precision. Continuants fit in
// uint64 comfortably under the M^n <= cap <= 1e7 budget (worst case
// q_n <= 3^23 for M = 2, far below 2^63).
struct SumCtx {
    unsigned n;
    uint64_t M;
    BigFloat minus2s;
    BigFloat acc;
    BigFloat term;
    void dfs(unsigned depth, uint64_t q_prev, uint64_t q_cur) {
        if (depth == n) {
            mpfr_set_ui(term.raw(), q_cur, MPFR_RNDN);
            mpfr_pow(term.raw(), term.raw(), minus2s.raw(), MPFR_RNDN);
            mpfr_add(acc.raw(), acc.raw(), term.raw(), MPFR_RNDN);
            return;
        }
        for (uint64_t a = 1; a <= M; ++a) dfs(depth + 1, q_cur, a * q_cur + q_prev);
    }
};

void check_enumeration_budget(unsigned n, uint64_t M, uint64_t cap) {
    double words = std::pow(static_cast<double>(M), static_cast<double>(n));
    if (words > static_cast<double>(cap))
        throw BudgetError("cylinder enumeration M^n exceeds cap (" + std::to_string(cap) + ")");
}

}  // namespace

BigFloat cylinder_sum(unsigned n, uint64_t M, double B, double s, uint64_t cap) {
    if (n < 1) throw ValidationError("cylinder_sum: n must be >= 1");
    if (M < 1) throw ValidationError("cylinder_sum: M must be >= 1");
    if (!(B > 0)) throw ValidationError("cylinder_sum: B must be > 0");
    check_enumeration_budget(n, M, cap);
    SumCtx ctx;
    ctx.n = n;
    ctx.M = M;
    ctx.minus2s = BigFloat(-2.0 * s);
    ctx.dfs(0, 0, 1);
    // Prefactor B^(-(3s-1)n), exact in high precision.
    BigFloat pref = pow(BigFloat(B), BigFloat(-(3.0 * s - 1.0) * static_cast<double>(n)));
    return ctx.acc * pref;
}

double solve_sn(unsigned n, uint64_t M, double B, double tol, uint64_t cap) {
    if (!(B > 1)) throw ValidationError("solve_sn: B must be > 1");
    if (!(tol > 0)) throw ValidationError("solve_sn: tol must be > 0");
    if (n < 1) throw ValidationError("solve_sn: n must be >= 1");
    if (M < 1) throw ValidationError("solve_sn: M must be >= 1");
    // Degenerate alphabet {1}: the B-power forces s = 1/3 (design decision:
    // monotonicity is only guaranteed where the B-exponent is positive).
    if (M == 1) return 1.0 / 3.0;
    check_enumeration_budget(n, M, cap);

    const BigFloat one(1.0);
    auto f_geq_1 = [&](double s) { return cylinder_sum(n, M, B, s, cap) >= one; };

    double lo = 1.0 / 3.0, hi = 2.0;
    if (!f_geq_1(lo))
        throw NumericalError("solve_sn: bracket failure (sum < 1 at s = 1/3), degenerate parameters");
    if (f_geq_1(hi))
        throw NumericalError("solve_sn: bracket failure (sum >= 1 at s = 2), root above bracket");
    // Strict monotone decrease in s on [1/3, 2] for B > 1: bisection.
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (f_geq_1(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

PressureApprox pressure_approx(unsigned n, uint64_t M, double s, double B, uint64_t cap) {
    BigFloat sum = cylinder_sum(n, M, B, s, cap);
    double v = log(sum).to_double() / static_cast<double>(n);
    PressureApprox r;
    r.value = v;
    // exp(sup S_n(-s log|T'|)) lies in [4^{-s} q_n^{-2s}, q_n^{-2s}]: the
    // approximant upper-bounds the sup-sum, so the true value sits within
    // (s/n) log 4 below it.
    const double hw = s / static_cast<double>(n) * std::log(4.0);
    r.lo = v - hw;
    r.hi = v;
    return r;
}

std::string regime_name(DimRegime r) {
    switch (r) {
        case DimRegime::B_eq_1:
            return "B_eq_1";
        case DimRegime::B_finite:
            return "B_finite";
        case DimRegime::B_inf_b_finite:
            return "B_inf_b_finite";
        case DimRegime::B_inf_b_inf:
            return "B_inf_b_inf";
    }
    return "?";
}

DimensionResult dimension(const PhiSpec& phi, unsigned n_budget, uint64_t M_budget, double tol,
                          uint64_t horizon) {
    if (n_budget < 1) throw ValidationError("dimension: n budget must be >= 1");
    if (M_budget < 2) throw ValidationError("dimension: M budget must be >= 2");
    LiminfExponents le = liminf_exponents(phi, horizon);
    DimensionResult r;
    r.logB = le.logB;
    r.logb = le.logb;
    r.liminf_exact = le.exact;
    r.n_budget = n_budget;
    r.M_budget = M_budget;
    r.tol = tol;
    if (le.logB == 0.0) {
        r.regime = DimRegime::B_eq_1;
        r.dim = 1.0;
        r.method = "closed_form";
        return r;
    }
    if (std::isinf(le.logB)) {
        if (std::isinf(le.logb)) {
            r.regime = DimRegime::B_inf_b_inf;
            r.dim = 0.0;
        } else {
            r.regime = DimRegime::B_inf_b_finite;
            r.dim = 1.0 / (std::exp(le.logb) + 1.0);
        }
        r.method = "closed_form";
        return r;
    }
    r.regime = DimRegime::B_finite;
    const double B = std::exp(le.logB);
    for (unsigned k = 1; k <= n_budget; ++k) r.s_seq.push_back(solve_sn(k, M_budget, B, tol));
    r.dim = r.s_seq.back();
    r.method = "sn_extrapolation";
    return r;
}

}  // namespace cflab
