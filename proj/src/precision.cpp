#include "dlhankel/precision.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace dlhankel {

long digits_to_bits(int digits) {
    if (digits < 1)
        throw DomainError("digits_to_bits: digits must be positive");
    return static_cast<long>(std::ceil(digits * 3.3219280948873626)) + 8;
}

PrecisionCtx PrecisionCtx::with_target(int target, int guard, int max_refinements) {
    PrecisionCtx c;
    c.target_digits = target;
    c.guard_digits = guard;
    c.work_digits = target + guard;
    c.max_refinements = max_refinements;
    c.validate();
    return c;
}

PrecisionCtx PrecisionCtx::with_work(int work) const {
    PrecisionCtx c = *this;
    c.work_digits = work;
    c.validate();
    return c;
}

void PrecisionCtx::validate() const {
    if (target_digits < 1 || guard_digits < 1 || max_refinements < 0)
        throw ConfigError("PrecisionCtx: digits fields must be positive");
    if (work_digits < target_digits + guard_digits)
        throw ConfigError("PrecisionCtx: work_digits must be >= target_digits + guard_digits");
}

namespace {
thread_local long tl_bits = digits_to_bits(70);
} // namespace

PrecisionScope::PrecisionScope(const PrecisionCtx& ctx) : saved_(tl_bits) {
    ctx.validate();
    tl_bits = ctx.work_bits();
}

PrecisionScope::PrecisionScope(long bits) : saved_(tl_bits) {
    tl_bits = std::max(bits, 24L);
}

PrecisionScope::~PrecisionScope() { tl_bits = saved_; }

long current_precision_bits() { return tl_bits; }

Real::Real() { mpfr_init2(v_, tl_bits); mpfr_set_nan(v_); }

Real::Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
    memcpy(&v_[0], &o.v_[0], sizeof(mpfr_t));
    mpfr_init2(o.v_, MPFR_PREC_MIN);
    mpfr_set_nan(o.v_);
}

Real& Real::operator=(const Real& o) {
    if (this != &o) {
        mpfr_set_prec(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& o) noexcept {
    if (this != &o) {
        mpfr_swap(v_, o.v_);
    }
    return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real::Real(long v) { mpfr_init2(v_, tl_bits); mpfr_set_si(v_, v, MPFR_RNDN); }
Real::Real(int v) { mpfr_init2(v_, tl_bits); mpfr_set_si(v_, v, MPFR_RNDN); }
Real::Real(unsigned long v) { mpfr_init2(v_, tl_bits); mpfr_set_ui(v_, v, MPFR_RNDN); }
Real::Real(double v) { mpfr_init2(v_, tl_bits); mpfr_set_d(v_, v, MPFR_RNDN); }

Real::Real(const std::string& decimal) {
    mpfr_init2(v_, tl_bits);
    if (mpfr_set_str(v_, decimal.c_str(), 10, MPFR_RNDN) != 0)
        throw DomainError("Real: cannot parse decimal string '" + decimal + "'");
}

Real Real::at_bits(const std::string& decimal, long bits) {
    PrecisionScope scope(bits);
    return Real(decimal);
}

std::string Real::str(int digits) const {
    if (digits < 2) digits = 2;
    char fmt[32];
    std::snprintf(fmt, sizeof fmt, "%%.%dRe", digits - 1);
    char* out = nullptr;
    if (mpfr_asprintf(&out, fmt, v_) < 0)
        throw std::runtime_error("Real::str: mpfr_asprintf failed");
    std::string s(out);
    mpfr_free_str(out);
    return s;
}

std::string Real::str_roundtrip() const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(v_)) return "0";
    mpfr_exp_t e = 0;
    char* digits = mpfr_get_str(nullptr, &e, 10, 0, v_, MPFR_RNDN);
    if (!digits)
        throw std::runtime_error("Real::str_roundtrip: mpfr_get_str failed");
    std::string d(digits);
    mpfr_free_str(digits);
    std::string sign;
    if (d[0] == '-') { sign = "-"; d.erase(0, 1); }
    std::string mant = d.substr(0, 1);
    if (d.size() > 1) mant += "." + d.substr(1);
    return sign + mant + "e" + std::to_string(static_cast<long>(e) - 1);
}

Real& Real::operator+=(const Real& o) { *this = *this + o; return *this; }
Real& Real::operator-=(const Real& o) { *this = *this - o; return *this; }
Real& Real::operator*=(const Real& o) { *this = *this * o; return *this; }
Real& Real::operator/=(const Real& o) { *this = *this / o; return *this; }

Real operator+(const Real& a, const Real& b) { Real r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
Real operator-(const Real& a, const Real& b) { Real r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
Real operator*(const Real& a, const Real& b) { Real r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
Real operator/(const Real& a, const Real& b) { Real r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
Real operator-(const Real& a) { Real r; mpfr_neg(r.v_, a.v_, MPFR_RNDN); return r; }

Real operator+(const Real& a, long b) { Real r; mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
Real operator-(const Real& a, long b) { Real r; mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
Real operator-(long a, const Real& b) { Real r; mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN); return r; }
Real operator*(const Real& a, long b) { Real r; mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
Real operator/(const Real& a, long b) { Real r; mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
Real operator/(long a, const Real& b) { Real r; mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN); return r; }

Real abs(const Real& a) { Real r; mpfr_abs(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real sqrt(const Real& a) { Real r; mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real log(const Real& a) { Real r; mpfr_log(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real log1p(const Real& a) { Real r; mpfr_log1p(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real exp(const Real& a) { Real r; mpfr_exp(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real expm1(const Real& a) { Real r; mpfr_expm1(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real pow(const Real& a, const Real& b) { Real r; mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN); return r; }
Real pow(const Real& a, long b) { Real r; mpfr_pow_si(r.raw(), a.raw(), b, MPFR_RNDN); return r; }
Real cosh(const Real& a) { Real r; mpfr_cosh(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real sinh(const Real& a) { Real r; mpfr_sinh(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real tanh(const Real& a) { Real r; mpfr_tanh(r.raw(), a.raw(), MPFR_RNDN); return r; }
Real floor(const Real& a) { Real r; mpfr_floor(r.raw(), a.raw()); return r; }
Real ceil(const Real& a) { Real r; mpfr_ceil(r.raw(), a.raw()); return r; }
Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
Real min(const Real& a, const Real& b) { return a <= b ? a : b; }

Real const_pi() { Real r; mpfr_const_pi(r.raw(), MPFR_RNDN); return r; }
Real const_euler() { Real r; mpfr_const_euler(r.raw(), MPFR_RNDN); return r; }

Real lngamma_raw(const Real& a) { Real r; mpfr_lngamma(r.raw(), a.raw(), MPFR_RNDN); return r; }

double approx_log10_abs(const Real& a) {
    if (a.is_zero() || a.is_nan()) return -HUGE_VAL;
    long exp2 = static_cast<long>(mpfr_get_exp(a.raw()));
    double mant = std::fabs(mpfr_get_d_2exp(&exp2, a.raw(), MPFR_RNDN));
    return exp2 * 0.30102999566398120 + std::log10(mant);
}

bool agree_to_digits(const Real& a, const Real& b, int digits) {
    if (a == b) return true;
    Real diff = abs(a - b);
    Real scale = max(abs(a), abs(b));
    if (scale.is_zero()) return true;
    Real tol = scale * pow(Real(10L), -static_cast<long>(digits));
    return diff <= tol;
}

Real rel_diff(const Real& a, const Real& b) {
    Real scale = max(abs(a), abs(b));
    if (scale.is_zero()) return Real(0L);
    return abs(a - b) / scale;
}

Real adaptive_refine(const PrecisionCtx& ctx,
                     const std::function<Real(const PrecisionCtx&)>& eval) {
    PrecisionCtx cur = ctx;
    Real prev = eval(cur);
    for (int pass = 0; pass <= ctx.max_refinements; ++pass) {
        PrecisionCtx next = cur.doubled();
        Real refined = eval(next);
        {
            PrecisionScope scope(next);
            if (agree_to_digits(prev, refined, ctx.target_digits))
                return refined;
        }
        prev = refined;
        cur = next;
    }
    throw PrecisionError("adaptive_refine: no agreement to target after max_refinements",
                         prev.str(ctx.target_digits), "");
}

} // namespace dlhankel
