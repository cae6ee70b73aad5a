#ifndef DLHANKEL_PRECISION_HPP
#define DLHANKEL_PRECISION_HPP

#include <mpfr.h>

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "dlhankel/errors.hpp"

namespace dlhankel {

// Decimal working digits -> mpfr bits, with slack so the last decimal digit
// is trustworthy.
long digits_to_bits(int digits);

// Precision contract shared by every numerical operation.  work_digits is
// the precision arithmetic actually runs at; target_digits is what the
// caller is entitled to trust; guard_digits separates the two.
struct PrecisionCtx {
    int target_digits = 50;
    int guard_digits = 20;
    int work_digits = 70;
    int max_refinements = 4;

    static PrecisionCtx with_target(int target, int guard = 20, int max_refinements = 4);

    // Same target, different working precision.
    PrecisionCtx with_work(int work) const;
    PrecisionCtx doubled() const { return with_work(2 * work_digits); }

    long work_bits() const { return digits_to_bits(work_digits); }
    void validate() const;
};

// Arbitrary-precision real.  Arithmetic results are correctly rounded
// (round-to-nearest) at the precision installed by the innermost
// PrecisionScope; a Real keeps the precision it was created with, so values
// stored in tables stay bit-identical when later read under a different
// scope.
class Real {
  public:
    Real();
    Real(const Real& o);
    Real(Real&& o) noexcept;
    Real& operator=(const Real& o);
    Real& operator=(Real&& o) noexcept;
    ~Real();

    explicit Real(long v);
    explicit Real(int v);
    explicit Real(unsigned long v);
    explicit Real(double v);
    explicit Real(const std::string& decimal);

    static Real at_bits(const std::string& decimal, long bits);

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_prec_t precision_bits() const { return mpfr_get_prec(v_); }

    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

    // Scientific decimal string with the given significand digits.
    std::string str(int digits) const;
    // Enough digits that parsing the string back at the same precision
    // recovers the value bit-for-bit.
    std::string str_roundtrip() const;

    Real& operator+=(const Real& o);
    Real& operator-=(const Real& o);
    Real& operator*=(const Real& o);
    Real& operator/=(const Real& o);

    friend Real operator+(const Real& a, const Real& b);
    friend Real operator-(const Real& a, const Real& b);
    friend Real operator*(const Real& a, const Real& b);
    friend Real operator/(const Real& a, const Real& b);
    friend Real operator-(const Real& a);

    friend Real operator+(const Real& a, long b);
    friend Real operator+(long a, const Real& b) { return b + a; }
    friend Real operator-(const Real& a, long b);
    friend Real operator-(long a, const Real& b);
    friend Real operator*(const Real& a, long b);
    friend Real operator*(long a, const Real& b) { return b * a; }
    friend Real operator/(const Real& a, long b);
    friend Real operator/(long a, const Real& b);

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }

    friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
    friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
    friend bool operator<=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
    friend bool operator>=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }
    friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }

  private:
    mpfr_t v_;
};

// Installs a working precision for the current thread; restores the previous
// one on scope exit.  All library entry points open one of these from their
// PrecisionCtx.
class PrecisionScope {
  public:
    explicit PrecisionScope(const PrecisionCtx& ctx);
    explicit PrecisionScope(long bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

  private:
    long saved_;
};

long current_precision_bits();

Real abs(const Real& a);
Real sqrt(const Real& a);
Real log(const Real& a);
Real log1p(const Real& a);
Real exp(const Real& a);
Real expm1(const Real& a);
Real pow(const Real& a, const Real& b);
Real pow(const Real& a, long b);
Real cosh(const Real& a);
Real sinh(const Real& a);
Real tanh(const Real& a);
Real floor(const Real& a);
Real ceil(const Real& a);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

Real const_pi();
Real const_euler();

// log Gamma for positive argument (mpfr-backed primitive; the checked
// library entry point lives in special.hpp).
Real lngamma_raw(const Real& a);

// Cheap magnitude diagnostic: approximately log10 |a|; -HUGE_VAL for zero.
double approx_log10_abs(const Real& a);

// |a-b| <= 10^-digits * max(|a|,|b|), with exact-equality shortcut.  Used
// for "agree to target_digits" checks throughout.
bool agree_to_digits(const Real& a, const Real& b, int digits);

// Relative difference |a-b|/max(|a|,|b|) (zero if both vanish).
Real rel_diff(const Real& a, const Real& b);

// Adaptive-refinement contract: evaluate at ctx.work_digits, re-evaluate at
// doubled working precision, accept once two consecutive evaluations agree
// to target_digits; escalate at most ctx.max_refinements times.
Real adaptive_refine(const PrecisionCtx& ctx, const std::function<Real(const PrecisionCtx&)>& eval);

} // namespace dlhankel

#endif
