#include "dlhankel/special.hpp"

#include <gmpxx.h>

#include <map>
#include <mutex>
#include <vector>

#include "dlhankel/quadrature.hpp"

namespace dlhankel::special {

namespace {

std::mutex cache_mutex;

// Exact Bernoulli numbers via sum_{j<=m} C(m+1,j) B_j = 0.
const mpq_class& bernoulli_exact(unsigned k) {
    static std::vector<mpq_class> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (cache.empty()) {
        cache.emplace_back(1);
        cache.emplace_back(-1, 2);
    }
    while (cache.size() <= k) {
        unsigned m = static_cast<unsigned>(cache.size());
        if (m % 2 == 1) {
            cache.emplace_back(0);
            continue;
        }
        mpq_class s(0);
        mpz_class binom;
        for (unsigned j = 0; j < m; ++j) {
            mpz_bin_uiui(binom.get_mpz_t(), m + 1, j);
            s += mpq_class(binom) * cache[j];
        }
        cache.emplace_back(-s / mpq_class(m + 1));
    }
    return cache[k];
}

Real real_from_mpq(const mpq_class& q) {
    Real r;
    mpfr_set_q(r.raw(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

// Asymptotic series for ln G(w+1), valid once w is pushed past the shift
// threshold:
//   ln G(w+1) = w^2 (ln w/2 - 3/4) + (w/2) ln 2 pi - (ln w)/12 + zeta'(-1)
//               + sum_{k>=1} B_{2k+2} / (4 k (k+1) w^{2k}).
// The tail coefficient B_{2k+2}/(4k(k+1)) belongs to this fully expanded
// base; the B_{2k+2}/(2k(2k+1)(2k+2)) form seen elsewhere pairs with a
// base that keeps z ln Gamma(z+1) unexpanded.  Terms are summed until they
// sink below the working-precision floor of the leading part; with the
// shift threshold used here that happens before the divergent tail turns.
Real barnes_series_at(const Real& w, const Real& zp, const PrecisionCtx& ctx) {
    Real lw = log(w);
    Real sum = w * w * (lw / 2L - Real("0.75")) + w / 2L * log(const_pi() * 2L) - lw / 12L + zp;
    Real w2inv = 1L / (w * w);
    Real p = w2inv;
    Real cutoff = abs(sum) * pow(Real(10L), -static_cast<long>(ctx.work_digits + 8));
    Real prev_mag;
    for (unsigned k = 1; k < 100000; ++k) {
        Real term = bernoulli(2 * k + 2) / Real(4L * k * (k + 1)) * p;
        Real mag = abs(term);
        if (k > 1 && mag > prev_mag)
            throw PrecisionError("log_barnes_g: asymptotic tail diverged before reaching precision",
                                 sum.str(ctx.target_digits), "");
        sum += term;
        if (mag <= cutoff) return sum;
        prev_mag = mag;
        p *= w2inv;
    }
    throw PrecisionError("log_barnes_g: asymptotic series failed to terminate");
}

// zeta'(2) = -sum_{n>=2} ln n / n^2 by Euler-Maclaurin with
// f(x) = ln x / x^2,  f^(m)(x) = (a_m + b_m ln x) / x^(m+2).
Real zeta_prime_2(const PrecisionCtx& ctx) {
    long N = std::max(40L, static_cast<long>(ctx.work_digits));
    Real s(0L);
    for (long n = 2; n < N; ++n) s += log(Real(n)) / Real(n * n);
    Real rN(N);
    Real lnN = log(rN);
    s += (lnN + 1L) / rN;            // integral_N^inf
    s += lnN / (rN * rN * 2L);       // f(N)/2

    // derivative coefficients a_m, b_m (exact integers)
    mpz_class a(0), b(1);
    mpq_class fact(1);  // (2k)! accumulates as m advances
    Real invN = 1L / rN;
    Real npow = invN * invN * invN;  // N^-(m+2) at m = 1
    Real cutoff = pow(Real(10L), -static_cast<long>(ctx.work_digits + 8));
    unsigned m = 0;
    Real prev_mag;
    for (unsigned k = 1; k < 100000; ++k) {
        // advance derivative order to m = 2k-1
        while (m < 2 * k - 1) {
            mpz_class a_next = b - mpz_class(m + 2) * a;
            b = -mpz_class(m + 2) * b;
            a = a_next;
            ++m;
            fact *= m + 1;  // builds (m+1)! = (2k)! when m = 2k-1
        }
        Real deriv = (real_from_mpq(mpq_class(a)) + real_from_mpq(mpq_class(b)) * lnN) * npow;
        Real term = -real_from_mpq(bernoulli_exact(2 * k) / fact) * deriv;
        Real mag = abs(term);
        if (k > 2 && mag > prev_mag)
            throw PrecisionError("zeta_prime_minus1: Euler-Maclaurin tail diverged");
        s += term;
        if (mag <= cutoff) break;
        prev_mag = mag;
        npow = npow * invN * invN;
    }
    return -s;
}

} // namespace

Real bernoulli(unsigned k) { return real_from_mpq(bernoulli_exact(k)); }

Real log_gamma(const Real& z, const PrecisionCtx& ctx) {
    ctx.validate();
    PrecisionScope scope(ctx);
    if (!(z > 0L))
        throw DomainError("log_gamma: argument must be positive");
    return lngamma_raw(z);
}

Real log_barnes_g(const Real& z, const PrecisionCtx& ctx) {
    ctx.validate();
    PrecisionScope scope(ctx);
    if (!(z > 0L))
        throw DomainError("log_barnes_g: argument must be positive");
    Real zp = zeta_prime_minus1(ctx);
    double thresh = std::max(10.0 + ctx.target_digits / 2.0, 0.6 * ctx.work_digits + 12.0);
    long shifts = 0;
    double zd = z.to_double();
    if (zd < thresh) shifts = static_cast<long>(std::ceil(thresh - zd));
    // ln G(z) = ln G(w+1) - ln Gamma(w) - sum_{j=0}^{shifts-1} ln Gamma(z+j),  w = z + shifts
    Real acc(0L);
    for (long j = 0; j < shifts; ++j) acc += lngamma_raw(z + j);
    Real w = z + shifts;
    acc += lngamma_raw(w);
    return barnes_series_at(w, zp, ctx) - acc;
}

Real zeta_prime_minus1(const PrecisionCtx& ctx) {
    ctx.validate();
    PrecisionScope scope(ctx);
    static std::map<long, Real> memo;
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = memo.find(current_precision_bits());
        if (it != memo.end()) return it->second;
    }
    Real pi = const_pi();
    Real ln2pi = log(pi * 2L);
    Real zp2 = zeta_prime_2(ctx);
    Real ln_glaisher = (const_euler() + ln2pi) / 12L - zp2 / (pi * pi * 2L);
    Real out = Real(1L) / 12L - ln_glaisher;
    std::lock_guard<std::mutex> lock(cache_mutex);
    memo.emplace(current_precision_bits(), out);
    return out;
}

Real kummer_u(const Real& a, const Real& b, const Real& z, const PrecisionCtx& ctx) {
    ctx.validate();
    PrecisionScope scope(ctx);
    if (!(a > 0L))
        throw DomainError("kummer_u: a must be positive");
    if (!(z > 0L))
        throw DomainError("kummer_u: z must be positive");
    Real expo = b - a - 1L;
    SemiAxisIntegrand f{a - 1L, [&](const Real& u) { return exp(expo * log1p(u / z)); }};
    Real integral = integrate_semiaxis(f, ctx);
    Real ln_u = -(a * log(z)) - lngamma_raw(a) + log(integral);
    return exp(ln_u);
}

} // namespace dlhankel::special
