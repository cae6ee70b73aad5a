#include "dlhankel/orthopoly.hpp"

#include <algorithm>
#include <cmath>

namespace dlhankel {

namespace {

// Inner product under the moment functional: <p, q> = sum p_i q_j mu_{i+j}.
Real moment_inner(const std::vector<Real>& p, const std::vector<Real>& q,
                  const std::vector<Real>& mu) {
    Real s(0L);
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i].is_zero()) continue;
        Real w(0L);
        for (size_t j = 0; j < q.size(); ++j)
            w += q[j] * mu[i + j];
        s += p[i] * w;
    }
    return s;
}

struct LdlFactor {
    std::vector<std::vector<Real>> L;  // unit lower triangular, row-major
    std::vector<Real> d;               // pivots
    double cancellation = 0.0;         // max digits lost across pivots
};

// LDL^T of the size x size Hankel moment matrix.  Pivot j loses about
// log10(mu_{2j}/d_j) digits; the max is the table's cancellation diagnostic.
LdlFactor ldl_factor(const std::vector<Real>& mu, int size) {
    LdlFactor f;
    f.L.assign(size, {});  // row i accumulates entries for columns 0..i-1
    f.d.reserve(size);
    for (int j = 0; j < size; ++j) {
        Real s = mu[2 * j];
        for (int k = 0; k < j; ++k)
            s -= f.L[j][k] * f.L[j][k] * f.d[k];
        if (!(s > 0L))
            throw DataIntegrityError("hankel_ldl: non-positive pivot at order " +
                                     std::to_string(j));
        f.cancellation = std::max(f.cancellation,
                                  approx_log10_abs(mu[2 * j]) - approx_log10_abs(s));
        f.d.push_back(s);
        for (int i = j + 1; i < size; ++i) {
            Real v = mu[i + j];
            for (int k = 0; k < j; ++k)
                v -= f.L[i][k] * f.L[j][k] * f.d[k];
            f.L[i].push_back(v / s);
        }
    }
    return f;
}

void verify_table_invariants(const RecurrenceTable& r) {
    Real tol = pow(Real(10L), -static_cast<long>(r.certified_digits));
    for (int n = 0; n <= r.N; ++n)
        if (!(r.D[n] > 0L))
            throw InternalConsistencyError("D_n not positive at n=" + std::to_string(n));
    for (int n = 0; n < r.N; ++n)
        if (!(r.h[n] > 0L))
            throw InternalConsistencyError("h_n not positive at n=" + std::to_string(n));
    if (!r.p_sub[0].is_zero())
        throw InternalConsistencyError("p(0,t) must be 0");
    Real sum(0L);
    for (int n = 1; n <= r.N; ++n) {
        sum += r.alpha_at(n - 1);
        Real res = abs(sum + r.p_sub[n]) / max(Real(1L), abs(r.p_sub[n]));
        if (res > tol)
            throw InternalConsistencyError("telescoped alpha sum vs p(n,t) failed at n=" +
                                           std::to_string(n));
    }
    for (int n = 1; n < r.N; ++n) {
        if (!(r.beta[n] > 0L))
            throw InternalConsistencyError("beta_n not positive at n=" + std::to_string(n));
        Real via_d = r.D[n + 1] * r.D[n - 1] / (r.D[n] * r.D[n]);
        if (rel_diff(r.beta[n], via_d) > tol)
            throw InternalConsistencyError("beta_n mismatch with Hankel ratio at n=" +
                                           std::to_string(n));
    }
}

int certified_from(const MomentTable& table, int work_digits, double cancellation) {
    double cert = std::min(work_digits, table.ctx.target_digits) - cancellation - 7.0;
    return std::max(1, static_cast<int>(std::floor(cert)));
}

} // namespace

std::tuple<std::vector<Real>, std::vector<Real>, double>
hankel_ldl(const MomentTable& table, int N) {
    if (N < 1 || N > table.n_max + 1)
        throw DomainError("hankel_ldl: need 1 <= N <= n_max + 1");
    LdlFactor f = ldl_factor(table.mu, N);
    std::vector<Real> D;
    D.reserve(N + 1);
    D.emplace_back(1L);
    for (int n = 0; n < N; ++n)
        D.push_back(D.back() * f.d[n]);
    return {std::move(D), std::move(f.d), f.cancellation};
}

Real sub_leading(const MomentTable& table, int n) {
    if (n < 0 || n > table.n_max)
        throw DomainError("sub_leading: need 0 <= n <= n_max");
    if (n == 0) return Real(0L);
    // solve (mu_{i+k}) c = -(mu_{i+n}) for the non-leading coefficients of P_n
    LdlFactor f = ldl_factor(table.mu, n);
    std::vector<Real> y(n);
    for (int i = 0; i < n; ++i) {
        Real v = -table.mu[i + n];
        for (int k = 0; k < i; ++k)
            v -= f.L[i][k] * y[k];
        y[i] = v;
    }
    for (int i = 0; i < n; ++i) y[i] /= f.d[i];
    std::vector<Real> c(y);
    for (int i = n - 1; i >= 0; --i) {
        Real v = c[i];
        for (int k = i + 1; k < n; ++k)
            v -= f.L[k][i] * c[k];
        c[i] = v;
    }
    return c[n - 1];
}

RecurrenceTable recurrence_coeffs(const MomentTable& table, int N) {
    if (N < 1 || N > table.n_max)
        throw DomainError("recurrence_coeffs: need 1 <= N <= n_max");
    LdlFactor f = ldl_factor(table.mu, N + 1);

    // Rows of L^{-1} are the monic orthogonal polynomial coefficients:
    // L^{-1} M L^{-T} = diag(d) with unit diagonal.
    std::vector<std::vector<Real>> C(N + 1);
    for (int n = 0; n <= N; ++n) {
        C[n].assign(n + 1, Real(0L));
        C[n][n] = Real(1L);
        for (int m = n - 1; m >= 0; --m) {
            Real s(0L);
            for (int k = m; k < n; ++k)
                s += f.L[n][k] * C[k][m];
            C[n][m] = -s;
        }
    }

    RecurrenceTable r{table.params, N, {}, {}, {}, {}, {}, 0, 0};
    r.work_digits = static_cast<int>(current_precision_bits() / 3.3219280948873626);
    r.certified_digits = certified_from(table, r.work_digits, f.cancellation);
    r.D.emplace_back(1L);
    for (int n = 0; n < N; ++n) {
        r.h.push_back(f.d[n]);
        r.D.push_back(r.D.back() * f.d[n]);
    }
    r.p_sub.emplace_back(0L);
    for (int n = 1; n <= N; ++n)
        r.p_sub.push_back(C[n][n - 1]);
    for (int n = 0; n < N; ++n)
        r.alpha.push_back(r.p_sub[n] - r.p_sub[n + 1]);
    r.beta.emplace_back(0L);
    for (int n = 1; n < N; ++n)
        r.beta.push_back(f.d[n] / f.d[n - 1]);

    verify_table_invariants(r);
    return r;
}

MonicPolynomial polynomial(const RecurrenceTable& recur, int n) {
    if (n < 0 || n > recur.N)
        throw DomainError("polynomial: need 0 <= n <= N");
    std::vector<Real> prev;                 // P_{-1} = 0
    std::vector<Real> cur{Real(1L)};        // P_0 = 1
    for (int k = 0; k < n; ++k) {
        std::vector<Real> next(k + 2, Real(0L));
        for (int i = 0; i <= k; ++i)
            next[i + 1] = cur[i];
        for (int i = 0; i <= k; ++i)
            next[i] -= recur.alpha_at(k) * cur[i];
        if (k >= 1)
            for (size_t i = 0; i < prev.size(); ++i)
                next[i] -= recur.beta_at(k) * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return MonicPolynomial{n, std::move(cur)};
}

std::tuple<Real, Real, Real> eval_poly_derivs(const MonicPolynomial& poly, const Real& x) {
    Real p = poly.coeff[poly.degree];
    Real dp(0L), ddp(0L);
    for (int k = poly.degree - 1; k >= 0; --k) {
        ddp = ddp * x + dp;
        dp = dp * x + p;
        p = p * x + poly.coeff[k];
    }
    return {p, dp, ddp * 2L};
}

RecurrenceTable gram_schmidt_oracle(const MomentTable& table, int N) {
    if (N < 1 || N > table.n_max)
        throw DomainError("gram_schmidt_oracle: need 1 <= N <= n_max");
    const auto& mu = table.mu;
    std::vector<std::vector<Real>> P;
    std::vector<Real> h;
    double cancellation = 0.0;
    for (int n = 0; n <= N; ++n) {
        std::vector<Real> v(n + 1, Real(0L));
        v[n] = Real(1L);
        for (int k = 0; k < n; ++k) {
            Real proj = moment_inner(v, P[k], mu) / h[k];
            for (int i = 0; i <= k; ++i)
                v[i] -= proj * P[k][i];
        }
        Real hn = moment_inner(v, v, mu);
        if (!(hn > 0L))
            throw DataIntegrityError("gram_schmidt_oracle: non-positive norm at n=" +
                                     std::to_string(n));
        cancellation = std::max(cancellation,
                                approx_log10_abs(mu[2 * n]) - approx_log10_abs(hn));
        P.push_back(std::move(v));
        h.push_back(hn);
    }

    RecurrenceTable r{table.params, N, {}, {}, {}, {}, {}, 0, 0};
    r.work_digits = static_cast<int>(current_precision_bits() / 3.3219280948873626);
    r.certified_digits = certified_from(table, r.work_digits, cancellation);
    r.D.emplace_back(1L);
    for (int n = 0; n < N; ++n) {
        r.h.push_back(h[n]);
        r.D.push_back(r.D.back() * h[n]);
    }
    r.p_sub.emplace_back(0L);
    for (int n = 1; n <= N; ++n)
        r.p_sub.push_back(P[n][n - 1]);
    for (int n = 0; n < N; ++n) {
        // alpha_n = <x P_n, P_n> / h_n
        std::vector<Real> xp(P[n].size() + 1, Real(0L));
        for (size_t i = 0; i < P[n].size(); ++i)
            xp[i + 1] = P[n][i];
        r.alpha.push_back(moment_inner(xp, P[n], mu) / h[n]);
    }
    r.beta.emplace_back(0L);
    for (int n = 1; n < N; ++n)
        r.beta.push_back(h[n] / h[n - 1]);

    verify_table_invariants(r);
    return r;
}

PrecisionCtx hankel_ctx(int target_digits, int N, int guard_digits) {
    PrecisionCtx ctx = PrecisionCtx::with_target(target_digits, guard_digits);
    return ctx.with_work(target_digits + guard_digits +
                         static_cast<int>(std::ceil(2.2 * N)) + 10);
}

PrecisionCtx moment_ctx_for(const PrecisionCtx& hankel, int N, int pass) {
    int target = hankel.target_digits + (N + 25) * (1 << pass);
    target = std::min(target, hankel.work_digits * (1 << pass) - 10);
    return PrecisionCtx::with_target(std::max(target, 20), 25, hankel.max_refinements);
}

RecurrenceTable compute_recurrence_table(const WeightParams& params, int N,
                                         const PrecisionCtx& ctx) {
    ctx.validate();
    PrecisionCtx cur = ctx;
    for (int pass = 0;; ++pass) {
        PrecisionScope scope(cur);
        try {
            auto table = build_moment_table(N, params, moment_ctx_for(ctx, N, pass));
            RecurrenceTable r = recurrence_coeffs(*table, N);
            if (r.certified_digits >= ctx.target_digits)
                return r;
            if (pass >= ctx.max_refinements)
                throw PrecisionError("compute_recurrence_table: certified digits " +
                                     std::to_string(r.certified_digits) +
                                     " below target after max refinements");
        } catch (const DataIntegrityError&) {
            if (pass >= ctx.max_refinements) throw;
        }
        cur = cur.doubled();
    }
}

} // namespace dlhankel
