#include "dlhankel/ladder.hpp"

#include <algorithm>

#include "dlhankel/quadrature.hpp"

namespace dlhankel {

namespace {

Real pow10(long e) { return pow(Real(10L), e); }

// Residual accumulator: max over n of |lhs-rhs| / max(1, term scale).
struct ResidualAcc {
    Real worst{0L};
    Real worst_scale{1L};
    void add(const Real& lhs, const Real& rhs, const Real& scale) {
        Real s = max(Real(1L), scale);
        Real res = abs(lhs - rhs) / s;
        if (res > worst) { worst = res; worst_scale = s; }
    }
};

ResidualReport make_report(const std::string& name, int n_lo, int n_hi,
                           const WeightParams& params, const ResidualAcc& acc,
                           int cert, const Real& tol) {
    ResidualReport rep;
    rep.identity = name;
    rep.n_lo = n_lo;
    rep.n_hi = n_hi;
    rep.t = params.t.str(17);
    rep.max_residual = acc.worst;
    rep.scale = acc.worst_scale;
    rep.tolerance = tol;
    rep.certified_digits = cert;
    rep.pass = acc.worst <= tol;
    return rep;
}

Real exact_tol(int cert) { return pow10(-(cert - 5)); }

// 6th-order central first derivative over a 7-point stencil.
Real fd1(const std::array<Real, 7>& f, const Real& h) {
    return (-f[0] + f[1] * 9L - f[2] * 45L + f[4] * 45L - f[5] * 9L + f[6]) / (h * 60L);
}

// 6th-order central second derivative.
Real fd2(const std::array<Real, 7>& f, const Real& h) {
    return (f[0] * 2L - f[1] * 27L + f[2] * 270L - f[3] * 490L + f[4] * 270L - f[5] * 27L +
            f[6] * 2L) / (h * h * 180L);
}

Real stencil_mag(const std::array<Real, 7>& f) {
    Real m(0L);
    for (const Real& v : f) m = max(m, abs(v));
    return m;
}

// Truncation + rounding error estimates for the 6th-order stencils.  The
// truncation part uses a Cauchy bound |f^(k)| <= k! M (2/t)^k (analyticity
// radius ~ t/2); the rounding part reflects values known to cert digits.
Real fd1_error(const Real& m, const Real& h, const Real& t, int cert) {
    Real trunc = m * 4608L * pow(h / t, 6L) / t;
    Real round = m * 2L * pow10(-cert) / h;
    return trunc + round;
}

Real fd2_error(const Real& m, const Real& h, const Real& t, int cert) {
    Real trunc = m * 114688L * pow(h / t, 6L) / (t * t);
    Real round = m * 7L * pow10(-cert) / (h * h);
    return trunc + round;
}

std::array<Real, 7> collect(const TGrid& grid, const std::function<Real(const RecurrenceTable&)>& f) {
    std::array<Real, 7> out;
    for (int k = -3; k <= 3; ++k) out[k + 3] = f(grid.at(k));
    return out;
}

} // namespace

bool AuxTable::r_defined(int n) const {
    return std::find(r_indeterminate.begin(), r_indeterminate.end(), n) ==
           r_indeterminate.end();
}

AuxTable aux_from_recurrence(const RecurrenceTable& recur) {
    const WeightParams& p = recur.params;
    AuxTable aux{p, recur.N, {}, {}, {}, {}, {}, AuxProvenance::from_recurrence,
                 recur.certified_digits};
    Real guard = pow10(-(recur.certified_digits / 2));
    for (int n = 0; n < recur.N; ++n)
        aux.R.push_back((p.alpha + p.lambda + (2 * n + 1) - recur.alpha_at(n)) / p.t);
    aux.r.emplace_back(0L);
    for (int n = 1; n < recur.N; ++n) {
        Real denom = p.alpha + p.lambda + 2 * n;
        if (abs(denom) <= guard * (2 * n + 1)) {
            aux.r_indeterminate.push_back(n);
            aux.r.emplace_back(0L);
            continue;
        }
        Real num = -(Real(n) * (p.alpha + n) * p.t) -
                   recur.beta_at(n) * (p.alpha * 2L + p.lambda * 2L + (4 * n) - p.t -
                                       recur.alpha_at(n) - recur.alpha_at(n - 1));
        aux.r.push_back(num / (denom * p.t));
    }
    for (int n = 0; n <= recur.N; ++n)
        aux.H.push_back(Real(n) * (p.alpha + p.lambda + n) + recur.p_at(n));
    aux.sumR.emplace_back(0L);
    for (int n = 1; n <= recur.N; ++n)
        aux.sumR.push_back(aux.sumR.back() + aux.R[n - 1]);
    return aux;
}

AuxTable aux_from_integrals(const RecurrenceTable& recur, const MomentTable& table,
                            const PrecisionCtx& ctx) {
    PrecisionScope scope(ctx);
    const WeightParams& p = recur.params;
    AuxTable aux{p, recur.N, {}, {}, {}, {}, {}, AuxProvenance::from_integrals,
                 std::min(recur.certified_digits, ctx.target_digits)};
    std::vector<MonicPolynomial> polys;
    for (int n = 0; n <= recur.N; ++n)
        polys.push_back(polynomial(recur, n));

    auto weighted = [&](int n, int m) {
        // int_0^inf P_n P_m x^alpha e^{-x} (x+t)^{lambda-1} dx
        SemiAxisIntegrand f{p.alpha, [&](const Real& x) {
            Real pn = std::get<0>(eval_poly_derivs(polys[n], x));
            Real pm = (m == n) ? pn : std::get<0>(eval_poly_derivs(polys[m], x));
            return pn * pm * exp((p.lambda - 1L) * log(x + p.t));
        }};
        return integrate_semiaxis(f, ctx);
    };

    for (int n = 0; n < recur.N; ++n)
        aux.R.push_back(p.lambda_is_zero() ? Real(0L)
                                           : p.lambda * weighted(n, n) / recur.h_at(n));
    aux.r.emplace_back(0L);
    for (int n = 1; n < recur.N; ++n)
        aux.r.push_back(p.lambda_is_zero() ? Real(0L)
                                           : p.lambda * weighted(n, n - 1) / recur.h_at(n - 1));
    aux.H.emplace_back(0L);
    aux.sumR.emplace_back(0L);
    for (int n = 1; n <= recur.N; ++n) {
        aux.sumR.push_back(aux.sumR.back() + aux.R[n - 1]);
        aux.H.push_back(p.t * aux.sumR[n]);
    }
    return aux;
}

TGrid build_t_grid(const WeightParams& params, int N, const PrecisionCtx& ctx, const Real& h) {
    TGrid grid{params, N, h, {}};
    for (int k = -3; k <= 3; ++k) {
        WeightParams pk = params.with_t(params.t + h * k);
        grid.tables[k + 3] = compute_recurrence_table(pk, N, ctx);
    }
    return grid;
}

Real default_fd_step(const WeightParams& params, int certified_digits) {
    return params.t * pow10(-(certified_digits / 8));
}

ResidualReport hn_consistency(const TGrid& grid, const AuxTable& aux) {
    const RecurrenceTable& recur = grid.center();
    const WeightParams& p = recur.params;
    int cert = std::min(recur.certified_digits, aux.certified_digits);
    ResidualAcc acc;
    Real fd_err(0L);
    for (int n = 1; n < recur.N; ++n) {
        Real nn(n);
        Real ex1 = nn * (p.alpha + p.lambda + n) + recur.p_at(n);
        Real ex2 = nn * (p.alpha + p.lambda + n) - recur.beta_at(n) - p.t * aux.r_at(n);
        auto lnD = collect(grid, [&](const RecurrenceTable& tb) { return log(tb.D_at(n)); });
        Real numeric = p.t * fd1(lnD, grid.h);
        Real scale = max(abs(ex1), max(abs(ex2), abs(numeric)));
        acc.add(ex1, ex2, scale);
        acc.add(ex1, numeric, scale);
        acc.add(ex2, numeric, scale);
        fd_err = max(fd_err, p.t * fd1_error(stencil_mag(lnD), grid.h, p.t, cert));
    }
    Real tol = exact_tol(cert) + fd_err * 10L;
    return make_report("hn_consistency", 1, recur.N - 1, p, acc, cert, tol);
}

std::vector<ResidualReport> verify_compatibility(const RecurrenceTable& recur,
                                                 const AuxTable& aux) {
    const WeightParams& p = recur.params;
    int cert = std::min(recur.certified_digits, aux.certified_digits);
    Real tol = exact_tol(cert);
    ResidualAcc s21, s23, s12, s11, s22a;
    for (int n = 1; n < recur.N; ++n) {
        if (!aux.r_defined(n)) continue;
        const Real& rn = aux.r_at(n);
        const Real& Rn = aux.R_at(n);
        const Real& Rm = aux.R_at(n - 1);
        const Real& bn = recur.beta_at(n);
        Real nn(n);

        {
            Real lhs = rn * rn - p.lambda * rn;
            Real rhs = bn * Rn * Rm;
            s21.add(lhs, rhs, max(abs(rn * rn), max(abs(p.lambda * rn), abs(rhs))));
        }
        {
            Real npr = nn + rn;
            Real lhs = npr * npr + p.alpha * npr;
            Real rhs = bn * (1L - Rn) * (1L - Rm);
            s23.add(lhs, rhs, max(abs(npr * npr), max(abs(p.alpha * npr), abs(rhs))));
        }
        if (n + 1 < recur.N && aux.r_defined(n + 1)) {
            const Real& rn1 = aux.r_at(n + 1);
            const Real& an = recur.alpha_at(n);
            {
                Real lhs = rn + rn1;
                Real rhs = p.lambda - Rn * (p.t + an);
                s12.add(lhs, rhs, max(abs(p.lambda), max(abs(Rn * (p.t + an)), abs(lhs))));
            }
            {
                Real lhs = p.alpha + (2 * n + 1) + rn + rn1;
                Real rhs = an * (1L - Rn);
                s11.add(lhs, rhs, max(abs(lhs), abs(rhs)));
            }
        }
        {
            Real lhs = nn * p.lambda - rn * rn * 2L - (p.alpha - p.lambda + p.t + 2 * n) * rn -
                       p.t * aux.sumR[n];
            Real rhs = bn * (Rn * (1L - Rm) + Rm * (1L - Rn));
            Real scale = max(abs(nn * p.lambda),
                             max(abs(p.t * aux.sumR[n]),
                                 max(abs((p.alpha - p.lambda + p.t + 2 * n) * rn), abs(rhs))));
            s22a.add(lhs, rhs, scale);
        }
    }
    int hi = recur.N - 1;
    return {make_report("s21", 1, hi, p, s21, cert, tol),
            make_report("s23", 1, hi, p, s23, cert, tol),
            make_report("s12", 1, hi - 1, p, s12, cert, tol),
            make_report("s11", 1, hi - 1, p, s11, cert, tol),
            make_report("s22a", 1, hi, p, s22a, cert, tol)};
}

std::vector<ResidualReport> verify_discrete_system(const RecurrenceTable& recur) {
    const WeightParams& p = recur.params;
    int cert = recur.certified_digits;
    Real tol = exact_tol(cert);
    ResidualAcc d11, d12;
    auto bracket = [&](int n) {
        // n(n+alpha)t + beta_n (4n+2alpha+2lambda-t-alpha_n-alpha_{n-1})
        return Real(n) * (p.alpha + n) * p.t +
               recur.beta_at(n) * (p.alpha * 2L + p.lambda * 2L + (4 * n) - p.t -
                                   recur.alpha_at(n) - recur.alpha_at(n - 1));
    };
    for (int n = 1; n < recur.N - 1; ++n) {
        Real f1 = p.alpha + p.lambda + 2 * n;        // 2n+alpha+lambda
        Real f2 = f1 + 2L;                           // 2n+2+alpha+lambda
        const Real& an = recur.alpha_at(n);
        Real bn_br = bracket(n);
        Real bn1_br = Real(n + 1) * (p.alpha + (n + 1)) * p.t +
                      recur.beta_at(n + 1) * (p.alpha * 2L + p.lambda * 2L + (4 * n + 4) - p.t -
                                              recur.alpha_at(n + 1) - an);
        {
            Real lhs = f2 * bn_br + f1 * bn1_br;
            Real rhs = f1 * f2 * ((p.t + an) * (p.alpha + p.lambda + (2 * n + 1) - an) -
                                  p.lambda * p.t);
            d11.add(lhs, rhs, max(abs(f2 * bn_br), max(abs(f1 * bn1_br), abs(rhs))));
        }
        {
            Real lhs = bn_br * bn_br + f1 * p.lambda * p.t * bn_br;
            Real rhs = f1 * f1 * recur.beta_at(n) *
                       (p.alpha + p.lambda + (2 * n + 1) - an) *
                       (p.alpha + p.lambda + (2 * n - 1) - recur.alpha_at(n - 1));
            d12.add(lhs, rhs, max(abs(bn_br * bn_br),
                                  max(abs(f1 * p.lambda * p.t * bn_br), abs(rhs))));
        }
    }
    return {make_report("d11", 1, recur.N - 2, p, d11, cert, tol),
            make_report("d12", 1, recur.N - 2, p, d12, cert, tol)};
}

std::vector<ResidualReport> verify_toda(const TGrid& grid) {
    const RecurrenceTable& recur = grid.center();
    const WeightParams& p = recur.params;
    int cert = recur.certified_digits;
    ResidualAcc tb1, tb2;
    Real err1(0L), err2(0L);
    for (int n = 1; n < recur.N; ++n) {
        auto beta_n = collect(grid, [&](const RecurrenceTable& tb) { return tb.beta_at(n); });
        Real lhs = p.t * fd1(beta_n, grid.h);
        Real rhs = recur.beta_at(n) * (recur.alpha_at(n - 1) - recur.alpha_at(n) + 2L);
        tb1.add(lhs, rhs, max(abs(lhs), abs(rhs)));
        err1 = max(err1, p.t * fd1_error(stencil_mag(beta_n), grid.h, p.t, cert));
    }
    for (int n = 1; n < recur.N - 1; ++n) {
        Real f1 = p.alpha + p.lambda + 2 * n;
        Real f2 = f1 + 2L;
        auto alpha_n = collect(grid, [&](const RecurrenceTable& tb) { return tb.alpha_at(n); });
        Real lhs = f1 * f2 * p.t * fd1(alpha_n, grid.h);
        Real quad = Real(2L * n * n) + Real(2L * n) * (p.alpha + p.lambda + 1L) +
                    (p.alpha + 1L) * (p.alpha + p.lambda);
        Real rhs = -(p.t * quad) -
                   f1 * recur.beta_at(n + 1) * (p.alpha * 2L + p.lambda * 2L + (4 * n + 4) -
                                                p.t - recur.alpha_at(n + 1) - recur.alpha_at(n)) +
                   f2 * recur.beta_at(n) * (p.alpha * 2L + p.lambda * 2L + (4 * n) - p.t -
                                            recur.alpha_at(n) - recur.alpha_at(n - 1));
        tb2.add(lhs, rhs, max(abs(lhs), max(abs(p.t * quad), abs(rhs))));
        err2 = max(err2, abs(f1 * f2) * p.t * fd1_error(stencil_mag(alpha_n), grid.h, p.t, cert));
    }
    return {make_report("tb1", 1, recur.N - 1, p, tb1, cert, exact_tol(cert) + err1 * 10L),
            make_report("tb2", 1, recur.N - 2, p, tb2, cert, exact_tol(cert) + err2 * 10L)};
}

std::vector<ResidualReport> verify_t_derivatives(const TGrid& grid) {
    const RecurrenceTable& recur = grid.center();
    const WeightParams& p = recur.params;
    int cert = recur.certified_digits;
    AuxTable aux = aux_from_recurrence(recur);
    ResidualAcc dphi, dlnh, all1;
    Real e_dphi(0L), e_dlnh(0L), e_all1(0L);
    for (int n = 1; n < recur.N; ++n) {
        auto H_n = collect(grid, [&](const RecurrenceTable& tb) {
            return Real(n) * (p.alpha + p.lambda + n) + tb.p_at(n);
        });
        Real lhs = fd1(H_n, grid.h);
        dphi.add(lhs, -aux.r_at(n), max(abs(lhs), abs(aux.r_at(n))));
        e_dphi = max(e_dphi, fd1_error(stencil_mag(H_n), grid.h, p.t, cert));
    }
    for (int n = 0; n < recur.N; ++n) {
        auto lnh = collect(grid, [&](const RecurrenceTable& tb) { return log(tb.h_at(n)); });
        Real lhs = fd1(lnh, grid.h);
        dlnh.add(lhs, aux.R_at(n), max(abs(lhs), abs(aux.R_at(n))));
        e_dlnh = max(e_dlnh, fd1_error(stencil_mag(lnh), grid.h, p.t, cert));
    }
    for (int n = 1; n < recur.N - 1; ++n) {
        if (!aux.r_defined(n) || !aux.r_defined(n + 1)) continue;
        auto alpha_n = collect(grid, [&](const RecurrenceTable& tb) { return tb.alpha_at(n); });
        Real lhs = fd1(alpha_n, grid.h);
        Real rhs = aux.r_at(n + 1) - aux.r_at(n);
        all1.add(lhs, rhs, max(abs(lhs), abs(rhs)));
        e_all1 = max(e_all1, fd1_error(stencil_mag(alpha_n), grid.h, p.t, cert));
    }
    return {make_report("dphi", 1, recur.N - 1, p, dphi, cert, exact_tol(cert) + e_dphi * 10L),
            make_report("dlnhnt", 0, recur.N - 1, p, dlnh, cert, exact_tol(cert) + e_dlnh * 10L),
            make_report("all1", 1, recur.N - 2, p, all1, cert, exact_tol(cert) + e_all1 * 10L)};
}

ResidualReport verify_ode(const RecurrenceTable& recur, const AuxTable& aux, int n,
                          const std::vector<Real>& xs) {
    if (n < 1 || n >= recur.N)
        throw DomainError("verify_ode: need 1 <= n <= N-1");
    const WeightParams& p = recur.params;
    int cert = std::min(recur.certified_digits, aux.certified_digits);
    MonicPolynomial pn = polynomial(recur, n);
    const Real& Rn = aux.R_at(n);
    const Real& Rm = aux.R_at(n - 1);
    const Real& rn = aux.r_at(n);
    ResidualAcc acc;
    ResidualReport rep;
    for (const Real& x : xs) {
        Real xt = x + p.t;
        Real a_num = xt - p.t * Rn;  // numerator of A_n up to 1/(x(x+t))
        if (abs(a_num) < pow10(-(cert / 2)) * max(Real(1L), xt)) {
            rep.notes.push_back("x=" + x.str(6) + " skipped: A_n numerator near zero");
            continue;
        }
        Real A = (1L - Rn) / x + Rn / xt;
        Real Aprev = (1L - Rm) / x + Rm / xt;
        Real Ad = -((1L - Rn) / (x * x)) - Rn / (xt * xt);
        Real B = -((Real(n) + rn) / x) + rn / xt;
        Real Bd = (Real(n) + rn) / (x * x) - rn / (xt * xt);
        Real vp = 1L - p.alpha / x - p.lambda / xt;
        Real c1 = -(vp + Ad / A);
        Real c0 = Bd - B * B - vp * B + recur.beta_at(n) * A * Aprev - Ad * B / A;
        auto [P, dP, ddP] = eval_poly_derivs(pn, x);
        Real lhs = ddP + c1 * dP + c0 * P;
        Real scale = max(abs(ddP), max(abs(c1 * dP), abs(c0 * P)));
        acc.add(lhs, Real(0L), scale);
    }
    auto out = make_report("ode_n" + std::to_string(n), n, n, p, acc, cert, exact_tol(cert));
    out.notes = rep.notes;
    out.pass = out.max_residual <= out.tolerance;
    return out;
}

ResidualReport verify_painleve_v(const TGrid& grid, int n) {
    const RecurrenceTable& recur = grid.center();
    const WeightParams& p = recur.params;
    int cert = recur.certified_digits;
    if (p.lambda_is_zero())
        throw DomainError("verify_painleve_v: degenerate at lambda=0 (R_n = 0 makes y = 0)");
    std::array<Real, 7> y;
    for (int k = -3; k <= 3; ++k) {
        const RecurrenceTable& tb = grid.at(k);
        Real tk = tb.params.t;
        Real Rn = (p.alpha + p.lambda + (2 * n + 1) - tb.alpha_at(n)) / tk;
        y[k + 3] = 1L - 1L / (1L - Rn);
    }
    Real y0 = y[3];
    Real yd = fd1(y, grid.h);
    Real ydd = fd2(y, grid.h);
    const Real& t = p.t;
    Real mu0 = p.alpha * p.alpha / 2L;
    Real mu1 = -(p.lambda * p.lambda) / 2L;
    Real mu2 = p.alpha + p.lambda + (2 * n + 1);
    Real mu3("-0.5");
    Real term1 = (y0 * 3L - 1L) / (y0 * (y0 - 1L) * 2L) * yd * yd;
    Real term2 = -(yd / t);
    Real term3 = (y0 - 1L) * (y0 - 1L) / (t * t) * (mu0 * y0 + mu1 / y0);
    Real term4 = mu2 * y0 / t;
    Real term5 = mu3 * y0 * (y0 + 1L) / (y0 - 1L);
    Real rhs = term1 + term2 + term3 + term4 + term5;
    Real scale = max(abs(ydd), max(abs(term1), max(abs(term2),
                 max(abs(term3), max(abs(term4), abs(term5))))));
    ResidualAcc acc;
    acc.add(ydd, rhs, scale);
    Real m = stencil_mag(y);
    Real e2 = fd2_error(m, grid.h, t, cert);
    Real e1 = fd1_error(m, grid.h, t, cert);
    Real dterm1_dyd = abs((y0 * 3L - 1L) / (y0 * (y0 - 1L)) * yd) + 1L / t;
    Real tol = (e2 + dterm1_dyd * e1) * 10L / max(Real(1L), scale) + exact_tol(cert);
    auto rep = make_report("painleve_v_n" + std::to_string(n), n, n, p, acc, cert, tol);
    if (abs(y0) < Real("1e-3") || abs(y0 - 1L) < Real("1e-3"))
        rep.notes.push_back("y near singular value; residual conditioning degraded");
    return rep;
}

ResidualReport verify_sigma_form(const TGrid& grid, int n) {
    const RecurrenceTable& recur = grid.center();
    const WeightParams& p = recur.params;
    int cert = recur.certified_digits;
    AuxTable aux = aux_from_recurrence(recur);
    const Real& t = p.t;
    Real sigma = aux.H_at(n) - Real(n) * p.lambda;
    Real sigma_d = -aux.r_at(n);  // exact: H_n' = -r_n
    std::array<Real, 7> r_n;
    for (int k = -3; k <= 3; ++k) {
        AuxTable a = aux_from_recurrence(grid.at(k));
        r_n[k + 3] = a.r_at(n);
    }
    Real sigma_dd = -fd1(r_n, grid.h);
    Real nu1 = Real(-n);
    Real nu2 = p.lambda;
    Real nu3 = -(p.alpha + n);
    Real lhs = t * sigma_dd;
    lhs = lhs * lhs;
    Real bracket = sigma - t * sigma_d + sigma_d * sigma_d * 2L + (nu1 + nu2 + nu3) * sigma_d;
    Real prod = sigma_d * (nu1 + sigma_d) * (nu2 + sigma_d) * (nu3 + sigma_d) * 4L;
    Real rhs = bracket * bracket - prod;
    Real scale = max(abs(lhs), max(abs(bracket * bracket), abs(prod)));
    ResidualAcc acc;
    acc.add(lhs, rhs, scale);
    Real e = fd1_error(stencil_mag(r_n), grid.h, t, cert);
    Real tol = abs(t * t * sigma_dd * 2L) * e * 10L / max(Real(1L), scale) + exact_tol(cert);
    return make_report("sigma_form_n" + std::to_string(n), n, n, p, acc, cert, tol);
}

std::vector<ResidualReport> verify_all(const RecurrenceTable& recur, const AuxTable& aux) {
    std::vector<ResidualReport> out = verify_compatibility(recur, aux);
    for (auto& rep : verify_discrete_system(recur))
        out.push_back(std::move(rep));
    return out;
}

} // namespace dlhankel
