#ifndef DLHANKEL_LADDER_HPP
#define DLHANKEL_LADDER_HPP

#include <array>
#include <string>
#include <vector>

#include "dlhankel/orthopoly.hpp"

namespace dlhankel {

enum class AuxProvenance { from_recurrence, from_integrals };

// Ladder-operator auxiliary quantities.
//   R[n]    = R_n,                       n = 0..N-1
//   r[n]    = r_n,                       n = 1..N-1   (r[0] = 0 sentinel)
//   H[n]    = H_n = t (ln D_n)',         n = 0..N
//   sumR[n] = sum_{j<n} R_j,             n = 0..N
struct AuxTable {
    WeightParams params;
    int N = 0;
    std::vector<Real> R;
    std::vector<Real> r;
    std::vector<Real> H;
    std::vector<Real> sumR;
    std::vector<int> r_indeterminate;  // n where the 2n+alpha+lambda prefactor vanished
    AuxProvenance provenance = AuxProvenance::from_recurrence;
    int certified_digits = 0;

    const Real& R_at(int n) const { return R.at(n); }
    const Real& r_at(int n) const { return r.at(n); }
    const Real& H_at(int n) const { return H.at(n); }
    bool r_defined(int n) const;
};

// One verified identity: max over the n-range of
// |LHS - RHS| / max(1, largest participating term).
struct ResidualReport {
    std::string identity;
    int n_lo = 0;
    int n_hi = 0;
    std::string t;
    Real max_residual;
    Real scale;      // magnitude the worst residual was normalized against
    Real tolerance;
    int certified_digits = 0;
    bool pass = false;
    std::vector<std::string> notes;
};

// R_n, r_n, H_n from the recurrence coefficients:
//   t R_n = 2n+1+alpha+lambda - alpha_n
//   (2n+alpha+lambda) t r_n = -n(n+alpha) t
//        - beta_n (4n+2alpha+2lambda-t-alpha_n-alpha_{n-1})
//   H_n = n(n+alpha+lambda) + p(n,t)
// n with 2n+alpha+lambda = 0 are flagged indeterminate and excluded.
AuxTable aux_from_recurrence(const RecurrenceTable& recur);

// Independent route: R_n and r_n as weighted integrals of P_n^2 and
// P_n P_{n-1} against w(x)/(x+t); H_n = t sum_{j<n} R_j.
AuxTable aux_from_integrals(const RecurrenceTable& recur, const MomentTable& table,
                            const PrecisionCtx& ctx);

// Recurrence tables at t + k h for k = -3..3, for 6th-order stencils.
struct TGrid {
    WeightParams params;
    int N = 0;
    Real h;
    std::array<RecurrenceTable, 7> tables;  // index k+3
    const RecurrenceTable& at(int k) const { return tables.at(k + 3); }
    const RecurrenceTable& center() const { return tables[3]; }
};

TGrid build_t_grid(const WeightParams& params, int N, const PrecisionCtx& ctx, const Real& h);
Real default_fd_step(const WeightParams& params, int certified_digits);

// H_n three ways: n(n+alpha+lambda)+p(n,t); n(n+alpha+lambda)-beta_n-t r_n;
// t (ln D_n)' by finite differences.
ResidualReport hn_consistency(const TGrid& grid, const AuxTable& aux);

// The five compatibility conditions (s21), (s23), (s12), (s11), (s22a).
std::vector<ResidualReport> verify_compatibility(const RecurrenceTable& recur,
                                                 const AuxTable& aux);

// The two discrete-system equations (d11), (d12).
std::vector<ResidualReport> verify_discrete_system(const RecurrenceTable& recur);

// Toda-type differential-difference equations (tb1), (tb2), with
// derivatives from 6th-order central differences over the grid.
std::vector<ResidualReport> verify_toda(const TGrid& grid);

// First-order t-derivative identities: H_n' = -r_n, (ln h_n)' = R_n,
// alpha_n' = r_{n+1} - r_n.
std::vector<ResidualReport> verify_t_derivatives(const TGrid& grid);

// Second-order ODE in x satisfied by P_n, checked pointwise at xs.
ResidualReport verify_ode(const RecurrenceTable& recur, const AuxTable& aux, int n,
                          const std::vector<Real>& xs);

// Painleve V for y = 1 - 1/(1-R_n); y', y'' by finite differences.
ResidualReport verify_painleve_v(const TGrid& grid, int n);

// Jimbo-Miwa-Okamoto sigma-form for sigma = H_n - n lambda; sigma and
// sigma' = -r_n taken exactly, only sigma'' by finite differences.
ResidualReport verify_sigma_form(const TGrid& grid, int n);

// The full identity suite in reporting order; used by the CLI.
std::vector<ResidualReport> verify_all(const RecurrenceTable& recur, const AuxTable& aux);

} // namespace dlhankel

#endif
