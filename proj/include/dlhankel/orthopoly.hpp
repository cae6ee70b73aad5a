#ifndef DLHANKEL_ORTHOPOLY_HPP
#define DLHANKEL_ORTHOPOLY_HPP

#include <memory>
#include <tuple>
#include <vector>

#include "dlhankel/moments.hpp"

namespace dlhankel {

// Finite-n ground truth derived from a MomentTable.
//   D[n]     = Hankel determinant D_n,          n = 0..N      (D_0 = 1)
//   h[n]     = normalization h_n,               n = 0..N-1
//   beta[n]  = recurrence coefficient beta_n,   n = 1..N-1    (beta[0] = 0)
//   p_sub[n] = sub-leading coefficient p(n,t),  n = 0..N      (p(0) = 0)
//   alpha[n] = recurrence coefficient alpha_n,  n = 0..N-1
struct RecurrenceTable {
    WeightParams params;
    int N = 0;
    std::vector<Real> D;
    std::vector<Real> h;
    std::vector<Real> beta;
    std::vector<Real> p_sub;
    std::vector<Real> alpha;
    int work_digits = 0;
    int certified_digits = 0;  // work minus observed pivot cancellation, with margin

    const Real& D_at(int n) const { return D.at(n); }
    const Real& h_at(int n) const { return h.at(n); }
    const Real& beta_at(int n) const { return beta.at(n); }
    const Real& p_at(int n) const { return p_sub.at(n); }
    const Real& alpha_at(int n) const { return alpha.at(n); }
};

// Monic polynomial in the monomial basis; coeff[k] multiplies x^k and
// coeff[degree] == 1.
struct MonicPolynomial {
    int degree = 0;
    std::vector<Real> coeff;
};

// Triangular (LDL^T) factorization of the (N+1)x(N+1) moment matrix.
// Returns D_0..D_N, h_0..h_{N-1} and the observed cancellation in decimal
// digits (max over pivots of log10(mu_{2j}/d_j)).  Throws
// DataIntegrityError on a non-positive pivot.
std::tuple<std::vector<Real>, std::vector<Real>, double>
hankel_ldl(const MomentTable& table, int N);

// p(n,t): x^{n-1} coefficient of monic P_n, from the n x n moment system.
Real sub_leading(const MomentTable& table, int n);

// Full table; all structural invariants are re-verified before returning.
RecurrenceTable recurrence_coeffs(const MomentTable& table, int N);

// P_n built from the three-term recurrence of the table.
MonicPolynomial polynomial(const RecurrenceTable& recur, int n);

// Horner evaluation of (P, P', P'') at x.
std::tuple<Real, Real, Real> eval_poly_derivs(const MonicPolynomial& poly, const Real& x);

// Independent brute-force oracle: explicit modified Gram-Schmidt on
// {1, x, ..., x^N} under the moment inner product.  Same contract as
// recurrence_coeffs; used to certify it.
RecurrenceTable gram_schmidt_oracle(const MomentTable& table, int N);

// Working precision for a Hankel pipeline to depth N: pivot cancellation
// budgeted at ~2 digits per order, plus guard.
PrecisionCtx hankel_ctx(int target_digits, int N, int guard_digits = 20);

// Moment accuracy the factorization needs: observed pivot cancellation runs
// near 0.6 digits per order, so target + N + 25 leaves ample headroom while
// keeping the quadrature depth sane.  `pass` widens it on escalation.
PrecisionCtx moment_ctx_for(const PrecisionCtx& hankel, int N, int pass = 0);

// Convenience composition: moment table (at a working precision derived
// from ctx) plus recurrence table, with escalation on pivot failure or a
// certified-digit shortfall.
RecurrenceTable compute_recurrence_table(const WeightParams& params, int N,
                                         const PrecisionCtx& ctx);

} // namespace dlhankel

#endif
