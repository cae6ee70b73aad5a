#ifndef DLHANKEL_ASYMPTOTICS_HPP
#define DLHANKEL_ASYMPTOTICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "dlhankel/moments.hpp"

namespace dlhankel {

enum class Regime { large_n, long_time };

std::string to_string(Regime r);

// One printed term of an asymptotic expansion.
struct SeriesTerm {
    std::string label;
    double exponent;   // power of the large variable (n or t); log factors share
                       // the power of their algebraic prefactor
    Real value;
};

// A truncated expansion with its term ledger.  total is exactly the sum of
// the ledger values; remainder_exponent is the power of the first term NOT
// included (the paper's O(.) order when nothing was dropped).
struct SeriesEval {
    std::string quantity;
    Regime regime = Regime::large_n;
    int terms_kept = 0;
    std::vector<SeriesTerm> terms;
    Real total;
    double remainder_exponent = 0.0;
    std::vector<std::string> undetermined;  // constants carried symbolically (as 0)
};

// Coulomb-fluid data at order n.
struct FluidQuantities {
    int n = 0;
    WeightParams params;
    Real b;  // endpoint of the equilibrium support
    Real A;  // Lagrange multiplier
};

// Positive root of  b - 2 alpha - 2 lambda + 2 lambda sqrt(t/(b+t)) = 4n,
// by safeguarded Newton from the initial guess 4n + 2 alpha + 2 lambda.
Real fluid_endpoint(int n, const WeightParams& p, const PrecisionCtx& ctx);

// Fitted values for the constants the paper leaves undetermined.
struct FittedConstants {
    Real c2_tilde;
    Real c0_tilde;
    bool fitted = false;  // true: empirically fitted, not closed-form
};

// Known closed forms at lambda = 0:
//   c2_tilde = alpha - ln 2 pi
//   c0_tilde = -(alpha/2) ln 2 pi - 2 zeta'(-1) + ln G(alpha+1)
FittedConstants lambda0_constants(const Real& alpha, const PrecisionCtx& ctx);

// Series for b (quantity "b", "b_half", "b_quarter_sq"), the Lagrange
// multiplier ("A") and the free energy ("F", constant C undetermined).
SeriesEval fluid_endpoint_series(const std::string& quantity, int n, const WeightParams& p,
                                 const PrecisionCtx& ctx, int drop_last = 0);

// Exact Lagrange multiplier at the solved endpoint:
//   A = b/2 - (2n+alpha) ln(b/4) - lambda ln(t/4) - 2 lambda ln(sqrt((b+t)/t)+1)
Real lagrange_multiplier(int n, const WeightParams& p, const PrecisionCtx& ctx);

SeriesEval free_energy_series(int n, const WeightParams& p, const PrecisionCtx& ctx,
                              int drop_last = 0);

// Large-n expansions of Theorems 3.1-3.5.  quantity in {alpha_n, beta_n,
// p_n, H_n, lnD_n, lnh_n}.  For lnD_n / lnh_n with lambda != 0 the
// constants are carried symbolically unless `constants` supplies values.
SeriesEval largen_series(const std::string& quantity, int n, const WeightParams& p,
                         const PrecisionCtx& ctx, int drop_last = 0,
                         const std::optional<FittedConstants>& constants = std::nullopt);

// Long-time expansions of Theorems 4.2-4.5 (same quantity ids).
SeriesEval longtime_series(const std::string& quantity, int n, const WeightParams& p,
                           const PrecisionCtx& ctx, int drop_last = 0);

// ln[ G(n+1) G(n+alpha+1) / G(alpha+1) ]: the lambda = 0 Hankel determinant
// and the long-time constant term C~(n).
Real lnD_barnes_closed_form(int n, const Real& alpha, const PrecisionCtx& ctx);

// Pulls the exact finite-n value matching a series quantity id out of the
// pipeline tables (alpha_n, beta_n, p_n, H_n, lnD_n, lnh_n).
struct RecurrenceTable;
struct AuxTable;
Real table_quantity(const RecurrenceTable& recur, const AuxTable& aux, const std::string& q,
                    int n);

// Least-squares slope of log10|exact - series| against log10(scale).
struct SlopePoint {
    double log10_scale;
    double log10_err;
    bool used;
};

struct SlopeReport {
    std::string quantity;
    Regime regime = Regime::large_n;
    std::string status;  // "ok" | "exact_match" | "inconclusive"
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<SlopePoint> points;
    double expected = 0.0;  // exponent of the first omitted term
};

// Points with |exact-series| below 1000x the precision floor are dropped;
// fewer than 3 usable points -> inconclusive (all dropped -> exact_match).
SlopeReport convergence_order(const std::string& quantity, Regime regime,
                              const std::vector<double>& scales,
                              const std::vector<Real>& exact,
                              const std::vector<Real>& series,
                              const std::vector<double>& floor_log10, double expected);

// Linear LSQ fit of c2_tilde (coefficient of -n) and c0_tilde (constant)
// against exact ln D_n data with all known series terms subtracted.
// through_half_order: subtract the printed n^{-1/2} and n^{-1} terms too
// (post-fit residual then decays like n^{-3/2} instead of n^{-1/2}).
struct ConstantFit {
    FittedConstants constants;
    Real c2_uncertainty;
    Real c0_uncertainty;
    double post_fit_slope = 0.0;
    std::string status;
};

ConstantFit fit_undetermined_constants(const std::string& quantity,
                                       const std::vector<int>& ns,
                                       const std::vector<Real>& exact_values,
                                       const WeightParams& p, const PrecisionCtx& ctx,
                                       bool through_half_order = true);

} // namespace dlhankel

#endif
