#ifndef DLHANKEL_MOMENTS_HPP
#define DLHANKEL_MOMENTS_HPP

#include <memory>
#include <string>
#include <vector>

#include "dlhankel/precision.hpp"

namespace dlhankel {

// Parameters of the weight x^alpha e^{-x} (x+t)^lambda on (0, inf).
// Values are parsed once at a fixed 512-bit precision and that exact binary
// value defines the problem at every working precision afterwards.
struct WeightParams {
    Real alpha;
    Real lambda;
    Real t;

    static constexpr long param_bits = 512;

    WeightParams() = default;  // NaN-filled placeholder; tables overwrite it
    WeightParams(const std::string& alpha_dec, const std::string& lambda_dec,
                 const std::string& t_dec);
    WeightParams(double alpha_v, double lambda_v, double t_v);

    bool lambda_is_zero() const { return lambda.is_zero(); }
    WeightParams with_lambda_shift(long k) const;  // lambda -> lambda + k
    WeightParams with_t(const Real& new_t) const;
    std::string key() const;
    void validate() const;
};

enum class MomentRoute { closed_form, quadrature, cross_checked };

std::string to_string(MomentRoute r);
MomentRoute moment_route_from_string(const std::string& s);

// Moments mu_0 .. mu_{2 n_max} of the weight at fixed params and precision.
struct MomentTable {
    WeightParams params;
    int n_max = 0;
    std::vector<Real> mu;  // size 2 n_max + 1
    MomentRoute route = MomentRoute::quadrature;
    Real cross_residual;   // max relative route disagreement (cross_checked only)
    PrecisionCtx ctx;
};

// mu_j = t^{alpha+j+lambda+1} Gamma(alpha+j+1) U(alpha+j+1, alpha+j+lambda+2, t),
// assembled in log space.
Real moment_closed_form(int j, const WeightParams& p, const PrecisionCtx& ctx);

// Direct quadrature of x^{alpha+j} e^{-x} (x+t)^lambda.
Real moment_quadrature(int j, const WeightParams& p, const PrecisionCtx& ctx);

// mu_j at (alpha, lambda-1, t); d/dt mu_j = lambda * moment_lambda_shifted.
Real moment_lambda_shifted(int j, const WeightParams& p, const PrecisionCtx& ctx);

// Both routes for j = 0 .. 2 n_max, cross-checked to ctx.target_digits.
// Results are memoized per (params, n_max, precision); tables are immutable.
std::shared_ptr<const MomentTable> build_moment_table(int n_max, const WeightParams& p,
                                                      const PrecisionCtx& ctx);

} // namespace dlhankel

#endif
