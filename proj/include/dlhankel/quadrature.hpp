#ifndef DLHANKEL_QUADRATURE_HPP
#define DLHANKEL_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "dlhankel/precision.hpp"

namespace dlhankel {

// Integrand on (0, inf) of the form  x^power * exp(-x) * smooth(x)  with
// power > -1 and smooth(x) at most polynomially growing.  The kernel
// x^power * exp(-x) is applied by the quadrature itself (in log form, so
// extreme nodes cannot overflow); smooth may change sign.
struct SemiAxisIntegrand {
    Real power;
    std::function<Real(const Real&)> smooth;
};

// integral of x^power e^{-x} smooth(x) dx over (0, inf), to
// ctx.target_digits.  The axis is split as (0,1] + [1,inf); each piece uses
// a double-exponential change of variable and the trapezoid rule with
// step-halving levels that reuse earlier nodes, stopping when two successive
// levels agree to target_digits.  Throws PrecisionError (carrying the last
// two estimates) when the level budget runs out first.
Real integrate_semiaxis(const SemiAxisIntegrand& f, const PrecisionCtx& ctx);

// Batched variant: integrals of x^{power+k} e^{-x} smooth(x) for
// k = 0..n_powers-1, sharing one node sweep.  Refinement stops only when
// every k has converged.
std::vector<Real> integrate_semiaxis_powers(const SemiAxisIntegrand& f, int n_powers,
                                            const PrecisionCtx& ctx);

} // namespace dlhankel

#endif
