#ifndef DLHANKEL_SPECIAL_HPP
#define DLHANKEL_SPECIAL_HPP

#include "dlhankel/precision.hpp"

namespace dlhankel::special {

// ln Gamma(z), z > 0.
Real log_gamma(const Real& z, const PrecisionCtx& ctx);

// ln G(z) for the Barnes G-function, z > 0.  The argument is pushed upward
// through ln G(z+1) = ln Gamma(z) + ln G(z) until the asymptotic expansion
//   ln G(w+1) = w^2 (ln w / 2 - 3/4) + (w/2) ln(2 pi) - (ln w)/12
//               + zeta'(-1) + sum_k B_{2k+2} / (2k (2k+1)(2k+2) w^{2k})
// converges below working precision.
Real log_barnes_g(const Real& z, const PrecisionCtx& ctx);

// zeta'(-1), computed (not hard-coded) through the Glaisher-Kinkelin route:
//   zeta'(-1) = 1/12 - ln A,
//   ln A = (euler_gamma + ln 2 pi)/12 - zeta'(2)/(2 pi^2),
// with zeta'(2) summed by Euler-Maclaurin.
Real zeta_prime_minus1(const PrecisionCtx& ctx);

// Kummer U(a, b, z) for a > 0, z > 0, via the integral representation
//   U(a,b,z) = z^{-a}/Gamma(a) * int_0^inf u^{a-1} e^{-u} (1+u/z)^{b-a-1} du
// (the s -> u/z rescaling of the classical Laplace integral, exposing the
// x^p e^{-x} kernel of integrate_semiaxis).
Real kummer_u(const Real& a, const Real& b, const Real& z, const PrecisionCtx& ctx);

// Exact Bernoulli number B_k rendered at the current working precision.
// B_1 = -1/2.
Real bernoulli(unsigned k);

} // namespace dlhankel::special

#endif
