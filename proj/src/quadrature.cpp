#include "dlhankel/quadrature.hpp"

#include <algorithm>

// Double-exponential quadrature for x^p e^{-x} g(x) on (0,inf), split at 1.
//
//   (0,1]   x(u) = (1 + tanh((pi/2) sinh u)) / 2      (tanh-sinh)
//   [1,inf) x(u) = 1 + exp(u - exp(-u))               (Takahasi-Mori)
//
// Both transforms push the endpoint behavior (x^p at 0, e^{-x} at infinity)
// into double-exponential decay in u, so the trapezoid rule converges at
// rate exp(-c/h).  Levels halve h and reuse previous nodes; each level's
// node sweep runs outward from u = 0 until contributions fall below the
// rounding floor of the accumulated L1 mass.

namespace dlhankel {

namespace {

enum class Piece { unit_interval, tail };

struct NodeValue {
    Real x;      // abscissa
    Real base;   // x^p e^{-x} dx/du, assembled in log form
};

// p enters through (p+1) ln x on the left piece, so p > -1 keeps the
// exponent finite as x -> 0.
NodeValue eval_node(Piece piece, const Real& u, const Real& p) {
    NodeValue nv;
    if (piece == Piece::unit_interval) {
        Real w = const_pi() / 2L * sinh(u);
        Real ln_x, ln_1mx;
        if (w.sign() >= 0) {
            Real q = log1p(exp(w * -2L));
            ln_x = -q;
            ln_1mx = w * -2L - q;
        } else {
            Real q = log1p(exp(w * 2L));
            ln_x = w * 2L - q;
            ln_1mx = -q;
        }
        nv.x = exp(ln_x);
        Real e = (p + 1L) * ln_x + ln_1mx - nv.x + log(const_pi()) + log(cosh(u));
        nv.base = exp(e);
    } else {
        Real v = u - exp(-u);       // ln(x-1)
        Real xm1 = exp(v);
        nv.x = xm1 + 1L;
        Real e = p * log(nv.x) - nv.x + v + log1p(exp(-u));
        nv.base = exp(e);
    }
    return nv;
}

struct PieceState {
    std::vector<Real> sum;      // h * sum of terms, per power
    std::vector<Real> l1;       // h * sum of |terms|, per power
    std::vector<Real> err;      // last inter-level difference, per power
    std::vector<bool> settled;  // per-power convergence flag
    std::vector<Real> best;     // largest node |term| seen, per power
    std::vector<Real> cut;      // best * floor, cached cutoff threshold
    bool all_zero = true;
};

class DEIntegrator {
  public:
    DEIntegrator(const SemiAxisIntegrand& f, int n_powers, const PrecisionCtx& ctx)
        : f_(f), num_k_(n_powers), ctx_(ctx) {
        tol_ = pow(Real(10L), -static_cast<long>(ctx.target_digits + 2));
        floor_ = pow(Real(10L), -static_cast<long>(ctx.work_digits + 15));
    }

    std::vector<Real> run() {
        std::vector<Real> left = run_piece(Piece::unit_interval);
        std::vector<Real> right = run_piece(Piece::tail);
        std::vector<Real> out(num_k_);
        for (int k = 0; k < num_k_; ++k) out[k] = left[k] + right[k];
        return out;
    }

  private:
    // One direction of a level sweep.  step > 0 walks u rightward.
    //
    // Truncation is judged per power: each k keeps its own high-water mark,
    // and a node only counts as negligible for k once its contribution is
    // below that mark's rounding floor AND no longer growing (the x^{p+k}
    // e^{-x} peaks sit near u = ln(p+k), far from u = 0, so a low-water
    // start must not end the sweep before every power's peak has passed;
    // and the k = 256 peak must not drown the regions that carry all of
    // the k = 0 mass).
    void sweep(Piece piece, PieceState& st, const Real& h, long j_start, long j_stride,
               int direction, std::vector<Real>& acc, std::vector<Real>& acc_abs) {
        int quiet = 0;
        long nodes = 0;
        std::vector<Real> prev(num_k_, Real(0L));
        bool have_prev = false;
        for (long j = j_start;; j += j_stride * direction, ++nodes) {
            Real u = h * j;
            NodeValue nv = eval_node(piece, u, f_.power);
            Real g = f_.smooth(nv.x);
            Real t0 = nv.base * g;
            Real xk(1L);
            bool negligible = true;
            for (int k = 0; k < num_k_; ++k) {
                Real term = t0 * xk;
                acc[k] += term;
                Real a = abs(term);
                acc_abs[k] += a;
                if (a > st.best[k]) {
                    st.best[k] = a;
                    st.cut[k] = a * floor_;
                    st.all_zero = false;
                    negligible = false;
                } else if (negligible) {
                    bool done_k = a <= st.cut[k] && (a.is_zero() || (have_prev && a < prev[k]));
                    if (!done_k) negligible = false;
                }
                if (k + 1 < num_k_) xk *= nv.x;
                prev[k] = a;
            }
            have_prev = true;
            if (st.all_zero) negligible = nodes > 60;
            quiet = negligible ? quiet + 1 : 0;
            if (quiet >= 3 && nodes >= 6) break;
            if (nodes > 4000000)
                throw PrecisionError("integrate_semiaxis: node budget exhausted");
        }
    }

    std::vector<Real> run_piece(Piece piece) {
        PrecisionScope scope(ctx_);
        PieceState st;
        st.sum.assign(num_k_, Real(0L));
        st.l1.assign(num_k_, Real(0L));
        st.err.assign(num_k_, Real(0L));
        st.settled.assign(num_k_, false);
        st.best.assign(num_k_, Real(0L));
        st.cut.assign(num_k_, Real(0L));

        Real h("0.5");
        const int max_levels = 13;
        for (int level = 0; level <= max_levels; ++level) {
            std::vector<Real> acc(num_k_, Real(0L));
            std::vector<Real> acc_abs(num_k_, Real(0L));
            if (level == 0) {
                sweep(piece, st, h, 0, 1, +1, acc, acc_abs);
                sweep(piece, st, h, -1, 1, -1, acc, acc_abs);
            } else {
                h = h / 2L;  // new nodes sit at odd multiples of the halved step
                sweep(piece, st, h, 1, 2, +1, acc, acc_abs);
                sweep(piece, st, h, -1, 2, -1, acc, acc_abs);
            }

            bool converged = true;
            for (int k = 0; k < num_k_; ++k) {
                Real next = (level == 0) ? h * acc[k] : st.sum[k] / 2L + h * acc[k];
                Real next_l1 = (level == 0) ? h * acc_abs[k] : st.l1[k] / 2L + h * acc_abs[k];
                Real e = abs(next - st.sum[k]);
                bool ok = false;
                if (level >= 2) {
                    if (e <= tol_ * abs(next)) {
                        ok = true;
                    } else if (level >= 4 && e <= tol_ * next_l1 && e * 4L >= st.err[k]) {
                        ok = true;  // rounding floor: absolute error vs L1 mass
                    }
                }
                st.err[k] = e;
                st.sum[k] = next;
                st.l1[k] = next_l1;
                st.settled[k] = ok;
                converged = converged && ok;
            }
            if (level >= 2 && st.all_zero) return st.sum;
            if (converged) return st.sum;
        }

        int worst = 0;
        for (int k = 1; k < num_k_; ++k)
            if (!st.settled[k]) worst = k;
        throw PrecisionError(
            "integrate_semiaxis: levels exhausted without agreement to target (power offset " +
                std::to_string(worst) + ", last level delta ~1e" +
                std::to_string(static_cast<long>(approx_log10_abs(st.err[worst]))) +
                " vs value ~1e" +
                std::to_string(static_cast<long>(approx_log10_abs(st.sum[worst]))) + ")",
            st.sum[worst].str(ctx_.target_digits),
            (st.sum[worst] - st.err[worst]).str(ctx_.target_digits));
    }

    const SemiAxisIntegrand& f_;
    int num_k_;
    PrecisionCtx ctx_;
    Real tol_;
    Real floor_;
};

} // namespace

Real integrate_semiaxis(const SemiAxisIntegrand& f, const PrecisionCtx& ctx) {
    return integrate_semiaxis_powers(f, 1, ctx)[0];
}

std::vector<Real> integrate_semiaxis_powers(const SemiAxisIntegrand& f, int n_powers,
                                            const PrecisionCtx& ctx) {
    ctx.validate();
    PrecisionScope scope(ctx);
    if (!(f.power > -1L))
        throw DomainError("integrate_semiaxis: power must exceed -1");
    if (n_powers < 1)
        throw DomainError("integrate_semiaxis: n_powers must be positive");
    DEIntegrator de(f, n_powers, ctx);
    return de.run();
}

} // namespace dlhankel
