#include "dlhankel/moments.hpp"

#include <map>
#include <mutex>

#include "dlhankel/quadrature.hpp"
#include "dlhankel/special.hpp"

namespace dlhankel {

WeightParams::WeightParams(const std::string& alpha_dec, const std::string& lambda_dec,
                           const std::string& t_dec) {
    alpha = Real::at_bits(alpha_dec, param_bits);
    lambda = Real::at_bits(lambda_dec, param_bits);
    t = Real::at_bits(t_dec, param_bits);
    validate();
}

WeightParams::WeightParams(double alpha_v, double lambda_v, double t_v) {
    PrecisionScope scope(param_bits);
    alpha = Real(alpha_v);
    lambda = Real(lambda_v);
    t = Real(t_v);
    validate();
}

void WeightParams::validate() const {
    if (!(alpha > -1L))
        throw DomainError("WeightParams: alpha must exceed -1");
    if (!(t > 0L))
        throw DomainError("WeightParams: t must be positive");
}

WeightParams WeightParams::with_lambda_shift(long k) const {
    PrecisionScope scope(param_bits);
    WeightParams p;
    p.alpha = alpha;
    p.lambda = lambda + k;
    p.t = t;
    return p;
}

WeightParams WeightParams::with_t(const Real& new_t) const {
    PrecisionScope scope(param_bits);
    WeightParams p;
    p.alpha = alpha;
    p.lambda = lambda;
    p.t = Real(new_t.str_roundtrip());
    p.validate();
    return p;
}

std::string WeightParams::key() const {
    return alpha.str_roundtrip() + "|" + lambda.str_roundtrip() + "|" + t.str_roundtrip();
}

std::string to_string(MomentRoute r) {
    switch (r) {
        case MomentRoute::closed_form: return "closed_form";
        case MomentRoute::quadrature: return "quadrature";
        case MomentRoute::cross_checked: return "cross_checked";
    }
    return "?";
}

MomentRoute moment_route_from_string(const std::string& s) {
    if (s == "closed_form") return MomentRoute::closed_form;
    if (s == "quadrature") return MomentRoute::quadrature;
    if (s == "cross_checked") return MomentRoute::cross_checked;
    throw ConfigError("unknown moment route '" + s + "'");
}

Real moment_closed_form(int j, const WeightParams& p, const PrecisionCtx& ctx) {
    if (j < 0) throw DomainError("moment_closed_form: j must be >= 0");
    PrecisionScope scope(ctx);
    Real a = p.alpha + j + 1L;
    Real b = a + p.lambda + 1L;
    Real u = special::kummer_u(a, b, p.t, ctx);
    Real ln_mu = (p.alpha + j + p.lambda + 1L) * log(p.t) + special::log_gamma(a, ctx) + log(u);
    return exp(ln_mu);
}

Real moment_quadrature(int j, const WeightParams& p, const PrecisionCtx& ctx) {
    if (j < 0) throw DomainError("moment_quadrature: j must be >= 0");
    PrecisionScope scope(ctx);
    SemiAxisIntegrand f{p.alpha + j,
                        [&](const Real& x) { return exp(p.lambda * log(x + p.t)); }};
    return integrate_semiaxis(f, ctx);
}

Real moment_lambda_shifted(int j, const WeightParams& p, const PrecisionCtx& ctx) {
    return moment_closed_form(j, p.with_lambda_shift(-1), ctx);
}

namespace {

std::mutex table_mutex;

std::shared_ptr<const MomentTable> build_uncached(int n_max, const WeightParams& p,
                                                  const PrecisionCtx& ctx) {
    PrecisionScope scope(ctx);
    auto table = std::make_shared<MomentTable>(MomentTable{p, n_max, {}, MomentRoute::quadrature,
                                                           Real(0L), ctx});
    int count = 2 * n_max + 1;

    // quadrature route, all powers in one node sweep
    SemiAxisIntegrand f{p.alpha, [&](const Real& x) { return exp(p.lambda * log(x + p.t)); }};
    std::vector<Real> by_quadrature = integrate_semiaxis_powers(f, count, ctx);

    Real worst(0L);
    int worst_j = 0;
    table->mu.reserve(count);
    for (int j = 0; j < count; ++j) {
        Real closed = moment_closed_form(j, p, ctx);
        Real res = rel_diff(closed, by_quadrature[j]);
        if (res > worst) { worst = res; worst_j = j; }
        table->mu.push_back(closed);
    }
    Real tol = pow(Real(10L), -static_cast<long>(ctx.target_digits));
    if (worst > tol)
        throw DataIntegrityError("moment routes disagree at j=" + std::to_string(worst_j) +
                                 ": relative residual " + worst.str(3));
    table->route = MomentRoute::cross_checked;
    table->cross_residual = worst;
    return table;
}

} // namespace

std::shared_ptr<const MomentTable> build_moment_table(int n_max, const WeightParams& p,
                                                      const PrecisionCtx& ctx) {
    if (n_max < 1) throw DomainError("build_moment_table: n_max must be >= 1");
    ctx.validate();
    std::string key = p.key() + "#" + std::to_string(n_max) + "#" +
                      std::to_string(ctx.work_bits()) + "#" + std::to_string(ctx.target_digits);
    static std::map<std::string, std::shared_ptr<const MomentTable>> cache;
    {
        std::lock_guard<std::mutex> lock(table_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto table = build_uncached(n_max, p, ctx);
    std::lock_guard<std::mutex> lock(table_mutex);
    return cache.emplace(key, table).first->second;
}

} // namespace dlhankel
