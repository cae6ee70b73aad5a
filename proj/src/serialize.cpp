#include "dlhankel/serialize.hpp"

#include <sstream>

namespace dlhankel {

namespace {

using nlohmann::json;

json params_to_json(const WeightParams& p) {
    return json{{"alpha", p.alpha.str_roundtrip()},
                {"lambda", p.lambda.str_roundtrip()},
                {"t", p.t.str_roundtrip()}};
}

WeightParams params_from_json(const json& j) {
    return WeightParams(j.at("alpha").get<std::string>(), j.at("lambda").get<std::string>(),
                        j.at("t").get<std::string>());
}

json precision_to_json(const PrecisionCtx& ctx) {
    return json{{"target_digits", ctx.target_digits},
                {"guard_digits", ctx.guard_digits},
                {"work_digits", ctx.work_digits},
                {"max_refinements", ctx.max_refinements}};
}

PrecisionCtx precision_from_json(const json& j) {
    PrecisionCtx ctx;
    ctx.target_digits = j.at("target_digits").get<int>();
    ctx.guard_digits = j.at("guard_digits").get<int>();
    ctx.work_digits = j.at("work_digits").get<int>();
    ctx.max_refinements = j.at("max_refinements").get<int>();
    ctx.validate();
    return ctx;
}

json reals_to_json(const std::vector<Real>& v) {
    json arr = json::array();
    for (const Real& x : v) arr.push_back(x.str_roundtrip());
    return arr;
}

std::vector<Real> reals_from_json(const json& arr) {
    std::vector<Real> v;
    for (const auto& s : arr) v.emplace_back(s.get<std::string>());
    return v;
}

void check_kind(const json& j, const std::string& kind) {
    if (j.at("schema_version").get<int>() != schema_version)
        throw ConfigError("unsupported schema_version in " + kind + " document");
    if (j.at("kind").get<std::string>() != kind)
        throw ConfigError("expected document kind '" + kind + "'");
}

std::string csv_cell(const Real& x, int digits) { return x.str(digits); }

} // namespace

json moment_table_to_json(const MomentTable& table) {
    json j;
    j["schema_version"] = schema_version;
    j["kind"] = "moment_table";
    j["params"] = params_to_json(table.params);
    j["n_max"] = table.n_max;
    j["precision"] = precision_to_json(table.ctx);
    j["route"] = to_string(table.route);
    j["cross_residual"] = table.cross_residual.str_roundtrip();
    j["mu"] = reals_to_json(table.mu);
    return j;
}

MomentTable moment_table_from_json(const json& j) {
    check_kind(j, "moment_table");
    PrecisionCtx ctx = precision_from_json(j.at("precision"));
    PrecisionScope scope(ctx);
    MomentTable t{params_from_json(j.at("params")), j.at("n_max").get<int>(),
                  reals_from_json(j.at("mu")),
                  moment_route_from_string(j.at("route").get<std::string>()),
                  Real(j.at("cross_residual").get<std::string>()), ctx};
    return t;
}

json recurrence_table_to_json(const RecurrenceTable& table) {
    json j;
    j["schema_version"] = schema_version;
    j["kind"] = "recurrence_table";
    j["params"] = params_to_json(table.params);
    j["N"] = table.N;
    j["work_digits"] = table.work_digits;
    j["certified_digits"] = table.certified_digits;
    j["D"] = reals_to_json(table.D);
    j["h"] = reals_to_json(table.h);
    j["beta"] = reals_to_json(table.beta);
    j["p"] = reals_to_json(table.p_sub);
    j["alpha_rc"] = reals_to_json(table.alpha);
    return j;
}

RecurrenceTable recurrence_table_from_json(const json& j) {
    check_kind(j, "recurrence_table");
    PrecisionScope scope(digits_to_bits(j.at("work_digits").get<int>()));
    RecurrenceTable t{params_from_json(j.at("params")),
                      j.at("N").get<int>(),
                      reals_from_json(j.at("D")),
                      reals_from_json(j.at("h")),
                      reals_from_json(j.at("beta")),
                      reals_from_json(j.at("p")),
                      reals_from_json(j.at("alpha_rc")),
                      j.at("work_digits").get<int>(),
                      j.at("certified_digits").get<int>()};
    return t;
}

json aux_table_to_json(const AuxTable& table) {
    json j;
    j["schema_version"] = schema_version;
    j["kind"] = "aux_table";
    j["params"] = params_to_json(table.params);
    j["N"] = table.N;
    j["provenance"] = table.provenance == AuxProvenance::from_recurrence ? "from_recurrence"
                                                                         : "from_integrals";
    j["certified_digits"] = table.certified_digits;
    j["R"] = reals_to_json(table.R);
    j["r"] = reals_to_json(table.r);
    j["H"] = reals_to_json(table.H);
    j["sumR"] = reals_to_json(table.sumR);
    j["r_indeterminate"] = table.r_indeterminate;
    return j;
}

json residual_report_to_json(const ResidualReport& rep) {
    json j;
    j["identity"] = rep.identity;
    j["n_lo"] = rep.n_lo;
    j["n_hi"] = rep.n_hi;
    j["t"] = rep.t;
    j["max_residual"] = rep.max_residual.str(6);
    j["scale"] = rep.scale.str(6);
    j["tolerance"] = rep.tolerance.str(6);
    j["certified_digits"] = rep.certified_digits;
    j["pass"] = rep.pass;
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j;
}

json verification_manifest(const std::vector<ResidualReport>& reports,
                           const WeightParams& params, int N) {
    json j;
    j["schema_version"] = schema_version;
    j["kind"] = "verification_manifest";
    j["params"] = params_to_json(params);
    j["N"] = N;
    json items = json::array();
    bool all = true;
    for (const auto& rep : reports) {
        items.push_back(residual_report_to_json(rep));
        all = all && rep.pass;
    }
    j["identities"] = items;
    j["all_pass"] = all;
    return j;
}

json series_eval_to_json(const SeriesEval& se, int digits) {
    json j;
    j["quantity"] = se.quantity;
    j["regime"] = to_string(se.regime);
    j["terms_kept"] = se.terms_kept;
    j["remainder_exponent"] = se.remainder_exponent;
    json terms = json::array();
    for (const auto& t : se.terms)
        terms.push_back(json{{"label", t.label}, {"exponent", t.exponent},
                             {"value", t.value.str(digits)}});
    j["terms"] = terms;
    j["total"] = se.total.str(digits);
    if (!se.undetermined.empty()) {
        j["undetermined"] = se.undetermined;
        j["constants_status"] = "empirically fitted or symbolic; not closed-form";
    }
    return j;
}

json slope_report_to_json(const SlopeReport& rep) {
    json j;
    j["quantity"] = rep.quantity;
    j["regime"] = to_string(rep.regime);
    j["status"] = rep.status;
    j["slope"] = rep.slope;
    j["intercept"] = rep.intercept;
    j["expected_exponent"] = rep.expected;
    json pts = json::array();
    for (const auto& pt : rep.points)
        pts.push_back(json{{"log10_scale", pt.log10_scale}, {"log10_err", pt.log10_err},
                           {"used", pt.used}});
    j["points"] = pts;
    return j;
}

std::string recurrence_table_to_csv(const RecurrenceTable& table) {
    int d = table.certified_digits;
    std::ostringstream out;
    out << "n,D,h,beta,p,alpha\n";
    for (int n = 0; n <= table.N; ++n) {
        out << n << "," << csv_cell(table.D[n], d) << ",";
        if (n < table.N) out << csv_cell(table.h[n], d);
        out << ",";
        if (n >= 1 && n < table.N) out << csv_cell(table.beta[n], d);
        out << "," << csv_cell(table.p_sub[n], d) << ",";
        if (n < table.N) out << csv_cell(table.alpha[n], d);
        out << "\n";
    }
    return out.str();
}

std::string aux_table_to_csv(const AuxTable& table) {
    int d = table.certified_digits;
    std::ostringstream out;
    out << "n,R,r,H,sumR\n";
    for (int n = 0; n <= table.N; ++n) {
        out << n << ",";
        if (n < table.N) out << csv_cell(table.R[n], d);
        out << ",";
        if (n >= 1 && n < table.N && table.r_defined(n)) out << csv_cell(table.r[n], d);
        out << "," << csv_cell(table.H[n], d) << "," << csv_cell(table.sumR[n], d) << "\n";
    }
    return out.str();
}

std::string moment_table_to_csv(const MomentTable& table) {
    int d = table.ctx.target_digits;
    std::ostringstream out;
    out << "j,mu\n";
    for (size_t j = 0; j < table.mu.size(); ++j)
        out << j << "," << csv_cell(table.mu[j], d) << "\n";
    return out.str();
}

std::string comparison_csv(const std::vector<double>& scales, const std::vector<Real>& exact,
                           const std::vector<SeriesEval>& series, int digits) {
    std::ostringstream out;
    out << "scale,exact,series,abs_err";
    size_t max_terms = 0;
    for (const auto& se : series) max_terms = std::max(max_terms, se.terms.size());
    for (size_t k = 0; k < max_terms; ++k) out << ",term" << k;
    out << "\n";
    for (size_t i = 0; i < scales.size(); ++i) {
        out << scales[i] << "," << exact[i].str(digits) << "," << series[i].total.str(digits)
            << "," << abs(exact[i] - series[i].total).str(6);
        for (const auto& t : series[i].terms) out << "," << t.value.str(digits);
        for (size_t k = series[i].terms.size(); k < max_terms; ++k) out << ",";
        out << "\n";
    }
    return out.str();
}

std::string render_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace dlhankel
