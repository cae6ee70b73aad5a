#include "dlhankel/cli.hpp"

#include <gmp.h>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dlhankel/serialize.hpp"
#include "dlhankel/special.hpp"

namespace dlhankel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Writes atomically: temp file in the same directory, then rename.
void write_file(const fs::path& path, const std::string& bytes) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << bytes;
    }
    fs::rename(tmp, path);
}

struct OutputSink {
    fs::path dir;
    json inventory = json::array();

    void emit(const std::string& name, const std::string& bytes) {
        write_file(dir / name, bytes);
        inventory.push_back(json{{"path", name}, {"sha256", sha256_hex(bytes)},
                                 {"bytes", bytes.size()}});
    }
};

bool has_task(const RunConfig& c, const std::string& t) {
    return std::find(c.tasks.begin(), c.tasks.end(), t) != c.tasks.end();
}

json versions_json() {
    return json{{"dlhankel", "0.1.0"},
                {"mpfr", MPFR_VERSION_STRING},
                {"gmp", gmp_version}};
}

json config_to_json(const RunConfig& c) {
    return json{{"alpha", c.alpha},       {"lambda", c.lambda}, {"t", c.t_grid},
                {"n_max", c.n_max},       {"digits", c.digits}, {"tasks", c.tasks},
                {"out", c.out_dir},       {"format", c.formats}, {"strict", c.strict}};
}

json start_manifest(const RunConfig& c, const std::string& command) {
    json m;
    m["schema_version"] = schema_version;
    m["kind"] = "run_manifest";
    m["command"] = command;
    m["config"] = config_to_json(c);
    m["versions"] = versions_json();
    m["tasks"] = json::array();
    return m;
}

// Optional fault-injection hook used by the test suite: corrupts one moment
// so downstream identity checks must trip.
std::shared_ptr<const MomentTable> maybe_corrupt(std::shared_ptr<const MomentTable> table) {
    const char* env = std::getenv("DLHANKEL_TEST_CORRUPT_MOMENT");
    if (!env) return table;
    int j = std::atoi(env);
    auto copy = std::make_shared<MomentTable>(*table);
    if (j >= 0 && j < static_cast<int>(copy->mu.size())) {
        PrecisionScope scope(copy->ctx);
        Real bump = 1L + pow(Real(10L), -static_cast<long>(copy->ctx.target_digits / 3));
        copy->mu[j] = copy->mu[j] * bump;
    }
    return copy;
}

struct PipelineBundle {
    std::shared_ptr<const MomentTable> moments;
    RecurrenceTable recur;
    AuxTable aux;
};

PipelineBundle run_pipeline(const WeightParams& params, int n_max, int digits) {
    PipelineBundle b;
    PrecisionCtx ctx = hankel_ctx(digits, n_max);
    bool corrupting = std::getenv("DLHANKEL_TEST_CORRUPT_MOMENT") != nullptr;
    for (int pass = 0;; ++pass) {
        PrecisionScope scope(ctx);
        try {
            b.moments = maybe_corrupt(build_moment_table(n_max, params,
                                                         moment_ctx_for(ctx, n_max, pass)));
            b.recur = recurrence_coeffs(*b.moments, n_max);
            if (b.recur.certified_digits >= digits || corrupting)
                break;
            if (pass >= ctx.max_refinements)
                throw PrecisionError("pipeline: certified digits below target after refinement");
        } catch (const DataIntegrityError&) {
            if (pass >= ctx.max_refinements) throw;
        }
        ctx = ctx.doubled();
    }
    b.aux = aux_from_recurrence(b.recur);
    return b;
}

void print_report_line(const ResidualReport& rep) {
    std::printf("  %-18s n=%-2d..%-3d residual %-12s tol %-12s %s\n", rep.identity.c_str(),
                rep.n_lo, rep.n_hi, rep.max_residual.str(3).c_str(),
                rep.tolerance.str(3).c_str(), rep.pass ? "pass" : "FAIL");
}

double slope_band(const std::string& regime) { return regime == "large_n" ? 0.25 : 0.1; }

} // namespace

const std::vector<std::string>& RunConfig::known_tasks() {
    static const std::vector<std::string> tasks = {"moments",  "recurrence",   "aux",
                                                   "verify",   "largen",       "longtime",
                                                   "fit-constants"};
    return tasks;
}

void RunConfig::validate_and_close() {
    if (t_grid.empty()) throw ConfigError("config: at least one t value is required");
    double prev = 0.0;
    for (const auto& ts : t_grid) {
        double v = std::strtod(ts.c_str(), nullptr);
        if (!(v > 0.0)) throw ConfigError("config: t values must be positive");
        if (v <= prev) throw ConfigError("config: t values must be strictly ascending");
        prev = v;
    }
    if (n_max < 1) throw ConfigError("config: n_max must be >= 1");
    if (digits < 10) throw ConfigError("config: digits must be >= 10");
    if (formats.empty()) formats = {"csv", "json"};
    for (const auto& f : formats)
        if (f != "csv" && f != "json") throw ConfigError("config: unknown format '" + f + "'");
    if (tasks.empty()) tasks = {"recurrence"};
    std::set<std::string> closed(tasks.begin(), tasks.end());
    for (const auto& t : closed) {
        const auto& known = known_tasks();
        if (std::find(known.begin(), known.end(), t) == known.end())
            throw ConfigError("config: unknown task '" + t + "'");
    }
    if (closed.count("verify")) { closed.insert("aux"); }
    if (closed.count("aux")) { closed.insert("recurrence"); }
    if (closed.count("fit-constants") || closed.count("largen") || closed.count("longtime"))
        closed.insert("recurrence");
    if (closed.count("recurrence")) { closed.insert("moments"); }
    tasks.clear();
    for (const auto& t : known_tasks())
        if (closed.count(t)) tasks.push_back(t);
    if (out_dir.empty()) out_dir = default_out_dir();
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key == "alpha") c.alpha = val;
        else if (key == "lambda") c.lambda = val;
        else if (key == "t") c.t_grid.push_back(val);
        else if (key == "n_max") c.n_max = std::stoi(val);
        else if (key == "digits") c.digits = std::stoi(val);
        else if (key == "task") c.tasks.push_back(val);
        else if (key == "out") c.out_dir = val;
        else if (key == "format") c.formats.push_back(val);
        else if (key == "strict") c.strict = (val == "true" || val == "1");
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    return c;
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream out;
    out << "alpha = " << c.alpha << "\n";
    out << "lambda = " << c.lambda << "\n";
    for (const auto& t : c.t_grid) out << "t = " << t << "\n";
    out << "n_max = " << c.n_max << "\n";
    out << "digits = " << c.digits << "\n";
    for (const auto& t : c.tasks) out << "task = " << t << "\n";
    out << "out = " << c.out_dir << "\n";
    for (const auto& f : c.formats) out << "format = " << f << "\n";
    out << "strict = " << (c.strict ? "true" : "false") << "\n";
    return out.str();
}

std::string default_out_dir() {
    const char* env = std::getenv("DLHANKEL_OUT");
    return env && *env ? env : ".";
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

RunOutcome cmd_compute(const RunConfig& config_in) {
    RunConfig config = config_in;
    config.validate_and_close();
    RunOutcome out;
    json manifest = start_manifest(config, "compute");
    OutputSink sink{config.out_dir};
    bool json_fmt = std::find(config.formats.begin(), config.formats.end(), "json") !=
                    config.formats.end();
    bool csv_fmt = std::find(config.formats.begin(), config.formats.end(), "csv") !=
                   config.formats.end();
    for (size_t i = 0; i < config.t_grid.size(); ++i) {
        std::string suffix = "_t" + std::to_string(i);
        double t0 = now_seconds();
        json task{{"t", config.t_grid[i]}};
        try {
            WeightParams params(config.alpha, config.lambda, config.t_grid[i]);
            PipelineBundle b = run_pipeline(params, config.n_max, config.digits);
            if (has_task(config, "moments")) {
                if (json_fmt) sink.emit("moments" + suffix + ".json",
                                        render_json(moment_table_to_json(*b.moments)));
                if (csv_fmt) sink.emit("moments" + suffix + ".csv",
                                       moment_table_to_csv(*b.moments));
            }
            if (has_task(config, "recurrence")) {
                if (json_fmt) sink.emit("recurrence" + suffix + ".json",
                                        render_json(recurrence_table_to_json(b.recur)));
                if (csv_fmt) sink.emit("recurrence" + suffix + ".csv",
                                       recurrence_table_to_csv(b.recur));
            }
            if (has_task(config, "aux")) {
                if (json_fmt) sink.emit("aux" + suffix + ".json",
                                        render_json(aux_table_to_json(b.aux)));
                if (csv_fmt) sink.emit("aux" + suffix + ".csv", aux_table_to_csv(b.aux));
            }
            task["certified_digits"] = b.recur.certified_digits;
            task["status"] = "ok";
        } catch (const std::exception& e) {
            task["status"] = "error";
            task["error"] = e.what();
            out.exit_code = 3;
        }
        task["seconds"] = now_seconds() - t0;
        manifest["tasks"].push_back(task);
    }
    manifest["inventory"] = sink.inventory;
    manifest["all_ok"] = out.exit_code == 0;
    std::string name = out.exit_code == 0 ? "manifest.json" : "manifest.json.partial";
    write_file(fs::path(config.out_dir) / name, render_json(manifest));
    out.manifest = manifest;
    return out;
}

RunOutcome cmd_verify(const RunConfig& config_in) {
    RunConfig config = config_in;
    if (std::find(config.tasks.begin(), config.tasks.end(), "verify") == config.tasks.end())
        config.tasks.push_back("verify");
    config.validate_and_close();
    RunOutcome out;
    json manifest = start_manifest(config, "verify");
    OutputSink sink{config.out_dir};
    std::string worst_identity;
    int worst_n = -1;

    for (size_t i = 0; i < config.t_grid.size(); ++i) {
        double t0 = now_seconds();
        json task{{"t", config.t_grid[i]}};
        try {
            WeightParams params(config.alpha, config.lambda, config.t_grid[i]);
            PipelineBundle b = run_pipeline(params, config.n_max, config.digits);
            int N = b.recur.N;
            std::vector<ResidualReport> reports = verify_all(b.recur, b.aux);

            PrecisionCtx ctx = hankel_ctx(config.digits, config.n_max);
            PrecisionScope scope(ctx);
            Real h = default_fd_step(params, b.recur.certified_digits);
            TGrid grid = build_t_grid(params, N, ctx, h);
            reports.push_back(hn_consistency(grid, b.aux));
            for (auto& rep : verify_toda(grid)) reports.push_back(std::move(rep));
            for (auto& rep : verify_t_derivatives(grid)) reports.push_back(std::move(rep));
            for (int n : {1, 3, 5, 8}) {
                if (n >= N) break;
                reports.push_back(verify_ode(b.recur, b.aux, n,
                                             {Real("0.5"), Real(2L), Real(7L)}));
            }
            for (int n : {1, 4}) {
                if (n >= N) break;
                reports.push_back(verify_sigma_form(grid, n));
                if (!params.lambda_is_zero())
                    reports.push_back(verify_painleve_v(grid, n));
            }

            std::printf("t = %s\n", config.t_grid[i].c_str());
            if (params.lambda_is_zero())
                std::printf("  (degenerate: classical Laguerre; R_n = r_n = 0, "
                            "Painleve V check skipped)\n");
            for (auto& rep : reports) {
                if (params.lambda_is_zero()) rep.notes.push_back("degenerate: classical Laguerre");
                print_report_line(rep);
                if (!rep.pass && worst_identity.empty()) {
                    worst_identity = rep.identity;
                    worst_n = rep.n_lo;
                }
            }
            json vm = verification_manifest(reports, params, N);
            vm["certified_digits"] = b.recur.certified_digits;
            sink.emit("verify_t" + std::to_string(i) + ".json", render_json(vm));
            task["all_pass"] = vm["all_pass"];
            if (!vm["all_pass"].get<bool>()) out.exit_code = 1;
            task["status"] = "ok";
        } catch (const std::exception& e) {
            task["status"] = "error";
            task["error"] = e.what();
            out.exit_code = 3;
        }
        task["seconds"] = now_seconds() - t0;
        manifest["tasks"].push_back(task);
    }
    if (!worst_identity.empty()) {
        manifest["first_failure"] = json{{"identity", worst_identity}, {"n", worst_n}};
        std::printf("FAILED: identity %s (n >= %d) exceeded tolerance\n",
                    worst_identity.c_str(), worst_n);
    }
    manifest["inventory"] = sink.inventory;
    manifest["all_ok"] = out.exit_code == 0;
    write_file(fs::path(config.out_dir) / "manifest.json", render_json(manifest));
    out.manifest = manifest;
    return out;
}

RunOutcome cmd_asymptotics(const RunConfig& config_in, const std::string& regime) {
    RunConfig config = config_in;
    if (config.tasks.empty())
        config.tasks = {regime == "large_n" ? "largen" : "longtime"};
    config.validate_and_close();
    if (regime != "large_n" && regime != "long_time")
        throw ConfigError("asymptotics: regime must be large_n or long_time");
    RunOutcome out;
    json manifest = start_manifest(config, "asymptotics/" + regime);
    OutputSink sink{config.out_dir};
    bool any_fail = false, any_inconclusive = false;
    double band = slope_band(regime);

    try {
        if (regime == "large_n") {
            std::vector<int> ns;
            for (int n = 16; n <= config.n_max; n *= 2) ns.push_back(n);
            if (ns.size() < 3)
                throw ConfigError("asymptotics large_n: need n_max >= 64 (geometric n grid)");
            for (size_t i = 0; i < config.t_grid.size(); ++i) {
                WeightParams params(config.alpha, config.lambda, config.t_grid[i]);
                double t0 = now_seconds();
                // depth +1 so alpha_n, beta_n, lnh_n are defined at ns.back()
                PipelineBundle b = run_pipeline(params, ns.back() + 1, config.digits);
                PrecisionCtx ctx = hankel_ctx(config.digits, ns.back());
                PrecisionScope scope(ctx);
                std::vector<std::string> quantities = {"alpha_n", "beta_n", "p_n", "H_n"};
                if (params.lambda_is_zero()) {
                    quantities.push_back("lnD_n");
                    quantities.push_back("lnh_n");
                }
                json slopes = json::array();
                for (const auto& q : quantities) {
                    std::vector<double> scales, floors;
                    std::vector<Real> exact;
                    std::vector<SeriesEval> series;
                    for (int n : ns) {
                        Real ex = table_quantity(b.recur, b.aux, q, n);
                        exact.push_back(ex);
                        series.push_back(largen_series(q, n, params, ctx));
                        scales.push_back(n);
                        floors.push_back(approx_log10_abs(ex) - b.recur.certified_digits);
                    }
                    std::vector<Real> totals;
                    for (const auto& se : series) totals.push_back(se.total);
                    SlopeReport rep = convergence_order(q, Regime::large_n, scales, exact,
                                                        totals, floors,
                                                        series[0].remainder_exponent);
                    slopes.push_back(slope_report_to_json(rep));
                    sink.emit("largen_" + q + "_t" + std::to_string(i) + ".csv",
                              comparison_csv(scales, exact, series, ctx.target_digits));
                    std::printf("  large_n %-8s slope %+0.3f (expected %+0.2f) [%s]\n",
                                q.c_str(), rep.slope, rep.expected, rep.status.c_str());
                    if (rep.status == "ok" && std::fabs(rep.slope - rep.expected) > band)
                        any_fail = true;
                    if (rep.status == "inconclusive") any_inconclusive = true;
                }
                json task{{"t", config.t_grid[i]}, {"slopes", slopes},
                          {"seconds", now_seconds() - t0}};
                manifest["tasks"].push_back(task);
            }
        } else {
            if (config.t_grid.size() < 3)
                throw ConfigError("asymptotics long_time: need >= 3 t values");
            std::vector<int> ns;
            for (int n : {1, 2, 5})
                if (n <= config.n_max) ns.push_back(n);
            int N = std::max(2, ns.back() + 1);
            std::vector<PipelineBundle> bundles;
            double t0 = now_seconds();
            std::vector<WeightParams> plist;
            for (const auto& ts : config.t_grid) {
                WeightParams params(config.alpha, config.lambda, ts);
                plist.push_back(params);
                bundles.push_back(run_pipeline(params, N, config.digits));
            }
            PrecisionCtx ctx = hankel_ctx(config.digits, N);
            PrecisionScope scope(ctx);
            json slopes = json::array();
            for (const auto& q : {"alpha_n", "beta_n", "p_n", "H_n", "lnD_n", "lnh_n"}) {
                for (int n : ns) {
                    std::vector<double> scales, floors;
                    std::vector<Real> exact;
                    std::vector<SeriesEval> series;
                    for (size_t k = 0; k < bundles.size(); ++k) {
                        Real ex = table_quantity(bundles[k].recur, bundles[k].aux, q, n);
                        exact.push_back(ex);
                        series.push_back(longtime_series(q, n, plist[k], ctx));
                        scales.push_back(std::strtod(config.t_grid[k].c_str(), nullptr));
                        floors.push_back(approx_log10_abs(ex) -
                                         bundles[k].recur.certified_digits);
                    }
                    std::vector<Real> totals;
                    for (const auto& se : series) totals.push_back(se.total);
                    SlopeReport rep = convergence_order(q, Regime::long_time, scales, exact,
                                                        totals, floors, -3.0);
                    rep.quantity = std::string(q) + "_n" + std::to_string(n);
                    slopes.push_back(slope_report_to_json(rep));
                    sink.emit("longtime_" + std::string(q) + "_n" + std::to_string(n) + ".csv",
                              comparison_csv(scales, exact, series, ctx.target_digits));
                    std::printf("  long_time %-8s n=%d slope %+0.3f (expected -3.00) [%s]\n",
                                q, n, rep.slope, rep.status.c_str());
                    if (rep.status == "ok" && std::fabs(rep.slope - rep.expected) > band)
                        any_fail = true;
                    if (rep.status == "inconclusive") any_inconclusive = true;
                }
            }
            json task{{"slopes", slopes}, {"seconds", now_seconds() - t0}};
            manifest["tasks"].push_back(task);
        }
    } catch (const std::exception& e) {
        manifest["error"] = e.what();
        out.exit_code = 3;
    }
    if (any_fail) out.exit_code = 1;
    if (any_inconclusive && config.strict && out.exit_code == 0) out.exit_code = 1;
    manifest["inventory"] = sink.inventory;
    manifest["all_ok"] = out.exit_code == 0;
    write_file(fs::path(config.out_dir) / "manifest.json", render_json(manifest));
    out.manifest = manifest;
    return out;
}

RunOutcome cmd_fit_constants(const RunConfig& config_in) {
    RunConfig config = config_in;
    if (config.tasks.empty()) config.tasks = {"fit-constants"};
    config.validate_and_close();
    RunOutcome out;
    json manifest = start_manifest(config, "fit-constants");
    OutputSink sink{config.out_dir};
    try {
        if (config.n_max < 32)
            throw ConfigError("fit-constants: n_max >= 32 required for a stable fit");
        std::vector<int> ns;
        for (int n = config.n_max / 2; n <= config.n_max; n += std::max(1, config.n_max / 16))
            ns.push_back(n);
        json fits = json::array();
        for (size_t i = 0; i < config.t_grid.size(); ++i) {
            WeightParams params(config.alpha, config.lambda, config.t_grid[i]);
            PipelineBundle b = run_pipeline(params, config.n_max, config.digits);
            PrecisionCtx ctx = hankel_ctx(config.digits, config.n_max);
            PrecisionScope scope(ctx);
            std::vector<Real> lnD;
            for (int n : ns) lnD.push_back(log(b.recur.D_at(n)));
            ConstantFit fit = fit_undetermined_constants("lnD_n", ns, lnD, params, ctx, true);
            json jf{{"t", config.t_grid[i]},
                    {"c2_tilde", fit.constants.c2_tilde.str(20)},
                    {"c0_tilde", fit.constants.c0_tilde.str(20)},
                    {"c2_uncertainty", fit.c2_uncertainty.str(4)},
                    {"c0_uncertainty", fit.c0_uncertainty.str(4)},
                    {"post_fit_slope", fit.post_fit_slope},
                    {"status", "empirically fitted"}};
            std::printf("  t=%s  c2~ = %s +- %s   c0~ = %s +- %s\n", config.t_grid[i].c_str(),
                        fit.constants.c2_tilde.str(12).c_str(), fit.c2_uncertainty.str(2).c_str(),
                        fit.constants.c0_tilde.str(12).c_str(), fit.c0_uncertainty.str(2).c_str());
            fits.push_back(jf);
        }
        manifest["fits"] = fits;
        sink.emit("fit_constants.json", render_json(fits));
    } catch (const std::exception& e) {
        manifest["error"] = e.what();
        out.exit_code = 3;
    }
    manifest["inventory"] = sink.inventory;
    manifest["all_ok"] = out.exit_code == 0;
    write_file(fs::path(config.out_dir) / "manifest.json", render_json(manifest));
    out.manifest = manifest;
    return out;
}

} // namespace dlhankel
