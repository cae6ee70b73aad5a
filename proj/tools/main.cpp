#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dlhankel/cli.hpp"
#include "dlhankel/errors.hpp"

// Exit codes: 0 success / all checks passed; 1 tolerance or slope failure;
// 2 configuration error; 3 runtime or precision failure.

namespace {

struct CommonOpts {
    std::string config_file;
    dlhankel::RunConfig flags;
    bool alpha_set = false, lambda_set = false, nmax_set = false, digits_set = false,
         out_set = false, strict_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_file, "flat key=value config file");
    cmd->add_option("--alpha", o.flags.alpha, "weight exponent alpha (> -1)")
        ->each([&](const std::string&) { o.alpha_set = true; });
    cmd->add_option("--lambda", o.flags.lambda, "weight exponent lambda")
        ->each([&](const std::string&) { o.lambda_set = true; });
    cmd->add_option("--t", o.flags.t_grid, "deformation parameter t (repeatable, ascending)");
    cmd->add_option("--n-max", o.flags.n_max, "table depth N")
        ->each([&](const std::string&) { o.nmax_set = true; });
    cmd->add_option("--digits", o.flags.digits, "certified decimal digits")
        ->each([&](const std::string&) { o.digits_set = true; });
    cmd->add_option("--out", o.flags.out_dir, "output directory (default $DLHANKEL_OUT or .)")
        ->each([&](const std::string&) { o.out_set = true; });
    cmd->add_option("--format", o.flags.formats, "output formats: csv, json (repeatable)");
    cmd->add_flag("--strict", o.flags.strict, "fail on inconclusive slope checks")
        ->each([&](const std::string&) { o.strict_set = true; });
    cmd->add_option("--task", o.flags.tasks, "tasks (repeatable)");
}

// flags override file values
dlhankel::RunConfig merge(const CommonOpts& o) {
    dlhankel::RunConfig c;
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) throw dlhankel::ConfigError("cannot read config file " + o.config_file);
        std::ostringstream ss;
        ss << in.rdbuf();
        c = dlhankel::parse_config(ss.str());
    }
    if (o.alpha_set) c.alpha = o.flags.alpha;
    if (o.lambda_set) c.lambda = o.flags.lambda;
    if (!o.flags.t_grid.empty()) c.t_grid = o.flags.t_grid;
    if (o.nmax_set) c.n_max = o.flags.n_max;
    if (o.digits_set) c.digits = o.flags.digits;
    if (o.out_set) c.out_dir = o.flags.out_dir;
    if (!o.flags.formats.empty()) c.formats = o.flags.formats;
    if (o.strict_set) c.strict = o.flags.strict;
    if (!o.flags.tasks.empty()) c.tasks = o.flags.tasks;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-n tables, identity verification and asymptotic checks for the "
                 "deformed Laguerre weight x^a e^-x (x+t)^l"};
    app.require_subcommand(1);

    CommonOpts compute_o, verify_o, asym_o, fit_o;
    CLI::App* compute = app.add_subcommand("compute", "write moment/recurrence/aux tables");
    add_common(compute, compute_o);
    CLI::App* verify = app.add_subcommand("verify", "run the identity suite");
    add_common(verify, verify_o);
    CLI::App* asym = app.add_subcommand("asymptotics", "series-vs-exact slope checks");
    add_common(asym, asym_o);
    std::string regime = "large_n";
    asym->add_option("--regime", regime, "large_n | long_time");
    CLI::App* fit = app.add_subcommand("fit-constants", "fit the undetermined lnD constants");
    add_common(fit, fit_o);
    std::string echo_config;
    CLI::App* echo = app.add_subcommand("config-echo", "parse a config file and emit it back");
    echo->add_option("--config", echo_config)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        dlhankel::RunOutcome out;
        if (compute->parsed()) out = dlhankel::cmd_compute(merge(compute_o));
        else if (verify->parsed()) out = dlhankel::cmd_verify(merge(verify_o));
        else if (asym->parsed()) out = dlhankel::cmd_asymptotics(merge(asym_o), regime);
        else if (fit->parsed()) out = dlhankel::cmd_fit_constants(merge(fit_o));
        else if (echo->parsed()) {
            std::ifstream in(echo_config);
            if (!in) throw dlhankel::ConfigError("cannot read " + echo_config);
            std::ostringstream ss;
            ss << in.rdbuf();
            std::cout << dlhankel::emit_config(dlhankel::parse_config(ss.str()));
            return 0;
        }
        return out.exit_code;
    } catch (const dlhankel::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
