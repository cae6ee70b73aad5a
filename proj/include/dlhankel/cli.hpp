#ifndef DLHANKEL_CLI_HPP
#define DLHANKEL_CLI_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace dlhankel {

// Batch-run configuration.  Parameters are kept as the decimal strings the
// user supplied so that parse(emit(config)) round-trips exactly.
struct RunConfig {
    std::string alpha = "0";
    std::string lambda = "0";
    std::vector<std::string> t_grid;      // positive, strictly ascending
    int n_max = 8;
    int digits = 50;                      // certified digits requested
    std::vector<std::string> tasks;       // subset of known_tasks, dependency-closed
    std::string out_dir;
    std::vector<std::string> formats;     // subset of {csv, json}
    bool strict = false;

    static const std::vector<std::string>& known_tasks();
    void validate_and_close();            // checks fields, closes task dependencies
    bool operator==(const RunConfig& o) const = default;
};

// Flat key=value text; list-valued keys repeat.
RunConfig parse_config(const std::string& text);
std::string emit_config(const RunConfig& config);

std::string default_out_dir();            // $DLHANKEL_OUT or "."

struct RunOutcome {
    int exit_code = 0;
    nlohmann::json manifest;
};

RunOutcome cmd_compute(const RunConfig& config);
RunOutcome cmd_verify(const RunConfig& config);
RunOutcome cmd_asymptotics(const RunConfig& config, const std::string& regime);
RunOutcome cmd_fit_constants(const RunConfig& config);

std::string sha256_hex(const std::string& bytes);

} // namespace dlhankel

#endif
