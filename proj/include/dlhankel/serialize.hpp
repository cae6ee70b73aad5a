#ifndef DLHANKEL_SERIALIZE_HPP
#define DLHANKEL_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "dlhankel/asymptotics.hpp"
#include "dlhankel/ladder.hpp"
#include "dlhankel/orthopoly.hpp"

namespace dlhankel {

inline constexpr int schema_version = 1;

// All numeric payloads are decimal strings: full-precision (round-trip
// exact) in JSON documents, certified digits in CSV cells.

nlohmann::json moment_table_to_json(const MomentTable& table);
MomentTable moment_table_from_json(const nlohmann::json& j);

nlohmann::json recurrence_table_to_json(const RecurrenceTable& table);
RecurrenceTable recurrence_table_from_json(const nlohmann::json& j);

nlohmann::json aux_table_to_json(const AuxTable& table);

nlohmann::json residual_report_to_json(const ResidualReport& rep);
nlohmann::json verification_manifest(const std::vector<ResidualReport>& reports,
                                     const WeightParams& params, int N);

nlohmann::json series_eval_to_json(const SeriesEval& se, int digits);
nlohmann::json slope_report_to_json(const SlopeReport& rep);

std::string recurrence_table_to_csv(const RecurrenceTable& table);
std::string aux_table_to_csv(const AuxTable& table);
std::string moment_table_to_csv(const MomentTable& table);

// Comparison table for asymptotic checks: one row per scale point.
std::string comparison_csv(const std::vector<double>& scales, const std::vector<Real>& exact,
                           const std::vector<SeriesEval>& series, int digits);

std::string render_json(const nlohmann::json& j);

} // namespace dlhankel

#endif
