#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "colsel/selector.hpp"

namespace colsel {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

/// Report as a JSON object with the fields params, selected, trajectory,
/// scores, envelope_checks, interlacing_checks, final_extremes, certified
/// and versions. Column indices are 0-based.
nlohmann::json report_to_json(const SelectionReport& report);

/// Inverse of report_to_json. Throws Parse on missing or mistyped fields.
SelectionReport report_from_json(const nlohmann::json& j);

/// Serializes with sorted keys, two-space indent and every floating-point
/// value printed as "%.16e" (17 significant digits). Non-finite values
/// become null. Output is a pure function of the value.
std::string dump_json(const nlohmann::json& j);

/// One row per envelope check: r,k,lambda,lower,upper,pass.
void write_report_csv(std::ostream& out, const SelectionReport& report);

}  // namespace colsel
