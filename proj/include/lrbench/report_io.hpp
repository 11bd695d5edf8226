#pragma once

// JSON and CSV serialization of experiment results. Output depends only on
// the values serialized: object keys are sorted and floating-point values
// are written with round-trip precision.

#include <string>
#include <vector>

#include <json.hpp>

#include "lrbench/costmodel.hpp"
#include "lrbench/harness.hpp"
#include "lrbench/path_oracle.hpp"

namespace lrbench::report {

nlohmann::json to_json(const harness::EvalReport& r);
nlohmann::json to_json(const scoring::CalibrationReport& c);
nlohmann::json to_json(const std::vector<oracle::GridComparison>& grid);
nlohmann::json to_json(const harness::IllConditioningReport& r);
nlohmann::json to_json(const harness::CsPriorReport& r);
nlohmann::json to_json(const harness::TotalExpectationResult& r);
nlohmann::json tail_to_json(lrsys::SystemId system, const std::vector<costmodel::TailBoundRow>& rows);
nlohmann::json to_json(const std::vector<costmodel::DemandProfile>& profiles);
nlohmann::json to_json(const std::vector<costmodel::TradeoffRow>& rows);

// case_id, truth, r_theta, x, y, then <system>_lr and <system>_posterior
// per system. Repeated measurements are joined with ';'.
std::string cases_csv(const harness::EvalReport& r);
// One row per (system, bin): reliability-diagram points.
std::string calibration_csv(const harness::EvalReport& r);
// Mean score per system with its standard error.
std::string scores_csv(const harness::EvalReport& r);
std::string oracle_csv(const std::vector<oracle::GridComparison>& grid);

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace lrbench::report
