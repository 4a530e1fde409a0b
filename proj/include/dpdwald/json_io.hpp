#pragma once

// JSON views of results and the scenario config format.

#include "dpdwald/analysis.hpp"
#include "dpdwald/power.hpp"
#include "dpdwald/simulation.hpp"
#include "dpdwald/tuning.hpp"

#include <json.hpp>

#include <string>

namespace dpd {

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const MdpdeFit& fit);
nlohmann::json to_json(const WaldTestResult& r);
nlohmann::json to_json(const PowerResult& r);
nlohmann::json to_json(const SampleSizeResult& r);
nlohmann::json to_json(const TuningResult& r);
nlohmann::json to_json(const McReport& r);
nlohmann::json to_json(const AnalysisRun& r);
nlohmann::json to_json(const SweepResult& r);

/// Parses the scenario document described in scenarios/SCHEMA.md.
McScenario scenario_from_json(const nlohmann::json& doc);
McScenario load_scenario(const std::string& path);
nlohmann::json to_json(const McScenario& s);

}  // namespace dpd
