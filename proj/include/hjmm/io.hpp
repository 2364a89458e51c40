#pragma once

#include <hjmm/grid.hpp>
#include <hjmm/levy_model.hpp>
#include <hjmm/market.hpp>
#include <hjmm/path_sim.hpp>
#include <hjmm/solver.hpp>

#include <json.hpp>

#include <string>

namespace hjmm {

/// "%.10e"; non-finite values as nan / inf / -inf.
std::string format_number(double v);

enum class Parametrization { Standard, Musiela };

/// CSV with header "t,T,f" (standard, cells T >= t) or "t,x,r" (Musiela).
std::string field_csv(const RateField& field, const GridSpec& grid, Parametrization p);
std::string martingale_csv(const MartingaleReport& rep);

nlohmann::json to_json(const GrowthClassification& g);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const SolverReport& r);
nlohmann::json to_json(const JumpPath& p);
nlohmann::json to_json(const MartingaleReport& r);

/// Writes `text` to dir/name, creating dir; throws ConfigError on failure.
void write_file(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace hjmm
