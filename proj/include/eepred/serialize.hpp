#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "eepred/datagen.hpp"
#include "eepred/qualifier.hpp"
#include "eepred/sim.hpp"

namespace eepred {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal in fixed notation (never an exponent).
std::string format_double(double value);

// FNV-1a over the compact dump of `doc`, as 16 hex digits.
std::string digest(const Json& doc);

Json to_json(const SystemParams& params);
Json to_json(const SimConfig& config);
Json to_json(const QualifierConfig& config);
Json to_json(const QualifierResult& result);
Json to_json(const RangeTable& ranges);
Json to_json(const GenerationConfig& config);
Json to_json(const Split& split);
Json to_json(const DistributionReport& report);

// Inverse conversions overlay keys present in `doc` on top of `base`, so
// partial documents are valid.
SystemParams system_params_from_json(const Json& doc, SystemParams base = {});
SimConfig sim_config_from_json(const Json& doc, SimConfig base = {});
QualifierConfig qualifier_config_from_json(const Json& doc, QualifierConfig base = {});
RangeTable ranges_from_json(const Json& doc, RangeTable base = default_ranges());
Split split_from_json(const Json& doc);

}  // namespace eepred
