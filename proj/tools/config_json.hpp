#pragma once

#include "json.hpp"

#include "hausloss/metrics.hpp"
#include "hausloss/studies.hpp"

namespace hausloss {

using nlohmann::json;

// Readers start from the defaults already held by the target and only
// override keys that are present; unknown keys are rejected.
void to_json(json& j, const PerturbationConfig& c);
void from_json(const json& j, PerturbationConfig& c);
void to_json(json& j, const SynthConfig& c);
void from_json(const json& j, SynthConfig& c);
void to_json(json& j, const LossParams& c);
void from_json(const json& j, LossParams& c);
void to_json(json& j, const CorrelationConfig& c);
void from_json(const json& j, CorrelationConfig& c);
void to_json(json& j, const OptimizeConfig& c);
void from_json(const json& j, OptimizeConfig& c);

json metric_json(const MetricReport& m);

}  // namespace hausloss
