#pragma once

#include <filesystem>
#include <string>

#include "psmaudit/corpus.hpp"
#include "psmaudit/mia.hpp"
#include "psmaudit/patterns.hpp"
#include "psmaudit/steal.hpp"
#include "psmaudit/strength.hpp"
#include "psmaudit/targeted.hpp"

// JSON renderings of the report structs. Output is deterministic: fixed key
// order, no timestamps. Each returns a JSON object string.
namespace psmaudit {

std::string to_json(const AttackReport& r);
std::string to_json(const ThresholdAttack& a);
std::string to_json(const StealReport& r, bool include_passwords = false);
std::string to_json(const FitReport& r);
std::string to_json(const SimulationReport& r, bool include_outcomes = false);
std::string to_json(const PatternStats& s);
std::string to_json(const OverlapResult& r);
std::string to_json(const std::vector<UpperBoundPoint>& points);
std::string to_json(const std::vector<FrequencyBucket>& buckets);

// Threshold attack saved by mia-calibrate and read back by mia-attack/steal.
ThresholdAttack threshold_attack_from_json(const std::string& json);

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace psmaudit
