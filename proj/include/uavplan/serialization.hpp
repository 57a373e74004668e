#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "uavplan/active_planner.hpp"
#include "uavplan/environment.hpp"
#include "uavplan/oracle.hpp"
#include "uavplan/ql_baseline.hpp"
#include "uavplan/world_model.hpp"

namespace uavplan {

using nlohmann::json;

void to_json(json& j, const ChannelParams& c);
void from_json(const json& j, ChannelParams& c);
void to_json(json& j, const MissionConfig& m);
void from_json(const json& j, MissionConfig& m);
void to_json(json& j, const Hotspot& h);
void from_json(const json& j, Hotspot& h);
void to_json(json& j, const Instance& inst);
void from_json(const json& j, Instance& inst);
void to_json(json& j, const ObjectiveWeights& w);
void from_json(const json& j, ObjectiveWeights& w);
void to_json(json& j, const Tour& t);
void from_json(const json& j, Tour& t);
void to_json(json& j, const Word& w);
void from_json(const json& j, Word& w);
void to_json(json& j, const NoiseConfig& n);
void from_json(const json& j, NoiseConfig& n);
void to_json(json& j, const WorldModel& wm);
void from_json(const json& j, WorldModel& wm);
void to_json(json& j, const QTrainConfig& c);
void from_json(const json& j, QTrainConfig& c);
void to_json(json& j, const QTable& q);
void from_json(const json& j, QTable& q);
void to_json(json& j, const PlannerConfig& c);
void from_json(const json& j, PlannerConfig& c);
void to_json(json& j, const GaussianBelief& b);
void to_json(json& j, const PlanResult& r);

/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const json& j);
/// Throws ConfigError when the file is missing or malformed.
json read_json(const std::filesystem::path& path);

}  // namespace uavplan
