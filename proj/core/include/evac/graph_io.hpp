#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "evac/dyngraph.hpp"

namespace evac {

using Json = nlohmann::json;

/// {nodes:[{id,x,y}], edges:[{u,v,length_m,speed_kmh}]}
[[nodiscard]] Json graph_to_json(const CityGraph &graph);
[[nodiscard]] CityGraph graph_from_json(const Json &doc);
[[nodiscard]] CityGraph load_graph(const std::filesystem::path &path);
void save_graph(const CityGraph &graph, const std::filesystem::path &path);

[[nodiscard]] Json scenario_to_json(const ScenarioConfig &scenario);
[[nodiscard]] ScenarioConfig scenario_from_json(const Json &doc);

[[nodiscard]] std::string read_text(const std::filesystem::path &path);
void write_text(const std::filesystem::path &path, const std::string &text);
[[nodiscard]] Json load_json(const std::filesystem::path &path);

} // namespace evac
