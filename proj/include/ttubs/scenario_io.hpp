#pragma once

#include "ttubs/net_model.hpp"
#include "ttubs/schedule.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ttubs {

/// Scenario documents: nodes, links (by node id) and streams with node-path routes.
Scenario parse_scenario_json(std::string_view text);
std::string scenario_to_json(const Scenario& sc);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);

/// Offsets are written in ns and in us; reading uses the ns field.
std::string schedule_to_json(const Scenario& sc, const Schedule& schedule);
Schedule parse_schedule_json(const Scenario& sc, std::string_view text);
Schedule load_schedule(const Scenario& sc, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace ttubs
