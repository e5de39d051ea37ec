#pragma once

#include <filesystem>
#include <memory>

#include <json.hpp>

#include "pitcal/pit_model.hpp"

namespace pitcal {

/// Dispatch on the "kind" discriminator of the shared model envelope.
std::unique_ptr<PitModel> load_pit_model(const nlohmann::json& j);
std::unique_ptr<PitModel> load_pit_model_file(const std::filesystem::path& path);

void save_pit_model_file(const std::filesystem::path& path, const PitModel& model);

} // namespace pitcal
