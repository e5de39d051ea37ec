#include "pitcal/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include "pitcal/nonparametric.hpp"
#include "pitcal/parametric.hpp"

namespace pitcal {

std::unique_ptr<PitModel> load_pit_model(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "parametric")
        return std::make_unique<ParametricPitModel>(ParametricPitModel::from_json(j));
    if (kind == "nonparametric")
        return std::make_unique<MonotoneNet>(MonotoneNet::from_json(j));
    throw std::invalid_argument("load_pit_model: unknown model kind '" + kind + "'");
}

std::unique_ptr<PitModel> load_pit_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_pit_model_file: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return load_pit_model(j);
}

void save_pit_model_file(const std::filesystem::path& path, const PitModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_pit_model_file: cannot open " + path.string());
    out << model.to_json().dump(2) << '\n';
}

} // namespace pitcal
