#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "covmech/dynamics.hpp"
#include "covmech/killing.hpp"

namespace covmech {

using Json = nlohmann::json;

Json to_json(const Eigen::VectorXd& v);
Json to_json(const PhasePoint& p);
Json to_json(const SweepResult& r, double tolerance);
Json to_json(const MonitorDrift& m);

// Deterministic pretty-printed JSON (sorted keys, trailing newline).
std::string dump(const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

// One row per `stride`-th sample: tau, coordinates, momenta, charges, monitor values.
// The last sample is always written.
std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& coordinate_names,
                           std::size_t stride = 1);

}  // namespace covmech
