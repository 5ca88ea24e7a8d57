#include "covmech/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "covmech/errors.hpp"

namespace covmech {

namespace {

// Shortest round-trip representation, fixed across runs.
std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const PhasePoint& p) { return Json{{"x", to_json(p.x)}, {"pi", to_json(p.pi)}, {"t", to_json(p.t)}}; }

Json to_json(const SweepResult& r, double tolerance) {
  return Json{{"points", r.count},
              {"max_abs", r.max_abs},
              {"mean_abs", r.mean_abs},
              {"max_relative", r.max_relative},
              {"tolerance", tolerance},
              {"worst_index", r.worst_index},
              {"worst_point", to_json(r.worst_point)},
              {"worst_scale", r.worst_scale},
              {"pass", r.passes(tolerance)}};
}

Json to_json(const MonitorDrift& m) {
  return Json{{"name", m.name}, {"initial", m.initial}, {"max_abs_drift", m.max_abs()},
              {"max_relative_drift", m.max_relative()}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& coordinate_names,
                           std::size_t stride) {
  if (stride == 0) stride = 1;
  std::ostringstream os;
  os << "tau";
  for (const auto& n : coordinate_names) os << ',' << n;
  for (const auto& n : coordinate_names) os << ",pi_" << n;
  const int k = traj.points.empty() ? 0 : traj.points.front().charge_dim();
  for (int a = 0; a < k; ++a) os << ",t" << a;
  for (const auto& m : traj.monitors) os << ',' << m.name;
  os << '\n';
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    if (i % stride != 0 && i + 1 != traj.points.size()) continue;
    const auto& p = traj.points[i];
    os << number(traj.tau[i]);
    for (Eigen::Index j = 0; j < p.x.size(); ++j) os << ',' << number(p.x[j]);
    for (Eigen::Index j = 0; j < p.pi.size(); ++j) os << ',' << number(p.pi[j]);
    for (Eigen::Index j = 0; j < p.t.size(); ++j) os << ',' << number(p.t[j]);
    for (const auto& m : traj.monitors) os << ',' << number(m.initial + m.drift[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace covmech
