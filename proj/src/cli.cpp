#include "covmech/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "covmech/errors.hpp"
#include "covmech/killing.hpp"
#include "covmech/sampling.hpp"

namespace covmech::cli {

namespace {

constexpr double kControlMargin = 1e3;

double number_at(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

bool bool_at(const Json& j, const std::string& field) {
  if (!j.is_boolean()) throw ConfigError(field, "expected true or false");
  return j.get<bool>();
}

std::string string_at(const Json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError(field, "expected a string");
  return j.get<std::string>();
}

std::uint64_t unsigned_at(const Json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(field, "expected a non-negative integer");
}

Eigen::VectorXd vector_at(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number_at(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<std::string> strings_at(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string_at(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

void require_object(const Json& j, const std::string& field, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!allowed.count(k)) throw ConfigError(field.empty() ? k : field + "." + k, "unknown key");
  }
}

struct Resolved {
  System sys;
  RunConfig cfg;  // params and initial point made explicit
  PhasePoint p0;
  double tau0 = 0.0, tau1 = 0.0;
};

Resolved resolve(const RunConfig& cfg) {
  Resolved r{build_system(cfg.system, cfg.params), cfg, {}, 0.0, 0.0};
  const System& sys = r.sys;
  const int d = sys.dim();
  const int k = sys.charge_dim();
  PhasePoint p = sys.initial;
  if (cfg.initial.x) {
    if (cfg.initial.x->size() != d) throw ConfigError("initial.x", "expected " + std::to_string(d) + " coordinates");
    p.x = *cfg.initial.x;
  }
  if (!sys.hamiltonian.ctx.chart.in_domain(p.x)) throw ConfigError("initial.x", "point outside the chart domain");
  if (cfg.initial.pi && cfg.initial.v) throw ConfigError("initial", "give either pi or v, not both");
  if (cfg.initial.pi) {
    if (cfg.initial.pi->size() != d) throw ConfigError("initial.pi", "expected " + std::to_string(d) + " momenta");
    p.pi = *cfg.initial.pi;
  } else if (cfg.initial.v) {
    if (cfg.initial.v->size() != d) throw ConfigError("initial.v", "expected " + std::to_string(d) + " velocities");
    p.pi = momentum_from_velocity(sys.hamiltonian, p.x, *cfg.initial.v);
  }
  if (cfg.initial.t) {
    if (cfg.initial.t->size() != k) throw ConfigError("initial.t", "expected " + std::to_string(k) + " charges");
    p.t = *cfg.initial.t;
  }
  r.p0 = p;
  r.tau0 = cfg.tau0.value_or(0.0);
  r.tau1 = cfg.tau1.value_or(r.tau0 + sys.span);
  r.cfg.params = sys.params;
  r.cfg.initial = InitialSpec{p.x, p.pi, std::nullopt, p.t};
  r.cfg.tau0 = r.tau0;
  r.cfg.tau1 = r.tau1;
  return r;
}

std::vector<Observable> resolve_observables(const System& sys, const std::vector<std::string>& names,
                                            const std::string& field) {
  std::vector<Observable> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    try {
      out.push_back(sys.observable(names[i]));
    } catch (const UnknownName& e) {
      throw ConfigError(field + "[" + std::to_string(i) + "]", e.what());
    } catch (const DetunedParameters& e) {
      throw ConfigError(field + "[" + std::to_string(i) + "]", e.what());
    }
  }
  return out;
}

Json base_report(const std::string& command, const Resolved& r) {
  // The output directory is left out so that reports do not depend on where they are written.
  Json cfg = r.cfg.to_json();
  cfg["output"].erase("dir");
  return Json{{"command", command}, {"system", r.sys.name}, {"config", cfg}};
}

std::string verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- config

RunConfig RunConfig::from_json(const Json& j) {
  require_object(j, "", {"system", "params", "initial", "integrator", "span", "monitors", "observables", "seed",
                         "points", "output", "negative_controls"});
  RunConfig c;
  if (!j.contains("system")) throw ConfigError("system", "missing");
  c.system = string_at(j["system"], "system");
  const auto names = system_names();
  if (std::find(names.begin(), names.end(), c.system) == names.end())
    throw ConfigError("system", "unknown system '" + c.system + "'");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("params", "expected an object of numbers");
    for (const auto& [k, v] : j["params"].items()) c.params[k] = number_at(v, "params." + k);
  }
  if (j.contains("initial")) {
    const Json& in = j["initial"];
    require_object(in, "initial", {"x", "pi", "v", "t"});
    if (in.contains("x")) c.initial.x = vector_at(in["x"], "initial.x");
    if (in.contains("pi")) c.initial.pi = vector_at(in["pi"], "initial.pi");
    if (in.contains("v")) c.initial.v = vector_at(in["v"], "initial.v");
    if (in.contains("t")) c.initial.t = vector_at(in["t"], "initial.t");
  }
  if (j.contains("integrator")) {
    const Json& in = j["integrator"];
    require_object(in, "integrator",
                   {"method", "step", "rel_tol", "abs_tol", "max_steps", "domain_margin", "record_every"});
    if (in.contains("method")) {
      try {
        c.integrator.method = integrator_method_from_string(string_at(in["method"], "integrator.method"));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError("integrator.method", e.what());
      }
    }
    if (in.contains("step")) c.integrator.step = number_at(in["step"], "integrator.step");
    if (in.contains("rel_tol")) c.integrator.rel_tol = number_at(in["rel_tol"], "integrator.rel_tol");
    if (in.contains("abs_tol")) c.integrator.abs_tol = number_at(in["abs_tol"], "integrator.abs_tol");
    if (in.contains("max_steps"))
      c.integrator.max_steps = static_cast<long>(unsigned_at(in["max_steps"], "integrator.max_steps"));
    if (in.contains("domain_margin"))
      c.integrator.domain_margin = number_at(in["domain_margin"], "integrator.domain_margin");
    if (in.contains("record_every"))
      c.integrator.record_every = static_cast<long>(unsigned_at(in["record_every"], "integrator.record_every"));
    c.integrator.validate();
  }
  if (j.contains("span")) {
    const Json& s = j["span"];
    if (s.is_number()) {
      c.tau0 = 0.0;
      c.tau1 = s.get<double>();
    } else if (s.is_array() && s.size() == 2) {
      c.tau0 = number_at(s[0], "span[0]");
      c.tau1 = number_at(s[1], "span[1]");
    } else {
      throw ConfigError("span", "expected a number or [tau0, tau1]");
    }
    if (!std::isfinite(*c.tau0) || !std::isfinite(*c.tau1) || !(*c.tau1 > *c.tau0))
      throw ConfigError("span", "must be a finite interval with tau1 > tau0");
  }
  if (j.contains("monitors")) c.monitors = strings_at(j["monitors"], "monitors");
  if (j.contains("observables")) c.observables = strings_at(j["observables"], "observables");
  if (j.contains("seed")) c.seed = unsigned_at(j["seed"], "seed");
  if (j.contains("points")) {
    c.points = static_cast<std::size_t>(unsigned_at(j["points"], "points"));
    if (c.points == 0) throw ConfigError("points", "must be positive");
  }
  if (j.contains("output")) {
    const Json& o = j["output"];
    require_object(o, "output", {"dir", "csv", "stride"});
    if (o.contains("dir")) c.output_dir = string_at(o["dir"], "output.dir");
    if (o.contains("csv")) c.write_csv = bool_at(o["csv"], "output.csv");
    if (o.contains("stride")) {
      c.csv_stride = static_cast<std::size_t>(unsigned_at(o["stride"], "output.stride"));
      if (c.csv_stride == 0) throw ConfigError("output.stride", "must be positive");
    }
  }
  if (j.contains("negative_controls")) c.negative_controls = bool_at(j["negative_controls"], "negative_controls");
  return c;
}

RunConfig RunConfig::parse(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("", "invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                              e.what());
  }
  return from_json(j);
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("", "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

Json RunConfig::to_json() const {
  Json j;
  j["system"] = system;
  j["params"] = Json::object();
  for (const auto& [k, v] : params) j["params"][k] = v;
  Json in = Json::object();
  if (initial.x) in["x"] = covmech::to_json(*initial.x);
  if (initial.pi) in["pi"] = covmech::to_json(*initial.pi);
  if (initial.v) in["v"] = covmech::to_json(*initial.v);
  if (initial.t) in["t"] = covmech::to_json(*initial.t);
  j["initial"] = in;
  j["integrator"] = Json{{"method", std::string(covmech::to_string(integrator.method))},
                         {"step", integrator.step},
                         {"rel_tol", integrator.rel_tol},
                         {"abs_tol", integrator.abs_tol},
                         {"max_steps", integrator.max_steps},
                         {"domain_margin", integrator.domain_margin},
                         {"record_every", integrator.record_every}};
  if (tau0 && tau1) j["span"] = Json::array({*tau0, *tau1});
  j["monitors"] = monitors;
  j["observables"] = observables;
  j["seed"] = seed;
  j["points"] = points;
  j["output"] = Json{{"dir", output_dir}, {"csv", write_csv}, {"stride", csv_stride}};
  j["negative_controls"] = negative_controls;
  return j;
}

void Overrides::apply(RunConfig& cfg) const {
  if (output_dir) cfg.output_dir = *output_dir;
  if (seed) cfg.seed = *seed;
  if (points) {
    if (*points == 0) throw ConfigError("--points", "must be positive");
    cfg.points = *points;
  }
  if (negative_controls) cfg.negative_controls = true;
}

// ---------------------------------------------------------------- simulate

CommandResult cmd_simulate(const RunConfig& cfg) {
  Resolved r = resolve(cfg);
  const System& sys = r.sys;
  std::vector<std::string> names = cfg.monitors.empty() ? sys.constant_names() : cfg.monitors;
  r.cfg.monitors = names;
  const auto monitors = resolve_observables(sys, names, "monitors");
  const Trajectory traj = integrate(sys.hamiltonian, r.p0, cfg.integrator, r.tau0, r.tau1, monitors);

  CommandResult out;
  out.report_name = "simulate.json";
  out.report = base_report("simulate", r);
  out.report["status"] = std::string(to_string(traj.status));
  out.report["message"] = traj.message;
  out.report["accepted_steps"] = traj.accepted;
  out.report["rejected_steps"] = traj.rejected;
  out.report["samples"] = traj.points.size();
  out.report["final_tau"] = traj.tau.empty() ? r.tau0 : traj.tau.back();
  out.report["final_point"] = traj.points.empty() ? Json() : to_json(traj.points.back());
  Json drift = Json::array();
  bool ok = true;
  for (const auto& m : traj.monitors) {
    Json e = to_json(m);
    const bool constant = sys.find_constant(m.name) != nullptr;
    e["registered_constant"] = constant;
    if (constant) {
      const bool pass = m.max_relative() <= sys.tol.drift;
      e["tolerance"] = sys.tol.drift;
      e["pass"] = pass;
      ok = ok && pass;
      out.messages.push_back(verdict(pass) + " drift " + m.name + " max_rel=" + fmt(m.max_relative()) +
                             " tol=" + fmt(sys.tol.drift));
    } else {
      out.messages.push_back("INFO drift " + m.name + " max_abs=" + fmt(m.max_abs()));
    }
    drift.push_back(std::move(e));
  }
  out.report["drift"] = drift;
  out.report["pass"] = ok;
  if (cfg.write_csv) out.csv = trajectory_csv(traj, sys.hamiltonian.ctx.chart.coordinate_names(), cfg.csv_stride);

  if (traj.status == TrajectoryStatus::DomainStop)
    out.messages.push_back("WARNING domain stop at tau = " + std::to_string(out.report["final_tau"].get<double>()) +
                           ": " + traj.message);
  if (traj.status == TrajectoryStatus::MaxStepsExceeded || traj.status == TrajectoryStatus::NonFiniteState) {
    out.messages.push_back("ERROR " + traj.message);
    out.exit_code = kNumericalFailure;
  } else {
    out.exit_code = ok ? kPass : kCheckFailure;
  }
  return out;
}

// ---------------------------------------------------------------- verify

CommandResult cmd_verify(const RunConfig& cfg) {
  Resolved r = resolve(cfg);
  const System& sys = r.sys;
  const auto sample = sample_points(sys, cfg.points, cfg.seed);
  CommandResult out;
  out.report_name = "verify.json";
  out.report = base_report("verify", r);
  bool ok = true;
  auto note = [&](const std::string& kind, const std::string& name, const SweepResult& s, double tol) {
    const bool pass = s.passes(tol);
    ok = ok && pass;
    out.messages.push_back(verdict(pass) + " " + kind + " " + name + " max_rel=" + fmt(s.max_relative) +
                           " tol=" + fmt(tol));
    return pass;
  };

  Json killing = Json::object();
  for (const auto& f : sys.killing_fields) {
    const auto s = killing_sweep(sys.hamiltonian.ctx.chart, f.field, sample);
    Json e = to_json(s, sys.tol.killing);
    e["rank"] = f.field.rank();
    note("killing", f.name, s, sys.tol.killing);
    killing[f.name] = e;
  }
  out.report["killing"] = killing;

  auto hierarchy_json = [&](const std::vector<RankSweep>& ranks, double tol, bool& all_pass) {
    Json e = Json::object();
    Json list = Json::array();
    int worst_rank = 0;
    double worst = -1.0;
    all_pass = true;
    for (const auto& rs : ranks) {
      Json re = to_json(rs.result, tol);
      re["rank"] = rs.rank;
      list.push_back(re);
      all_pass = all_pass && rs.result.passes(tol);
      if (rs.result.max_relative > worst) {
        worst = rs.result.max_relative;
        worst_rank = rs.rank;
      }
    }
    e["ranks"] = list;
    e["worst_rank"] = worst_rank;
    e["max_relative"] = worst;
    e["tolerance"] = tol;
    e["pass"] = all_pass;
    return e;
  };

  Json hierarchy = Json::object();
  for (const auto& s : sys.series) {
    const auto ranks = hierarchy_sweep(sys.hamiltonian.ctx, s.series, sample, sys.hamiltonian.mass);
    bool pass = true;
    Json e = hierarchy_json(ranks, sys.tol.hierarchy, pass);
    ok = ok && pass;
    out.messages.push_back(verdict(pass) + " hierarchy " + s.name + " worst_rank=" + std::to_string(e["worst_rank"].get<int>()) +
                           " max_rel=" + fmt(e["max_relative"].get<double>()) + " tol=" + fmt(sys.tol.hierarchy));
    hierarchy[s.name] = e;
  }
  out.report["hierarchy"] = hierarchy;

  Json conserved = Json::object();
  for (const auto& c : sys.constants) {
    const auto s = conserved_check(sys.hamiltonian, c, sample);
    note("conserved", c.name(), s, sys.tol.conserved);
    conserved[c.name()] = to_json(s, sys.tol.conserved);
  }
  out.report["conserved"] = conserved;

  Json closure = Json::object();
  for (const auto& [a, b] : sys.closure_pairs) {
    const auto s = closure_check(sys.hamiltonian, sys.observable(a), sys.observable(b), sample);
    note("closure", "{" + a + "," + b + "}", s, sys.tol.closure);
    closure["{" + a + "," + b + "}"] = to_json(s, sys.tol.closure);
  }
  out.report["closure"] = closure;

  if (cfg.negative_controls) {
    Json controls = Json::object();
    for (const auto& nc : sys.negative_controls) {
      Json e;
      e["description"] = nc.description;
      double tol = 0.0, worst = 0.0;
      if (nc.kind == NegativeControl::Kind::Hierarchy && nc.series) {
        tol = sys.tol.hierarchy;
        const auto ranks = hierarchy_sweep(nc.hamiltonian.ctx, *nc.series, sample, nc.hamiltonian.mass);
        bool pass = true;
        e["check"] = "hierarchy";
        e["result"] = hierarchy_json(ranks, tol, pass);
        worst = e["result"]["max_relative"].get<double>();
      } else {
        tol = sys.tol.conserved;
        const auto s = conserved_check(nc.hamiltonian, nc.observable, sample);
        e["check"] = "conserved";
        e["result"] = to_json(s, tol);
        worst = s.max_relative;
      }
      const bool failed_as_expected = worst >= kControlMargin * tol;
      e["required_ratio"] = kControlMargin;
      e["ratio_to_tolerance"] = worst / tol;
      e["failed_as_expected"] = failed_as_expected;
      ok = ok && failed_as_expected;
      out.messages.push_back(std::string(failed_as_expected ? "FAIL (expected)" : "UNEXPECTED PASS") +
                             " negative-control " + nc.name + " max_rel=" + fmt(worst) + " tol=" + fmt(tol));
      controls[nc.name] = e;
    }
    out.report["negative_controls"] = controls;
  }
  out.report["pass"] = ok;
  out.exit_code = ok ? kPass : kCheckFailure;
  return out;
}

// ---------------------------------------------------------------- bracket table

CommandResult cmd_bracket_table(const RunConfig& cfg) {
  Resolved r = resolve(cfg);
  const System& sys = r.sys;
  const std::vector<std::string> names = cfg.observables.empty() ? sys.constant_names() : cfg.observables;
  if (names.size() < 2) throw ConfigError("observables", "bracket-table needs at least two observables");
  r.cfg.observables = names;
  const auto obs = resolve_observables(sys, names, "observables");
  const auto sample = sample_points(sys, cfg.points, cfg.seed);
  const std::size_t n = obs.size();

  std::vector<std::vector<double>> max_abs(n, std::vector<double>(n, 0.0)), max_rel = max_abs;
  double antisymmetry = 0.0;
  for (const auto& p : sample) {
    const LocalFrame frame = local_frame(sys.hamiltonian.ctx, p);
    std::vector<PhaseGradient> grads;
    for (const auto& o : obs) grads.push_back(o.gradient(p));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const ScaledValue b = bracket_from_gradients(frame, p, grads[i], grads[j]);
        max_abs[i][j] = std::max(max_abs[i][j], std::abs(b.value));
        max_rel[i][j] = std::max(max_rel[i][j], b.relative());
        if (j > i) {
          const ScaledValue c = bracket_from_gradients(frame, p, grads[j], grads[i]);
          antisymmetry = std::max(antisymmetry, std::abs(b.value + c.value));
        }
      }
  }
  CommandResult out;
  out.report_name = "bracket_table.json";
  out.report = base_report("bracket-table", r);
  out.report["observables"] = names;
  out.report["max_abs"] = max_abs;
  out.report["max_relative"] = max_rel;
  Json commuting = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(max_rel[i][j] <= sys.tol.conserved);
    commuting.push_back(row);
  }
  out.report["commuting"] = commuting;
  out.report["commuting_tolerance"] = sys.tol.conserved;
  out.report["antisymmetry_defect"] = antisymmetry;
  const bool ok = antisymmetry == 0.0;
  out.report["pass"] = ok;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.messages.push_back("{" + names[i] + "," + names[j] + "} max_abs=" + fmt(max_abs[i][j]) +
                             (max_rel[i][j] <= sys.tol.conserved ? " commuting" : ""));
  out.messages.push_back(verdict(ok) + " antisymmetry defect=" + fmt(antisymmetry));
  out.exit_code = ok ? kPass : kCheckFailure;
  return out;
}

// ---------------------------------------------------------------- driver

int run(const std::string& command, const std::filesystem::path& config_path, const Overrides& overrides,
        std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = RunConfig::load(config_path);
    overrides.apply(cfg);
    CommandResult res;
    if (command == "simulate") {
      res = cmd_simulate(cfg);
    } else if (command == "verify") {
      res = cmd_verify(cfg);
    } else if (command == "bracket-table") {
      res = cmd_bracket_table(cfg);
    } else {
      err << "error: unknown command '" << command << "'\n";
      return kConfigError;
    }
    const std::filesystem::path dir(cfg.output_dir);
    write_text(dir / res.report_name, dump(res.report));
    if (res.csv) write_text(dir / "trajectory.csv", *res.csv);
    for (const auto& m : res.messages) out << m << '\n';
    out << "report: " << (dir / res.report_name).string() << '\n';
    return res.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnknownName& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DetunedParameters& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ExtremalParams& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace covmech::cli
