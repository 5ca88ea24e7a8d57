#include "covmech/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covmech/errors.hpp"

namespace covmech {

double hamiltonian_eval(const HamiltonianSpec& ham, const PhasePoint& p) {
  ham.ctx.validate(p);
  const Eigen::MatrixXd ginv = inverse_metric_at(ham.ctx.chart, p.x);
  double h = 0.5 / ham.mass * p.pi.dot(ginv * p.pi);
  if (ham.ctx.scalar_potential) h += ham.ctx.scalar_potential->value(p.x);
  return h;
}

PhaseGradient hamiltonian_gradient(const HamiltonianSpec& ham, const PhasePoint& p) {
  ham.ctx.validate(p);
  const auto& chart = ham.ctx.chart;
  const Eigen::MatrixXd ginv = inverse_metric_at(chart, p.x);
  const auto dg = chart.metric_partials(p.x);
  const Eigen::VectorXd u = ginv * p.pi;
  PhaseGradient grad;
  grad.value = 0.5 / ham.mass * p.pi.dot(u);
  grad.dpi = u / ham.mass;
  grad.dx.resize(chart.dim());
  for (int l = 0; l < chart.dim(); ++l) grad.dx[l] = -0.5 / ham.mass * u.dot(dg[static_cast<std::size_t>(l)] * u);
  if (ham.ctx.scalar_potential) {
    grad.value += ham.ctx.scalar_potential->value(p.x);
    grad.dx += ham.ctx.scalar_potential->gradient(p.x);
  }
  grad.dt = Eigen::VectorXd::Zero(ham.ctx.charge_dim());
  return grad;
}

Observable hamiltonian_observable(const HamiltonianSpec& ham, std::string name) {
  return Observable::from_gradient(std::move(name), ham.ctx.dim(), ham.ctx.charge_dim(),
                                   [ham](const PhasePoint& p) { return hamiltonian_gradient(ham, p); });
}

Eigen::VectorXd PhaseTangent::packed() const {
  Eigen::VectorXd out(dx.size() + dpi.size() + dt.size());
  out << dx, dpi, dt;
  return out;
}

PhaseTangent equations_of_motion(const HamiltonianSpec& ham, const PhasePoint& p) {
  const LocalFrame frame = local_frame(ham.ctx, p);
  const PhaseGradient h = hamiltonian_gradient(ham, p);
  const int d = ham.ctx.dim();
  const int k = ham.ctx.charge_dim();
  const int n = 2 * d + k;
  Eigen::VectorXd rate(n);
  for (int slot = 0; slot < n; ++slot) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    unit[slot] = 1.0;
    rate[slot] = bracket_from_gradients(frame, p, unpack_gradient(0.0, unit, d, k), h).value;
  }
  return {rate.segment(0, d), rate.segment(d, d), rate.segment(2 * d, k)};
}

PhaseTangent equations_of_motion_force_law(const HamiltonianSpec& ham, const PhasePoint& p) {
  ham.ctx.validate(p);
  const auto& chart = ham.ctx.chart;
  const int d = chart.dim();
  const double m = ham.mass;
  const Eigen::MatrixXd g = chart.metric(p.x);
  const Eigen::MatrixXd ginv = invert_metric(g, chart.singularity_tolerance());
  const auto dg = chart.metric_partials(p.x);
  const DenseTensor gamma = christoffel_from(ginv, dg);

  const Eigen::VectorXd v = ginv * p.pi / m;

  Eigen::MatrixXd force = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd tdot = Eigen::VectorXd::Zero(p.t.size());
  if (const auto* ab = std::get_if<AbelianBackground>(&ham.ctx.background)) {
    force = ab->charge() * field_strength_abelian(*ab, chart, p.x);
  } else if (const auto* na = std::get_if<NonAbelianBackground>(&ham.ctx.background)) {
    const auto fa = field_strength_nonabelian(*na, chart, p.x);
    for (int a = 0; a < na->algebra_dim(); ++a) force += na->coupling() * p.t[a] * fa[static_cast<std::size_t>(a)];
    const Eigen::MatrixXd amu = na->potential(p.x);
    const auto& f = na->structure();
    const Eigen::VectorXd av = amu * v;  // A^b_μ ẋ^μ
    for (int a = 0; a < na->algebra_dim(); ++a) {
      double s = 0.0;
      for (int b = 0; b < na->algebra_dim(); ++b)
        for (int c = 0; c < na->algebra_dim(); ++c) s += f(a, b, c) * p.t[c] * av[b];
      tdot[a] = -na->coupling() * s;
    }
  }

  Eigen::VectorXd rhs = force * v / m;
  if (ham.ctx.scalar_potential) rhs -= ham.ctx.scalar_potential->gradient(p.x) / m;
  Eigen::VectorXd accel = ginv * rhs;
  for (int n = 0; n < d; ++n) {
    double s = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) s += gamma({a, b, n}) * v[a] * v[b];
    accel[n] -= s;
  }

  Eigen::VectorXd pidot = m * (g * accel);
  for (int mu = 0; mu < d; ++mu) {
    double s = 0.0;
    for (int l = 0; l < d; ++l) s += v[l] * (dg[static_cast<std::size_t>(l)].row(mu).dot(v));
    pidot[mu] += m * s;
  }
  return {v, pidot, tdot};
}

Eigen::VectorXd momentum_from_velocity(const HamiltonianSpec& ham, const Coords& x, const Eigen::VectorXd& v) {
  return ham.mass * (ham.ctx.chart.metric(x) * v);
}

Eigen::VectorXd velocity_from_momentum(const HamiltonianSpec& ham, const Coords& x, const Eigen::VectorXd& pi) {
  return inverse_metric_at(ham.ctx.chart, x) * pi / ham.mass;
}

std::string_view to_string(IntegratorMethod m) {
  return m == IntegratorMethod::Rk4Fixed ? "rk4-fixed" : "rk45-adaptive";
}

IntegratorMethod integrator_method_from_string(std::string_view s) {
  if (s == "rk4-fixed" || s == "rk4") return IntegratorMethod::Rk4Fixed;
  if (s == "rk45-adaptive" || s == "rk45") return IntegratorMethod::Rk45Adaptive;
  throw ConfigError("integrator.method", "unknown method '" + std::string(s) + "' (expected rk4-fixed or rk45-adaptive)");
}

void IntegratorConfig::validate() const {
  if (method == IntegratorMethod::Rk4Fixed && !(step > 0.0)) throw ConfigError("integrator.step", "must be positive");
  if (!(rel_tol > 0.0)) throw ConfigError("integrator.rel_tol", "must be positive");
  if (!(abs_tol > 0.0)) throw ConfigError("integrator.abs_tol", "must be positive");
  if (max_steps <= 0) throw ConfigError("integrator.max_steps", "must be positive");
  if (domain_margin < 0.0) throw ConfigError("integrator.domain_margin", "must be non-negative");
  if (record_every <= 0) throw ConfigError("integrator.record_every", "must be positive");
}

std::string_view to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Completed: return "completed";
    case TrajectoryStatus::DomainStop: return "domain-stop";
    case TrajectoryStatus::MaxStepsExceeded: return "max-steps-exceeded";
    case TrajectoryStatus::NonFiniteState: return "non-finite-state";
  }
  return "unknown";
}

double MonitorDrift::max_abs() const {
  double m = 0.0;
  for (double v : drift) m = std::max(m, std::abs(v));
  return m;
}

double MonitorDrift::max_relative() const {
  const double scale = std::abs(initial);
  return scale > 0.0 ? max_abs() / scale : max_abs();
}

void Trajectory::throw_if_failed() const {
  if (status == TrajectoryStatus::MaxStepsExceeded) throw MaxStepsExceeded(message);
  if (status == TrajectoryStatus::NonFiniteState) throw NonFiniteState(message);
}

namespace {

using State = Eigen::VectorXd;

bool all_finite(const State& y) { return y.allFinite(); }

class Integrator {
 public:
  Integrator(const HamiltonianSpec& ham, const IntegratorConfig& cfg, const std::vector<Observable>& monitors,
             int dim, int charge_dim)
      : spec_(ham), cfg_(cfg), monitors_(monitors), dim_(dim), charge_dim_(charge_dim) {}

  State rhs(const State& y) const {
    return equations_of_motion(spec_, PhasePoint::unpack(as_span(y), dim_, charge_dim_)).packed();
  }

  PhasePoint point(const State& y) const { return PhasePoint::unpack(as_span(y), dim_, charge_dim_); }

  void start(Trajectory& traj, double tau, const State& y) {
    const PhasePoint p = point(y);
    for (const auto& m : monitors_) traj.monitors.push_back({m.name(), m(p), {}});
    record(traj, tau, y);
  }

  void record(Trajectory& traj, double tau, const State& y) {
    const PhasePoint p = point(y);
    traj.tau.push_back(tau);
    for (std::size_t i = 0; i < monitors_.size(); ++i) {
      traj.monitors[i].drift.push_back(monitors_[i](p) - traj.monitors[i].initial);
    }
    traj.points.push_back(p);
  }

  // Returns false when the state must not be continued from.
  bool check_domain(Trajectory& traj, double tau, const State& y) const {
    const PhasePoint p = point(y);
    if (!spec_.ctx.chart.in_domain(p.x)) {
      traj.status = TrajectoryStatus::DomainStop;
      traj.message = "left the chart domain near tau = " + format(tau);
      return false;
    }
    return true;
  }

  bool near_boundary(const State& y) const {
    return spec_.ctx.chart.boundary_distance(point(y).x) < cfg_.domain_margin;
  }

  static std::string format(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }

 private:
  const HamiltonianSpec& spec_;
  const IntegratorConfig& cfg_;
  const std::vector<Observable>& monitors_;
  int dim_;
  int charge_dim_;
};

void run_rk4(Integrator& in, const IntegratorConfig& cfg, Trajectory& traj, double tau0, double tau1, State y) {
  const long n = std::max(1L, std::lround((tau1 - tau0) / cfg.step));
  const double h = (tau1 - tau0) / static_cast<double>(n);
  if (n > cfg.max_steps) {
    traj.status = TrajectoryStatus::MaxStepsExceeded;
    traj.message = "fixed-step run needs " + std::to_string(n) + " steps, max_steps = " + std::to_string(cfg.max_steps);
    return;
  }
  for (long i = 1; i <= n; ++i) {
    const double tau = tau0 + static_cast<double>(i - 1) * h;
    State next;
    try {
      const State k1 = in.rhs(y);
      const State k2 = in.rhs(y + 0.5 * h * k1);
      const State k3 = in.rhs(y + 0.5 * h * k2);
      const State k4 = in.rhs(y + h * k3);
      next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const OutOfDomain& e) {
      traj.status = TrajectoryStatus::DomainStop;
      traj.message = std::string("stage left the domain at tau = ") + Integrator::format(tau) + ": " + e.what();
      return;
    } catch (const SingularMetric& e) {
      traj.status = TrajectoryStatus::DomainStop;
      traj.message = std::string("singular metric at tau = ") + Integrator::format(tau) + ": " + e.what();
      return;
    }
    if (!all_finite(next)) {
      traj.status = TrajectoryStatus::NonFiniteState;
      traj.message = "non-finite state at tau = " + Integrator::format(tau + h);
      return;
    }
    const double tau_next = (i == n) ? tau1 : tau0 + static_cast<double>(i) * h;
    if (!in.check_domain(traj, tau_next, next)) return;
    y = next;
    ++traj.accepted;
    const bool stop = in.near_boundary(y);
    if (i == n || stop || i % cfg.record_every == 0) in.record(traj, tau_next, y);
    if (stop) {
      traj.status = TrajectoryStatus::DomainStop;
      traj.message = "within domain_margin of an exclusion zone at tau = " + Integrator::format(tau_next);
      return;
    }
  }
}

// Dormand–Prince 5(4) tableau. The flow is autonomous, so the nodes c_i are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

double error_norm(const State& err, const State& y0, const State& y1, const IntegratorConfig& cfg) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    s += (err[i] / sc) * (err[i] / sc);
  }
  return std::sqrt(s / static_cast<double>(err.size()));
}

double initial_step(const Integrator& in, const IntegratorConfig& cfg, const State& y, const State& f0, double span) {
  State sc(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) sc[i] = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
  const double d0 = (y.array() / sc.array()).matrix().norm() / std::sqrt(static_cast<double>(y.size()));
  const double d1 = (f0.array() / sc.array()).matrix().norm() / std::sqrt(static_cast<double>(y.size()));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  double h1 = h0;
  try {
    const State f1 = in.rhs(y + h0 * f0);
    const double d2 = ((f1 - f0).array() / sc.array()).matrix().norm() / std::sqrt(static_cast<double>(y.size())) / h0;
    const double dm = std::max(d1, d2);
    h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  } catch (const Error&) {
    h1 = h0 * 0.1;
  }
  return std::min({100.0 * h0, h1, span});
}

void run_rk45(Integrator& in, const IntegratorConfig& cfg, Trajectory& traj, double tau0, double tau1, State y) {
  double tau = tau0;
  State k1 = in.rhs(y);
  const double span = tau1 - tau0;
  double h = cfg.step > 0.0 ? std::min(cfg.step, span) : initial_step(in, cfg, y, k1, span);
  long attempts = 0;
  bool last_rejected = false;
  while (tau < tau1) {
    if (++attempts > cfg.max_steps) {
      traj.status = TrajectoryStatus::MaxStepsExceeded;
      traj.message = "exceeded max_steps = " + std::to_string(cfg.max_steps) + " at tau = " + Integrator::format(tau);
      return;
    }
    const bool final_step = tau + h >= tau1;
    if (final_step) h = tau1 - tau;
    if (h <= std::abs(tau) * 1e-15 || h <= 0.0) {
      traj.status = TrajectoryStatus::DomainStop;
      traj.message = "step size underflow at tau = " + Integrator::format(tau);
      return;
    }
    State y_next, k7;
    double err = std::numeric_limits<double>::infinity();
    bool stage_failed = false;
    try {
      const State k2 = in.rhs(y + h * (a21 * k1));
      const State k3 = in.rhs(y + h * (a31 * k1 + a32 * k2));
      const State k4 = in.rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const State k5 = in.rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const State k6 = in.rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y_next = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      k7 = in.rhs(y_next);
      const State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      err = error_norm(e, y, y_next, cfg);
    } catch (const OutOfDomain&) {
      stage_failed = true;
    } catch (const SingularMetric&) {
      stage_failed = true;
    }
    if (stage_failed || !std::isfinite(err)) {
      ++traj.rejected;
      h *= 0.25;
      last_rejected = true;
      if (!stage_failed && h < 1e-300) {
        traj.status = TrajectoryStatus::NonFiniteState;
        traj.message = "non-finite state at tau = " + Integrator::format(tau);
        return;
      }
      continue;
    }
    if (err > 1.0) {
      ++traj.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
      continue;
    }
    const double tau_next = final_step ? tau1 : tau + h;
    if (!all_finite(y_next)) {
      traj.status = TrajectoryStatus::NonFiniteState;
      traj.message = "non-finite state at tau = " + Integrator::format(tau_next);
      return;
    }
    if (!in.check_domain(traj, tau_next, y_next)) return;
    ++traj.accepted;
    tau = tau_next;
    y = y_next;
    k1 = k7;
    const bool stop = in.near_boundary(y);
    if (final_step || stop || traj.accepted % cfg.record_every == 0) in.record(traj, tau, y);
    if (stop) {
      traj.status = TrajectoryStatus::DomainStop;
      traj.message = "within domain_margin of an exclusion zone at tau = " + Integrator::format(tau);
      return;
    }
    double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (last_rejected) factor = std::min(factor, 1.0);
    last_rejected = false;
    h *= factor;
  }
}

}  // namespace

Trajectory integrate(const HamiltonianSpec& ham, const PhasePoint& p0, const IntegratorConfig& cfg, double tau0,
                     double tau1, const std::vector<Observable>& monitors) {
  cfg.validate();
  if (!(tau1 > tau0) || !std::isfinite(tau0) || !std::isfinite(tau1)) {
    throw ConfigError("span", "integration span must be finite with tau1 > tau0");
  }
  ham.ctx.validate(p0);
  Integrator in(ham, cfg, monitors, ham.ctx.dim(), ham.ctx.charge_dim());
  Trajectory traj;
  const State y0 = p0.packed();
  in.start(traj, tau0, y0);
  if (in.near_boundary(y0)) {
    traj.status = TrajectoryStatus::DomainStop;
    traj.message = "initial point is within domain_margin of an exclusion zone";
    return traj;
  }
  if (cfg.method == IntegratorMethod::Rk4Fixed) {
    run_rk4(in, cfg, traj, tau0, tau1, y0);
  } else {
    run_rk45(in, cfg, traj, tau0, tau1, y0);
  }
  return traj;
}

}  // namespace covmech
