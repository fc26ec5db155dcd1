#include "swarmhydro/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swarmhydro/error.hpp"

namespace swarmhydro {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights); the seventh stage is FSAL.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Recorder {
 public:
  Recorder(double t0, double t_end, double stride, const std::vector<double>& y0)
      : t0_(t0), t_end_(t_end), stride_(stride) {
    samples_.push_back({t0, y0});
    next_ = 1;
  }

  // Linear interpolation, or cubic Hermite when both endpoint slopes are given.
  void push(double ta, const std::vector<double>& ya, double tb, const std::vector<double>& yb,
            const std::vector<double>* fa = nullptr, const std::vector<double>* fb = nullptr) {
    const double slack = 1e-12 * std::max(1.0, std::abs(tb));
    for (;;) {
      const double ts = t0_ + static_cast<double>(next_) * stride_;
      if (ts > t_end_ + slack || ts > tb + slack) break;
      if (std::abs(ts - tb) <= slack) {
        samples_.push_back({tb, yb});
      } else {
        const double h = tb - ta;
        const double w = (ts - ta) / h;
        std::vector<double> y(ya.size());
        if (fa && fb) {
          const double h00 = (1.0 + 2.0 * w) * (1.0 - w) * (1.0 - w);
          const double h10 = w * (1.0 - w) * (1.0 - w);
          const double h01 = w * w * (3.0 - 2.0 * w);
          const double h11 = w * w * (w - 1.0);
          for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = h00 * ya[i] + h * h10 * (*fa)[i] + h01 * yb[i] + h * h11 * (*fb)[i];
          }
        } else {
          for (std::size_t i = 0; i < y.size(); ++i) y[i] = (1.0 - w) * ya[i] + w * yb[i];
        }
        samples_.push_back({ts, std::move(y)});
      }
      ++next_;
    }
  }

  std::vector<Sample> finish(double t_last, const std::vector<double>& y_last) {
    if (t_last > samples_.back().t + 1e-12 * std::max(1.0, std::abs(t_last))) {
      samples_.push_back({t_last, y_last});
    }
    return std::move(samples_);
  }

 private:
  double t0_, t_end_, stride_;
  std::size_t next_ = 0;
  std::vector<Sample> samples_;
};

bool fires(const MonitorFn& monitor, double t, const std::vector<double>& y) {
  return monitor && monitor(t, std::span<const double>(y));
}

}  // namespace

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.output_stride > 0.0)) fail(ErrorCode::ValidationError, "output_stride must be > 0");
  if (!(cfg.event_tol >= 0.0)) fail(ErrorCode::ValidationError, "event_tol must be >= 0");
  if (const auto* m = std::get_if<Rk4Fixed>(&cfg.method)) {
    if (!(m->dt > 0.0)) fail(ErrorCode::ValidationError, "dt must be > 0");
  } else {
    const auto& a = std::get<Rk45Adaptive>(cfg.method);
    if (!(a.rtol > 0.0) || !(a.atol > 0.0)) {
      fail(ErrorCode::ValidationError, "rtol and atol must be > 0");
    }
    if (!(a.dt_init > 0.0) || !(a.dt_min > 0.0) || !(a.dt_min <= a.dt_max)) {
      fail(ErrorCode::ValidationError, "need dt_init > 0 and 0 < dt_min <= dt_max");
    }
  }
}

const char* to_string(Termination termination) noexcept {
  switch (termination) {
    case Termination::ReachedEnd: return "ReachedEnd";
    case Termination::MonitorStop: return "MonitorStop";
    case Termination::DtUnderflow: return "DtUnderflow";
  }
  return "Unknown";
}

void step_rk4(const RhsFn& rhs, double t, std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  rhs(t + 0.5 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  rhs(t + 0.5 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  rhs(t + dt, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

IntegrationResult integrate_fixed(const RhsFn& rhs, std::vector<double> y0, double t0, double t_end,
                                  const Rk4Fixed& method, const IntegratorConfig& cfg,
                                  const MonitorFn& monitor) {
  validate(cfg);
  Recorder recorder(t0, t_end, cfg.output_stride, y0);
  IntegrationResult result;
  double t = t0;
  std::vector<double> y = std::move(y0);
  const auto steps =
      static_cast<std::size_t>(std::ceil((t_end - t0) / method.dt - 1e-9));

  for (std::size_t s = 0; s < steps; ++s) {
    const double tb = (s + 1 == steps) ? t_end : t0 + static_cast<double>(s + 1) * method.dt;
    std::vector<double> trial = y;
    step_rk4(rhs, t, trial, tb - t);
    if (!fires(monitor, tb, trial)) {
      recorder.push(t, y, tb, trial);
      t = tb;
      y = std::move(trial);
      ++result.accepted;
      continue;
    }
    double bad = tb;
    ++result.rejected;
    while (cfg.event_tol > 0.0 && bad - t > cfg.event_tol) {
      const double h = 0.5 * (bad - t);
      trial = y;
      step_rk4(rhs, t, trial, h);
      if (fires(monitor, t + h, trial)) {
        bad = t + h;
        ++result.rejected;
      } else {
        recorder.push(t, y, t + h, trial);
        t += h;
        y = std::move(trial);
        ++result.accepted;
      }
    }
    result.termination = Termination::MonitorStop;
    result.t_last_good = t;
    result.t_first_bad = bad;
    result.samples = recorder.finish(t, y);
    result.y_last = std::move(y);
    return result;
  }
  result.termination = Termination::ReachedEnd;
  result.t_last_good = t;
  result.t_first_bad = t;
  result.samples = recorder.finish(t, y);
  result.y_last = std::move(y);
  return result;
}

IntegrationResult integrate_adaptive(const RhsFn& rhs, std::vector<double> y0, double t0,
                                     double t_end, const Rk45Adaptive& m,
                                     const IntegratorConfig& cfg, const MonitorFn& monitor) {
  validate(cfg);
  const std::size_t n = y0.size();
  Recorder recorder(t0, t_end, cfg.output_stride, y0);
  IntegrationResult result;

  double t = t0;
  std::vector<double> y = std::move(y0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);
  rhs(t, y, k1);

  double dt = std::min({m.dt_init, m.dt_max, t_end - t0});
  double bad = std::numeric_limits<double>::infinity();
  bool event = false;

  auto finish = [&](Termination why, double first_bad) {
    result.termination = why;
    result.t_last_good = t;
    result.t_first_bad = first_bad;
    result.samples = recorder.finish(t, y);
    result.y_last = y;
    return std::move(result);
  };

  while (t < t_end) {
    double h = std::min(dt, t_end - t);
    if (event) {
      if (bad - t <= cfg.event_tol) return finish(Termination::MonitorStop, bad);
      h = std::min(h, 0.5 * (bad - t));
    }
    if (t + h == t) return finish(Termination::DtUnderflow, t + dt);

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    }
    rhs(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    rhs(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    rhs(t + h, tmp, k6);
    for (std::size_t i = 0; i < n; ++i) {
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    rhs(t + h, y_new, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = m.atol + m.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = std::abs(e) / scale;
      if (!std::isfinite(r) || !std::isfinite(y_new[i])) {
        err = std::numeric_limits<double>::infinity();
        break;
      }
      err = std::max(err, r);
    }

    if (err <= 1.0) {
      const double t_new = (h == t_end - t) ? t_end : t + h;
      if (fires(monitor, t_new, y_new)) {
        ++result.rejected;
        bad = t_new;
        event = true;
        if (cfg.event_tol <= 0.0) return finish(Termination::MonitorStop, bad);
        dt = 0.5 * h;
        continue;
      }
      recorder.push(t, y, t_new, y_new, &k1, &k7);
      t = t_new;
      std::swap(y, y_new);
      std::swap(k1, k7);
      ++result.accepted;
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      dt = std::min(h * factor, m.dt_max);
    } else {
      ++result.rejected;
      dt = 0.5 * h;
      if (dt < m.dt_min) return finish(Termination::DtUnderflow, t + h);
    }
  }
  return finish(Termination::ReachedEnd, t);
}

IntegrationResult integrate(const RhsFn& rhs, std::vector<double> y0, double t0, double t_end,
                            const IntegratorConfig& cfg, const MonitorFn& monitor) {
  if (!(t_end > t0)) fail(ErrorCode::ValidationError, "t_end must exceed the start time");
  return std::visit(
      [&](const auto& method) -> IntegrationResult {
        using M = std::decay_t<decltype(method)>;
        if constexpr (std::is_same_v<M, Rk4Fixed>) {
          return integrate_fixed(rhs, std::move(y0), t0, t_end, method, cfg, monitor);
        } else {
          return integrate_adaptive(rhs, std::move(y0), t0, t_end, method, cfg, monitor);
        }
      },
      cfg.method);
}

}  // namespace swarmhydro
