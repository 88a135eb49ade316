#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mrfv/core.hpp"

namespace mrfv {

/// A reaction-diffusion(-convection) problem plugged into the solver:
/// per-component diffusivities, an optional analytic velocity field, a
/// pointwise source and the initial condition.
struct Model {
  std::string name;
  int ncomp = 1;
  std::array<double, kMaxComp> diffusion{};
  std::function<void(double t, const std::array<double, kMaxDim>& x, const double* u,
                     double* s)>
      source;
  /// Null when the model has no convection.
  std::function<void(double t, const std::array<double, kMaxDim>& x, double* v)> velocity;
  /// h_fine is the finest cell width, used to smooth discontinuous seeds.
  std::function<void(const std::array<double, kMaxDim>& x, double h_fine, double* u)> initial;
};

struct BzParams {
  double eps = 1e-2;
  double mu = 1e-5;
  double f = 1.6;
  double q = 2e-3;
  double d_a = 2.5e-3;
  double d_b = 2.5e-3;
  double d_c = 1.5e-3;
};

inline void bz_source(double a, double b, double c, const BzParams& p, double* s) {
  s[0] = (-p.q * a - a * b + p.f * c) / p.mu;
  s[1] = (p.q * a - a * b + b * (1.0 - b)) / p.eps;
  s[2] = b - c;
}

/// Unique positive equilibrium of the BZ kinetics: b = c at the positive root
/// of b^2 - (1 - f - q) b - q (1 + f) = 0, with a slaved to f c / (q + b).
/// At the default parameters this point is an unstable node (growth rate
/// ~44), so the kinetics is self-oscillatory: the medium relaxation-cycles
/// with period ~4.3 and neither this point nor the zero state can serve as a
/// long-lived quiescent background.
inline double bz_rest_b(const BzParams& p) {
  const double lin = 1.0 - p.f - p.q;
  return 0.5 * (lin + std::sqrt(lin * lin + 4.0 * p.q * (1.0 + p.f)));
}

/// One period of the spatially homogeneous BZ relaxation oscillation,
/// sampled uniformly in the time elapsed since a b-spike.  tau = 0 is the
/// spike crest (b ~ 0.92); the wake then hardens (a jumps to ~66 once b
/// collapses) and slowly recovers excitability as a and c decay.
class BzCycle {
 public:
  BzCycle(const BzParams& p, double span, int n_samples) : span_(span), samples_(n_samples) {
    const double br = bz_rest_b(p);
    std::array<double, 3> u{p.f * br / (p.q + br), 0.5, br};
    // Run past the second spike so the trajectory has settled on the cycle,
    // then record one window.  Fixed-step RK4 well inside its stability limit
    // for the fastest scale (q + b)/mu.
    const double dt = 1e-6;
    int spikes = 0;
    double prev_b = u[1], prev_db = 0.0;
    for (double t = 0.0; spikes < 2 && t < 20.0; t += dt) {
      rk4(p, u, dt);
      const double db = u[1] - prev_b;
      if (t > 0.01 && prev_db > 0.0 && db <= 0.0 && u[1] > 0.3) ++spikes;
      prev_b = u[1];
      prev_db = db;
    }
    const double stride = span / (n_samples - 1);
    samples_[0] = u;
    for (int k = 1; k < n_samples; ++k) {
      for (double s = 0.0; s < stride - 0.5 * dt; s += dt) rk4(p, u, dt);
      samples_[k] = u;
    }
  }

  double span() const { return span_; }

  /// Linear interpolation of the cycle state at time tau after the spike.
  std::array<double, 3> state(double tau) const {
    const double s = std::clamp(tau, 0.0, span_) / span_ * (samples_.size() - 1);
    const auto k = static_cast<std::size_t>(s);
    if (k + 1 >= samples_.size()) return samples_.back();
    const double w = s - static_cast<double>(k);
    std::array<double, 3> out;
    for (int i = 0; i < 3; ++i) out[i] = (1.0 - w) * samples_[k][i] + w * samples_[k + 1][i];
    return out;
  }

 private:
  static void rk4(const BzParams& p, std::array<double, 3>& u, double dt) {
    auto f = [&p](const std::array<double, 3>& v) {
      std::array<double, 3> s;
      bz_source(v[0], v[1], v[2], p, s.data());
      return s;
    };
    const auto k1 = f(u);
    std::array<double, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = u[i] + 0.5 * dt * k1[i];
    const auto k2 = f(v);
    for (int i = 0; i < 3; ++i) v[i] = u[i] + 0.5 * dt * k2[i];
    const auto k3 = f(v);
    for (int i = 0; i < 3; ++i) v[i] = u[i] + dt * k3[i];
    const auto k4 = f(v);
    for (int i = 0; i < 3; ++i) u[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  }

  double span_;
  std::vector<std::array<double, 3>> samples_;
};

struct IgnitionParams {
  double da = 1.65e7;
  double phi = 34.782608696;
  double chi = 50.0;
  double y_o0 = 0.23;
  double tau = -0.7;
  double tau_a = 8.0;
  double re = 1000.0;
  double sc = 1.0;
  std::array<double, 2> vortex_center{0.0, 0.0};
  double t_f0 = 300.0;  // fuel inlet temperature [K]
  double t_o0 = 1000.0; // oxidizer temperature [K]
};

/// Reaction rate of the reduced diffusion-flame model; the Z equation is
/// source-free.  Throws when 1 + tau*theta hits the singular line.
inline double ignition_rate(double z, double theta, const IgnitionParams& p) {
  const double denom = 1.0 + p.tau * theta;
  if (denom == 0.0) throw SingularityError("ignition source: 1 + tau*theta = 0");
  const double b1 = (1.0 - z) / (p.phi * p.tau) + (z - theta) / p.chi;
  const double b2 = z + (p.tau / p.chi) * (z - theta);
  return p.da * p.phi * p.chi * p.y_o0 * b1 * b2 * std::exp(-p.tau_a / denom);
}

/// Kelvin from reduced temperature: theta = (T - T_O0) / (T_F0 - T_O0).
inline double ignition_temperature(double theta, const IgnitionParams& p) {
  return p.t_o0 + theta * (p.t_f0 - p.t_o0);
}

/// Lamb-Oseen vortex centered at p.vortex_center, counter-clockwise.
/// t must be positive; the runner clamps its frozen evaluation time to a
/// tiny positive value at t = 0, which lands on the exact t -> 0+ limit
/// v_theta = Re Sc / r.
inline std::array<double, 2> vortex_velocity(double x, double y, double t,
                                             const IgnitionParams& p) {
  if (t <= 0.0) throw StructuralError("vortex_velocity: t must be > 0");
  const double dx = x - p.vortex_center[0];
  const double dy = y - p.vortex_center[1];
  const double r2 = dx * dx + dy * dy;
  if (r2 == 0.0) return {0.0, 0.0};
  const double r = std::sqrt(r2);
  const double v_theta = (p.re * p.sc / r) * (1.0 - std::exp(-r2 / (4.0 * p.sc * t)));
  return {(dy / r) * v_theta, -(dx / r) * v_theta};
}

inline Model make_bz_1d(const BzParams& p = {}) {
  Model m;
  m.name = "bz";
  m.ncomp = 3;
  m.diffusion = {p.d_a, p.d_b, p.d_c};
  m.source = [p](double, const std::array<double, kMaxDim>&, const double* u, double* s) {
    bz_source(u[0], u[1], u[2], p, s);
  };
  m.initial = [](const std::array<double, kMaxDim>& x, double, double* u) {
    u[0] = 0.0;
    u[1] = x[0] < 0.05 ? 1.0 : 0.0;
    u[2] = 0.0;
  };
  return m;
}

/// 2D spiral seed (phase pinwheel): the oscillation phase of the kinetics is
/// distributed around the domain center -- a freshly excited wedge at angle
/// zero, then wake ages increasing with angle up to two time units.  The
/// wedge ignites the recovered sector across the branch cut, the line defect
/// starts rotating at the medium's own period, and the phase singularity
/// pinned at the center develops into a spiral.  Ages stay well short of the
/// ~4.3 self-oscillation period, so no sector fires spontaneously before the
/// rotor entrains it.
inline Model make_bz_2d(const BzParams& p = {}) {
  Model m = make_bz_1d(p);
  const auto cycle = std::make_shared<const BzCycle>(p, 2.0, 4096);
  m.initial = [cycle](const std::array<double, kMaxDim>& x, double, double* u) {
    constexpr double wedge = 0.04;  // angular fraction held at the spike crest
    constexpr double two_pi = 6.283185307179586;
    double phi = std::atan2(x[1] - 0.5, x[0] - 0.5) / two_pi;
    if (phi < 0.0) phi += 1.0;
    const double tau = phi <= wedge ? 0.0 : (phi - wedge) / (1.0 - wedge) * cycle->span();
    const auto s = cycle->state(tau);
    u[0] = s[0];
    u[1] = s[1];
    u[2] = s[2];
  };
  return m;
}

inline Model make_ignition(const IgnitionParams& p = {}, bool with_vortex = true) {
  Model m;
  m.name = "ignition";
  m.ncomp = 2;
  m.diffusion = {1.0, 1.0};
  m.source = [p](double, const std::array<double, kMaxDim>&, const double* u, double* s) {
    s[0] = 0.0;
    s[1] = ignition_rate(u[0], u[1], p);
  };
  if (with_vortex) {
    m.velocity = [p](double t, const std::array<double, kMaxDim>& x, double* v) {
      const auto vv = vortex_velocity(x[0], x[1], t, p);
      v[0] = vv[0];
      v[1] = vv[1];
    };
  }
  m.initial = [](const std::array<double, kMaxDim>& x, double h, double* u) {
    const double s = 0.5 * (1.0 + std::tanh(x[1] / h));
    u[0] = s;
    u[1] = s;
  };
  return m;
}

}  // namespace mrfv
