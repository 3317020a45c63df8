#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "iqcfact/error.hpp"
#include "iqcfact/factorization.hpp"
#include "iqcfact/rational_matrix.hpp"
#include "iqcfact/state_space.hpp"

namespace iqcfact {

/// Uniformly sampled vector signal; samples is channels x steps and column k
/// is the value at t0 + k*dt.
struct SampledSignal {
  double t0 = 0.0;
  double dt = 1e-3;
  Eigen::MatrixXd samples;

  SampledSignal() = default;
  SampledSignal(double t0_, double dt_, Eigen::MatrixXd samples_)
      : t0(t0_), dt(dt_), samples(std::move(samples_)) {
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw Error(ErrorCode::kInvalidArgument, "sample period must be positive");
  }

  static SampledSignal zeros(Eigen::Index channels, Eigen::Index steps, double dt,
                             double t0 = 0.0) {
    return {t0, dt, Eigen::MatrixXd::Zero(channels, steps)};
  }

  Eigen::Index channels() const { return samples.rows(); }
  Eigen::Index steps() const { return samples.cols(); }
  double time(Eigen::Index k) const { return t0 + static_cast<double>(k) * dt; }
  double horizon() const { return steps() > 0 ? time(steps() - 1) : t0; }
};

struct StateTrajectory {
  double t0 = 0.0;
  double dt = 1e-3;
  /// states x steps.
  Eigen::MatrixXd states;
};

struct SimulationResult {
  SampledSignal y;
  StateTrajectory x;
};

/// Cumulative values of T -> int_{t0}^{T} z^T M z dt at every sample time.
struct IqcTrace {
  double t0 = 0.0;
  double dt = 1e-3;
  Eigen::VectorXd values;

  double time(Eigen::Index k) const { return t0 + static_cast<double>(k) * dt; }
  double final_value() const { return values.size() ? values(values.size() - 1) : 0.0; }
};

/// Inter-sample model of the input. Zero-order hold is exact for piecewise
/// constant inputs; first-order hold is exact for piecewise linear ones and
/// has O(dt^2) error on smooth signals.
enum class HoldMethod { kZeroOrder, kFirstOrder };

namespace detail {

struct Discretized {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd gamma0;  // Coefficient of u_k.
  Eigen::MatrixXd gamma1;  // Coefficient of (u_{k+1} - u_k) (first-order hold only).
};

inline Discretized discretize(const StateSpace& s, double dt, HoldMethod hold) {
  const Eigen::Index n = s.states(), m = s.inputs();
  Discretized d;
  if (hold == HoldMethod::kZeroOrder) {
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = s.A * dt;
    aug.topRightCorner(n, m) = s.B * dt;
    const Eigen::MatrixXd e = aug.exp();
    d.phi = e.topLeftCorner(n, n);
    d.gamma0 = e.topRightCorner(n, m);
    d.gamma1 = Eigen::MatrixXd::Zero(n, m);
  } else {
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 2 * m, n + 2 * m);
    aug.topLeftCorner(n, n) = s.A * dt;
    aug.block(0, n, n, m) = s.B * dt;
    aug.block(n, n + m, m, m) = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd e = aug.exp();
    d.phi = e.topLeftCorner(n, n);
    d.gamma0 = e.block(0, n, n, m);
    // The ramp state integrates t/dt, so its block already carries the 1/dt.
    d.gamma1 = e.block(0, n + m, n, m);
  }
  return d;
}

inline void require_same_grid(const SampledSignal& a, const SampledSignal& b) {
  const double scale = std::max({1.0, std::abs(a.t0), std::abs(a.horizon())});
  if (a.steps() != b.steps() || std::abs(a.dt - b.dt) > 1e-12 * a.dt ||
      std::abs(a.t0 - b.t0) > 1e-12 * scale)
    throw Error(ErrorCode::kGridMismatch, "signals are not sampled on the same grid");
}

inline SampledSignal stack_channels(const SampledSignal& v, const SampledSignal& w) {
  require_same_grid(v, w);
  Eigen::MatrixXd s(v.channels() + w.channels(), v.steps());
  s.topRows(v.channels()) = v.samples;
  s.bottomRows(w.channels()) = w.samples;
  return {v.t0, v.dt, std::move(s)};
}

}  // namespace detail

/// Simulates x' = Ax + Bu, y = Cx + Du on the grid of u from x0.
inline SimulationResult simulate_lti(const StateSpace& s, const SampledSignal& u,
                                     const Eigen::VectorXd& x0,
                                     HoldMethod hold = HoldMethod::kZeroOrder) {
  s.validate();
  if (u.channels() != s.inputs() || x0.size() != s.states())
    throw Error(ErrorCode::kDimensionMismatch,
                "input channels or initial state do not match the system");
  const Eigen::Index N = u.steps(), n = s.states();
  SimulationResult r;
  r.x = StateTrajectory{u.t0, u.dt, Eigen::MatrixXd(n, N)};
  r.y = SampledSignal(u.t0, u.dt, Eigen::MatrixXd(s.outputs(), N));
  if (N == 0) return r;
  const detail::Discretized d = detail::discretize(s, u.dt, hold);
  Eigen::VectorXd x = x0;
  for (Eigen::Index k = 0; k < N; ++k) {
    r.x.states.col(k) = x;
    r.y.samples.col(k) = s.C * x + s.D * u.samples.col(k);
    if (k + 1 == N || n == 0) continue;
    Eigen::VectorXd next = d.phi * x + d.gamma0 * u.samples.col(k);
    if (hold == HoldMethod::kFirstOrder)
      next += d.gamma1 * (u.samples.col(k + 1) - u.samples.col(k));
    x = std::move(next);
  }
  return r;
}

/// Trapezoidal running integral of the samples q.
inline Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& q, double dt) {
  Eigen::VectorXd out(q.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    if (k > 0) acc += 0.5 * dt * (q(k - 1) + q(k));
    out(k) = acc;
  }
  return out;
}

/// int |s(t)|^2 dt over the whole grid, trapezoidal.
inline double energy(const SampledSignal& s) {
  const Eigen::VectorXd q = s.samples.colwise().squaredNorm().transpose();
  const Eigen::VectorXd c = cumulative_trapezoid(q, s.dt);
  return c.size() ? c(c.size() - 1) : 0.0;
}

/// dt * sum_{k < steps} |s_k|^2: the exact energy of the piecewise-constant
/// signal on [t0, t0 + steps*dt).
inline double energy_left_riemann(const SampledSignal& s, Eigen::Index steps) {
  steps = std::min(steps, s.steps());
  return s.dt * s.samples.leftCols(steps).squaredNorm();
}

/// Throws TailEnergy unless the last 5% of the horizon carries less than
/// 1e-6 of the total energy.
inline void require_decayed(const SampledSignal& s) {
  const Eigen::Index N = s.steps();
  if (N < 2) return;
  const double total = s.samples.squaredNorm();
  if (total == 0.0) return;
  const Eigen::Index start = static_cast<Eigen::Index>(std::floor(0.95 * static_cast<double>(N - 1)));
  const double tail = s.samples.rightCols(N - start).squaredNorm();
  if (tail >= 1e-6 * total) {
    std::ostringstream msg;
    msg << "signal has not decayed: tail energy fraction " << tail / total;
    throw Error(ErrorCode::kTailEnergy, msg.str());
  }
}

namespace detail {

inline IqcTrace trace_from(const Factorization& f, const SampledSignal& v,
                           const SampledSignal& w, const Eigen::VectorXd* x0,
                           HoldMethod hold) {
  const SampledSignal input = stack_channels(v, w);
  if (input.channels() != f.psi.cols() || f.M.rows() != f.psi.rows() ||
      f.M.cols() != f.psi.rows())
    throw Error(ErrorCode::kDimensionMismatch,
                "signal channels do not match the factorization");
  const StateSpace ss = realize(f.psi);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(ss.states());
  if (x0 && x0->size() != ss.states())
    throw Error(ErrorCode::kDimensionMismatch,
                "initial state has " + std::to_string(x0->size()) + " entries, realization has " +
                    std::to_string(ss.states()));
  const SimulationResult r = simulate_lti(ss, input, x0 ? *x0 : zero, hold);
  const Eigen::MatrixXd& z = r.y.samples;
  const Eigen::VectorXd q = (z.array() * (f.M * z).array()).colwise().sum().transpose();
  return IqcTrace{input.t0, input.dt, cumulative_trapezoid(q, input.dt)};
}

}  // namespace detail

/// T -> int_0^T z^T M z dt with z = psi [v; w] from a zero initial state.
inline IqcTrace iqc_trace(const Factorization& f, const SampledSignal& v,
                          const SampledSignal& w,
                          HoldMethod hold = HoldMethod::kFirstOrder) {
  return detail::trace_from(f, v, w, nullptr, hold);
}

/// Full-horizon cost int z^T M z dt with the realization of psi started at
/// x0 (states ordered as in realize(psi)).
inline double game_cost(const Factorization& f, const SampledSignal& v,
                        const SampledSignal& w, const Eigen::VectorXd& x0,
                        HoldMethod hold = HoldMethod::kFirstOrder) {
  require_decayed(v);
  require_decayed(w);
  return detail::trace_from(f, v, w, &x0, hold).final_value();
}

/// Time of the last sign change of the trace, linearly interpolated between
/// samples. Samples below 1e-12 of the trace scale count as zero and are
/// skipped.
inline std::optional<double> last_sign_change(const IqcTrace& t) {
  if (t.values.size() < 2) return std::nullopt;
  const double floor = 1e-12 * std::max(1.0, t.values.cwiseAbs().maxCoeff());
  std::optional<double> out;
  Eigen::Index prev = -1;
  for (Eigen::Index k = 0; k < t.values.size(); ++k) {
    if (std::abs(t.values(k)) <= floor) continue;
    if (prev >= 0 && (t.values(prev) > 0.0) != (t.values(k) > 0.0)) {
      const double a = t.values(prev), b = t.values(k);
      out = t.time(prev) + (t.time(k) - t.time(prev)) * a / (a - b);
    }
    prev = k;
  }
  return out;
}

/// Input extension that zeroes the output of psi11 after T.
///
/// Up to the sample index of T the input is u. From there on the input is
/// the output of the discrete inverse system, u_k = -D^{-1} C x_k with
/// x_{k+1} = (Phi - Gamma D^{-1} C) x_k, where (Phi, Gamma) is the
/// zero-order-hold discretization. The sampled output of psi11 is then zero
/// after T, and its piecewise-constant energy over the horizon equals the
/// energy over [0, T).
inline SampledSignal hard_extension(const StateSpace& psi11, const SampledSignal& u,
                                    double T) {
  psi11.validate();
  if (psi11.D.rows() != psi11.D.cols() || psi11.D.size() == 0)
    throw Error(ErrorCode::kNotBiproper, "psi11 feedthrough must be square");
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(psi11.D).singularValues();
  if (sv(sv.size() - 1) == 0.0 || sv(0) / sv(sv.size() - 1) > 1e12)
    throw Error(ErrorCode::kNotBiproper, "psi11 feedthrough is singular");
  if (u.channels() != psi11.inputs())
    throw Error(ErrorCode::kDimensionMismatch, "input channels do not match psi11");

  const double pos = (T - u.t0) / u.dt;
  const Eigen::Index kT = static_cast<Eigen::Index>(std::llround(pos));
  if (std::abs(pos - static_cast<double>(kT)) > 1e-6 || kT < 0 || kT >= u.steps())
    throw Error(ErrorCode::kGridMismatch, "T is not a sample time of u");

  const Eigen::Index n = psi11.states();
  SampledSignal out = u;
  if (n == 0) {
    out.samples.rightCols(u.steps() - kT).setZero();
    return out;
  }
  const Eigen::MatrixXd Dinv = psi11.D.inverse();
  const Eigen::MatrixXd Ainv = psi11.A - psi11.B * Dinv * psi11.C;
  const Eigen::VectorXcd cont = Ainv.eigenvalues();
  for (Eigen::Index i = 0; i < cont.size(); ++i)
    if (!(cont(i).real() < -tol::kStability))
      throw Error(ErrorCode::kUnstableInverse, "psi11 has an unstable inverse");

  const detail::Discretized d = detail::discretize(psi11, u.dt, HoldMethod::kZeroOrder);
  const Eigen::MatrixXd closed = d.phi - d.gamma0 * Dinv * psi11.C;
  if (!(closed.eigenvalues().cwiseAbs().maxCoeff() < 1.0))
    throw Error(ErrorCode::kUnstableInverse,
                "discretized inverse is unstable at this sample period");

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < kT; ++k) x = d.phi * x + d.gamma0 * u.samples.col(k);
  for (Eigen::Index k = kT; k < u.steps(); ++k) {
    out.samples.col(k) = -Dinv * psi11.C * x;
    x = closed * x;
  }
  return out;
}

/// Rational overload: biproperness and inverse stability are decided from
/// canonical-form poles before realizing.
inline SampledSignal hard_extension(const RationalMatrix& psi11, const SampledSignal& u,
                                    double T) {
  if (!detail::is_square_biproper(psi11))
    throw Error(ErrorCode::kNotBiproper, "psi11 must be square and biproper");
  if (!is_stable(psi11).stable)
    throw Error(ErrorCode::kUnstableInput, "psi11 must be stable");
  if (!is_stable(psi11.inverse()).stable)
    throw Error(ErrorCode::kUnstableInverse, "psi11 has an unstable inverse");
  return hard_extension(realize(psi11), u, T);
}

}  // namespace iqcfact
