#pragma once

// Phase sensitivity by error propagation,
//   d2phi = (<O^2> - <O>^2) / |d<O>/dphi|^2,
// for parity and homodyne observables on the interferometer output.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mzi/errors.hpp"
#include "mzi/gaussian.hpp"
#include "mzi/interferometer.hpp"
#include "mzi/real.hpp"

namespace mzi {

enum class ObservableKind { ParityA, QuadratureA, QuadratureSquaredA, ProductQuadAB, SumQuadAB };

/// Observable measured at the output. Angles are local-oscillator phases:
/// X_angle = X cos(angle) + P sin(angle), so angle pi/2 reads P.
struct ObservableSpec {
  ObservableKind kind = ObservableKind::ParityA;
  double angle_a = 0.0;
  double angle_b = 0.0;

  static ObservableSpec parity() { return {ObservableKind::ParityA, 0.0, 0.0}; }
  static ObservableSpec quadrature(double angle) { return {ObservableKind::QuadratureA, angle, 0.0}; }
  static ObservableSpec p_quadrature() { return quadrature(std::acos(0.0)); }
  static ObservableSpec quadrature_squared(double angle) { return {ObservableKind::QuadratureSquaredA, angle, 0.0}; }
  static ObservableSpec product(double angle_a, double angle_b) {
    return {ObservableKind::ProductQuadAB, angle_a, angle_b};
  }
  static ObservableSpec sum(double angle_a, double angle_b) { return {ObservableKind::SumQuadAB, angle_a, angle_b}; }

  bool is_homodyne() const { return kind != ObservableKind::ParityA; }
};

struct SensitivityResult {
  double error = 0.0;  // d2phi
  double signal = 0.0;
  double variance = 0.0;
  double slope = 0.0;
  double phi = 0.0;
};

/// Slopes below this magnitude are reported as degenerate working points.
inline constexpr double kDegenerateSlope = 1e-10;
/// Central-difference step for signal slopes.
inline constexpr double kSlopeStep = 1e-5;

/// Parity <(-1)^n> of a single-mode Gaussian state from the Wigner function
/// at the origin: exp(-d^T g^{-1} d / 2) / (2 sqrt(det g)).
template <class Real>
Real parity_expectation(const SingleModeState<Real>& st) {
  using std::exp;
  using std::sqrt;
  const Real det = determinant(st.cov);
  if (!(det > Real(0))) throw NumericFailure("parity_expectation: singular covariance");
  const auto x = solve(st.cov, st.mean);
  if (!x) throw NumericFailure("parity_expectation: singular covariance");
  return exp(-dot(st.mean, *x) / Real(2)) / (Real(2) * sqrt(det));
}

namespace detail {

template <class Real>
Real central_slope(const std::array<Real, 4>& f, const Real& h) {
  // f = {f(phi+h), f(phi-h), f(phi+h/2), f(phi-h/2)}; Richardson over h, h/2.
  const Real coarse = (f[0] - f[1]) / (Real(2) * h);
  const Real fine = (f[2] - f[3]) / h;
  return (Real(4) * fine - coarse) / Real(3);
}

template <class Real>
GaussianState<Real> rotated(const GaussianState<Real>& st, const Real& angle_a, const Real& angle_b) {
  const auto m = mode_rotation<Real>(Mode::A, angle_a) * mode_rotation<Real>(Mode::B, angle_b);
  return apply_symplectic(st, m, false);
}

}  // namespace detail

/// Output state at a working point together with the four shifted states
/// needed for the signal slope. Every observable's signal, variance and slope
/// are read off the frame without rerunning the interferometer.
template <class Real = double>
struct MomentFrame {
  Real phi;
  Real step;
  GaussianState<Real> center;
  std::array<GaussianState<Real>, 4> shifted;  // phi+h, phi-h, phi+h/2, phi-h/2

  MomentFrame(const GaussianState<Real>& pre_phase, const Real& phi_, const Real& step_ = Real(kSlopeStep))
      : phi(phi_),
        step(step_),
        center(finish_interferometer(pre_phase, phi_)),
        shifted{finish_interferometer(pre_phase, phi_ + step_), finish_interferometer(pre_phase, phi_ - step_),
                finish_interferometer(pre_phase, phi_ + step_ / Real(2)),
                finish_interferometer(pre_phase, phi_ - step_ / Real(2))} {}

  template <class Fn>
  Real slope_of(Fn&& signal) const {
    return detail::central_slope<Real>(
        {signal(shifted[0]), signal(shifted[1]), signal(shifted[2]), signal(shifted[3])}, step);
  }

  /// Derivative of the mean vector.
  Vector<Real, 4> mean_slope() const {
    Vector<Real, 4> out;
    for (std::size_t i = 0; i < 4; ++i)
      out[i] = slope_of([i](const GaussianState<Real>& s) { return s.mean[i]; });
    return out;
  }

  /// Derivative of the second-moment matrix cov + mean mean^T.
  SquareMatrix<Real, 4> second_moment_slope() const {
    SquareMatrix<Real, 4> out;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        out(i, j) = slope_of([i, j](const GaussianState<Real>& s) { return s.cov(i, j) + s.mean[i] * s.mean[j]; });
    return out;
  }
};

/// Signal and variance of an observable on a given output state.
template <class Real>
std::pair<Real, Real> signal_and_variance(const GaussianState<Real>& st, const ObservableSpec& obs) {
  using Q = Quadrature;
  const Real aa(obs.angle_a);
  const Real ab(obs.angle_b);
  switch (obs.kind) {
    case ObservableKind::ParityA: {
      const Real p = parity_expectation(reduce_to_mode(st, Mode::A));
      return {p, (Real(1) - p) * (Real(1) + p)};
    }
    case ObservableKind::QuadratureA: {
      const auto r = detail::rotated(st, aa, Real(0));
      return {symmetric_moment(r, {Q::Xa}), r.cov(0, 0)};
    }
    case ObservableKind::QuadratureSquaredA: {
      const auto r = detail::rotated(st, aa, Real(0));
      const Real second = symmetric_moment(r, {Q::Xa, Q::Xa});
      return {second, symmetric_moment(r, {Q::Xa, Q::Xa, Q::Xa, Q::Xa}) - second * second};
    }
    case ObservableKind::ProductQuadAB: {
      const auto r = detail::rotated(st, aa, ab);
      const Real second = symmetric_moment(r, {Q::Xa, Q::Xb});
      return {second, symmetric_moment(r, {Q::Xa, Q::Xa, Q::Xb, Q::Xb}) - second * second};
    }
    case ObservableKind::SumQuadAB: {
      const auto r = detail::rotated(st, aa, ab);
      return {r.mean[0] + r.mean[2], r.cov(0, 0) + r.cov(2, 2) + Real(2) * r.cov(0, 2)};
    }
  }
  throw std::invalid_argument("signal_and_variance: unknown observable");
}

template <class Real>
SensitivityResult sensitivity_from_frame(const MomentFrame<Real>& frame, const ObservableSpec& obs) {
  const auto [signal, variance] = signal_and_variance(frame.center, obs);
  const Real slope =
      frame.slope_of([&obs](const GaussianState<Real>& s) { return signal_and_variance(s, obs).first; });
  using std::abs;
  if (!(abs(slope) >= Real(kDegenerateSlope)))
    throw DegenerateWorkingPoint("signal slope vanishes at phi = " + std::to_string(static_cast<double>(frame.phi)));
  // Near pure-state parity extrema 1 - <P>^2 cancels; below sqrt(eps) the
  // ratio is roundoff.
  using std::sqrt;
  if (!(variance >= sqrt(std::numeric_limits<Real>::epsilon())))
    throw DegenerateWorkingPoint("variance unresolved at phi = " + std::to_string(static_cast<double>(frame.phi)));
  const Real error = variance / (slope * slope);
  return {static_cast<double>(error), static_cast<double>(signal), static_cast<double>(variance),
          static_cast<double>(slope), static_cast<double>(frame.phi)};
}

/// Sensitivity of an observable for a fixed resource and loss as a function
/// of the working point. Caches the state before the phase shifter.
template <class Real = double>
class SensitivityCurve {
 public:
  SensitivityCurve(const ResourceSpec& resource, const LossModel& loss, const ObservableSpec& obs)
      : pre_phase_(pre_phase_state<Real>(resource, loss)), obs_(obs) {}

  SensitivityResult at(double phi) const { return sensitivity_from_frame(MomentFrame<Real>(pre_phase_, Real(phi)), obs_); }

  /// d2phi at phi; +inf at degenerate working points.
  double error_at(double phi) const {
    try {
      return at(phi).error;
    } catch (const DegenerateWorkingPoint&) {
      return HUGE_VAL;
    }
  }

  const GaussianState<Real>& pre_phase() const { return pre_phase_; }

 private:
  GaussianState<Real> pre_phase_;
  ObservableSpec obs_;
};

template <class Real = double>
SensitivityResult parity_sensitivity(const InterferometerConfig& cfg) {
  return SensitivityCurve<Real>(cfg.resource, cfg.loss, ObservableSpec::parity()).at(cfg.phi);
}

template <class Real = double>
SensitivityResult homodyne_sensitivity(const InterferometerConfig& cfg, const ObservableSpec& obs) {
  if (!obs.is_homodyne()) throw std::invalid_argument("homodyne_sensitivity: parity is not a homodyne observable");
  return SensitivityCurve<Real>(cfg.resource, cfg.loss, obs).at(cfg.phi);
}

/// Double homodyne on a CSV input: X_{angle_a} on mode a plus X_{angle_b} on
/// mode b.
template <class Real = double>
SensitivityResult double_hd_csv_sensitivity(const InterferometerConfig& cfg, double angle_a, double angle_b) {
  return SensitivityCurve<Real>(cfg.resource, cfg.loss, ObservableSpec::sum(angle_a, angle_b)).at(cfg.phi);
}

/// Fast evaluator for the two-mode quadrature sum at one working point:
/// d2phi(angle_a, angle_b) = u^T cov u / (u . mean')^2 with
/// u = (cos a, sin a, cos b, sin b).
template <class Real = double>
struct SumQuadratureForm {
  SquareMatrix<Real, 4> cov;
  Vector<Real, 4> mean;
  Vector<Real, 4> mean_slope;

  explicit SumQuadratureForm(const MomentFrame<Real>& frame)
      : cov(frame.center.cov), mean(frame.center.mean), mean_slope(frame.mean_slope()) {}

  double error(double angle_a, double angle_b) const {
    return error_at_direction(std::cos(angle_a), std::sin(angle_a), std::cos(angle_b), std::sin(angle_b));
  }

  /// Same as error() with the local-oscillator cosines and sines given.
  double error_at_direction(double ca, double sa, double cb, double sb) const {
    using std::abs;
    const Vector<Real, 4> u{{Real(ca)}, {Real(sa)}, {Real(cb)}, {Real(sb)}};
    const Real slope = dot(u, mean_slope);
    if (!(abs(slope) >= Real(kDegenerateSlope))) return HUGE_VAL;
    const Real var = dot(u, cov * u);
    return static_cast<double>(var / (slope * slope));
  }

  /// log d2phi with its gradient and Hessian in (angle_a, angle_b).
  struct LogErrorJet {
    double value = HUGE_VAL;
    std::array<double, 2> grad{};
    std::array<std::array<double, 2>, 2> hess{};
  };

  LogErrorJet log_error_jet(double angle_a, double angle_b) const {
    const double ca = std::cos(angle_a), sa = std::sin(angle_a), cb = std::cos(angle_b), sb = std::sin(angle_b);
    const SquareMatrix<double, 4> g = cov.template cast<double>();
    const Vector<double, 4> d = mean_slope.template cast<double>();
    const Vector<double, 4> u{{ca}, {sa}, {cb}, {sb}};
    // First and second derivatives of u; the mixed one vanishes.
    const std::array<Vector<double, 4>, 2> e{Vector<double, 4>{{-sa}, {ca}, {0.0}, {0.0}},
                                             Vector<double, 4>{{0.0}, {0.0}, {-sb}, {cb}}};
    const std::array<Vector<double, 4>, 2> p{Vector<double, 4>{{ca}, {sa}, {0.0}, {0.0}},
                                             Vector<double, 4>{{0.0}, {0.0}, {cb}, {sb}}};
    const auto gu = g * u;
    const double n = dot(u, gu);
    const double s = dot(u, d);
    LogErrorJet jet;
    if (!(std::abs(s) >= kDegenerateSlope) || !(n > 0.0)) return jet;
    jet.value = std::log(n) - 2.0 * std::log(std::abs(s));
    std::array<double, 2> dn{}, ds{};
    for (int i = 0; i < 2; ++i) {
      dn[i] = 2.0 * dot(e[i], gu);
      ds[i] = dot(e[i], d);
      jet.grad[i] = dn[i] / n - 2.0 * ds[i] / s;
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double dnn = 2.0 * dot(e[i], g * e[j]);
        double dss = 0.0;
        if (i == j) {
          dnn -= 2.0 * dot(p[i], gu);
          dss = -dot(p[i], d);
        }
        jet.hess[i][j] = dnn / n - dn[i] * dn[j] / (n * n) - 2.0 * (dss / s - ds[i] * ds[j] / (s * s));
      }
    return jet;
  }
};

}  // namespace mzi
