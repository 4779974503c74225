#pragma once

#include <cmath>
#include <stdexcept>

#include "mzi/errors.hpp"
#include "mzi/gaussian.hpp"
#include "mzi/interferometer.hpp"
#include "mzi/real.hpp"

namespace mzi {

enum class QfiMethod { NumericFidelity, ClosedForm };

/// Single-shot quantum Fisher information and its Cramer-Rao bound.
struct QfiResult {
  double qfi = 0.0;
  double qcrb = 0.0;
  QfiMethod method = QfiMethod::ClosedForm;

  static QfiResult make(double f, QfiMethod m) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw NumericFailure("QFI evaluated to a negative or non-finite value");
    // Zero QFI (total loss) leaves the bound infinite.
    return {f, f > 0.0 ? 1.0 / f : HUGE_VAL, m};
  }
};

/// Root (Uhlmann) fidelity Tr|sqrt(rho1) sqrt(rho2)| of two two-mode Gaussian
/// states, clamped to [0, 1].
template <class Real>
Real bures_fidelity(const GaussianState<Real>& s1, const GaussianState<Real>& s2) {
  using std::exp;
  using std::isfinite;
  using std::sqrt;
  const auto om = symplectic_form<Real>();
  const auto sum = s1.cov + s2.cov;
  const Real delta = determinant(sum);
  if (!(delta > Real(0))) throw NumericFailure("bures_fidelity: covariance sum is singular");

  const auto quarter = SquareMatrix<Real, 4>::identity() * Real(0.25);
  Real gamma = Real(16) * determinant(om * s1.cov * om * s2.cov - quarter);
  Real lambda = Real(16) * heisenberg_determinant(s1.cov) * heisenberg_determinant(s2.cov);
  if (gamma < Real(0)) gamma = Real(0);
  if (lambda < Real(0)) lambda = Real(0);
  const Real a = sqrt(gamma) + sqrt(lambda);
  Real disc = a * a - delta;
  if (disc < Real(0)) disc = Real(0);
  // [a - sqrt(a^2 - delta)]^(-1/2) rewritten without the subtraction.
  const Real f0 = sqrt((a + sqrt(disc)) / delta);

  const auto diff = s2.mean - s1.mean;
  const auto x = solve(sum, diff);
  if (!x) throw NumericFailure("bures_fidelity: covariance sum is singular");
  const Real f = f0 * exp(-dot(diff, *x) / Real(4));
  if (!isfinite(static_cast<double>(f))) throw NumericFailure("bures_fidelity: non-finite result");
  if (f > Real(1)) return Real(1);
  if (f < Real(0)) return Real(0);
  return f;
}

/// QFI from the fidelity between phi and phi + dphi,
/// F_Q = 8 (1 - F) / dphi^2, Richardson-extrapolated over dphi and dphi/2.
/// Evaluated in wide_real since 1 - F is tiny.
inline QfiResult qfi_numeric(const ResourceSpec& resource, double phi, const LossModel& loss, double dphi = 1e-4) {
  if (!(dphi > 0.0)) throw std::invalid_argument("qfi_numeric: dphi must be positive");
  using W = wide_real;
  const auto pre = pre_phase_state<W>(resource, loss);
  const W p0(phi);
  const auto rho = finish_interferometer(pre, p0);
  auto estimate = [&](const W& h) {
    const W f = bures_fidelity(rho, finish_interferometer(pre, p0 + h));
    return W(8) * (W(1) - f) / (h * h);
  };
  const W h(dphi);
  const W coarse = estimate(h);
  const W fine = estimate(h / W(2));
  W q = (W(4) * fine - coarse) / W(3);
  if (q < W(0)) q = W(0);
  return QfiResult::make(static_cast<double>(q), QfiMethod::NumericFidelity);
}

namespace closed_form {

/// Lossless CSV: alpha^2 e^{2r} + sinh^2 r + alpha^2 + sinh^2(2r)/2.
inline double csv_lossless(double alpha, double r) {
  const double sh = std::sinh(r);
  return alpha * alpha * std::exp(2 * r) + sh * sh + alpha * alpha + std::sinh(2 * r) * std::sinh(2 * r) / 2;
}

/// Lossless TMSV: 8 sinh^2 s cosh^2 s.
inline double tmsv_lossless(double s) {
  const double x = std::sinh(s) * std::cosh(s);
  return 8 * x * x;
}

/// CSV with equal loss eta in both arms. The squeezed-vacuum term
/// eta sh [1 + 2 eta + 2 eta (2 - eta) sh] / (1 + 2 eta (1 - eta) sh), with
/// sh = sinh^2 r, agrees with fidelity differencing and with the Fock-space
/// SLD computation.
inline double csv_symmetric(double alpha, double r, double eta) {
  const double sh = std::sinh(r) * std::sinh(r);
  const double squeezed = eta * sh * (1 + 2 * eta + 2 * eta * (2 - eta) * sh) / (1 + 2 * eta * (1 - eta) * sh);
  const double coherent =
      2 * alpha * alpha * eta * (std::exp(r) - eta * std::sinh(r)) / (std::exp(r) - 2 * eta * std::sinh(r));
  return squeezed + coherent;
}

/// CSV with loss eta only in the phase-shifted arm.
inline double csv_one_arm(double alpha, double r, double eta) {
  const double sh = std::sinh(r) * std::sinh(r);
  const double s2r = std::sinh(2 * r);
  return 2 * eta *
         (sh / (1 + eta) + alpha * alpha * std::cosh(r) / (std::cosh(r) - eta * std::sinh(r)) +
          eta * s2r * s2r / (3 + eta * eta + (1 - eta * eta) * std::cosh(2 * r)));
}

/// TMSV with transmissivity eta in the phase-shifted arm. Loss in the other
/// arm does not enter: after the first splitter the state is a product of two
/// squeezed vacua and only one of them carries the phase.
inline double tmsv_lossy(double s, double eta) {
  const double sh = std::sinh(s) * std::sinh(s);
  const double s2 = std::sinh(2 * s);
  return 2 * eta * eta * s2 * s2 / (1 + 2 * eta * (1 - eta) * sh);
}

}  // namespace closed_form

inline bool has_closed_form(const ResourceSpec& resource, const LossModel& loss) {
  if (resource.kind == ResourceKind::TMSV) return true;
  return loss.is_lossless() || loss.is_symmetric() || loss.is_one_arm();
}

/// Closed-form QFI. CSV (and coherent, as CSV with r = 0) supports lossless,
/// symmetric and one-arm loss; TMSV supports any pair of transmissivities.
inline QfiResult qfi_closed(const ResourceSpec& resource, const LossModel& loss) {
  resource.validate();
  LossModel::checked(loss.eta_a, loss.eta_b);
  if (resource.kind == ResourceKind::TMSV)
    return QfiResult::make(closed_form::tmsv_lossy(resource.s, loss.eta_a), QfiMethod::ClosedForm);

  const double alpha = resource.alpha;
  const double r = resource.kind == ResourceKind::CSV ? resource.r : 0.0;
  if (loss.is_lossless()) return QfiResult::make(closed_form::csv_lossless(alpha, r), QfiMethod::ClosedForm);
  if (loss.is_symmetric())
    return QfiResult::make(closed_form::csv_symmetric(alpha, r, loss.eta_a), QfiMethod::ClosedForm);
  if (loss.is_one_arm()) return QfiResult::make(closed_form::csv_one_arm(alpha, r, loss.eta_a), QfiMethod::ClosedForm);
  throw UnsupportedConfiguration("qfi_closed: no closed form for CSV with unequal loss in both arms");
}

/// Closed form where one exists, fidelity differencing otherwise.
inline QfiResult qfi(const ResourceSpec& resource, const LossModel& loss) {
  if (has_closed_form(resource, loss)) return qfi_closed(resource, loss);
  return qfi_numeric(resource, 0.0, loss);
}

/// Shot-noise limit 1 / (2 nbar).
inline double snl(double nbar) {
  if (!(nbar > 0.0)) throw std::invalid_argument("snl: nbar must be positive");
  return 1.0 / (2.0 * nbar);
}

/// Strictly below the shot-noise limit, ignoring rounding-level differences
/// (a coherent state sits exactly on it).
inline bool beats_shot_noise(double delta2phi, double nbar) { return delta2phi < snl(nbar) * (1.0 - 1e-9); }

}  // namespace mzi
