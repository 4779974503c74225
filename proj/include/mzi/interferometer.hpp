#pragma once

// Lossy Mach-Zehnder pipeline: 50:50 splitter, per-arm loss, phase shift on
// arm a, second 50:50 splitter.

#include <cmath>
#include <stdexcept>
#include <string>

#include "mzi/gaussian.hpp"

namespace mzi {

enum class LossKind { Symmetric, OneArm };

inline const char* to_string(LossKind k) { return k == LossKind::Symmetric ? "symmetric" : "one-arm"; }

struct LossModel {
  double eta_a = 1.0;
  double eta_b = 1.0;

  static LossModel lossless() { return {1.0, 1.0}; }
  static LossModel symmetric(double eta) { return checked(eta, eta); }
  /// Loss only in the arm carrying the phase shifter.
  static LossModel one_arm(double eta) { return checked(eta, 1.0); }

  static LossModel from_rate(LossKind kind, double loss_rate) {
    const double eta = 1.0 - loss_rate;
    return kind == LossKind::Symmetric ? symmetric(eta) : one_arm(eta);
  }

  /// Collapses preparation, two evolution stages per arm and detection loss
  /// into one transmissivity per arm. Preparation and detection are shared by
  /// both arms.
  static LossModel from_stages(double eta_prep, double eta_a2, double eta_a3, double eta_b2, double eta_b3,
                               double eta_det) {
    return checked(eta_prep * eta_a2 * eta_a3 * eta_det, eta_prep * eta_b2 * eta_b3 * eta_det);
  }

  static LossModel checked(double a, double b) {
    auto in_unit = [](double e) { return e >= 0.0 && e <= 1.0; };
    if (!in_unit(a) || !in_unit(b)) throw std::invalid_argument("LossModel: transmissivity must lie in [0, 1]");
    return {a, b};
  }

  bool is_lossless() const { return eta_a == 1.0 && eta_b == 1.0; }
  bool is_symmetric() const { return eta_a == eta_b; }
  bool is_one_arm() const { return eta_b == 1.0; }
};

struct InterferometerConfig {
  ResourceSpec resource;
  double phi = 0.0;
  LossModel loss;
};

template <class Real = double>
SymplecticTransform<Real> first_splitter() {
  return beam_splitter<Real>(pi_v<Real>() / Real(4));
}

template <class Real = double>
SymplecticTransform<Real> second_splitter() {
  return beam_splitter<Real>(-pi_v<Real>() / Real(4));
}

/// State right after the loss channel, before any phase is imprinted.
template <class Real = double>
GaussianState<Real> pre_phase_state(const ResourceSpec& resource, const LossModel& loss) {
  auto st = apply_symplectic(make_input<Real>(resource), first_splitter<Real>(), false);
  return apply_loss(st, loss.eta_a, loss.eta_b);
}

/// Phase shift and second splitter applied to a pre-phase state.
template <class Real = double>
GaussianState<Real> finish_interferometer(const GaussianState<Real>& pre_phase, const Real& phi) {
  return apply_symplectic(pre_phase, second_splitter<Real>() * phase_shifter<Real>(phi), false);
}

template <class Real = double>
GaussianState<Real> output_state(const InterferometerConfig& cfg) {
  LossModel::checked(cfg.loss.eta_a, cfg.loss.eta_b);
  return finish_interferometer(pre_phase_state<Real>(cfg.resource, cfg.loss), Real(cfg.phi));
}

template <class Real = double>
SingleModeState<Real> output_mode_a(const InterferometerConfig& cfg) {
  return reduce_to_mode(output_state<Real>(cfg), Mode::A);
}

}  // namespace mzi
