#pragma once

// Side-by-side comparison of the Gaussian pipeline against the Fock oracle.

#include <cmath>
#include <string>
#include <vector>

#include "mzi/fock.hpp"
#include "mzi/measurements.hpp"
#include "mzi/qfi.hpp"

namespace mzi {

struct CrossCheck {
  std::string quantity;
  double gaussian = 0.0;
  double oracle = 0.0;
  double tolerance = 1e-6;

  double deviation() const { return std::abs(gaussian - oracle) / std::max(1.0, std::abs(oracle)); }
  bool passed() const { return deviation() <= tolerance; }
};

struct ValidationCase {
  std::string label;
  ResourceSpec resource;
  LossModel loss;
  double phi = 0.3;
};

/// Resources with at most two photons whose weight on n_a + n_b >= 40 is
/// below 1e-8, under no loss, symmetric loss and one-arm loss.
inline std::vector<ValidationCase> default_validation_cases() {
  const std::vector<std::pair<std::string, ResourceSpec>> resources{
      {"coherent(nbar=2)", ResourceSpec::coherent_with_nbar(2.0)},
      {"tmsv(nbar=1)", ResourceSpec::tmsv_with_nbar(1.0)},
      {"csv(nbar=2,mu=0.25)", ResourceSpec::csv_with_ratio(2.0, 0.25)},
  };
  const std::vector<std::pair<std::string, LossModel>> losses{
      {"lossless", LossModel::lossless()},
      {"symmetric eta=0.9", LossModel::symmetric(0.9)},
      {"symmetric eta=0.7", LossModel::symmetric(0.7)},
      {"one-arm eta=0.7", LossModel::one_arm(0.7)},
  };
  std::vector<ValidationCase> out;
  for (const auto& [rn, r] : resources)
    for (const auto& [ln, l] : losses) out.push_back({rn + ", " + ln, r, l, 0.3});
  return out;
}

/// Parity, quadrature moments up to fourth order, fidelity between two
/// working points and the QFI, from both simulators.
inline std::vector<CrossCheck> fock_cross_checks(const ValidationCase& c, int cutoff = fock::kDefaultCutoff,
                                                 double fidelity_offset = 0.05, double tolerance = 1e-6) {
  using Q = Quadrature;
  using fock::Observable;
  const auto pre_g = pre_phase_state<double>(c.resource, c.loss);
  const auto g = finish_interferometer(pre_g, c.phi);
  const auto pre_f = fock::oracle_pre_phase(c.resource, c.loss, cutoff);
  const auto f = fock::oracle_finish(pre_f, c.phi);

  std::vector<CrossCheck> out;
  auto add = [&](std::string name, double gv, double fv) { out.push_back({std::move(name), gv, fv, tolerance}); };
  add("parity_a", parity_expectation(reduce_to_mode(g, Mode::A)), fock::oracle_expectation(f, Observable::ParityA));
  add("<X_a>", symmetric_moment(g, {Q::Xa}), fock::oracle_expectation(f, Observable::XA));
  add("<P_a>", symmetric_moment(g, {Q::Pa}), fock::oracle_expectation(f, Observable::PA));
  add("<X_b>", symmetric_moment(g, {Q::Xb}), fock::oracle_expectation(f, Observable::XB));
  add("<X_a^2>", symmetric_moment(g, {Q::Xa, Q::Xa}), fock::oracle_expectation(f, Observable::X2A));
  add("<P_a^2>", symmetric_moment(g, {Q::Pa, Q::Pa}), fock::oracle_expectation(f, Observable::P2A));
  add("<X_a X_b>", symmetric_moment(g, {Q::Xa, Q::Xb}), fock::oracle_expectation(f, Observable::XAXB));
  add("<X_a^4>", symmetric_moment(g, {Q::Xa, Q::Xa, Q::Xa, Q::Xa}), fock::oracle_expectation(f, Observable::X4A));
  add("<X_a^2 X_b^2>", symmetric_moment(g, {Q::Xa, Q::Xa, Q::Xb, Q::Xb}),
      fock::oracle_expectation(f, Observable::X2AX2B));

  const auto g2 = finish_interferometer(pre_g, c.phi + fidelity_offset);
  const auto f2 = fock::oracle_finish(pre_f, c.phi + fidelity_offset);
  add("fidelity", bures_fidelity(g, g2), fock::oracle_fidelity(f, f2));
  add("qfi", qfi_numeric(c.resource, c.phi, c.loss).qfi, fock::oracle_qfi(pre_f, c.phi));
  return out;
}

}  // namespace mzi
