#include <gtest/gtest.h>

#include <cmath>

#include "mzi/interferometer.hpp"

using namespace mzi;

namespace {

const ResourceSpec kResources[] = {ResourceSpec::csv(1.4, 0.6), ResourceSpec::tmsv(0.8), ResourceSpec::coherent(2.0)};

}

TEST(Interferometer, IdentityAtZeroPhaseWithoutLoss) {
  for (const auto& r : kResources) {
    const auto in = make_input(r);
    const auto out = output_state({r, 0.0, LossModel::lossless()});
    EXPECT_LT(max_abs_diff(out.cov, in.cov), 1e-14);
    EXPECT_LT(max_abs_diff(out.mean, in.mean), 1e-14);
  }
}

TEST(Interferometer, LosslessPreservesPhotonNumber) {
  for (const auto& r : kResources)
    for (double phi : {0.1, 1.0, 2.7})
      EXPECT_NEAR(mean_photon_number(output_state({r, phi, LossModel::lossless()})), r.nominal_photon_number(), 1e-12);
}

TEST(Interferometer, PhasePeriodicity) {
  for (const auto& r : kResources) {
    const auto a = output_state({r, 0.4, LossModel::symmetric(0.8)});
    const auto b = output_state({r, 0.4 + 2 * M_PI, LossModel::symmetric(0.8)});
    EXPECT_LT(max_abs_diff(a.cov, b.cov), 1e-12);
    EXPECT_LT(max_abs_diff(a.mean, b.mean), 1e-12);
  }
}

TEST(Interferometer, LossCommutesWithPhase) {
  const LossModel loss = LossModel::checked(0.6, 0.85);
  for (const auto& r : kResources) {
    auto st = apply_symplectic(make_input(r), first_splitter<double>());
    const auto loss_first = apply_symplectic(apply_loss(st, loss.eta_a, loss.eta_b), phase_shifter(0.9));
    const auto phase_first = apply_loss(apply_symplectic(st, phase_shifter(0.9)), loss.eta_a, loss.eta_b);
    EXPECT_LT(max_abs_diff(loss_first.cov, phase_first.cov), 1e-14);
    EXPECT_LT(max_abs_diff(loss_first.mean, phase_first.mean), 1e-14);
  }
}

TEST(Interferometer, PhotonNumberFallsWithLoss) {
  for (const auto& r : kResources) {
    double prev = HUGE_VAL;
    for (double rate = 0.0; rate <= 1.0 + 1e-12; rate += 0.1) {
      const double eta = std::max(0.0, 1.0 - rate);
      const double n = mean_photon_number(output_state({r, 0.7, LossModel::symmetric(eta)}));
      EXPECT_LT(n, prev + 1e-12);
      EXPECT_NEAR(n, eta * r.nominal_photon_number(), 1e-12);
      prev = n;
    }
  }
}

TEST(Interferometer, OutputStaysPhysical) {
  for (const auto& r : kResources)
    for (double eta : {0.0, 0.3, 0.9, 1.0})
      for (double phi : {0.0, 0.5, 2.0}) {
        EXPECT_TRUE(is_physical(output_state({r, phi, LossModel::symmetric(eta)})));
        EXPECT_TRUE(is_physical(output_state({r, phi, LossModel::one_arm(eta)})));
        EXPECT_TRUE(is_physical(output_mode_a({r, phi, LossModel::one_arm(eta)})));
      }
}

TEST(Interferometer, LossModels) {
  EXPECT_TRUE(LossModel::lossless().is_lossless());
  const auto sym = LossModel::from_rate(LossKind::Symmetric, 0.25);
  EXPECT_DOUBLE_EQ(sym.eta_a, 0.75);
  EXPECT_DOUBLE_EQ(sym.eta_b, 0.75);
  const auto one = LossModel::from_rate(LossKind::OneArm, 0.25);
  EXPECT_DOUBLE_EQ(one.eta_a, 0.75);
  EXPECT_DOUBLE_EQ(one.eta_b, 1.0);
  const auto st = LossModel::from_stages(0.9, 0.8, 0.95, 1.0, 0.9, 0.85);
  EXPECT_NEAR(st.eta_a, 0.9 * 0.8 * 0.95 * 0.85, 1e-15);
  EXPECT_NEAR(st.eta_b, 0.9 * 0.9 * 0.85, 1e-15);
  EXPECT_THROW(LossModel::symmetric(1.2), std::invalid_argument);
  EXPECT_THROW(LossModel::from_rate(LossKind::OneArm, -0.1), std::invalid_argument);
  EXPECT_THROW(output_state({kResources[0], 0.0, LossModel{1.5, 1.0}}), std::invalid_argument);
}

TEST(Interferometer, WideRealAgreesWithDouble) {
  const InterferometerConfig cfg{kResources[0], 0.37, LossModel::symmetric(0.7)};
  const auto d = output_state<double>(cfg);
  const auto w = output_state<wide_real>(cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(static_cast<double>(w.mean[i]), d.mean[i], 1e-14);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(static_cast<double>(w.cov(i, j)), d.cov(i, j), 1e-14);
  }
}
