#include <gtest/gtest.h>

#include <cmath>

#include "mzi/optimize.hpp"

using namespace mzi;

TEST(GoldenSection, Quadratic) {
  const auto m = golden_section([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, -2.0, 2.0, 1e-10);
  EXPECT_NEAR(m.x, 0.3, 1e-7);
  EXPECT_NEAR(m.value, 1.0, 1e-15);
}

TEST(GoldenSection, InfiniteRegionsAreAvoided) {
  const auto m = golden_section([](double x) { return x < 0.0 ? HUGE_VAL : (x - 1) * (x - 1); }, -1.0, 3.0, 1e-9);
  EXPECT_NEAR(m.x, 1.0, 1e-7);
}

TEST(OptimalPhi, InvariantUnderPeriodShift) {
  auto f = [](double x) { return 2.0 + std::cos(x - 1.0) + 0.3 * std::cos(3 * x); };
  const auto a = optimal_phi(f);
  const auto b = optimal_phi([&](double x) { return f(x + 2 * M_PI); });
  const auto c = optimal_phi(f, -M_PI, M_PI);
  EXPECT_NEAR(a.value, b.value, 1e-14);
  EXPECT_NEAR(a.phi, b.phi, 1e-7);
  EXPECT_NEAR(a.value, c.value, 1e-14);
  EXPECT_NEAR(std::remainder(a.phi - c.phi, 2 * M_PI), 0.0, 1e-7);
  EXPECT_GE(a.phi, 0.0);
  EXPECT_LT(a.phi, 2 * M_PI);
}

TEST(OptimalPhi, DegenerateEverywhere) {
  EXPECT_THROW(optimal_phi([](double) { return HUGE_VAL; }), NoOptimum);
  EXPECT_THROW(optimal_phi([](double x) { return x; }, 1.0, 0.0), std::invalid_argument);
}

TEST(CsvRatio, LosslessOptimumIsPureSqueezing) {
  for (double nbar : {1.0, 10.0, 100.0}) {
    const auto r = optimal_csv_ratio(nbar, LossModel::lossless());
    EXPECT_NEAR(r.mu, 1.0, 1e-4);
    EXPECT_NEAR(r.qfi, nbar * (2 * nbar + 3), 1e-8 * nbar * nbar);
  }
}

TEST(CsvRatio, OneArmKeepsPureSqueezing) {
  for (double rate : {0.1, 0.2, 0.4}) EXPECT_GT(optimal_csv_ratio(10.0, LossModel::one_arm(1 - rate)).mu, 0.99);
}

TEST(CsvRatio, IsGlobalOnGrid) {
  const auto loss = LossModel::symmetric(0.3);
  const auto r = optimal_csv_ratio(10.0, loss);
  for (int k = 0; k <= 200; ++k)
    EXPECT_LE(qfi(ResourceSpec::csv_with_ratio(10.0, k / 200.0), loss).qfi, r.qfi * (1 + 1e-12));
}

TEST(Threshold, TmsvQfiMatchesClosedForm) {
  // 2 eta^2 sinh^2 2s / (1 + 2 eta (1 - eta) sinh^2 s) = 2 nbar at nbar = 10.
  const double eta = (200 + std::sqrt(200.0 * 200 + 4 * 440 * 20)) / 880;
  const auto t = snl_threshold(Scheme::QFI, ResourceKind::TMSV, 10.0, LossKind::Symmetric);
  ASSERT_EQ(t.status, ThresholdStatus::Found);
  EXPECT_NEAR(t.loss_rate, 1 - eta, 1e-3);
  EXPECT_LE(t.hi - t.lo, kThresholdTolerance);
  EXPECT_LE(t.lo, 1 - eta);
  EXPECT_GE(t.hi, 1 - eta);
}

TEST(Threshold, BracketInvariant) {
  const double limit = snl(10.0);
  const auto t = snl_threshold(Scheme::SingleHD, ResourceKind::TMSV, 10.0, LossKind::OneArm);
  ASSERT_EQ(t.status, ThresholdStatus::Found);
  EXPECT_LT(scheme_sensitivity(Scheme::SingleHD, ResourceKind::TMSV, 10.0, LossModel::one_arm(1 - t.lo)).delta2phi,
            limit);
  EXPECT_GE(scheme_sensitivity(Scheme::SingleHD, ResourceKind::TMSV, 10.0, LossModel::one_arm(1 - t.hi)).delta2phi,
            limit);
  EXPECT_GT(t.iterations, 0);
}

TEST(Threshold, CoherentNeverBeatsShotNoise) {
  EXPECT_EQ(snl_threshold(Scheme::QFI, ResourceKind::Coherent, 10.0, LossKind::Symmetric).status,
            ThresholdStatus::NeverBelow);
}

TEST(DoubleHomodyne, AnglesBeatBruteForceGrid) {
  for (double eta : {1.0, 0.7, 0.4}) {
    const auto pre = pre_phase_state<double>(ResourceSpec::csv_with_ratio(10.0, 0.4), LossModel::symmetric(eta));
    for (double phi : {0.3, 1.4, 2.6}) {
      const SumQuadratureForm<double> form(MomentFrame<double>(pre, phi));
      const auto opt = optimal_sum_angles(form);
      double brute = HUGE_VAL;
      for (int i = 0; i < 90; ++i)
        for (int j = 0; j < 180; ++j) brute = std::min(brute, form.error(M_PI * i / 90, 2 * M_PI * j / 180));
      EXPECT_LE(opt.value, brute * (1 + 1e-9)) << "eta " << eta << " phi " << phi;
      EXPECT_NEAR(opt.value, form.error(opt.angle_a, opt.angle_b), 1e-12 * opt.value);
    }
  }
}

TEST(DoubleHomodyne, NoMeanFieldIsDegenerate) {
  EXPECT_THROW(optimal_double_hd_sum<double>(ResourceSpec::csv_with_ratio(5.0, 1.0), LossModel::lossless()),
               NoOptimum);
}

TEST(Schemes, MeasurementNeverBeatsQfi) {
  for (auto scheme : {Scheme::Parity, Scheme::SingleHD, Scheme::DoubleHD})
    for (auto kind : {ResourceKind::CSV, ResourceKind::TMSV, ResourceKind::Coherent})
      for (double rate : {0.0, 0.2}) {
        const auto loss = LossModel::from_rate(LossKind::Symmetric, rate);
        const auto m = scheme_sensitivity(scheme, kind, 3.0, loss);
        const auto q = scheme_sensitivity(Scheme::QFI, kind, 3.0, loss);
        EXPECT_GE(m.delta2phi, q.delta2phi * (1 - 1e-6)) << to_string(scheme) << " " << to_string(kind);
      }
}

TEST(Schemes, FixedRatioIsRespected) {
  const auto p = scheme_sensitivity(Scheme::SingleHD, ResourceKind::CSV, 10.0, LossModel::symmetric(0.9),
                                    MuPolicy::fixed_at(0.3));
  EXPECT_DOUBLE_EQ(p.mu, 0.3);
  const auto best = scheme_sensitivity(Scheme::SingleHD, ResourceKind::CSV, 10.0, LossModel::symmetric(0.9));
  EXPECT_LE(best.delta2phi, p.delta2phi);
}

TEST(Sweep, RowOrderAndThreadIndependence) {
  SweepSpec spec;
  spec.lo = 0.0;
  spec.hi = 0.3;
  spec.points = 4;
  spec.schemes = {Scheme::QFI, Scheme::SingleHD};
  const auto a = run_sweep(spec, 1);
  const auto b = run_sweep(spec, 3);
  ASSERT_EQ(a.size(), 4u * 2u * 3u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].value, b[i].value);
    EXPECT_EQ(a[i].scheme, b[i].scheme);
    EXPECT_EQ(a[i].resource, b[i].resource);
    EXPECT_EQ(a[i].point.delta2phi, b[i].point.delta2phi);
  }
  EXPECT_EQ(a[0].scheme, Scheme::QFI);
  EXPECT_EQ(a[0].resource, ResourceKind::CSV);
  EXPECT_EQ(a[1].resource, ResourceKind::TMSV);
  EXPECT_EQ(a[3].scheme, Scheme::SingleHD);
  EXPECT_DOUBLE_EQ(a[6].loss_rate, 0.1);
}

TEST(Sweep, PerRowErrorsAreRecorded) {
  SweepSpec spec;
  spec.points = 2;
  spec.schemes = {Scheme::DoubleHD};
  spec.resources = {ResourceKind::CSV};
  spec.mu_policy = MuPolicy::fixed_at(1.0);
  const auto rows = run_sweep(spec, 1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].status, "degenerate");
}

TEST(Sweep, SpecValidation) {
  SweepSpec spec;
  spec.hi = spec.lo;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.hi = 1.0;
  spec.points = 1;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.points = 3;
  spec.schemes.clear();
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}
