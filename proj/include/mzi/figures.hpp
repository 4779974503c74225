#pragma once

// Parameter grids behind each figure panel.

#include <stdexcept>
#include <string>
#include <vector>

#include "mzi/optimize.hpp"

namespace mzi {

inline constexpr double kFigureLossHi = 0.6;
inline constexpr int kFigureLossPoints = 25;
inline constexpr double kFigureNbarLo = 1.0;
inline constexpr double kFigureNbarHi = 49.0;
inline constexpr int kFigureNbarPoints = 25;
inline constexpr double kFigureFixedRate = 0.2;
inline constexpr double kFigureRatioLossHi = 0.9;
inline constexpr int kFigureRatioPoints = 37;

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"2a", "2b", "2c", "2d", "2e", "2f", "3a", "3b", "3c", "3d", "4a", "4b",
                                            "4c", "4d", "5a", "5b", "5c", "5d", "6a", "6b", "6c", "6d", "a1", "a2"};
  return ids;
}

namespace detail {

inline SweepSpec loss_sweep(double nbar, LossKind kind, std::vector<Scheme> schemes, std::vector<ResourceKind> res) {
  SweepSpec s;
  s.variable = SweepVariable::LossRate;
  s.lo = 0.0;
  s.hi = kFigureLossHi;
  s.points = kFigureLossPoints;
  s.nbar = nbar;
  s.loss_kind = kind;
  s.schemes = std::move(schemes);
  s.resources = std::move(res);
  return s;
}

inline SweepSpec nbar_sweep(LossKind kind, std::vector<Scheme> schemes) {
  SweepSpec s;
  s.variable = SweepVariable::MeanPhotonNumber;
  s.lo = kFigureNbarLo;
  s.hi = kFigureNbarHi;
  s.points = kFigureNbarPoints;
  s.loss_rate = kFigureFixedRate;
  s.loss_kind = kind;
  s.schemes = std::move(schemes);
  s.resources = {ResourceKind::CSV, ResourceKind::TMSV, ResourceKind::Coherent};
  return s;
}

inline std::vector<SweepSpec> ratio_panel(LossKind kind) {
  std::vector<SweepSpec> out;
  for (double nbar : {1.0, 10.0, 100.0}) {
    auto s = loss_sweep(nbar, kind, {Scheme::QFI}, {ResourceKind::CSV});
    s.hi = kFigureRatioLossHi;
    s.points = kFigureRatioPoints;
    out.push_back(s);
  }
  return out;
}

inline std::vector<SweepSpec> comparison_panel(ResourceKind kind, LossKind loss) {
  return {loss_sweep(10.0, loss, {Scheme::QFI, Scheme::Parity, Scheme::SingleHD, Scheme::DoubleHD}, {kind}),
          loss_sweep(10.0, loss, {Scheme::QFI}, {ResourceKind::Coherent})};
}

}  // namespace detail

/// Sweeps making up one figure panel, emitted in this order.
inline std::vector<SweepSpec> figure_preset(const std::string& id) {
  using detail::loss_sweep;
  using detail::nbar_sweep;
  const std::vector<ResourceKind> all{ResourceKind::CSV, ResourceKind::TMSV, ResourceKind::Coherent};
  const auto sym = LossKind::Symmetric;
  const auto one = LossKind::OneArm;

  if (id.size() == 2 && id[0] >= '2' && id[0] <= '5') {
    const Scheme scheme = id[0] == '2'   ? Scheme::QFI
                          : id[0] == '3' ? Scheme::Parity
                          : id[0] == '4' ? Scheme::SingleHD
                                         : Scheme::DoubleHD;
    if (id[0] == '2') {
      if (id == "2a") return {loss_sweep(10.0, sym, {scheme}, all)};
      if (id == "2b") return {nbar_sweep(sym, {scheme})};
      if (id == "2c") return detail::ratio_panel(sym);
      if (id == "2d") return {loss_sweep(10.0, one, {scheme}, all)};
      if (id == "2e") return {nbar_sweep(one, {scheme})};
      if (id == "2f") return detail::ratio_panel(one);
    } else {
      if (id[1] == 'a') return {loss_sweep(10.0, sym, {scheme}, all)};
      if (id[1] == 'b') return {nbar_sweep(sym, {scheme})};
      if (id[1] == 'c') return {loss_sweep(10.0, one, {scheme}, all)};
      if (id[1] == 'd') return {nbar_sweep(one, {scheme})};
    }
  }
  if (id == "6a") return detail::comparison_panel(ResourceKind::CSV, sym);
  if (id == "6b") return detail::comparison_panel(ResourceKind::CSV, one);
  if (id == "6c") return detail::comparison_panel(ResourceKind::TMSV, sym);
  if (id == "6d") return detail::comparison_panel(ResourceKind::TMSV, one);
  const std::vector<Scheme> every{Scheme::QFI, Scheme::Parity, Scheme::SingleHD, Scheme::DoubleHD};
  if (id == "a1") return {loss_sweep(7.0, sym, every, all)};
  if (id == "a2") return {loss_sweep(7.0, one, every, all)};
  throw std::invalid_argument("unknown figure '" + id + "'");
}

}  // namespace mzi
