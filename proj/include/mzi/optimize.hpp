#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mzi/errors.hpp"
#include "mzi/gaussian.hpp"
#include "mzi/interferometer.hpp"
#include "mzi/measurements.hpp"
#include "mzi/qfi.hpp"

namespace mzi {

// ---------------------------------------------------------------------------
// One-dimensional search primitives

namespace detail {

template <class Fn>
double guarded(Fn& f, double x) {
  try {
    double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  } catch (const DegenerateWorkingPoint&) {
    return HUGE_VAL;
  }
}

}  // namespace detail

struct Minimum {
  double x = 0.0;
  double value = HUGE_VAL;
};

/// Golden-section minimization on [lo, hi] until the bracket is narrower
/// than tol. Degenerate points count as +inf.
template <class Fn>
Minimum golden_section(Fn&& f, double lo, double hi, double tol = 1e-8, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = detail::guarded(f, c);
  double fd = detail::guarded(f, d);
  for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = detail::guarded(f, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = detail::guarded(f, d);
    }
  }
  return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

struct PhiOptimum {
  double phi = 0.0;
  double value = HUGE_VAL;
};

inline constexpr int kPhiGrid = 720;
inline constexpr double kPhiTolerance = 1e-8;

/// Global minimum of f over the periodic interval [lo, hi): uniform grid,
/// then golden-section refinement around the best local minima of the grid.
/// Throws NoOptimum if f is degenerate at every grid point.
template <class Fn>
PhiOptimum optimal_phi(Fn&& f, double lo = 0.0, double hi = 2.0 * M_PI, int grid = kPhiGrid,
                       double tol = kPhiTolerance, int refine = 3) {
  if (!(hi > lo) || grid < 3) throw std::invalid_argument("optimal_phi: need hi > lo and at least 3 grid points");
  const double step = (hi - lo) / grid;
  std::vector<double> values(grid);
  for (int k = 0; k < grid; ++k) values[k] = detail::guarded(f, lo + k * step);

  std::vector<int> minima;
  for (int k = 0; k < grid; ++k) {
    const double v = values[k];
    if (!std::isfinite(v)) continue;
    const double left = values[(k + grid - 1) % grid];
    const double right = values[(k + 1) % grid];
    if (v <= left && v <= right) minima.push_back(k);
  }
  if (minima.empty()) {
    for (int k = 0; k < grid; ++k)
      if (std::isfinite(values[k])) minima.push_back(k);
  }
  if (minima.empty()) throw NoOptimum("optimal_phi: objective is degenerate everywhere");
  std::stable_sort(minima.begin(), minima.end(), [&](int a, int b) { return values[a] < values[b]; });
  if (static_cast<int>(minima.size()) > refine) minima.resize(refine);

  PhiOptimum best{lo + minima.front() * step, values[minima.front()]};
  for (int k : minima) {
    const double x = lo + k * step;
    const auto m = golden_section(f, x - step, x + step, tol);
    if (m.value < best.value) best = {m.x, m.value};
  }
  // Report phi in [lo, hi).
  best.phi = lo + std::fmod(std::fmod(best.phi - lo, hi - lo) + (hi - lo), hi - lo);
  return best;
}

// ---------------------------------------------------------------------------
// Working points for individual observables

template <class Real = double>
PhiOptimum optimal_working_point(const ResourceSpec& resource, const LossModel& loss, const ObservableSpec& obs) {
  const SensitivityCurve<Real> curve(resource, loss, obs);
  return optimal_phi([&curve](double phi) { return curve.error_at(phi); });
}

struct AngleOptimum {
  double angle_a = 0.0;
  double angle_b = 0.0;
  double value = HUGE_VAL;
};

namespace detail {

/// Damped Newton descent on log d2phi over the two angles.
template <class Real>
AngleOptimum polish_angles(const SumQuadratureForm<Real>& form, double a, double b) {
  auto jet = form.log_error_jet(a, b);
  if (!std::isfinite(jet.value)) return {a, b, HUGE_VAL};
  for (int it = 0; it < 60; ++it) {
    const auto& h = jet.hess;
    const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    double da = -jet.grad[0];
    double db = -jet.grad[1];
    if (h[0][0] > 0.0 && det > 0.0) {
      da = -(h[1][1] * jet.grad[0] - h[0][1] * jet.grad[1]) / det;
      db = -(h[0][0] * jet.grad[1] - h[1][0] * jet.grad[0]) / det;
    }
    const double len = std::hypot(da, db);
    if (len > 0.5) {
      da *= 0.5 / len;
      db *= 0.5 / len;
    }
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      const auto next = form.log_error_jet(a + t * da, b + t * db);
      if (next.value < jet.value) {
        a += t * da;
        b += t * db;
        jet = next;
        moved = true;
        break;
      }
    }
    if (!moved || t * std::hypot(da, db) < 1e-13) break;
  }
  return {a, b, std::exp(jet.value)};
}

}  // namespace detail

/// Best local-oscillator angles for the quadrature sum at one working point:
/// grid search, then Newton polishing of the best `polish` grid minima.
/// u -> -u leaves the error unchanged, so angle_a is searched on [0, pi).
template <class Real>
AngleOptimum optimal_sum_angles(const SumQuadratureForm<Real>& form, int grid_a = 12, int grid_b = 24,
                                int polish = 3) {
  if (grid_a < 1 || grid_b < 2 || grid_b % 2 != 0)
    throw std::invalid_argument("optimal_sum_angles: grid_b must be even and positive");
  const double step_a = M_PI / grid_a;
  const double step_b = 2.0 * M_PI / grid_b;
  std::vector<double> cb(grid_b), sb(grid_b), values(static_cast<std::size_t>(grid_a) * grid_b);
  for (int j = 0; j < grid_b; ++j) {
    cb[j] = std::cos(j * step_b);
    sb[j] = std::sin(j * step_b);
  }
  for (int i = 0; i < grid_a; ++i) {
    const double ca = std::cos(i * step_a);
    const double sa = std::sin(i * step_a);
    for (int j = 0; j < grid_b; ++j) values[i * grid_b + j] = form.error_at_direction(ca, sa, cb[j], sb[j]);
  }
  // Neighbours on the grid; crossing angle_a = pi maps to (a - pi, b + pi).
  auto at = [&](int i, int j) {
    int shift = 0;
    if (i < 0) {
      i += grid_a;
      shift = grid_b / 2;
    } else if (i >= grid_a) {
      i -= grid_a;
      shift = grid_b / 2;
    }
    return values[i * grid_b + ((j + shift) % grid_b + grid_b) % grid_b];
  };
  std::vector<int> minima;
  for (int i = 0; i < grid_a; ++i)
    for (int j = 0; j < grid_b; ++j) {
      const double v = values[i * grid_b + j];
      if (!std::isfinite(v)) continue;
      bool local = true;
      for (int di = -1; di <= 1 && local; ++di)
        for (int dj = -1; dj <= 1 && local; ++dj)
          if ((di || dj) && at(i + di, j + dj) < v) local = false;
      if (local) minima.push_back(i * grid_b + j);
    }
  AngleOptimum best;
  if (minima.empty()) return best;
  std::stable_sort(minima.begin(), minima.end(), [&](int x, int y) { return values[x] < values[y]; });
  best = {(minima.front() / grid_b) * step_a, (minima.front() % grid_b) * step_b, values[minima.front()]};
  if (static_cast<int>(minima.size()) > polish) minima.resize(std::max(polish, 0));
  for (int m : minima) {
    const auto p = detail::polish_angles(form, (m / grid_b) * step_a, (m % grid_b) * step_b);
    if (p.value < best.value) best = p;
  }
  best.angle_a = std::fmod(std::fmod(best.angle_a, 2 * M_PI) + 2 * M_PI, 2 * M_PI);
  best.angle_b = std::fmod(std::fmod(best.angle_b, 2 * M_PI) + 2 * M_PI, 2 * M_PI);
  return best;
}

struct DoubleHdOptimum {
  double phi = 0.0;
  double angle_a = 0.0;
  double angle_b = 0.0;
  double value = HUGE_VAL;
};

/// Quadrature-sum double homodyne optimized over the working point and both
/// local-oscillator angles. The phi grid uses a coarse angle search; the
/// best grid minima are refined with the full one.
template <class Real = double>
DoubleHdOptimum optimal_double_hd_sum(const ResourceSpec& resource, const LossModel& loss) {
  const auto pre = pre_phase_state<Real>(resource, loss);
  auto at = [&pre](double phi, bool coarse) {
    const SumQuadratureForm<Real> form(MomentFrame<Real>(pre, Real(phi)));
    return coarse ? optimal_sum_angles(form, 6, 12, 1) : optimal_sum_angles(form, 12, 24, 3);
  };
  const double step = 2 * M_PI / kPhiGrid;
  std::vector<double> values(kPhiGrid);
  for (int k = 0; k < kPhiGrid; ++k) values[k] = at(k * step, true).value;
  std::vector<int> order(kPhiGrid);
  for (int k = 0; k < kPhiGrid; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  if (!std::isfinite(values[order.front()])) throw NoOptimum("double homodyne: degenerate at every working point");

  DoubleHdOptimum best;
  std::vector<int> seeds;
  for (int k : order) {
    if (seeds.size() == 3) break;
    bool near = false;
    for (int s : seeds) near = near || std::abs(s - k) <= 2 || std::abs(s - k) >= kPhiGrid - 2;
    if (!near) seeds.push_back(k);
  }
  for (int k : seeds) {
    const auto m = golden_section([&](double phi) { return at(phi, false).value; }, (k - 1) * step, (k + 1) * step,
                                  kPhiTolerance);
    if (m.value < best.value) {
      const auto angles = at(m.x, false);
      best = {m.x, angles.angle_a, angles.angle_b, angles.value};
    }
  }
  best.phi = std::fmod(std::fmod(best.phi, 2 * M_PI) + 2 * M_PI, 2 * M_PI);
  return best;
}

// ---------------------------------------------------------------------------
// Optimal squeezed-vacuum fraction

struct RatioOptimum {
  double mu = 1.0;
  double qfi = 0.0;
};

/// Maximizes the CSV QFI over mu in [0, 1] at fixed total photon number.
inline RatioOptimum optimal_csv_ratio(double nbar, const LossModel& loss, double tol = 1e-6) {
  if (!(nbar > 0.0)) throw std::invalid_argument("optimal_csv_ratio: nbar must be positive");
  auto neg_qfi = [&](double mu) {
    mu = std::clamp(mu, 0.0, 1.0);
    return -qfi(ResourceSpec::csv_with_ratio(nbar, mu), loss).qfi;
  };
  constexpr int grid = 100;
  int best_k = 0;
  double best_v = HUGE_VAL;
  for (int k = 0; k <= grid; ++k) {
    const double v = neg_qfi(static_cast<double>(k) / grid);
    if (v < best_v) {
      best_v = v;
      best_k = k;
    }
  }
  const double lo = std::max(0.0, (best_k - 1.0) / grid);
  const double hi = std::min(1.0, (best_k + 1.0) / grid);
  const auto m = golden_section(neg_qfi, lo, hi, tol);
  RatioOptimum out{static_cast<double>(best_k) / grid, -best_v};
  if (m.value < best_v) out = {std::clamp(m.x, 0.0, 1.0), -m.value};
  // The bracket ends are exact candidates (mu = 1 is the lossless optimum).
  for (double edge : {lo, hi}) {
    const double v = neg_qfi(edge);
    if (v < -out.qfi) out = {edge, -v};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schemes

enum class Scheme { QFI, Parity, SingleHD, DoubleHD };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::QFI:
      return "qfi";
    case Scheme::Parity:
      return "parity";
    case Scheme::SingleHD:
      return "single-hd";
    case Scheme::DoubleHD:
      return "double-hd";
  }
  return "?";
}

/// Observable each scheme reads for a given resource. The quadrature-sum
/// double homodyne on CSV is handled separately since its angles are
/// optimized.
inline ObservableSpec scheme_observable(Scheme scheme, ResourceKind kind) {
  switch (scheme) {
    case Scheme::Parity:
      return ObservableSpec::parity();
    case Scheme::SingleHD:
      return kind == ResourceKind::TMSV ? ObservableSpec::quadrature_squared(0.0) : ObservableSpec::p_quadrature();
    case Scheme::DoubleHD:
      if (kind == ResourceKind::TMSV) return ObservableSpec::product(0.0, 0.0);
      if (kind == ResourceKind::CSV) return ObservableSpec::sum(0.0, 0.0);
      return ObservableSpec::p_quadrature();
    case Scheme::QFI:
      break;
  }
  throw std::invalid_argument("scheme_observable: QFI has no observable");
}

/// Optimized sensitivity of one scheme on one concrete resource.
struct SchemePoint {
  double delta2phi = HUGE_VAL;
  double phi_star = 0.0;
  double mu = 0.0;
  double angle_a = 0.0;
  double angle_b = 0.0;
};

template <class Real = double>
SchemePoint evaluate_scheme(Scheme scheme, const ResourceSpec& resource, const LossModel& loss) {
  SchemePoint out;
  out.mu = resource.squeezing_ratio();
  if (scheme == Scheme::QFI) {
    const auto q = qfi(resource, loss);
    out.delta2phi = q.qcrb;
    return out;
  }
  const auto obs = scheme_observable(scheme, resource.kind);
  if (obs.kind == ObservableKind::SumQuadAB) {
    const auto o = optimal_double_hd_sum<Real>(resource, loss);
    out.delta2phi = o.value;
    out.phi_star = o.phi;
    out.angle_a = o.angle_a;
    out.angle_b = o.angle_b;
    return out;
  }
  const auto o = optimal_working_point<Real>(resource, loss, obs);
  out.delta2phi = o.value;
  out.phi_star = o.phi;
  out.angle_a = obs.angle_a;
  out.angle_b = obs.angle_b;
  return out;
}

/// How the CSV squeezed fraction is chosen at each point.
struct MuPolicy {
  std::optional<double> fixed;  // empty: optimize per point

  static MuPolicy optimize() { return {}; }
  static MuPolicy fixed_at(double mu) { return {mu}; }
};

inline ResourceSpec resource_with_nbar(ResourceKind kind, double nbar, double mu = 1.0) {
  switch (kind) {
    case ResourceKind::CSV:
      return ResourceSpec::csv_with_ratio(nbar, mu);
    case ResourceKind::TMSV:
      return ResourceSpec::tmsv_with_nbar(nbar);
    case ResourceKind::Coherent:
      return ResourceSpec::coherent_with_nbar(nbar);
  }
  throw std::invalid_argument("resource_with_nbar: unknown resource");
}

/// Scheme sensitivity at total photon number nbar. For CSV the squeezed
/// fraction is optimized per point unless the policy fixes it.
inline SchemePoint scheme_sensitivity(Scheme scheme, ResourceKind kind, double nbar, const LossModel& loss,
                                      MuPolicy policy = MuPolicy::optimize()) {
  if (kind != ResourceKind::CSV) return evaluate_scheme(scheme, resource_with_nbar(kind, nbar), loss);
  if (policy.fixed) return evaluate_scheme(scheme, ResourceSpec::csv_with_ratio(nbar, *policy.fixed), loss);
  if (scheme == Scheme::QFI) {
    const auto r = optimal_csv_ratio(nbar, loss);
    SchemePoint out;
    out.mu = r.mu;
    out.delta2phi = r.qfi > 0.0 ? 1.0 / r.qfi : HUGE_VAL;
    return out;
  }
  auto at_mu = [&](double mu) {
    mu = std::clamp(mu, 0.0, 1.0);
    try {
      return evaluate_scheme(scheme, ResourceSpec::csv_with_ratio(nbar, mu), loss);
    } catch (const NoOptimum&) {
      return SchemePoint{HUGE_VAL, 0.0, mu, 0.0, 0.0};
    }
  };
  constexpr int grid = 10;
  SchemePoint best;
  int best_k = 0;
  for (int k = 0; k <= grid; ++k) {
    const auto p = at_mu(static_cast<double>(k) / grid);
    if (p.delta2phi < best.delta2phi) {
      best = p;
      best_k = k;
    }
  }
  const double lo = std::max(0.0, (best_k - 1.0) / grid);
  const double hi = std::min(1.0, (best_k + 1.0) / grid);
  const auto m = golden_section([&](double mu) { return at_mu(mu).delta2phi; }, lo, hi, 1e-4);
  if (m.value < best.delta2phi) best = at_mu(m.x);
  return best;
}

// ---------------------------------------------------------------------------
// Shot-noise-limit crossing in loss rate

enum class ThresholdStatus { Found, NeverBelow, NoCrossing };

inline const char* to_string(ThresholdStatus s) {
  switch (s) {
    case ThresholdStatus::Found:
      return "found";
    case ThresholdStatus::NeverBelow:
      return "never-below-snl";
    case ThresholdStatus::NoCrossing:
      return "no-crossing";
  }
  return "?";
}

struct ThresholdResult {
  ThresholdStatus status = ThresholdStatus::NoCrossing;
  double loss_rate = 0.0;  // midpoint of the final bracket
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

inline constexpr double kThresholdTolerance = 1e-3;
inline constexpr double kThresholdScanStep = 0.05;
inline constexpr double kMaxLossRate = 0.99;

/// Loss rate at which a scheme's optimized sensitivity first rises above the
/// shot-noise limit 1/(2 nbar). A coarse scan locates the first upward
/// crossing; bisection narrows it to tol.
inline ThresholdResult snl_threshold(Scheme scheme, ResourceKind kind, double nbar, LossKind loss_kind,
                                     MuPolicy policy = MuPolicy::optimize(), double tol = kThresholdTolerance) {
  auto below = [&](double rate) {
    try {
      return beats_shot_noise(
          scheme_sensitivity(scheme, kind, nbar, LossModel::from_rate(loss_kind, rate), policy).delta2phi, nbar);
    } catch (const NoOptimum&) {
      return false;
    }
  };
  ThresholdResult out;
  if (!below(0.0)) {
    out.status = ThresholdStatus::NeverBelow;
    return out;
  }
  double lo = 0.0;
  double hi = -1.0;
  for (double r = kThresholdScanStep; r <= kMaxLossRate + 1e-12; r += kThresholdScanStep) {
    const double rate = std::min(r, kMaxLossRate);
    if (!below(rate)) {
      hi = rate;
      break;
    }
    lo = rate;
  }
  if (hi < 0.0) {
    out.status = ThresholdStatus::NoCrossing;
    out.lo = out.hi = out.loss_rate = kMaxLossRate;
    return out;
  }
  int it = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? lo : hi) = mid;
    ++it;
  }
  out.status = ThresholdStatus::Found;
  out.lo = lo;
  out.hi = hi;
  out.loss_rate = 0.5 * (lo + hi);
  out.iterations = it;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepVariable { LossRate, MeanPhotonNumber };

struct SweepSpec {
  SweepVariable variable = SweepVariable::LossRate;
  double lo = 0.0;
  double hi = 0.5;
  int points = 51;
  double nbar = 10.0;       // used when sweeping loss rate
  double loss_rate = 0.2;   // used when sweeping nbar
  LossKind loss_kind = LossKind::Symmetric;
  std::vector<Scheme> schemes{Scheme::QFI};
  std::vector<ResourceKind> resources{ResourceKind::CSV, ResourceKind::TMSV, ResourceKind::Coherent};
  MuPolicy mu_policy = MuPolicy::optimize();

  void validate() const {
    if (!(hi > lo)) throw std::invalid_argument("SweepSpec: need lo < hi");
    if (points < 2) throw std::invalid_argument("SweepSpec: need at least 2 points");
    if (schemes.empty() || resources.empty()) throw std::invalid_argument("SweepSpec: no schemes or resources");
  }

  double value_at(int i) const { return lo + (hi - lo) * i / (points - 1); }
};

struct SweepRow {
  double value = 0.0;  // swept variable
  Scheme scheme = Scheme::QFI;
  ResourceKind resource = ResourceKind::CSV;
  double nbar = 0.0;
  LossKind loss_kind = LossKind::Symmetric;
  double loss_rate = 0.0;
  SchemePoint point;
  std::string status = "ok";
};

/// Worker count for sweeps: MZI_LAB_THREADS if set, else hardware threads.
inline unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MZI_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

inline SweepRow sweep_cell(const SweepSpec& spec, double value, Scheme scheme, ResourceKind kind) {
  SweepRow row;
  row.value = value;
  row.scheme = scheme;
  row.resource = kind;
  row.loss_kind = spec.loss_kind;
  row.nbar = spec.variable == SweepVariable::MeanPhotonNumber ? value : spec.nbar;
  row.loss_rate = spec.variable == SweepVariable::LossRate ? value : spec.loss_rate;
  try {
    row.point = scheme_sensitivity(scheme, kind, row.nbar, LossModel::from_rate(spec.loss_kind, row.loss_rate),
                                   spec.mu_policy);
  } catch (const NoOptimum&) {
    row.status = "degenerate";
  } catch (const NumericFailure&) {
    row.status = "numeric-failure";
  } catch (const std::invalid_argument&) {
    row.status = "invalid";
  }
  return row;
}

/// Evaluates every (grid point, scheme, resource) cell. Row order is grid
/// index, then scheme, then resource, independent of threading.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads = 0) {
  spec.validate();
  struct Cell {
    double value;
    Scheme scheme;
    ResourceKind kind;
  };
  std::vector<Cell> cells;
  for (int i = 0; i < spec.points; ++i)
    for (auto s : spec.schemes)
      for (auto k : spec.resources) cells.push_back({spec.value_at(i), s, k});

  std::vector<SweepRow> rows(cells.size());
  if (threads == 0) threads = sweep_threads();
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      rows[i] = sweep_cell(spec, cells[i].value, cells[i].scheme, cells[i].kind);
    return rows;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < cells.size(); i += threads)
        rows[i] = sweep_cell(spec, cells[i].value, cells[i].scheme, cells[i].kind);
    });
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace mzi
