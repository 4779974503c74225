#pragma once

// Two-mode Gaussian states in the quadrature ordering (X_a, P_a, X_b, P_b),
// with X = (a + a^dagger)/sqrt(2) so that the vacuum covariance is I/2.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "mzi/matrix.hpp"
#include "mzi/real.hpp"

namespace mzi {

enum class Mode { A, B };

enum class Quadrature : std::size_t { Xa = 0, Pa = 1, Xb = 2, Pb = 3 };

enum class ResourceKind { CSV, TMSV, Coherent };

inline const char* to_string(ResourceKind k) {
  switch (k) {
    case ResourceKind::CSV:
      return "csv";
    case ResourceKind::TMSV:
      return "tmsv";
    case ResourceKind::Coherent:
      return "coherent";
  }
  return "?";
}

/// Input resource injected into the interferometer. All phases are zero, so
/// alpha, r and s are real and nonnegative.
struct ResourceSpec {
  ResourceKind kind = ResourceKind::Coherent;
  double alpha = 0.0;  // displacement of mode a (CSV, Coherent)
  double r = 0.0;      // single-mode squeezing of mode b (CSV)
  double s = 0.0;      // two-mode squeezing (TMSV)

  static ResourceSpec csv(double alpha, double r) { return {ResourceKind::CSV, alpha, r, 0.0}; }
  static ResourceSpec tmsv(double s) { return {ResourceKind::TMSV, 0.0, 0.0, s}; }
  static ResourceSpec coherent(double alpha) { return {ResourceKind::Coherent, alpha, 0.0, 0.0}; }

  /// CSV state with total photon number nbar, a fraction mu of which sits in
  /// the squeezed vacuum: alpha^2 = (1 - mu) nbar, sinh^2 r = mu nbar.
  static ResourceSpec csv_with_ratio(double nbar, double mu) {
    if (!(nbar >= 0.0) || !(mu >= 0.0 && mu <= 1.0))
      throw std::invalid_argument("csv_with_ratio: need nbar >= 0 and mu in [0,1]");
    return csv(std::sqrt((1.0 - mu) * nbar), std::asinh(std::sqrt(mu * nbar)));
  }
  static ResourceSpec tmsv_with_nbar(double nbar) {
    if (!(nbar >= 0.0)) throw std::invalid_argument("tmsv_with_nbar: nbar must be >= 0");
    return tmsv(std::asinh(std::sqrt(nbar / 2.0)));
  }
  static ResourceSpec coherent_with_nbar(double nbar) {
    if (!(nbar >= 0.0)) throw std::invalid_argument("coherent_with_nbar: nbar must be >= 0");
    return coherent(std::sqrt(nbar));
  }

  /// Closed-form input photon number.
  double nominal_photon_number() const {
    switch (kind) {
      case ResourceKind::CSV:
        return alpha * alpha + std::sinh(r) * std::sinh(r);
      case ResourceKind::TMSV:
        return 2.0 * std::sinh(s) * std::sinh(s);
      case ResourceKind::Coherent:
        return alpha * alpha;
    }
    return 0.0;
  }

  /// Squeezed-vacuum fraction of a CSV state (0 for coherent, 1 for TMSV).
  double squeezing_ratio() const {
    double n = nominal_photon_number();
    switch (kind) {
      case ResourceKind::CSV:
        return n > 0.0 ? std::sinh(r) * std::sinh(r) / n : 0.0;
      case ResourceKind::TMSV:
        return 1.0;
      case ResourceKind::Coherent:
        return 0.0;
    }
    return 0.0;
  }

  void validate() const {
    auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
    if (!ok(alpha) || !ok(r) || !ok(s))
      throw std::invalid_argument("ResourceSpec: alpha, r and s must be finite and nonnegative");
  }
};

template <class Real = double>
struct GaussianState {
  SquareMatrix<Real, 4> cov;
  Vector<Real, 4> mean;

  static GaussianState vacuum() {
    return {SquareMatrix<Real, 4>::identity() * Real(0.5), Vector<Real, 4>::zero()};
  }

  template <class U>
  GaussianState<U> cast() const {
    return {cov.template cast<U>(), mean.template cast<U>()};
  }
};

template <class Real = double>
struct SingleModeState {
  SquareMatrix<Real, 2> cov;
  Vector<Real, 2> mean;

  static SingleModeState vacuum() {
    return {SquareMatrix<Real, 2>::identity() * Real(0.5), Vector<Real, 2>::zero()};
  }
};

template <class Real = double>
struct SymplecticTransform {
  SquareMatrix<Real, 4> matrix;

  static SymplecticTransform identity() { return {SquareMatrix<Real, 4>::identity()}; }
};

/// Composition: (a * b) applies b first.
template <class Real>
SymplecticTransform<Real> operator*(const SymplecticTransform<Real>& a,
                                    const SymplecticTransform<Real>& b) {
  return {a.matrix * b.matrix};
}

template <class Real = double>
SquareMatrix<Real, 4> symplectic_form() {
  SquareMatrix<Real, 4> om;
  om(0, 1) = Real(1);
  om(1, 0) = Real(-1);
  om(2, 3) = Real(1);
  om(3, 2) = Real(-1);
  return om;
}

template <class Real>
bool is_symplectic(const SymplecticTransform<Real>& m, double tol = 1e-12) {
  const auto om = symplectic_form<Real>();
  return max_abs_diff(m.matrix * om * m.matrix.transpose(), om) <= Real(tol);
}

/// det(cov + i Omega / 2) for a two-mode covariance matrix. The matrix is
/// Hermitian, so the determinant is real; it equals
/// prod_k (nu_k^2 - 1/4) over the symplectic eigenvalues nu_k and vanishes
/// exactly for pure states.
template <class Real>
Real heisenberg_determinant(const SquareMatrix<Real, 4>& cov) {
  const Real seralian = determinant(cov.template block<2, 2>(0, 0)) +
                        determinant(cov.template block<2, 2>(2, 2)) +
                        Real(2) * determinant(cov.template block<2, 2>(0, 2));
  return determinant(cov) - seralian / Real(4) + Real(1) / Real(16);
}

/// Squared symplectic eigenvalues (smaller first).
template <class Real>
std::array<Real, 2> symplectic_eigenvalues_squared(const SquareMatrix<Real, 4>& cov) {
  using std::sqrt;
  const Real seralian = determinant(cov.template block<2, 2>(0, 0)) +
                        determinant(cov.template block<2, 2>(2, 2)) +
                        Real(2) * determinant(cov.template block<2, 2>(0, 2));
  const Real d = determinant(cov);
  Real disc = seralian * seralian - Real(4) * d;
  if (disc < Real(0)) disc = Real(0);
  const Real root = sqrt(disc);
  return {(seralian - root) / Real(2), (seralian + root) / Real(2)};
}

/// cov + i Omega/2 >= 0 within tol: cov positive definite and every
/// symplectic eigenvalue at least 1/2.
template <class Real>
bool is_physical(const GaussianState<Real>& st, double tol = 1e-10) {
  const auto& c = st.cov;
  if (max_abs_diff(c, c.transpose()) > Real(1e-12)) return false;
  if (c(0, 0) <= Real(0)) return false;
  if (determinant(c.template block<2, 2>(0, 0)) <= Real(0)) return false;
  if (determinant(c.template block<3, 3>(0, 0)) <= Real(0)) return false;
  if (determinant(c) <= Real(0)) return false;
  // nu_-^2 >= 1/4 iff the quadratic x^2 - seralian x + det c is nonnegative
  // at 1/4 with its vertex to the right; avoids the square root, which loses
  // half the digits near pure states.
  const Real seralian = determinant(c.template block<2, 2>(0, 0)) + determinant(c.template block<2, 2>(2, 2)) +
                        Real(2) * determinant(c.template block<2, 2>(0, 2));
  const Real scale = Real(1) + seralian * seralian;
  return heisenberg_determinant(c) >= -Real(tol) * scale && seralian >= Real(0.5) - Real(tol);
}

template <class Real>
bool is_physical(const SingleModeState<Real>& st, double tol = 1e-10) {
  const auto& c = st.cov;
  return c(0, 0) > Real(0) && c(1, 1) > Real(0) && c(0, 1) == c(1, 0) &&
         determinant(c) >= Real(0.25) - Real(tol);
}

template <class Real = double>
GaussianState<Real> make_input(const ResourceSpec& spec) {
  using std::cosh;
  using std::exp;
  using std::sinh;
  using std::sqrt;
  spec.validate();
  auto st = GaussianState<Real>::vacuum();
  const Real alpha(spec.alpha);
  switch (spec.kind) {
    case ResourceKind::CSV: {
      // Squeezes P_b and anti-squeezes X_b.
      const Real r(spec.r);
      st.mean[0] = sqrt(Real(2)) * alpha;
      st.cov(2, 2) = exp(Real(2) * r) / Real(2);
      st.cov(3, 3) = exp(Real(-2) * r) / Real(2);
      break;
    }
    case ResourceKind::TMSV: {
      const Real s(spec.s);
      const Real c = cosh(Real(2) * s) / Real(2);
      const Real sh = sinh(Real(2) * s) / Real(2);
      for (std::size_t i = 0; i < 4; ++i) st.cov(i, i) = c;
      st.cov(0, 2) = st.cov(2, 0) = sh;
      st.cov(1, 3) = st.cov(3, 1) = -sh;
      break;
    }
    case ResourceKind::Coherent:
      st.mean[0] = sqrt(Real(2)) * alpha;
      break;
  }
  return st;
}

template <class Real>
Real mean_photon_number(const GaussianState<Real>& st) {
  return (trace(st.cov) + dot(st.mean, st.mean)) / Real(2) - Real(1);
}

template <class Real>
Real mean_photon_number(const SingleModeState<Real>& st) {
  return (trace(st.cov) + dot(st.mean, st.mean)) / Real(2) - Real(0.5);
}

/// Beam splitter mixing a and b with angle theta; pi/4 is the 50:50 splitter
/// a -> (a + b)/sqrt(2).
template <class Real = double>
SymplecticTransform<Real> beam_splitter(const Real& theta) {
  using std::cos;
  using std::sin;
  const Real c = cos(theta);
  const Real s = sin(theta);
  SquareMatrix<Real, 4> m;
  m(0, 0) = c;
  m(1, 1) = c;
  m(2, 2) = c;
  m(3, 3) = c;
  m(0, 2) = s;
  m(1, 3) = s;
  m(2, 0) = -s;
  m(3, 1) = -s;
  return {m};
}

/// Local rotation of one mode by angle; row (cos, sin) of the block maps X to
/// X cos + P sin, i.e. the quadrature X_angle of that mode.
template <class Real = double>
SymplecticTransform<Real> mode_rotation(Mode mode, const Real& angle) {
  using std::cos;
  using std::sin;
  auto m = SquareMatrix<Real, 4>::identity();
  const std::size_t o = mode == Mode::A ? 0 : 2;
  const Real c = cos(angle);
  const Real s = sin(angle);
  m(o, o) = c;
  m(o, o + 1) = s;
  m(o + 1, o) = -s;
  m(o + 1, o + 1) = c;
  return {m};
}

/// Phase shift exp(-i phi a^dagger a) on mode a.
template <class Real = double>
SymplecticTransform<Real> phase_shifter(const Real& phi) {
  return mode_rotation<Real>(Mode::A, phi);
}

template <class Real>
GaussianState<Real> apply_symplectic(const GaussianState<Real>& st, const SymplecticTransform<Real>& m,
                                     bool check = true) {
  if (check && !is_symplectic(m)) throw std::invalid_argument("apply_symplectic: matrix is not symplectic");
  return {symmetrized<Real, 4>(m.matrix * st.cov * m.matrix.transpose()), m.matrix * st.mean};
}

/// Pure-loss channel with per-mode transmissivities.
template <class Real>
GaussianState<Real> apply_loss(const GaussianState<Real>& st, double eta_a, double eta_b) {
  using std::sqrt;
  auto in_unit = [](double e) { return e >= 0.0 && e <= 1.0; };
  if (!in_unit(eta_a) || !in_unit(eta_b))
    throw std::invalid_argument("apply_loss: transmissivity must lie in [0, 1]");
  const Real ea(eta_a);
  const Real eb(eta_b);
  const Real sa = sqrt(ea);
  const Real sb = sqrt(eb);
  const auto d1 = SquareMatrix<Real, 4>::diagonal({sa, sa, sb, sb});
  const auto d2 = SquareMatrix<Real, 4>::diagonal({Real(1) - ea, Real(1) - ea, Real(1) - eb, Real(1) - eb});
  return {symmetrized<Real, 4>(d1 * st.cov * d1 + d2 * Real(0.5)), d1 * st.mean};
}

/// Partial trace onto one mode.
template <class Real>
SingleModeState<Real> reduce_to_mode(const GaussianState<Real>& st, Mode mode) {
  const std::size_t o = mode == Mode::A ? 0 : 2;
  SingleModeState<Real> out;
  out.cov = st.cov.template block<2, 2>(o, o);
  out.mean[0] = st.mean[o];
  out.mean[1] = st.mean[o + 1];
  return out;
}

/// Symmetric-ordered moment of 1, 2 or 4 quadratures, from the Gaussian
/// characteristic function (Isserlis pairing with means). Equals the operator
/// moment whenever the listed quadratures mutually commute, which holds for
/// every observable this library measures (distinct modes, or repeats of
/// one quadrature).
template <class Real>
Real symmetric_moment(const GaussianState<Real>& st, std::span<const Quadrature> q) {
  auto idx = [&](std::size_t k) { return static_cast<std::size_t>(q[k]); };
  const auto& g = st.cov;
  const auto& d = st.mean;
  switch (q.size()) {
    case 1:
      return d[idx(0)];
    case 2:
      return g(idx(0), idx(1)) + d[idx(0)] * d[idx(1)];
    case 4: {
      const std::size_t i = idx(0), j = idx(1), k = idx(2), l = idx(3);
      Real total = d[i] * d[j] * d[k] * d[l];
      total += g(i, j) * d[k] * d[l] + g(i, k) * d[j] * d[l] + g(i, l) * d[j] * d[k];
      total += g(j, k) * d[i] * d[l] + g(j, l) * d[i] * d[k] + g(k, l) * d[i] * d[j];
      total += g(i, j) * g(k, l) + g(i, k) * g(j, l) + g(i, l) * g(j, k);
      return total;
    }
    default:
      throw std::invalid_argument("symmetric_moment: supported orders are 1, 2 and 4, got " +
                                  std::to_string(q.size()));
  }
}

template <class Real>
Real symmetric_moment(const GaussianState<Real>& st, std::initializer_list<Quadrature> q) {
  return symmetric_moment(st, std::span<const Quadrature>(q.begin(), q.size()));
}

}  // namespace mzi
