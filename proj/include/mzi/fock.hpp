#pragma once

// Brute-force two-mode simulator in a truncated number basis. Used to
// cross-check the Gaussian pipeline at small photon number.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mzi/errors.hpp"
#include "mzi/gaussian.hpp"
#include "mzi/interferometer.hpp"

namespace mzi::fock {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr int kDefaultCutoff = 40;
inline constexpr double kLeakageBound = 1e-8;

/// Density matrix over {|n,m> : n, m < cutoff}, row index n * cutoff + m.
struct FockState {
  int cutoff = 0;
  DenseMatrix dm;

  int dim() const { return cutoff * cutoff; }
  int index(int n, int m) const { return n * cutoff + m; }
  double trace() const { return dm.trace().real(); }
  double hermiticity_error() const { return (dm - dm.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(dm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

struct BeamSplitter {
  double theta = 0.0;
};

/// exp(-i phi n) on the chosen mode.
struct Phase {
  double phi = 0.0;
  Mode mode = Mode::A;
};

struct Loss {
  double eta_a = 1.0;
  double eta_b = 1.0;
};

using Channel = std::variant<BeamSplitter, Phase, Loss>;

namespace detail {

inline void check_cutoff(int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("fock: cutoff must be positive");
}

inline void check_leakage(double kept, double bound) {
  const double leakage = 1.0 - kept;
  if (leakage > bound) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "fock: truncation leakage %.3g exceeds bound %.3g", leakage, bound);
    throw CutoffTooSmall(buf);
  }
}

inline std::vector<double> coherent_amplitudes(double alpha, int cutoff) {
  std::vector<double> c(cutoff);
  c[0] = std::exp(-alpha * alpha / 2);
  for (int n = 1; n < cutoff; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

/// Squeezed vacuum with positive even amplitudes, which anti-squeezes X.
inline std::vector<double> squeezed_amplitudes(double r, int cutoff) {
  std::vector<double> c(cutoff, 0.0);
  const double t = std::tanh(r);
  c[0] = 1.0 / std::sqrt(std::cosh(r));
  for (int k = 2; k < cutoff; k += 2) c[k] = c[k - 2] * t * std::sqrt(static_cast<double>(k - 1) / k);
  return c;
}

/// Weight of a product state on n + m < cutoff. The beam splitter conserves
/// n + m, so only that triangle is propagated exactly.
inline double triangle_weight(const std::vector<double>& ca, const std::vector<double>& cb, int cutoff) {
  double s = 0.0;
  for (int n = 0; n < cutoff; ++n)
    for (int m = 0; n + m < cutoff; ++m) s += ca[n] * ca[n] * cb[m] * cb[m];
  return s;
}

inline FockState pure_product(const std::vector<double>& ca, const std::vector<double>& cb, int cutoff) {
  Eigen::VectorXcd psi(cutoff * cutoff);
  for (int n = 0; n < cutoff; ++n)
    for (int m = 0; m < cutoff; ++m) psi[n * cutoff + m] = ca[n] * cb[m];
  psi /= psi.norm();
  return {cutoff, psi * psi.adjoint()};
}

/// Generator a^dag b - a b^dag restricted to the total-photon block N,
/// basis |n, N - n> for n = lo..hi.
inline Eigen::MatrixXd block_generator(int total, int lo, int hi) {
  const int size = hi - lo + 1;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
  for (int n = lo; n <= hi; ++n) {
    const int m = total - n;
    if (n + 1 <= hi) g(n + 1 - lo, n - lo) += std::sqrt(static_cast<double>((n + 1) * m));
    if (n - 1 >= lo) g(n - 1 - lo, n - lo) -= std::sqrt(static_cast<double>(n * (m + 1)));
  }
  return g;
}

/// Basis ordering grouped by total photon number, with the block offsets.
struct TotalNumberBlocks {
  Eigen::PermutationMatrix<Eigen::Dynamic> perm;  // maps |n,m> to its position in block order
  std::vector<int> offsets;                        // offsets[N] .. offsets[N + 1]
  std::vector<int> lows;                           // smallest n in block N
};

inline TotalNumberBlocks total_number_blocks(int cutoff) {
  TotalNumberBlocks b;
  b.perm.resize(cutoff * cutoff);
  int pos = 0;
  for (int total = 0; total <= 2 * (cutoff - 1); ++total) {
    const int lo = std::max(0, total - cutoff + 1);
    const int hi = std::min(total, cutoff - 1);
    b.offsets.push_back(pos);
    b.lows.push_back(lo);
    for (int n = lo; n <= hi; ++n) b.perm.indices()[n * cutoff + (total - n)] = pos++;
  }
  b.offsets.push_back(pos);
  return b;
}

/// U rho U^dag for U = exp(theta (a^dag b - a b^dag)), which is block diagonal
/// in the total photon number.
inline DenseMatrix apply_beam_splitter(const DenseMatrix& rho, double theta, int cutoff) {
  const auto blocks = total_number_blocks(cutoff);
  DenseMatrix work = blocks.perm * rho * blocks.perm.transpose();
  std::vector<Eigen::MatrixXcd> unitaries;
  for (std::size_t total = 0; total + 1 < blocks.offsets.size(); ++total) {
    const int lo = blocks.lows[total];
    const int hi = lo + blocks.offsets[total + 1] - blocks.offsets[total] - 1;
    unitaries.push_back((theta * block_generator(static_cast<int>(total), lo, hi)).exp().cast<Complex>());
  }
  for (std::size_t t = 0; t < unitaries.size(); ++t) {
    const int off = blocks.offsets[t];
    const int size = blocks.offsets[t + 1] - off;
    work.middleRows(off, size) = (unitaries[t] * work.middleRows(off, size)).eval();
  }
  for (std::size_t t = 0; t < unitaries.size(); ++t) {
    const int off = blocks.offsets[t];
    const int size = blocks.offsets[t + 1] - off;
    work.middleCols(off, size) = (work.middleCols(off, size) * unitaries[t].adjoint()).eval();
  }
  return blocks.perm.transpose() * work * blocks.perm;
}

/// sqrt(C(n + k, k) eta^n (1 - eta)^k): amplitude of losing k photons from n + k.
inline double kraus_amplitude(int n, int k, double eta) {
  const double log_binom = std::lgamma(n + k + 1.0) - std::lgamma(n + 1.0) - std::lgamma(k + 1.0);
  return std::sqrt(std::exp(log_binom) * std::pow(eta, n) * std::pow(1.0 - eta, k));
}

inline DenseMatrix swap_modes(const DenseMatrix& m, int d) {
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(d * d);
  for (int n = 0; n < d; ++n)
    for (int k = 0; k < d; ++k) perm.indices()[n * d + k] = k * d + n;
  return perm * m * perm.transpose();
}

/// Loss on mode a as sum_k K_k rho K_k^dag. K_k maps |n + k, m> to |n, m>, so
/// each term is a scaled diagonal block of rho shifted by k * d.
inline DenseMatrix loss_on_a(const DenseMatrix& rho, int d, double eta) {
  if (eta == 1.0) return rho;
  DenseMatrix out = DenseMatrix::Zero(d * d, d * d);
  for (int k = 0; k < d; ++k) {
    const int size = (d - k) * d;
    Eigen::VectorXd w(size);
    for (int n = 0; n < d - k; ++n) w.segment(n * d, d).setConstant(kraus_amplitude(n, k, eta));
    if (w.cwiseAbs().maxCoeff() == 0.0) continue;
    out.topLeftCorner(size, size) +=
        (w * w.transpose()).cast<Complex>().cwiseProduct(rho.block(k * d, k * d, size, size));
  }
  return out;
}

}  // namespace detail

/// Input state of the interferometer in the number basis.
inline FockState build_fock_input(const ResourceSpec& spec, int cutoff = kDefaultCutoff,
                                  double leakage_bound = kLeakageBound) {
  detail::check_cutoff(cutoff);
  spec.validate();
  switch (spec.kind) {
    case ResourceKind::Coherent:
    case ResourceKind::CSV: {
      const auto ca = detail::coherent_amplitudes(spec.alpha, cutoff);
      const double r = spec.kind == ResourceKind::CSV ? spec.r : 0.0;
      const auto cb = detail::squeezed_amplitudes(r, cutoff);
      detail::check_leakage(detail::triangle_weight(ca, cb, cutoff), leakage_bound);
      return detail::pure_product(ca, cb, cutoff);
    }
    case ResourceKind::TMSV: {
      const double lambda = std::tanh(spec.s);
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(cutoff * cutoff);
      double amp = std::sqrt(1.0 - lambda * lambda);
      double kept = 0.0;
      for (int n = 0; n < cutoff; ++n, amp *= lambda) {
        psi[n * cutoff + n] = amp;
        if (2 * n < cutoff) kept += amp * amp;
      }
      detail::check_leakage(kept, leakage_bound);
      psi /= psi.norm();
      return {cutoff, psi * psi.adjoint()};
    }
  }
  throw std::invalid_argument("build_fock_input: unknown resource");
}

inline FockState apply_channel_fock(const FockState& st, const Channel& channel) {
  return std::visit(
      [&st](const auto& ch) -> FockState {
        using T = std::decay_t<decltype(ch)>;
        const int d = st.cutoff;
        if constexpr (std::is_same_v<T, BeamSplitter>) {
          return {d, detail::apply_beam_splitter(st.dm, ch.theta, d)};
        } else if constexpr (std::is_same_v<T, Phase>) {
          Eigen::VectorXcd u(st.dim());
          for (int i = 0; i < st.dim(); ++i) u[i] = std::polar(1.0, -ch.phi * (ch.mode == Mode::A ? i / d : i % d));
          return {d, u.asDiagonal() * st.dm * u.conjugate().asDiagonal()};
        } else {
          LossModel::checked(ch.eta_a, ch.eta_b);
          DenseMatrix rho = detail::loss_on_a(st.dm, d, ch.eta_a);
          if (ch.eta_b != 1.0) rho = detail::swap_modes(detail::loss_on_a(detail::swap_modes(rho, d), d, ch.eta_b), d);
          return {d, rho};
        }
      },
      channel);
}

/// Input, first splitter and loss: the part of the interferometer that does
/// not depend on the phase.
inline FockState oracle_pre_phase(const ResourceSpec& resource, const LossModel& loss, int cutoff = kDefaultCutoff) {
  auto st = build_fock_input(resource, cutoff);
  st = apply_channel_fock(st, BeamSplitter{std::acos(-1.0) / 4});
  return apply_channel_fock(st, Loss{loss.eta_a, loss.eta_b});
}

inline FockState oracle_finish(const FockState& pre_phase, double phi) {
  auto st = apply_channel_fock(pre_phase, Phase{phi, Mode::A});
  return apply_channel_fock(st, BeamSplitter{-std::acos(-1.0) / 4});
}

inline FockState oracle_output(const InterferometerConfig& cfg, int cutoff = kDefaultCutoff) {
  return oracle_finish(oracle_pre_phase(cfg.resource, cfg.loss, cutoff), cfg.phi);
}

enum class Observable { ParityA, ParityB, NumberA, NumberB, XA, PA, XB, PB, X2A, P2A, X2B, P2B, X4A, XAXB, X2AX2B };

/// Single-mode operator (X cos(angle) + P sin(angle))^power, built in a padded
/// space so that the truncated matrix is exact for power <= 4.
inline DenseMatrix quadrature_power(int cutoff, double angle, int power) {
  detail::check_cutoff(cutoff);
  if (power < 0 || power > 4) throw std::invalid_argument("quadrature_power: power must lie in [0, 4]");
  const int big = cutoff + power;
  DenseMatrix a = DenseMatrix::Zero(big, big);
  for (int n = 1; n < big; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  // a -> e^{-i angle} a turns X into X cos + P sin.
  const DenseMatrix rotated = a * std::polar(1.0, -angle);
  const DenseMatrix x = (rotated + rotated.adjoint()) / std::sqrt(2.0);
  DenseMatrix out = DenseMatrix::Identity(big, big);
  for (int p = 0; p < power; ++p) out = out * x;
  return out.topLeftCorner(cutoff, cutoff);
}

inline DenseMatrix number_operator(int cutoff) {
  DenseMatrix n = DenseMatrix::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = k;
  return n;
}

inline DenseMatrix parity_operator(int cutoff) {
  DenseMatrix p = DenseMatrix::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

/// Tr[rho (op_a (x) op_b)].
inline double product_expectation(const FockState& st, const DenseMatrix& op_a, const DenseMatrix& op_b) {
  const int d = st.cutoff;
  if (op_a.rows() != d || op_b.rows() != d) throw std::invalid_argument("product_expectation: operator size mismatch");
  Complex acc = 0.0;
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m)
      for (int np = 0; np < d; ++np) {
        const Complex a = op_a(np, n);
        if (a == Complex(0.0)) continue;
        for (int mp = 0; mp < d; ++mp) acc += st.dm(n * d + m, np * d + mp) * a * op_b(mp, m);
      }
  return acc.real();
}

inline double oracle_expectation(const FockState& st, Observable op) {
  const int d = st.cutoff;
  const DenseMatrix id = DenseMatrix::Identity(d, d);
  const double half_pi = std::acos(0.0);
  switch (op) {
    case Observable::ParityA: return product_expectation(st, parity_operator(d), id);
    case Observable::ParityB: return product_expectation(st, id, parity_operator(d));
    case Observable::NumberA: return product_expectation(st, number_operator(d), id);
    case Observable::NumberB: return product_expectation(st, id, number_operator(d));
    case Observable::XA: return product_expectation(st, quadrature_power(d, 0.0, 1), id);
    case Observable::PA: return product_expectation(st, quadrature_power(d, half_pi, 1), id);
    case Observable::XB: return product_expectation(st, id, quadrature_power(d, 0.0, 1));
    case Observable::PB: return product_expectation(st, id, quadrature_power(d, half_pi, 1));
    case Observable::X2A: return product_expectation(st, quadrature_power(d, 0.0, 2), id);
    case Observable::P2A: return product_expectation(st, quadrature_power(d, half_pi, 2), id);
    case Observable::X2B: return product_expectation(st, id, quadrature_power(d, 0.0, 2));
    case Observable::P2B: return product_expectation(st, id, quadrature_power(d, half_pi, 2));
    case Observable::X4A: return product_expectation(st, quadrature_power(d, 0.0, 4), id);
    case Observable::XAXB: return product_expectation(st, quadrature_power(d, 0.0, 1), quadrature_power(d, 0.0, 1));
    case Observable::X2AX2B:
      return product_expectation(st, quadrature_power(d, 0.0, 2), quadrature_power(d, 0.0, 2));
  }
  throw std::invalid_argument("oracle_expectation: unsupported observable");
}

namespace detail {

/// Basis indices whose population in any of the given states exceeds floor.
inline std::vector<int> support(std::initializer_list<const FockState*> states, double floor = 1e-13) {
  const int dim = (*states.begin())->dim();
  std::vector<int> keep;
  for (int i = 0; i < dim; ++i) {
    double p = 0.0;
    for (const auto* s : states) p = std::max(p, s->dm(i, i).real());
    if (p > floor) keep.push_back(i);
  }
  return keep;
}

inline DenseMatrix restrict(const DenseMatrix& m, const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  DenseMatrix out(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out(i, j) = m(keep[i], keep[j]);
  return out;
}

}  // namespace detail

/// Uhlmann root fidelity Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)).
inline double oracle_fidelity(const FockState& s1, const FockState& s2) {
  if (s1.cutoff != s2.cutoff) throw std::invalid_argument("oracle_fidelity: cutoff mismatch");
  const auto keep = detail::support({&s1, &s2});
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(detail::restrict(s1.dm, keep));
  const auto& p = es.eigenvalues();
  std::vector<int> cols;
  for (int i = 0; i < p.size(); ++i)
    if (p[i] > 1e-15) cols.push_back(i);
  DenseMatrix half(keep.size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) half.col(c) = es.eigenvectors().col(cols[c]) * std::sqrt(p[cols[c]]);
  const DenseMatrix inner = half.adjoint() * detail::restrict(s2.dm, keep) * half;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es2(inner, Eigen::EigenvaluesOnly);
  double f = 0.0;
  for (int i = 0; i < es2.eigenvalues().size(); ++i) f += std::sqrt(std::max(0.0, es2.eigenvalues()[i]));
  return f;
}

/// QFI from the symmetric logarithmic derivative, sum over eigenpairs of
/// 2 |<i|d rho|j>|^2 / (p_i + p_j), with d rho by central difference.
inline double oracle_qfi(const FockState& pre, double phi, double step = 1e-4) {
  const auto rho = oracle_finish(pre, phi);
  const auto plus = oracle_finish(pre, phi + step);
  const auto minus = oracle_finish(pre, phi - step);
  const auto keep = detail::support({&rho, &plus, &minus});
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(detail::restrict(rho.dm, keep));
  const DenseMatrix drho = (detail::restrict(plus.dm, keep) - detail::restrict(minus.dm, keep)) / (2 * step);
  const DenseMatrix v = es.eigenvectors();
  const DenseMatrix dd = v.adjoint() * drho * v;
  const auto& p = es.eigenvalues();
  double q = 0.0;
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j) {
      const double s = p[i] + p[j];
      if (s > 1e-12) q += 2 * std::norm(dd(i, j)) / s;
    }
  return q;
}

inline double oracle_qfi(const ResourceSpec& resource, double phi, const LossModel& loss, int cutoff = kDefaultCutoff,
                         double step = 1e-4) {
  return oracle_qfi(oracle_pre_phase(resource, loss, cutoff), phi, step);
}

}  // namespace mzi::fock
