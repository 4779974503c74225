#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <utility>

namespace mzi {

/// Dense fixed-size row-major matrix. Sized for the 2x2 and 4x4 blocks of
/// two-mode Gaussian states; the scalar is a template parameter so the same
/// code runs in double and in wide_real.
template <class T, std::size_t R, std::size_t C>
struct Matrix {
  std::array<T, R * C> data{};

  static constexpr std::size_t rows = R;
  static constexpr std::size_t cols = C;

  Matrix() {
    for (auto& x : data) x = T(0);
  }

  Matrix(std::initializer_list<std::initializer_list<T>> init) : Matrix() {
    std::size_t i = 0;
    for (const auto& row : init) {
      std::size_t j = 0;
      for (const auto& x : row) {
        (*this)(i, j) = x;
        ++j;
      }
      ++i;
    }
  }

  static Matrix zero() { return Matrix(); }

  static Matrix identity() {
    static_assert(R == C, "identity requires a square matrix");
    Matrix m;
    for (std::size_t i = 0; i < R; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix diagonal(const std::array<T, R>& d) {
    static_assert(R == C, "diagonal requires a square matrix");
    Matrix m;
    for (std::size_t i = 0; i < R; ++i) m(i, i) = d[i];
    return m;
  }

  T& operator()(std::size_t i, std::size_t j) { return data[i * C + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * C + j]; }

  // Vector-style access for column matrices.
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  Matrix<T, C, R> transpose() const {
    Matrix<T, C, R> t;
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < R * C; ++k) data[k] += o.data[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t k = 0; k < R * C; ++k) data[k] -= o.data[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data) x *= s;
    return *this;
  }

  template <class U>
  Matrix<U, R, C> cast() const {
    Matrix<U, R, C> m;
    for (std::size_t k = 0; k < R * C; ++k) m.data[k] = static_cast<U>(data[k]);
    return m;
  }

  template <std::size_t BR, std::size_t BC>
  Matrix<T, BR, BC> block(std::size_t i0, std::size_t j0) const {
    Matrix<T, BR, BC> b;
    for (std::size_t i = 0; i < BR; ++i)
      for (std::size_t j = 0; j < BC; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
    return b;
  }
};

template <class T, std::size_t N>
using Vector = Matrix<T, N, 1>;

template <class T, std::size_t N>
using SquareMatrix = Matrix<T, N, N>;

template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> operator+(Matrix<T, R, C> a, const Matrix<T, R, C>& b) {
  return a += b;
}

template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> operator-(Matrix<T, R, C> a, const Matrix<T, R, C>& b) {
  return a -= b;
}

template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> operator-(Matrix<T, R, C> a) {
  for (auto& x : a.data) x = -x;
  return a;
}

template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> operator*(Matrix<T, R, C> a, const T& s) {
  return a *= s;
}

template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> operator*(const T& s, Matrix<T, R, C> a) {
  return a *= s;
}

template <class T, std::size_t R, std::size_t K, std::size_t C>
Matrix<T, R, C> operator*(const Matrix<T, R, K>& a, const Matrix<T, K, C>& b) {
  Matrix<T, R, C> m;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      T acc(0);
      for (std::size_t k = 0; k < K; ++k) acc += a(i, k) * b(k, j);
      m(i, j) = acc;
    }
  return m;
}

template <class T, std::size_t N>
T dot(const Vector<T, N>& a, const Vector<T, N>& b) {
  T acc(0);
  for (std::size_t i = 0; i < N; ++i) acc += a[i] * b[i];
  return acc;
}

template <class T, std::size_t N>
T trace(const SquareMatrix<T, N>& a) {
  T acc(0);
  for (std::size_t i = 0; i < N; ++i) acc += a(i, i);
  return acc;
}

template <class T, std::size_t N>
SquareMatrix<T, N> symmetrized(const SquareMatrix<T, N>& a) {
  return (a + a.transpose()) * T(0.5);
}

template <class T, std::size_t R, std::size_t C>
T max_abs_diff(const Matrix<T, R, C>& a, const Matrix<T, R, C>& b) {
  using std::abs;
  T m(0);
  for (std::size_t k = 0; k < R * C; ++k) {
    T d = abs(a.data[k] - b.data[k]);
    if (d > m) m = d;
  }
  return m;
}

/// LU factorization with partial pivoting, kept in packed form.
template <class T, std::size_t N>
struct LuDecomposition {
  SquareMatrix<T, N> lu;
  std::array<std::size_t, N> perm{};
  int sign = 1;
  bool singular = false;

  explicit LuDecomposition(const SquareMatrix<T, N>& a) : lu(a) {
    using std::abs;
    for (std::size_t i = 0; i < N; ++i) perm[i] = i;
    for (std::size_t k = 0; k < N; ++k) {
      std::size_t p = k;
      T best = abs(lu(k, k));
      for (std::size_t i = k + 1; i < N; ++i) {
        T v = abs(lu(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best == T(0)) {
        singular = true;
        continue;
      }
      if (p != k) {
        for (std::size_t j = 0; j < N; ++j) std::swap(lu(k, j), lu(p, j));
        std::swap(perm[k], perm[p]);
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < N; ++i) {
        lu(i, k) /= lu(k, k);
        for (std::size_t j = k + 1; j < N; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
      }
    }
  }

  T determinant() const {
    if (singular) return T(0);
    T d = T(sign);
    for (std::size_t i = 0; i < N; ++i) d *= lu(i, i);
    return d;
  }

  Vector<T, N> solve(const Vector<T, N>& b) const {
    Vector<T, N> y;
    for (std::size_t i = 0; i < N; ++i) {
      T acc = b[perm[i]];
      for (std::size_t j = 0; j < i; ++j) acc -= lu(i, j) * y[j];
      y[i] = acc;
    }
    Vector<T, N> x;
    for (std::size_t ii = N; ii-- > 0;) {
      T acc = y[ii];
      for (std::size_t j = ii + 1; j < N; ++j) acc -= lu(ii, j) * x[j];
      x[ii] = acc / lu(ii, ii);
    }
    return x;
  }
};

template <class T, std::size_t N>
T determinant(const SquareMatrix<T, N>& a) {
  return LuDecomposition<T, N>(a).determinant();
}

/// Solves a x = b; empty when a is numerically singular.
template <class T, std::size_t N>
std::optional<Vector<T, N>> solve(const SquareMatrix<T, N>& a, const Vector<T, N>& b) {
  LuDecomposition<T, N> lu(a);
  if (lu.singular) return std::nullopt;
  return lu.solve(b);
}

}  // namespace mzi
