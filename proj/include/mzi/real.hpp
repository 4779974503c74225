#pragma once

#include <cmath>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

namespace mzi {

/// Extended-precision scalar used where double loses too many digits:
/// fidelity differencing near pure states and limits at degenerate
/// working points.
using wide_real = boost::multiprecision::float128;

template <class Real>
inline Real pi_v() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
inline Real half_pi_v() {
  return boost::math::constants::half_pi<Real>();
}

template <class Real>
inline Real two_pi_v() {
  return boost::math::constants::two_pi<Real>();
}

template <class To, class From>
inline To real_cast(const From& x) {
  return static_cast<To>(x);
}

}  // namespace mzi
