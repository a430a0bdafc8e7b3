#pragma once

#include <cmath>
#include <string>
#include <type_traits>

#include "homog/multi_index.hpp"

namespace homog {

/// Exact rationals for the algebra paths, doubles for norms and grid data.
template <class T>
concept Scalar = std::is_same_v<T, Rational> || std::is_same_v<T, double>;

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }
inline double to_double(const Integer& v) { return v.get_d(); }

template <Scalar T>
T scalar_from(const Integer& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return Rational(v);
  } else {
    return v.get_d();
  }
}

template <Scalar T>
T scalar_from(const Rational& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return v;
  } else {
    return v.get_d();
  }
}

template <Scalar T>
T scalar_from(long long v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return Rational(Integer(static_cast<long>(v)));
  } else {
    return static_cast<double>(v);
  }
}

template <Scalar T>
bool is_zero(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return sgn(v) == 0;
  } else {
    return v == 0.0;
  }
}

/// Brings a rational into lowest terms (mpq_class(n, d) does not).
inline void canonicalize(double&) {}
inline void canonicalize(Rational& v) { v.canonicalize(); }

inline double abs_value(double v) { return std::fabs(v); }
inline Rational abs_value(const Rational& v) { return abs(v); }

}  // namespace homog
