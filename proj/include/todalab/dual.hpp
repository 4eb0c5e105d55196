#pragma once

#include <cmath>

namespace todalab {

// Forward-mode dual number: value plus one directional derivative.
template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(T value) : v(value), d{} {}  // NOLINT: implicit on purpose
  constexpr Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
};

template <class T>
constexpr Dual<T> operator+(Dual<T> x, const Dual<T>& y) { return x += y; }
template <class T>
constexpr Dual<T> operator-(Dual<T> x, const Dual<T>& y) { return x -= y; }
template <class T>
constexpr Dual<T> operator*(Dual<T> x, const Dual<T>& y) { return x *= y; }
template <class T>
constexpr Dual<T> operator-(const Dual<T>& x) { return {-x.v, -x.d}; }
template <class T>
constexpr Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
  return {x.v / y.v, (x.d * y.v - x.v * y.d) / (y.v * y.v)};
}

template <class T>
constexpr Dual<T> operator+(Dual<T> x, double s) { x.v += s; return x; }
template <class T>
constexpr Dual<T> operator+(double s, Dual<T> x) { x.v += s; return x; }
template <class T>
constexpr Dual<T> operator-(Dual<T> x, double s) { x.v -= s; return x; }
template <class T>
constexpr Dual<T> operator-(double s, const Dual<T>& x) { return {s - x.v, -x.d}; }
template <class T>
constexpr Dual<T> operator*(const Dual<T>& x, double s) { return {x.v * s, x.d * s}; }
template <class T>
constexpr Dual<T> operator*(double s, const Dual<T>& x) { return {x.v * s, x.d * s}; }
template <class T>
constexpr Dual<T> operator/(const Dual<T>& x, double s) { return {x.v / s, x.d / s}; }

template <class T>
Dual<T> log(const Dual<T>& x) {
  using std::log;
  return {log(x.v), x.d / x.v};
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  const T e = exp(x.v);
  return {e, e * x.d};
}
template <class T>
Dual<T> sin(const Dual<T>& x) {
  using std::sin;
  using std::cos;
  return {sin(x.v), cos(x.v) * x.d};
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
  using std::sin;
  using std::cos;
  return {cos(x.v), -sin(x.v) * x.d};
}

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

inline double value_of(double x) { return x; }
template <class T>
auto value_of(const Dual<T>& x) { return value_of(x.v); }

}  // namespace todalab
