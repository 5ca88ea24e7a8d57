#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>

namespace covmech {

// Forward-mode dual number carrying a single directional derivative.
// Nesting (Dual<Dual<double>>) gives mixed second derivatives.
template <typename V>
struct Dual {
  V val{};
  V eps{};

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v), eps(0.0) {}  // NOLINT(implicit)
  constexpr Dual(V v, V e) : val(v), eps(e) {}

  constexpr Dual& operator+=(const Dual& o) { val += o.val; eps += o.eps; return *this; }
  constexpr Dual& operator-=(const Dual& o) { val -= o.val; eps -= o.eps; return *this; }
  constexpr Dual& operator*=(const Dual& o) {
    eps = eps * o.val + val * o.eps;
    val *= o.val;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    eps = (eps * o.val - val * o.eps) / (o.val * o.val);
    val /= o.val;
    return *this;
  }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;

template <typename T> struct is_dual : std::false_type {};
template <typename V> struct is_dual<Dual<V>> : std::true_type {};

// Innermost real value, for comparisons and branching.
inline double primal(double v) { return v; }
template <typename V> double primal(const Dual<V>& d) { return primal(d.val); }

template <typename V> constexpr Dual<V> operator-(const Dual<V>& a) { return {-a.val, -a.eps}; }
template <typename V> constexpr Dual<V> operator+(const Dual<V>& a) { return a; }

template <typename V> constexpr Dual<V> operator+(Dual<V> a, const Dual<V>& b) { return a += b; }
template <typename V> constexpr Dual<V> operator-(Dual<V> a, const Dual<V>& b) { return a -= b; }
template <typename V> constexpr Dual<V> operator*(Dual<V> a, const Dual<V>& b) { return a *= b; }
template <typename V> constexpr Dual<V> operator/(Dual<V> a, const Dual<V>& b) { return a /= b; }

template <typename V> constexpr Dual<V> operator+(Dual<V> a, double b) { a.val += b; return a; }
template <typename V> constexpr Dual<V> operator+(double a, Dual<V> b) { b.val += a; return b; }
template <typename V> constexpr Dual<V> operator-(Dual<V> a, double b) { a.val -= b; return a; }
template <typename V> constexpr Dual<V> operator-(double a, const Dual<V>& b) { return {a - b.val, -b.eps}; }
template <typename V> constexpr Dual<V> operator*(const Dual<V>& a, double b) { return {a.val * b, a.eps * b}; }
template <typename V> constexpr Dual<V> operator*(double a, const Dual<V>& b) { return {a * b.val, a * b.eps}; }
template <typename V> constexpr Dual<V> operator/(const Dual<V>& a, double b) { return {a.val / b, a.eps / b}; }
template <typename V> constexpr Dual<V> operator/(double a, const Dual<V>& b) {
  return {a / b.val, -a * b.eps / (b.val * b.val)};
}

template <typename V> bool operator<(const Dual<V>& a, const Dual<V>& b) { return primal(a) < primal(b); }
template <typename V> bool operator>(const Dual<V>& a, const Dual<V>& b) { return primal(a) > primal(b); }
template <typename V> bool operator<(const Dual<V>& a, double b) { return primal(a) < b; }
template <typename V> bool operator>(const Dual<V>& a, double b) { return primal(a) > b; }

template <typename V> Dual<V> sqrt(const Dual<V>& a) {
  using std::sqrt;
  V s = sqrt(a.val);
  return {s, a.eps / (2.0 * s)};
}
template <typename V> Dual<V> sin(const Dual<V>& a) {
  using std::sin, std::cos;
  return {sin(a.val), a.eps * cos(a.val)};
}
template <typename V> Dual<V> cos(const Dual<V>& a) {
  using std::sin, std::cos;
  return {cos(a.val), -(a.eps * sin(a.val))};
}
template <typename V> Dual<V> exp(const Dual<V>& a) {
  using std::exp;
  V e = exp(a.val);
  return {e, a.eps * e};
}
template <typename V> Dual<V> log(const Dual<V>& a) {
  using std::log;
  return {log(a.val), a.eps / a.val};
}
template <typename V> Dual<V> pow(const Dual<V>& a, double n) {
  using std::pow;
  return {pow(a.val, n), a.eps * (n * pow(a.val, n - 1.0))};
}
template <typename V> Dual<V> abs(const Dual<V>& a) { return primal(a) < 0.0 ? -a : a; }

template <typename V>
std::ostream& operator<<(std::ostream& os, const Dual<V>& d) {
  return os << d.val << " + " << d.eps << "ε";
}

// Scalar-generic helpers so closures can be written once for double and Dual.
template <typename T> constexpr T sq(const T& v) { return v * v; }

}  // namespace covmech
