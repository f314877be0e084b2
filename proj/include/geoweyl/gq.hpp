#pragma once

// Exact Gaussian-rational arithmetic used by all symbolic modules.
// Floating point is deliberately absent here: golden tests compare
// coefficients for exact equality.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <ostream>
#include <string>

namespace geoweyl {

using Rat = boost::multiprecision::cpp_rational;

// q1 + i*q2 with arbitrary-precision rational parts.
struct GQ {
  Rat re{0};
  Rat im{0};

  GQ() = default;
  GQ(long n) : re(n) {}
  GQ(long n, long d) : re(Rat(n, d)) {}
  GQ(Rat r) : re(std::move(r)) {}
  GQ(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  static GQ i() { return GQ{Rat(0), Rat(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GQ conj() const { return GQ{re, -im}; }

  GQ operator-() const { return GQ{-re, -im}; }
  GQ& operator+=(const GQ& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GQ& operator-=(const GQ& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend GQ operator+(GQ a, const GQ& b) { return a += b; }
  friend GQ operator-(GQ a, const GQ& b) { return a -= b; }
  friend GQ operator*(const GQ& a, const GQ& b) {
    return GQ{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GQ& operator*=(const GQ& o) { return *this = *this * o; }
  friend GQ operator/(const GQ& a, const GQ& b) {
    Rat n = b.re * b.re + b.im * b.im;
    return GQ{(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  GQ& operator/=(const GQ& o) { return *this = *this / o; }

  friend bool operator==(const GQ& a, const GQ& b) = default;
};

inline std::string to_string(const Rat& r) { return r.str(); }

inline std::string to_string(const GQ& q) {
  if (q.im == 0) return q.re.str();
  if (q.re == 0) return q.im.str() + "*i";
  return "(" + q.re.str() + (q.im > 0 ? "+" : "") + q.im.str() + "*i)";
}

inline std::ostream& operator<<(std::ostream& os, const GQ& q) { return os << to_string(q); }

// n! as an exact rational (handy for series coefficients).
inline Rat factorial(unsigned n) {
  Rat r{1};
  for (unsigned k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace geoweyl
