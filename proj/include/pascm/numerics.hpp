#pragma once

#include <cmath>
#include <span>
#include <utility>

#include "pascm/error.hpp"

namespace pascm {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Entropy in bits of a pmf, with the 0*log(0) = 0 convention.
inline double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

/// Root of a continuous function with a sign change on [lo, hi].
/// Plain bisection; returns the interval midpoint once |hi-lo| <= xtol.
template <class F>
double bisect_root(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw InvalidArgument("bisect_root: no sign change on bracket");
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Golden-section maximization of a unimodal function on [a, b].
/// Stops when the interval width drops below rel_tol * max(|a|,|b|,1).
template <class F>
double golden_max(F&& f, double a, double b, double rel_tol = 1e-8, int max_iter = 400) {
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5)-1)/2
  if (!(a < b)) throw InvalidArgument("golden_max: empty bracket");
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
  for (int it = 0; it < max_iter && (b - a) > rel_tol * scale; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace pascm
