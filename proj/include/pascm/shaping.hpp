#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "pascm/constellation.hpp"
#include "pascm/numerics.hpp"

namespace pascm {

/// Maxwell-Boltzmann shaped channel input: P(x) proportional to exp(-nu x^2)
/// on an ASK alphabet, scaled by delta before transmission.
struct ShapedInput {
  AskConstellation constellation;
  double nu = 0.0;
  double delta = 1.0;
  std::vector<double> probs;      // per point, ascending point order
  std::vector<double> amp_probs;  // per amplitude, descending order; = 2 * point prob

  double second_moment() const {  // E[X^2] of the unscaled alphabet
    double s = 0.0;
    for (size_t i = 0; i < probs.size(); ++i)
      s += probs[i] * constellation.points[i] * constellation.points[i];
    return s;
  }
  double power() const { return delta * delta * second_moment(); }
  double snr_db() const { return linear_to_db(power()); }
  double amp_entropy() const { return entropy_bits(amp_probs); }
  double entropy() const { return entropy_bits(probs); }
};

namespace detail {

// Per-point Maxwell-Boltzmann probabilities, stable for large nu
// (exponents shifted by the smallest squared point, which is always 1).
inline std::vector<double> mb_point_probs(const AskConstellation& c, double nu) {
  std::vector<double> p(c.points.size());
  double sum = 0.0;
  for (size_t i = 0; i < c.points.size(); ++i) {
    double x = c.points[i];
    p[i] = std::exp(-nu * (x * x - 1.0));
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

inline double mb_second_moment(const AskConstellation& c, double nu) {
  double s = 0.0, sum = 0.0;
  for (double x : c.points) {
    double w = std::exp(-nu * (x * x - 1.0));
    sum += w;
    s += w * x * x;
  }
  return s / sum;
}

}  // namespace detail

inline ShapedInput make_mb_input(const AskConstellation& c, double nu, double delta) {
  if (delta <= 0.0) throw InvalidArgument("constellation scaling must be positive");
  if (nu < 0.0) throw InvalidArgument("Maxwell-Boltzmann exponent must be nonnegative");
  ShapedInput in;
  in.constellation = c;
  in.nu = nu;
  in.delta = delta;
  in.probs = detail::mb_point_probs(c, nu);
  in.amp_probs.resize(c.amplitudes.size());
  for (size_t j = 0; j < c.amplitudes.size(); ++j)
    in.amp_probs[j] = 2.0 * in.probs[static_cast<size_t>(c.point_index(c.amplitudes[j]))];
  return in;
}

inline ShapedInput make_uniform_input(const AskConstellation& c, double delta) {
  return make_mb_input(c, 0.0, delta);
}

/// Input with an explicit amplitude distribution (assumed symmetric signs).
/// nu is informational only; pass NaN when the family is unknown.
inline ShapedInput make_input_from_amp_probs(const AskConstellation& c,
                                             std::span<const double> amp_probs,
                                             double delta,
                                             double nu = std::numeric_limits<double>::quiet_NaN()) {
  if (amp_probs.size() != c.amplitudes.size())
    throw InvalidArgument("amplitude distribution size mismatch");
  if (delta <= 0.0) throw InvalidArgument("constellation scaling must be positive");
  ShapedInput in;
  in.constellation = c;
  in.nu = nu;
  in.delta = delta;
  in.amp_probs.assign(amp_probs.begin(), amp_probs.end());
  in.probs.assign(c.points.size(), 0.0);
  for (size_t j = 0; j < c.amplitudes.size(); ++j) {
    double a = c.amplitudes[j];
    in.probs[static_cast<size_t>(c.point_index(a))] = 0.5 * amp_probs[j];
    in.probs[static_cast<size_t>(c.point_index(-a))] = 0.5 * amp_probs[j];
  }
  return in;
}

inline double uniform_second_moment(const AskConstellation& c) {
  double s = 0.0;
  for (double x : c.points) s += x * x;
  return s / static_cast<double>(c.points.size());
}

/// Solve E[X_nu^2] = target by bisection. E[X_nu^2] is strictly decreasing
/// in nu, from the uniform second moment at nu=0 down to 1.
inline double solve_nu(const AskConstellation& c, double target_second_moment) {
  const double e_uniform = uniform_second_moment(c);
  if (target_second_moment > e_uniform * (1.0 + 1e-12))
    throw InfeasibleTarget("target second moment above uniform alphabet energy");
  if (target_second_moment <= 1.0)
    throw InfeasibleTarget("target second moment at or below minimum alphabet energy");
  if (std::fabs(target_second_moment - e_uniform) <= 1e-12 * e_uniform) return 0.0;

  double lo = 0.0, hi = 1.0;
  while (detail::mb_second_moment(c, hi) > target_second_moment) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw InfeasibleTarget("target second moment unreachable");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double e = detail::mb_second_moment(c, mid);
    if (std::fabs(e - target_second_moment) <= 1e-10 * target_second_moment) return mid;
    if (e > target_second_moment)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Input meeting the power constraint E[|delta X|^2] = power at the given
/// scaling, with nu from the bisection above.
inline ShapedInput make_input_with_power(const AskConstellation& c, double delta, double power) {
  if (power <= 0.0) throw InvalidArgument("power must be positive");
  return make_mb_input(c, solve_nu(c, power / (delta * delta)), delta);
}

/// Amplitude entropy H(A_nu) as a function of nu (strictly decreasing).
inline double solve_nu_for_amp_entropy(const AskConstellation& c, double target_bits) {
  const double hmax = std::log2(static_cast<double>(c.num_amplitudes()));
  if (target_bits <= 0.0 || target_bits > hmax + 1e-9)
    throw InfeasibleTarget("amplitude entropy target out of range");
  auto h = [&](double nu) { return make_mb_input(c, nu, 1.0).amp_entropy(); };
  if (std::fabs(target_bits - hmax) <= 1e-12) return 0.0;
  double lo = 0.0, hi = 0.5;
  while (h(hi) > target_bits) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw InfeasibleTarget("amplitude entropy target unreachable");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = h(mid);
    if (std::fabs(v - target_bits) <= 1e-11) return mid;
    if (v > target_bits)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Exponentially tilted amplitude distribution
/// P(a) proportional to ref(a) * exp(lambda a^2).
/// Maxwell-Boltzmann inputs stay in the family: MB(nu) maps to MB(nu-lambda).
inline std::vector<double> lambda_shift(std::span<const double> ref_amp_probs,
                                        std::span<const double> amplitudes,
                                        double lambda) {
  if (ref_amp_probs.size() != amplitudes.size())
    throw InvalidArgument("distribution/alphabet size mismatch");
  std::vector<double> lw(ref_amp_probs.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < ref_amp_probs.size(); ++j) {
    if (!(ref_amp_probs[j] > 0.0))
      throw InvalidArgument("reference amplitude distribution must be strictly positive");
    lw[j] = std::log(ref_amp_probs[j]) + lambda * amplitudes[j] * amplitudes[j];
    mx = std::max(mx, lw[j]);
  }
  double sum = 0.0;
  for (double& v : lw) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : lw) v /= sum;
  return lw;
}

/// Find lambda such that H(A^lambda) + gamma equals the target rate.
/// H(A^lambda) is unimodal in lambda and increasing up to the entropy peak;
/// the search stays on the increasing branch.
inline double solve_rate(std::span<const double> ref_amp_probs,
                         std::span<const double> amplitudes,
                         double gamma,
                         double target_rate) {
  const double target_h = target_rate - gamma;
  const double hmax_alphabet = std::log2(static_cast<double>(amplitudes.size()));
  if (target_h < -1e-9 || target_h > hmax_alphabet + 1e-9)
    throw InfeasibleTarget("transmission rate outside feasible range");

  auto h_of = [&](double lam) {
    auto p = lambda_shift(ref_amp_probs, amplitudes, lam);
    return entropy_bits(p);
  };

  // Locate the entropy peak (the tilt that evens the distribution out).
  double lo = -1.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double w = hi - lo;
    bool grew = false;
    if (h_of(hi) > h_of(hi - 1e-3 * w)) {
      hi += w;
      grew = true;
    }
    if (h_of(lo) > h_of(lo + 1e-3 * w)) {
      lo -= w;
      grew = true;
    }
    if (!grew) break;
  }
  double lam_peak = golden_max(h_of, lo, hi, 1e-12);
  double h_peak = h_of(lam_peak);
  if (target_h > h_peak + 1e-9)
    throw InfeasibleTarget("transmission rate above reachable entropy");
  if (std::fabs(target_h - h_peak) <= 1e-9) return lam_peak;

  double lam_lo = lam_peak - 1.0;
  while (h_of(lam_lo) > target_h) lam_lo -= 2.0 * (lam_peak - lam_lo);
  double lam_hi = lam_peak;
  for (int it = 0; it < 300; ++it) {
    double mid = 0.5 * (lam_lo + lam_hi);
    double v = h_of(mid);
    if (std::fabs(v - target_h) <= 1e-9) return mid;
    if (v < target_h)
      lam_lo = mid;
    else
      lam_hi = mid;
  }
  return 0.5 * (lam_lo + lam_hi);
}

/// ShapedInput overload of bit_level_prior (see constellation.hpp).
inline std::pair<double, double> bit_level_prior(const ShapedInput& in, int level) {
  return bit_level_prior(in.constellation, in.probs, level);
}

}  // namespace pascm
