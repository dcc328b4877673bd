#pragma once

#include <cmath>
#include <vector>

#include "pascm/infotheory.hpp"

namespace pascm {

namespace detail {

template <class Objective>
ShapedInput maximize_over_scaling(const AskConstellation& c, double power,
                                  Objective&& objective, double rel_tol) {
  if (power <= 0.0) throw InvalidArgument("power must be positive");
  // At the lower end of the bracket the power constraint is met with the
  // uniform input (nu = 0); at the upper end the input degenerates toward
  // the smallest amplitude. The optimum lies strictly inside.
  const double d_lo = std::sqrt(power / uniform_second_moment(c));
  const double d_hi = std::sqrt(power);
  auto f = [&](double delta) { return objective(make_input_with_power(c, delta, power)); };
  double best = golden_max(f, d_lo, d_hi, rel_tol);
  return make_input_with_power(c, best, power);
}

}  // namespace detail

/// Scaling/distribution pair maximizing I(X; delta X + Z) under the power
/// constraint, via golden-section over delta with a nested power bisection.
inline ShapedInput optimize_input(const AskConstellation& c, double power,
                                  const Quadrature& q = default_quadrature(),
                                  double rel_tol = 1e-6) {
  return detail::maximize_over_scaling(
      c, power, [&](const ShapedInput& in) { return mutual_information(in, q); }, rel_tol);
}

/// Same search with the bit-metric decoding rate as the objective.
inline ShapedInput optimize_input_bmd(const AskConstellation& c, double power,
                                      const Quadrature& q = default_quadrature(),
                                      double rel_tol = 1e-6) {
  return detail::maximize_over_scaling(
      c, power, [&](const ShapedInput& in) { return rbmd(in, q); }, rel_tol);
}

/// SNR at which the capacity-power function equals the given rate.
inline double snr_capacity_db(double rate) {
  return linear_to_db(std::exp2(2.0 * rate) - 1.0);
}

namespace detail {

template <class RateAtSnr>
double snr_for_rate(RateAtSnr&& rate_at, double rate, double lo_db, double hi_db,
                    double xtol_db) {
  return bisect_root([&](double s) { return rate_at(s) - rate; }, lo_db, hi_db, xtol_db);
}

}  // namespace detail

/// SNR (dB) where the scaling-optimized mutual information reaches `rate`.
inline double snr_for_shaped_mi(const AskConstellation& c, double rate,
                                const Quadrature& q = default_quadrature(),
                                double xtol_db = 2e-4) {
  const double cap = snr_capacity_db(rate);
  return detail::snr_for_rate(
      [&](double s) { return mutual_information(optimize_input(c, db_to_linear(s), q), q); },
      rate, cap - 0.05, cap + 2.5, xtol_db);
}

/// SNR (dB) where the uniform-input mutual information reaches `rate`.
inline double snr_for_uniform_mi(const AskConstellation& c, double rate,
                                 const Quadrature& q = default_quadrature(),
                                 double xtol_db = 2e-4) {
  const double cap = snr_capacity_db(rate);
  auto mi_at = [&](double s) {
    const double p = db_to_linear(s);
    return mutual_information(make_uniform_input(c, std::sqrt(p / uniform_second_moment(c))), q);
  };
  return detail::snr_for_rate(mi_at, rate, cap - 0.05, cap + 3.5, xtol_db);
}

/// SNR (dB) where the scaling-optimized bit-metric rate reaches `rate`.
inline double snr_for_shaped_bmd(const AskConstellation& c, double rate,
                                 const Quadrature& q = default_quadrature(),
                                 double xtol_db = 2e-4) {
  const double cap = snr_capacity_db(rate);
  return detail::snr_for_rate(
      [&](double s) { return rbmd(optimize_input_bmd(c, db_to_linear(s), q), q); },
      rate, cap - 0.05, cap + 2.5, xtol_db);
}

struct ShapingGainRow {
  int m = 0;
  double rate = 0.0;
  double snr_shaped_db = 0.0;
  double snr_uniform_db = 0.0;
  double gap_uniform_db = 0.0;   // shaped - uniform (negative: shaping gain)
  double snr_capacity_db = 0.0;
  double gap_capacity_db = 0.0;  // shaped - capacity
};

/// One row per constellation at rate m-1 bits/channel use.
inline std::vector<ShapingGainRow> shaping_gain_table(const std::vector<int>& ms = {2, 3, 4, 5, 6},
                                                      const Quadrature& q = default_quadrature()) {
  std::vector<ShapingGainRow> rows;
  for (int m : ms) {
    auto c = build_constellation(m, LabelingKind::brgc);
    ShapingGainRow r;
    r.m = m;
    r.rate = m - 1.0;
    r.snr_shaped_db = snr_for_shaped_mi(c, r.rate, q);
    r.snr_uniform_db = snr_for_uniform_mi(c, r.rate, q);
    r.snr_capacity_db = snr_capacity_db(r.rate);
    r.gap_uniform_db = r.snr_shaped_db - r.snr_uniform_db;
    r.gap_capacity_db = r.snr_shaped_db - r.snr_capacity_db;
    rows.push_back(r);
  }
  return rows;
}

struct BmdGapRow {
  int m = 0;
  double rate = 0.0;
  double snr_smd_db = 0.0;
  double snr_bmd_db = 0.0;
  double gap_db = 0.0;  // bmd - smd
};

/// Symbol-metric vs bit-metric SNR requirements (BRGC labels).
inline std::vector<BmdGapRow> bmd_gap_table(const std::vector<int>& ms = {2, 3, 4, 5, 6},
                                            const Quadrature& q = default_quadrature()) {
  std::vector<BmdGapRow> rows;
  for (int m : ms) {
    auto c = build_constellation(m, LabelingKind::brgc);
    BmdGapRow r;
    r.m = m;
    r.rate = m - 1.0;
    r.snr_smd_db = snr_for_shaped_mi(c, r.rate, q);
    r.snr_bmd_db = snr_for_shaped_bmd(c, r.rate, q);
    r.gap_db = r.snr_bmd_db - r.snr_smd_db;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace pascm
