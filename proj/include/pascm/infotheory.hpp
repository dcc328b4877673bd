#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pascm/quadrature.hpp"
#include "pascm/shaping.hpp"

namespace pascm {

/// AWGN capacity-power function, unit noise variance, bits per real dimension.
inline double capacity(double snr_linear) {
  if (snr_linear < 0.0) throw InvalidArgument("SNR must be nonnegative");
  return 0.5 * std::log2(1.0 + snr_linear);
}

struct RateReport {
  double snr_db = 0.0;
  double mi = 0.0;       // I(X;Y)
  double rbmd = 0.0;     // H(B) - sum_i H(B_i|Y)
  double tx_rate = 0.0;  // H(A) + gamma
  std::vector<double> level_cond_entropy;  // H(B_i|Y), i = 1..m
};

namespace detail {

// Shared kernel: iterates over (transmit point j, quadrature node k) and
// hands the sink the vector u_l = p_l exp(a_l - a_max) together with the
// log-sum-exp of a_l, where a_l = ln p_l - (z + delta(x_j - x_l))^2 / 2.
// Expectations over Y decompose as sum_j p_j E_Z[...] with y = delta x_j + z.
template <class Sink>
void for_each_output_density(const ShapedInput& in, const Quadrature& q, Sink&& sink) {
  const auto& x = in.constellation.points;
  const size_t n = x.size();
  std::vector<double> logp(n);
  for (size_t l = 0; l < n; ++l)
    logp[l] = in.probs[l] > 0.0 ? std::log(in.probs[l]) : -std::numeric_limits<double>::infinity();
  std::vector<double> a(n), u(n);
  for (size_t j = 0; j < n; ++j) {
    if (!(in.probs[j] > 0.0)) continue;
    for (int k = 0; k < q.count; ++k) {
      const double z = q.gz[static_cast<size_t>(k)];
      double amax = -std::numeric_limits<double>::infinity();
      for (size_t l = 0; l < n; ++l) {
        const double d = z + in.delta * (x[j] - x[l]);
        a[l] = logp[l] - 0.5 * d * d;
        if (a[l] > amax) amax = a[l];
      }
      double usum = 0.0;
      for (size_t l = 0; l < n; ++l) {
        u[l] = std::exp(a[l] - amax);
        usum += u[l];
      }
      const double lse = amax + std::log(usum);
      const double w = in.probs[j] * q.gw[static_cast<size_t>(k)];
      sink(j, z, w, std::span<const double>(u), usum, lse);
    }
  }
}

}  // namespace detail

/// I(X; delta*X + Z) in bits, unit-variance Gaussian noise, by per-point
/// centered Gauss-Hermite quadrature.
inline double mutual_information(const ShapedInput& in, const Quadrature& q = default_quadrature()) {
  double nats = 0.0;
  detail::for_each_output_density(in, q,
      [&](size_t, double z, double w, std::span<const double>, double, double lse) {
        nats += w * (-0.5 * z * z - lse);
      });
  return nats / M_LN2;
}

/// Conditional entropies H(B_i|Y) in bits for bit-levels i = 1..m.
inline std::vector<double> level_cond_entropies(const ShapedInput& in,
                                                const Quadrature& q = default_quadrature()) {
  const auto& c = in.constellation;
  const int m = c.m;
  std::vector<double> h(static_cast<size_t>(m), 0.0);
  detail::for_each_output_density(in, q,
      [&](size_t, double, double w, std::span<const double> u, double usum, double) {
        for (int lev = 1; lev <= m; ++lev) {
          double u0 = 0.0;
          for (size_t l = 0; l < u.size(); ++l)
            if (c.point_label_bit(static_cast<int>(l), lev) == 0) u0 += u[l];
          const double q0 = u0 / usum;
          const double q1 = 1.0 - q0;
          double t = 0.0;
          if (q0 > 0.0) t -= q0 * std::log2(q0);
          if (q1 > 0.0) t -= q1 * std::log2(q1);
          h[static_cast<size_t>(lev - 1)] += w * t;
        }
      });
  return h;
}

/// Bit-metric decoding rate H(B) - sum_i H(B_i|Y) together with I(X;Y).
inline RateReport rbmd_report(const ShapedInput& in, double gamma = 0.0,
                              const Quadrature& q = default_quadrature()) {
  const auto& c = in.constellation;
  const int m = c.m;
  RateReport rep;
  rep.snr_db = in.snr_db();
  rep.tx_rate = in.amp_entropy() + gamma;
  rep.level_cond_entropy.assign(static_cast<size_t>(m), 0.0);
  double nats = 0.0;
  detail::for_each_output_density(in, q,
      [&](size_t, double z, double w, std::span<const double> u, double usum, double lse) {
        nats += w * (-0.5 * z * z - lse);
        for (int lev = 1; lev <= m; ++lev) {
          double u0 = 0.0;
          for (size_t l = 0; l < u.size(); ++l)
            if (c.point_label_bit(static_cast<int>(l), lev) == 0) u0 += u[l];
          const double q0 = u0 / usum;
          const double q1 = 1.0 - q0;
          double t = 0.0;
          if (q0 > 0.0) t -= q0 * std::log2(q0);
          if (q1 > 0.0) t -= q1 * std::log2(q1);
          rep.level_cond_entropy[static_cast<size_t>(lev - 1)] += w * t;
        }
      });
  rep.mi = nats / M_LN2;
  double hcond = 0.0;
  for (double v : rep.level_cond_entropy) hcond += v;
  rep.rbmd = in.entropy() - hcond;
  return rep;
}

inline double rbmd(const ShapedInput& in, const Quadrature& q = default_quadrature()) {
  return rbmd_report(in, 0.0, q).rbmd;
}

/// Normalized informational divergence of a constant-composition matcher
/// output against the memoryless reference, in bits per symbol:
/// (-k - sum_a n_a log2 P_A(a)) / n.
inline double ccdm_divergence(std::span<const long long> counts,
                              std::span<const double> amp_probs,
                              long long k) {
  if (counts.size() != amp_probs.size())
    throw InvalidArgument("composition/distribution size mismatch");
  long long n = 0;
  double cross = 0.0;
  double log2_multinomial = 0.0;
  for (size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] < 0) throw InvalidArgument("negative composition count");
    n += counts[j];
    if (counts[j] > 0) {
      if (!(amp_probs[j] > 0.0))
        throw InvalidArgument("reference distribution must be positive on the support");
      cross += static_cast<double>(counts[j]) * std::log2(amp_probs[j]);
      log2_multinomial -= std::lgamma(static_cast<double>(counts[j]) + 1.0);
    }
  }
  if (n <= 0) throw InvalidArgument("empty composition");
  log2_multinomial += std::lgamma(static_cast<double>(n) + 1.0);
  log2_multinomial /= M_LN2;
  if (k < 0 || static_cast<double>(k) > log2_multinomial + 1e-6)
    throw InvalidArgument("matcher input length exceeds codebook size");
  return (-static_cast<double>(k) - cross) / static_cast<double>(n);
}

}  // namespace pascm
