#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pascm/pipeline.hpp"

namespace pascm {

/// One measured or planned point of a transmission mode.
struct OperatingPoint {
  std::string mode_id;
  double rate = 0.0;     // spectral efficiency k_c/n_c
  double snr_db = 0.0;
  double gap_db = 0.0;   // snr_db - SNR needed by capacity at this rate
  double fer = 0.0;
  double ci95 = 0.0;     // normal-approximation half width; 3/N bound when fer==0
  double backoff = 0.0;  // R_BMD - (H(A)+gamma)
  long long frames = 0;
  long long errors = 0;
  bool fer_is_upper_bound = false;
};

struct SearchFailure : Error {
  std::vector<OperatingPoint> trace;
  SearchFailure(const std::string& msg, std::vector<OperatingPoint> t)
      : Error(msg), trace(std::move(t)) {}
};

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic per-frame random stream: uniform bits and Box-Muller
/// normals over a splitmix-derived state. Identical output for identical
/// (seed, frame) regardless of how frames are distributed over workers.
class FrameRng {
 public:
  explicit FrameRng(uint64_t seed) : state_(seed) {
    // warm up so nearby seeds decorrelate
    detail::splitmix64(state_);
    detail::splitmix64(state_);
  }

  uint64_t u64() { return detail::splitmix64(state_); }
  uint8_t bit() { return static_cast<uint8_t>(u64() >> 63); }

  double uniform01() {  // in (0, 1]
    return (static_cast<double>(u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

class ChannelRng {
 public:
  explicit ChannelRng(uint64_t seed) : seed_(seed) {}
  uint64_t seed() const { return seed_; }
  FrameRng frame(uint64_t index) const {
    uint64_t s = seed_;
    uint64_t a = detail::splitmix64(s);
    return FrameRng(a ^ (index * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL));
  }

 private:
  uint64_t seed_;
};

/// y = x + noise_std * Z with Z iid standard normal.
inline std::vector<double> awgn(std::span<const double> x, FrameRng& rng, double noise_std = 1.0) {
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] + noise_std * rng.normal();
  return y;
}

struct StopRule {
  long long min_errors = 50;
  long long max_frames = 100000;
};

namespace detail {

inline bool simulate_pas_frame(const PasMode& mode, FrameRng& rng, BpDecoder& dec,
                               int max_iter, double noise_std = 1.0) {
  std::vector<uint8_t> mbits(static_cast<size_t>(mode.matcher.k));
  for (auto& b : mbits) b = rng.bit();
  std::vector<uint8_t> sbits(static_cast<size_t>(mode.sign_data_bits));
  for (auto& b : sbits) b = rng.bit();
  auto amps = match(mode.matcher, mbits);
  auto x = pas_encode(mode, amps, sbits);
  auto y = awgn(x, rng, noise_std);
  auto res = pas_decode(mode, y, max_iter, &dec);
  if (res.sign_data != sbits) return true;
  try {
    if (dematch(mode.matcher, res.amplitudes) != mbits) return true;
  } catch (const Error&) {
    return true;  // composition mismatch or out-of-codebook counts as a frame error
  }
  return false;
}

inline bool simulate_uniform_frame(const PasMode& mode, FrameRng& rng, BpDecoder& dec,
                                   int max_iter, double noise_std = 1.0) {
  std::vector<uint8_t> data(static_cast<size_t>(mode.code->k()));
  for (auto& b : data) b = rng.bit();
  auto x = encode_uniform(mode, data);
  auto y = awgn(x, rng, noise_std);
  auto res = decode_uniform(mode, y, max_iter, &dec);
  return res.data != data;
}

}  // namespace detail

/// Planned rate back-off R_BMD - (H(A)+gamma) of the mode at the given SNR.
inline double backoff(const PasMode& mode, double snr_db,
                      const Quadrature& q = default_quadrature()) {
  PasMode at = with_snr(mode, snr_db);
  return rbmd_report(at.input, 0.0, q).rbmd - at.design_rate();
}

/// Monte Carlo frame error rate with a 95% normal-approximation confidence
/// interval. Frames are processed in fixed-size batches with per-frame
/// random streams, so results do not depend on the worker count.
inline OperatingPoint run_fer(const PasMode& mode, double snr_db, StopRule stop, uint64_t seed,
                              int threads = 0, int max_iter = 100,
                              const Quadrature& q = default_quadrature()) {
  PasMode at = with_snr(mode, snr_db);
  if (threads <= 0)
    threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  ChannelRng channel(seed);

  long long frames = 0, errors = 0;
  constexpr long long kBatch = 256;
  while (frames < stop.max_frames && errors < stop.min_errors) {
    const long long batch = std::min(kBatch, stop.max_frames - frames);
    const long long per = (batch + threads - 1) / threads;
    std::vector<std::future<long long>> futs;
    for (int t = 0; t < threads; ++t) {
      const long long first = frames + t * per;
      const long long last = std::min(frames + batch, first + per);
      if (first >= last) break;
      futs.push_back(std::async(std::launch::async, [&, first, last]() {
        BpDecoder dec(*at.code);
        long long errs = 0;
        for (long long f = first; f < last; ++f) {
          FrameRng rng = channel.frame(static_cast<uint64_t>(f));
          bool err = at.uniform
                         ? detail::simulate_uniform_frame(at, rng, dec, max_iter)
                         : detail::simulate_pas_frame(at, rng, dec, max_iter);
          if (err) ++errs;
        }
        return errs;
      }));
    }
    for (auto& fu : futs) errors += fu.get();
    frames += batch;
  }

  OperatingPoint op;
  op.mode_id = at.id;
  op.rate = at.rate();
  op.snr_db = snr_db;
  op.gap_db = snr_db - snr_capacity_db(op.rate);
  op.frames = frames;
  op.errors = errors;
  if (errors == 0) {
    op.fer = 0.0;
    op.ci95 = 3.0 / static_cast<double>(frames);  // one-sided rule-of-three bound
    op.fer_is_upper_bound = true;
  } else {
    double p = static_cast<double>(errors) / static_cast<double>(frames);
    op.fer = p;
    op.ci95 = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(frames));
  }
  op.backoff = rbmd_report(at.input, 0.0, q).rbmd - at.design_rate();
  return op;
}

/// Reference operating point for rate adaptation: the amplitude
/// distribution, scaling and achieved bit-metric rate behind (R°, SNR°).
struct Reference {
  AskConstellation constellation;
  double gamma = 0.0;
  std::vector<double> amp_probs;
  double nu = 0.0;
  double delta = 0.0;
  double rate = 0.0;   // R° = H(A) + gamma
  double rbmd = 0.0;   // R_BMD at (P_A, delta)
  double snr_db = 0.0;
};

/// Reconstruct a reference from a reported (rate, SNR) row: the
/// Maxwell-Boltzmann exponent follows from H(A) = rate - gamma and the
/// scaling from the power constraint.
inline Reference make_reference(int m, LabelingKind labeling, double gamma, double rate,
                                double snr_db, const Quadrature& q = default_quadrature()) {
  Reference ref;
  ref.constellation = build_constellation(m, labeling);
  ref.gamma = gamma;
  ref.nu = solve_nu_for_amp_entropy(ref.constellation, rate - gamma);
  ShapedInput in = make_mb_input(ref.constellation, ref.nu, 1.0);
  ref.delta = std::sqrt(db_to_linear(snr_db) / in.second_moment());
  in.delta = ref.delta;
  ref.amp_probs = in.amp_probs;
  ref.rate = rate;
  ref.rbmd = rbmd_report(in, 0.0, q).rbmd;
  ref.snr_db = snr_db;
  return ref;
}

inline Reference make_reference(const PasMode& mode, double snr_db,
                                const Quadrature& q = default_quadrature()) {
  PasMode at = with_snr(mode, snr_db);
  Reference ref;
  ref.constellation = at.constellation;
  ref.gamma = at.gamma.value();
  ref.amp_probs = at.input.amp_probs;
  ref.nu = at.input.nu;
  ref.delta = at.input.delta;
  ref.rate = at.design_rate();
  ref.rbmd = rbmd_report(at.input, 0.0, q).rbmd;
  ref.snr_db = snr_db;
  return ref;
}

struct AdaptResult {
  std::vector<double> amp_probs;
  double lambda = 0.0;
  double delta = 0.0;
  double snr_db = 0.0;
  double rate = 0.0;
  double rbmd = 0.0;
};

/// Rate adaptation for universal codes: tilt the reference amplitude
/// distribution to hit the target rate, then rescale so the rate back-off
/// matches the reference back-off.
inline AdaptResult adapt(const Reference& ref, double target_rate,
                         const Quadrature& q = default_quadrature(), double tol_bits = 1e-6) {
  const auto& c = ref.constellation;
  AdaptResult out;
  out.rate = target_rate;
  out.lambda = solve_rate(ref.amp_probs, c.amplitudes, ref.gamma, target_rate);
  out.amp_probs = lambda_shift(ref.amp_probs, c.amplitudes, out.lambda);

  const double target_rbmd = target_rate + (ref.rbmd - ref.rate);
  auto rbmd_at = [&](double delta) {
    ShapedInput in = make_input_from_amp_probs(c, out.amp_probs, delta,
                                               ref.nu == ref.nu ? ref.nu - out.lambda : ref.nu);
    return rbmd_report(in, 0.0, q).rbmd;
  };
  double lo = ref.delta, hi = ref.delta;
  while (rbmd_at(lo) > target_rbmd) lo *= 0.5;
  while (rbmd_at(hi) < target_rbmd) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = rbmd_at(mid);
    if (std::fabs(v - target_rbmd) <= tol_bits) {
      lo = hi = mid;
      break;
    }
    if (v < target_rbmd)
      lo = mid;
    else
      hi = mid;
  }
  out.delta = 0.5 * (lo + hi);
  ShapedInput in = make_input_from_amp_probs(c, out.amp_probs, out.delta, 0.0);
  out.snr_db = linear_to_db(in.power());
  out.rbmd = rbmd_at(out.delta);
  return out;
}

struct SearchOptions {
  double start_snr_db = std::numeric_limits<double>::quiet_NaN();  // default: rate crossing
  double step_db = 0.5;
  int max_steps = 24;
  StopRule stop{50, 100000};
  int max_iter = 100;
  int threads = 0;
};

namespace detail {

// SNR where the optimized R_BMD curve crosses the transmission rate curve,
// i.e. where the planned back-off is zero.
inline double crossing_snr_db(const PasMode& mode, const Quadrature& q) {
  auto planned_backoff = [&](double s) {
    PasMode at = redesign_at_power(mode, s, q);
    return rbmd_report(at.input, 0.0, q).rbmd - at.design_rate();
  };
  double lo = -10.0, hi = lo;
  for (double s = -5.0; s <= 45.0; s += 2.0) {
    hi = s;
    if (planned_backoff(s) > 0.0) break;
    lo = s;
  }
  return bisect_root([&](double s) { return planned_backoff(s); }, lo, hi, 5e-3);
}

}  // namespace detail

/// Walk the rate curve upward in power, re-deriving the design point at
/// each step, until the measured FER meets the target; then refine with two
/// bisection steps in dB. Throws SearchFailure with the collected trace if
/// the budget runs out.
inline OperatingPoint find_operating_point(const PasMode& mode, double target_fer, uint64_t seed,
                                           SearchOptions opt = {},
                                           std::vector<OperatingPoint>* trace_out = nullptr,
                                           const Quadrature& q = default_quadrature()) {
  if (!(target_fer > 0.0 && target_fer < 0.5))
    throw InvalidArgument("target FER must be in (0, 0.5)");
  std::vector<OperatingPoint> trace;
  double start = opt.start_snr_db;
  if (!(start == start)) start = detail::crossing_snr_db(mode, q);

  double prev = start;
  bool found = false;
  double lo = start, hi = start;
  OperatingPoint best;
  for (int step = 1; step <= opt.max_steps && !found; ++step) {
    double s = start + step * opt.step_db;
    PasMode at = redesign_at_power(mode, s, q);
    OperatingPoint op = run_fer(at, s, opt.stop, seed, opt.threads, opt.max_iter, q);
    trace.push_back(op);
    if (op.fer <= target_fer) {
      found = true;
      lo = prev;
      hi = s;
      best = op;
    }
    prev = s;
  }
  if (!found) {
    if (trace_out) *trace_out = trace;
    throw SearchFailure("FER target not reached within the search budget", trace);
  }
  for (int it = 0; it < 2; ++it) {
    double mid = 0.5 * (lo + hi);
    PasMode at = redesign_at_power(mode, mid, q);
    OperatingPoint op = run_fer(at, mid, opt.stop, seed, opt.threads, opt.max_iter, q);
    trace.push_back(op);
    if (op.fer <= target_fer) {
      hi = mid;
      best = op;
    } else {
      lo = mid;
    }
  }
  if (trace_out) *trace_out = trace;
  return best;
}

struct MapperCandidate {
  BitMapper mapper;
  OperatingPoint op;
};

struct MapperReport {
  std::vector<MapperCandidate> candidates;
  size_t best = 0;
};

/// Exhaustive bit-level interleaver search at a pinned SNR. All (m-1)!
/// level orders are simulated with the same seed; ties break toward the
/// lexicographically smallest order.
inline MapperReport optimize_bitmapper(const PasMode& mode, double snr_db,
                                       long long frames_per_candidate, uint64_t seed,
                                       int threads = 0) {
  std::vector<int> levels;
  for (int lev = 2; lev <= mode.m(); ++lev) levels.push_back(lev);
  MapperReport report;
  do {
    PasMode cand = mode;
    cand.mapper.level_order = levels;
    cand.block_of_level_.assign(static_cast<size_t>(mode.m() + 1), -1);
    for (size_t t = 0; t < levels.size(); ++t)
      cand.block_of_level_[static_cast<size_t>(levels[t])] = static_cast<int>(t);
    StopRule stop{std::numeric_limits<long long>::max(), frames_per_candidate};
    OperatingPoint op = run_fer(cand, snr_db, stop, seed, threads);
    report.candidates.push_back({cand.mapper, op});
    if (op.fer < report.candidates[report.best].op.fer) report.best = report.candidates.size() - 1;
  } while (std::next_permutation(levels.begin(), levels.end()));
  return report;
}

}  // namespace pascm
