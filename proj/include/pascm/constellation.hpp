#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pascm/error.hpp"

namespace pascm {

enum class LabelingKind { natural, brgc };

inline const char* to_string(LabelingKind k) {
  return k == LabelingKind::natural ? "natural" : "brgc";
}

inline LabelingKind labeling_from_string(const std::string& s) {
  if (s == "natural") return LabelingKind::natural;
  if (s == "brgc") return LabelingKind::brgc;
  throw InvalidArgument("unknown labeling: " + s);
}

/// Bipolar equidistant ASK alphabet {±1, ±3, ..., ±(2^m-1)} with a binary
/// labeling composed as sign bit followed by the amplitude label.
///
/// Conventions:
///  - points are stored in ascending order,
///  - amplitudes in descending order (largest first),
///  - bit-level 1 is the sign, b(-1)=0 and b(+1)=1,
///  - labels are packed MSB-first into an integer, so level i of an m-bit
///    label `lab` is (lab >> (m-i)) & 1.
struct AskConstellation {
  int m = 0;
  LabelingKind labeling = LabelingKind::brgc;
  std::vector<double> points;           // size 2^m, ascending
  std::vector<double> amplitudes;       // size 2^(m-1), descending
  std::vector<uint32_t> amp_labels;     // (m-1)-bit label per amplitude
  std::vector<uint32_t> point_labels;   // m-bit label per point
  std::vector<int> point_of_label;      // inverse of point_labels
  std::vector<int> amp_of_label;        // inverse of amp_labels

  int num_points() const { return static_cast<int>(points.size()); }
  int num_amplitudes() const { return static_cast<int>(amplitudes.size()); }

  int point_index(double x) const {
    int idx = static_cast<int>((x + (num_points() - 1)) / 2.0 + 0.5);
    if (idx < 0 || idx >= num_points() || points[static_cast<size_t>(idx)] != x)
      throw InvalidArgument("value is not a constellation point");
    return idx;
  }

  int amp_index(double a) const {
    int idx = static_cast<int>((num_points() - 1 - a) / 2.0 + 0.5);
    if (idx < 0 || idx >= num_amplitudes() || amplitudes[static_cast<size_t>(idx)] != a)
      throw InvalidArgument("value is not a constellation amplitude");
    return idx;
  }

  static int label_bit(uint32_t label, int level, int width) {
    return static_cast<int>((label >> (width - level)) & 1u);
  }

  /// Bit of level i (2..m) in the amplitude label of amplitudes[amp_idx].
  int amp_label_bit(int amp_idx, int level) const {
    return label_bit(amp_labels[static_cast<size_t>(amp_idx)], level - 1, m - 1);
  }

  /// Bit of level i (1..m) in the point label of points[point_idx].
  int point_label_bit(int point_idx, int level) const {
    return label_bit(point_labels[static_cast<size_t>(point_idx)], level, m);
  }
};

inline AskConstellation build_constellation(int m, LabelingKind kind) {
  if (m < 2 || m > 8) throw InvalidArgument("bits per symbol must be in 2..8");
  AskConstellation c;
  c.m = m;
  c.labeling = kind;
  const int np = 1 << m;
  const int na = np / 2;
  c.points.resize(static_cast<size_t>(np));
  for (int i = 0; i < np; ++i) c.points[static_cast<size_t>(i)] = -(np - 1) + 2.0 * i;
  c.amplitudes.resize(static_cast<size_t>(na));
  c.amp_labels.resize(static_cast<size_t>(na));
  for (int j = 0; j < na; ++j) {
    c.amplitudes[static_cast<size_t>(j)] = np - 1 - 2.0 * j;
    uint32_t u = static_cast<uint32_t>(j);
    c.amp_labels[static_cast<size_t>(j)] = (kind == LabelingKind::brgc) ? (u ^ (u >> 1)) : u;
  }
  c.point_labels.resize(static_cast<size_t>(np));
  c.point_of_label.assign(static_cast<size_t>(np), -1);
  c.amp_of_label.assign(static_cast<size_t>(na), -1);
  for (int j = 0; j < na; ++j)
    c.amp_of_label[c.amp_labels[static_cast<size_t>(j)]] = j;
  for (int i = 0; i < np; ++i) {
    double x = c.points[static_cast<size_t>(i)];
    uint32_t sign_bit = x > 0 ? 1u : 0u;
    int aj = c.amp_index(std::fabs(x));
    uint32_t lab = (sign_bit << (m - 1)) | c.amp_labels[static_cast<size_t>(aj)];
    c.point_labels[static_cast<size_t>(i)] = lab;
    c.point_of_label[lab] = i;
  }
  return c;
}

/// One complex QAM symbol from two real ASK symbols: delta * (x1 + j*x2).
inline std::complex<double> qam_pair(double x1, double x2, double delta) {
  return {delta * x1, delta * x2};
}

/// Marginal probability pair (P_{B_i}(0), P_{B_i}(1)) of bit-level `level`
/// under the per-point distribution `probs` (same order as c.points).
inline std::pair<double, double> bit_level_prior(const AskConstellation& c,
                                                 std::span<const double> probs,
                                                 int level) {
  if (level < 1 || level > c.m) throw InvalidArgument("bit level out of range");
  if (probs.size() != c.points.size())
    throw InvalidArgument("probability vector size mismatch");
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (std::fabs(sum - 1.0) > 1e-9) throw InvalidArgument("input distribution not normalized");
  double p0 = 0.0;
  for (int i = 0; i < c.num_points(); ++i)
    if (c.point_label_bit(i, level) == 0) p0 += probs[static_cast<size_t>(i)];
  return {p0, 1.0 - p0};
}

}  // namespace pascm
