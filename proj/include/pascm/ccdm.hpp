#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "pascm/error.hpp"

namespace pascm {

/// Integer n-type over an amplitude alphabet. The alphabet order doubles as
/// the total order used by the matcher's arithmetic coder.
struct Composition {
  std::vector<double> alphabet;
  std::vector<long long> counts;

  long long n() const { return std::accumulate(counts.begin(), counts.end(), 0LL); }

  long long count_of(double a) const {
    for (size_t j = 0; j < alphabet.size(); ++j)
      if (alphabet[j] == a) return counts[j];
    return 0;
  }
};

inline mpz_class multinomial(const Composition& comp) {
  long long n = comp.n();
  mpz_class m;
  mpz_fac_ui(m.get_mpz_t(), static_cast<unsigned long>(n));
  for (long long c : comp.counts) {
    if (c < 0) throw InvalidArgument("negative composition count");
    if (c > 1) {
      mpz_class f;
      mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(c));
      mpz_divexact(m.get_mpz_t(), m.get_mpz_t(), f.get_mpz_t());
    }
  }
  return m;
}

/// Largest k with 2^k sequences available: floor(log2 multinomial).
inline long long derive_k(const Composition& comp) {
  mpz_class m = multinomial(comp);
  return static_cast<long long>(mpz_sizeinbase(m.get_mpz_t(), 2)) - 1;
}

namespace detail {

// n * cost of the type against P_A: sum_a n_a log2(n_a / (n p_a)).
inline double type_divergence(std::span<const long long> counts, std::span<const double> pa,
                              long long n) {
  double d = 0.0;
  for (size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] > 0) {
      double na = static_cast<double>(counts[j]);
      d += na * std::log2(na / (static_cast<double>(n) * pa[j]));
    }
  }
  return d;
}

}  // namespace detail

/// n-type closest to P_A in informational divergence: largest-remainder
/// initialization followed by greedy single-unit moves. Deterministic.
inline Composition choose_composition(std::span<const double> alphabet,
                                      std::span<const double> pa, long long n) {
  if (n < 1) throw InvalidArgument("composition length must be positive");
  if (alphabet.size() != pa.size()) throw InvalidArgument("alphabet/distribution size mismatch");
  const size_t na = alphabet.size();
  Composition comp;
  comp.alphabet.assign(alphabet.begin(), alphabet.end());
  comp.counts.assign(na, 0);

  std::vector<double> frac(na, 0.0);
  long long assigned = 0;
  for (size_t j = 0; j < na; ++j) {
    if (pa[j] < 0.0) throw InvalidArgument("negative probability");
    double t = static_cast<double>(n) * pa[j];
    comp.counts[j] = static_cast<long long>(std::floor(t));
    frac[j] = t - std::floor(t);
    assigned += comp.counts[j];
  }
  std::vector<size_t> order(na);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return frac[a] > frac[b]; });
  for (size_t i = 0; assigned < n; ++i) {
    size_t j = order[i % na];
    if (pa[j] > 0.0) {
      ++comp.counts[j];
      ++assigned;
    }
  }

  // Single-unit moves until no move lowers the divergence.
  auto cost = [&](const std::vector<long long>& c) {
    return detail::type_divergence(c, pa, n);
  };
  double cur = cost(comp.counts);
  for (bool improved = true; improved;) {
    improved = false;
    size_t best_src = 0, best_dst = 0;
    double best = cur;
    for (size_t s = 0; s < na; ++s) {
      if (comp.counts[s] == 0) continue;
      for (size_t d = 0; d < na; ++d) {
        if (d == s || !(pa[d] > 0.0)) continue;
        --comp.counts[s];
        ++comp.counts[d];
        double t = cost(comp.counts);
        ++comp.counts[s];
        --comp.counts[d];
        if (t < best - 1e-12) {
          best = t;
          best_src = s;
          best_dst = d;
        }
      }
    }
    if (best < cur - 1e-12) {
      --comp.counts[best_src];
      ++comp.counts[best_dst];
      cur = best;
      improved = true;
    }
  }
  return comp;
}

struct MatcherSpec {
  Composition composition;
  long long k = 0;
};

/// k = -1 selects the maximum floor(log2 multinomial).
inline MatcherSpec make_matcher(Composition comp, long long k = -1) {
  long long kmax = derive_k(comp);
  if (k < 0) k = kmax;
  if (k > kmax) throw InvalidArgument("matcher input length exceeds codebook size");
  return MatcherSpec{std::move(comp), k};
}

/// Fixed-to-fixed matcher: k uniform bits to one of the 2^k lexicographically
/// first constant-composition sequences. Arithmetic decoding of the bit
/// string's integer value, with exact interval splits proportional to the
/// remaining counts.
inline std::vector<double> match(const MatcherSpec& spec, std::span<const uint8_t> bits) {
  if (static_cast<long long>(bits.size()) != spec.k)
    throw InvalidArgument("matcher input must have exactly k bits");
  mpz_class r = 0;
  for (uint8_t b : bits) {
    r <<= 1;
    if (b) r |= 1;
  }
  std::vector<long long> counts = spec.composition.counts;
  long long len = spec.composition.n();
  mpz_class m = multinomial(spec.composition);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(len));
  mpz_class block;
  while (len > 0) {
    for (size_t j = 0; j < counts.size(); ++j) {
      if (counts[j] == 0) continue;
      // Sequences starting with alphabet[j]: m * counts[j] / len.
      block = m * counts[j];
      mpz_divexact_ui(block.get_mpz_t(), block.get_mpz_t(), static_cast<unsigned long>(len));
      if (r < block) {
        out.push_back(spec.composition.alphabet[j]);
        --counts[j];
        m = block;
        break;
      }
      r -= block;
    }
    --len;
  }
  return out;
}

/// Inverse of match. Throws CompositionMismatch for sequences of the wrong
/// type and NotInCodebook for in-type sequences beyond the 2^k codebook.
inline std::vector<uint8_t> dematch(const MatcherSpec& spec, std::span<const double> amplitudes) {
  const auto& comp = spec.composition;
  if (static_cast<long long>(amplitudes.size()) != comp.n())
    throw CompositionMismatch("sequence length does not match the composition");
  std::vector<long long> seen(comp.alphabet.size(), 0);
  std::vector<size_t> idx(amplitudes.size());
  for (size_t t = 0; t < amplitudes.size(); ++t) {
    size_t j = 0;
    for (; j < comp.alphabet.size(); ++j)
      if (comp.alphabet[j] == amplitudes[t]) break;
    if (j == comp.alphabet.size())
      throw CompositionMismatch("symbol outside the composition alphabet");
    ++seen[j];
    idx[t] = j;
  }
  if (seen != comp.counts) throw CompositionMismatch("sequence composition mismatch");

  std::vector<long long> counts = comp.counts;
  long long len = comp.n();
  mpz_class m = multinomial(comp);
  mpz_class r = 0;
  mpz_class block;
  for (size_t t = 0; t < amplitudes.size(); ++t) {
    for (size_t j = 0; j < idx[t]; ++j) {
      if (counts[j] == 0) continue;
      block = m * counts[j];
      mpz_divexact_ui(block.get_mpz_t(), block.get_mpz_t(), static_cast<unsigned long>(len));
      r += block;
    }
    block = m * counts[idx[t]];
    mpz_divexact_ui(block.get_mpz_t(), block.get_mpz_t(), static_cast<unsigned long>(len));
    m = block;
    --counts[idx[t]];
    --len;
  }
  mpz_class limit = 1;
  limit <<= static_cast<unsigned long>(spec.k);
  if (r >= limit) throw NotInCodebook("sequence lies outside the matcher image");
  std::vector<uint8_t> bits(static_cast<size_t>(spec.k), 0);
  for (long long i = spec.k - 1; i >= 0; --i) {
    bits[static_cast<size_t>(i)] = static_cast<uint8_t>(mpz_tstbit(r.get_mpz_t(), 0));
    r >>= 1;
  }
  return bits;
}

}  // namespace pascm
