#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pascm/error.hpp"

namespace pascm {

struct DegreeProfile {
  std::map<int, long long> variable;  // degree -> number of columns
  std::map<int, long long> check;     // degree -> number of rows
};

namespace detail {

struct BitMatrix {
  int rows = 0, cols = 0, words = 0;
  std::vector<uint64_t> w;

  BitMatrix(int r, int c)
      : rows(r), cols(c), words((c + 63) / 64), w(static_cast<size_t>(r) * words, 0) {}

  bool get(int r, int c) const {
    return (w[static_cast<size_t>(r) * words + (c >> 6)] >> (c & 63)) & 1u;
  }
  void set(int r, int c) { w[static_cast<size_t>(r) * words + (c >> 6)] |= uint64_t{1} << (c & 63); }
  void xor_rows(int dst, int src) {
    uint64_t* d = &w[static_cast<size_t>(dst) * words];
    const uint64_t* s = &w[static_cast<size_t>(src) * words];
    for (int i = 0; i < words; ++i) d[i] ^= s[i];
  }
  void swap_rows(int a, int b) {
    if (a == b) return;
    std::swap_ranges(w.begin() + static_cast<size_t>(a) * words,
                     w.begin() + static_cast<size_t>(a + 1) * words,
                     w.begin() + static_cast<size_t>(b) * words);
  }
  void swap_cols(int a, int b) {
    if (a == b) return;
    for (int r = 0; r < rows; ++r) {
      bool va = get(r, a), vb = get(r, b);
      if (va != vb) {
        w[static_cast<size_t>(r) * words + (a >> 6)] ^= uint64_t{1} << (a & 63);
        w[static_cast<size_t>(r) * words + (b >> 6)] ^= uint64_t{1} << (b & 63);
      }
    }
  }
};

}  // namespace detail

/// Binary LDPC code given by its sparse parity-check matrix. After
/// systematize(), codeword positions 0..k-1 carry data and k..n-1 parity;
/// any column reordering applied to reach that form is recorded in
/// column_permutation() (canonical position -> original column).
class LdpcCode {
 public:
  static LdpcCode from_check_rows(int n, std::vector<std::vector<int>> rows) {
    LdpcCode code;
    code.n_ = n;
    code.rows_ = std::move(rows);
    code.validate_and_index();
    return code;
  }

  static LdpcCode load_alist(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw MalformedFile("cannot open alist file: " + path);
    auto next_int = [&](const char* what) {
      long long v;
      if (!(f >> v)) throw MalformedFile(std::string("alist truncated reading ") + what);
      return v;
    };
    long long n = next_int("n");
    long long m = next_int("m");
    if (n <= 0 || m <= 0 || n > 10'000'000 || m > n)
      throw MalformedFile("alist has implausible dimensions");
    long long max_col = next_int("max column degree");
    long long max_row = next_int("max row degree");
    std::vector<int> col_deg(static_cast<size_t>(n)), row_deg(static_cast<size_t>(m));
    for (auto& d : col_deg) {
      d = static_cast<int>(next_int("column degree"));
      if (d < 0 || d > max_col) throw MalformedFile("column degree out of range");
    }
    for (auto& d : row_deg) {
      d = static_cast<int>(next_int("row degree"));
      if (d < 0 || d > max_row) throw MalformedFile("row degree out of range");
    }
    std::vector<std::vector<int>> cols(static_cast<size_t>(n));
    for (long long c = 0; c < n; ++c) {
      for (long long t = 0; t < max_col; ++t) {
        long long v = next_int("column entry");
        if (v == 0) continue;  // padding
        if (v < 1 || v > m) throw MalformedFile("row index out of range");
        cols[static_cast<size_t>(c)].push_back(static_cast<int>(v - 1));
      }
      if (static_cast<int>(cols[static_cast<size_t>(c)].size()) != col_deg[static_cast<size_t>(c)])
        throw MalformedFile("column list does not match its declared degree");
    }
    std::vector<std::vector<int>> rows(static_cast<size_t>(m));
    for (long long r = 0; r < m; ++r) {
      for (long long t = 0; t < max_row; ++t) {
        long long v = next_int("row entry");
        if (v == 0) continue;
        if (v < 1 || v > n) throw MalformedFile("column index out of range");
        rows[static_cast<size_t>(r)].push_back(static_cast<int>(v - 1));
      }
      if (static_cast<int>(rows[static_cast<size_t>(r)].size()) != row_deg[static_cast<size_t>(r)])
        throw MalformedFile("row list does not match its declared degree");
    }
    // Cross-check that both adjacency views describe the same matrix.
    long long edges_cols = 0;
    for (auto& cl : cols) edges_cols += static_cast<long long>(cl.size());
    long long edges_rows = 0;
    for (auto& rl : rows) edges_rows += static_cast<long long>(rl.size());
    if (edges_cols != edges_rows) throw MalformedFile("alist adjacency lists disagree");
    std::vector<std::vector<int>> cols_from_rows(static_cast<size_t>(n));
    for (long long r = 0; r < m; ++r)
      for (int c : rows[static_cast<size_t>(r)])
        cols_from_rows[static_cast<size_t>(c)].push_back(static_cast<int>(r));
    for (long long c = 0; c < n; ++c) {
      auto a = cols[static_cast<size_t>(c)];
      auto b = cols_from_rows[static_cast<size_t>(c)];
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) throw MalformedFile("alist adjacency lists disagree");
    }
    LdpcCode code;
    code.n_ = static_cast<int>(n);
    code.rows_ = std::move(rows);
    code.validate_and_index();
    return code;
  }

  void save_alist(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw Error("cannot write alist file: " + path);
    int m = num_checks();
    size_t max_col = 0, max_row = 0;
    for (const auto& cl : cols_) max_col = std::max(max_col, cl.size());
    for (const auto& rl : rows_) max_row = std::max(max_row, rl.size());
    f << n_ << " " << m << "\n" << max_col << " " << max_row << "\n";
    for (const auto& cl : cols_) f << cl.size() << " ";
    f << "\n";
    for (const auto& rl : rows_) f << rl.size() << " ";
    f << "\n";
    for (const auto& cl : cols_) {
      for (size_t t = 0; t < max_col; ++t)
        f << (t < cl.size() ? cl[t] + 1 : 0) << (t + 1 < max_col ? " " : "");
      f << "\n";
    }
    for (const auto& rl : rows_) {
      for (size_t t = 0; t < max_row; ++t)
        f << (t < rl.size() ? rl[t] + 1 : 0) << (t + 1 < max_row ? " " : "");
      f << "\n";
    }
  }

  int n() const { return n_; }
  int k() const { return n_ - static_cast<int>(rows_.size()); }
  int num_checks() const { return static_cast<int>(rows_.size()); }
  long long num_edges() const { return edges_; }

  const std::vector<std::vector<int>>& check_neighbors() const { return rows_; }
  const std::vector<std::vector<int>>& var_neighbors() const { return cols_; }

  DegreeProfile degree_profile() const {
    DegreeProfile p;
    for (const auto& cl : cols_) ++p.variable[static_cast<int>(cl.size())];
    for (const auto& rl : rows_) ++p.check[static_cast<int>(rl.size())];
    return p;
  }

  bool systematized() const { return systematized_; }
  const std::vector<int>& column_permutation() const { return colmap_; }

  /// Gauss-Jordan elimination bringing the last n-k columns to identity,
  /// swapping columns in when necessary. Throws RankError on deficiency.
  void systematize() {
    if (systematized_) return;
    const int r = num_checks();
    const int kk = k();
    detail::BitMatrix mat(r, n_);
    for (int i = 0; i < r; ++i)
      for (int c : rows_[static_cast<size_t>(i)]) mat.set(i, c);
    std::vector<int> colmap(static_cast<size_t>(n_));
    std::iota(colmap.begin(), colmap.end(), 0);

    for (int step = 0; step < r; ++step) {
      const int pc = kk + step;
      int pr = -1;
      for (int i = step; i < r && pr < 0; ++i)
        if (mat.get(i, pc)) pr = i;
      if (pr < 0) {
        int found_col = -1;
        for (int c = pc + 1; c < n_ && found_col < 0; ++c)
          for (int i = step; i < r; ++i)
            if (mat.get(i, c)) {
              found_col = c;
              pr = i;
              break;
            }
        for (int c = kk - 1; c >= 0 && found_col < 0; --c)
          for (int i = step; i < r; ++i)
            if (mat.get(i, c)) {
              found_col = c;
              pr = i;
              break;
            }
        if (found_col < 0)
          throw RankError("parity-check matrix is rank deficient", r - step);
        mat.swap_cols(pc, found_col);
        std::swap(colmap[static_cast<size_t>(pc)], colmap[static_cast<size_t>(found_col)]);
      }
      mat.swap_rows(pr, step);
      for (int i = 0; i < r; ++i)
        if (i != step && mat.get(i, pc)) mat.xor_rows(i, step);
    }

    // Parity part: with the back block reduced to identity, row j reads
    // p_j = sum_i A'[j,i] d_i. Stored transposed for row-XOR encoding.
    parity_words_ = (r + 63) / 64;
    parity_.assign(static_cast<size_t>(kk) * parity_words_, 0);
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < kk; ++i)
        if (mat.get(j, i))
          parity_[static_cast<size_t>(i) * parity_words_ + (j >> 6)] |= uint64_t{1} << (j & 63);

    bool permuted = false;
    for (int c = 0; c < n_; ++c)
      if (colmap[static_cast<size_t>(c)] != c) permuted = true;
    if (permuted) {
      std::vector<int> inv(static_cast<size_t>(n_));
      for (int c = 0; c < n_; ++c) inv[static_cast<size_t>(colmap[static_cast<size_t>(c)])] = c;
      for (auto& rl : rows_) {
        for (int& v : rl) v = inv[static_cast<size_t>(v)];
        std::sort(rl.begin(), rl.end());
      }
      validate_and_index();
    }
    colmap_ = std::move(colmap);
    systematized_ = true;
  }

  /// Systematic encoding: codeword = [data | data * P].
  std::vector<uint8_t> encode(std::span<const uint8_t> data) const {
    if (!systematized_) throw Error("encode requires a systematized code");
    if (static_cast<int>(data.size()) != k())
      throw InvalidArgument("data length does not match code dimension");
    std::vector<uint8_t> cw(static_cast<size_t>(n_), 0);
    std::vector<uint64_t> acc(static_cast<size_t>(parity_words_), 0);
    for (int i = 0; i < k(); ++i) {
      cw[static_cast<size_t>(i)] = data[static_cast<size_t>(i)] & 1;
      if (data[static_cast<size_t>(i)] & 1) {
        const uint64_t* row = &parity_[static_cast<size_t>(i) * parity_words_];
        for (int t = 0; t < parity_words_; ++t) acc[static_cast<size_t>(t)] ^= row[t];
      }
    }
    for (int j = 0; j < num_checks(); ++j)
      cw[static_cast<size_t>(k() + j)] =
          static_cast<uint8_t>((acc[static_cast<size_t>(j >> 6)] >> (j & 63)) & 1u);
    return cw;
  }

  bool syndrome_ok(std::span<const uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != n_) throw InvalidArgument("codeword length mismatch");
    for (const auto& rl : rows_) {
      int s = 0;
      for (int c : rl) s ^= bits[static_cast<size_t>(c)] & 1;
      if (s) return false;
    }
    return true;
  }

  // Flat edge structure for the decoder: edges sorted by check.
  const std::vector<int>& edge_var() const { return edge_var_; }
  const std::vector<int>& check_offset() const { return check_offset_; }
  const std::vector<int>& var_edges() const { return var_edge_; }
  const std::vector<int>& var_offset() const { return var_offset_; }

 private:
  void validate_and_index() {
    cols_.assign(static_cast<size_t>(n_), {});
    edges_ = 0;
    for (size_t r = 0; r < rows_.size(); ++r) {
      auto& rl = rows_[r];
      std::sort(rl.begin(), rl.end());
      if (std::adjacent_find(rl.begin(), rl.end()) != rl.end())
        throw MalformedFile("duplicate entry in parity-check row");
      for (int c : rl) {
        if (c < 0 || c >= n_) throw MalformedFile("column index out of range");
        cols_[static_cast<size_t>(c)].push_back(static_cast<int>(r));
        ++edges_;
      }
    }
    check_offset_.assign(rows_.size() + 1, 0);
    edge_var_.clear();
    edge_var_.reserve(static_cast<size_t>(edges_));
    for (size_t r = 0; r < rows_.size(); ++r) {
      check_offset_[r + 1] = check_offset_[r] + static_cast<int>(rows_[r].size());
      for (int c : rows_[r]) edge_var_.push_back(c);
    }
    var_offset_.assign(static_cast<size_t>(n_) + 1, 0);
    for (int e = 0; e < static_cast<int>(edge_var_.size()); ++e)
      ++var_offset_[static_cast<size_t>(edge_var_[static_cast<size_t>(e)]) + 1];
    for (int v = 0; v < n_; ++v)
      var_offset_[static_cast<size_t>(v) + 1] += var_offset_[static_cast<size_t>(v)];
    var_edge_.assign(static_cast<size_t>(edges_), 0);
    std::vector<int> fill(var_offset_.begin(), var_offset_.end() - 1);
    for (int e = 0; e < static_cast<int>(edge_var_.size()); ++e) {
      int v = edge_var_[static_cast<size_t>(e)];
      var_edge_[static_cast<size_t>(fill[static_cast<size_t>(v)]++)] = e;
    }
  }

  int n_ = 0;
  long long edges_ = 0;
  std::vector<std::vector<int>> rows_;
  std::vector<std::vector<int>> cols_;
  std::vector<int> edge_var_, check_offset_, var_edge_, var_offset_;
  bool systematized_ = false;
  std::vector<int> colmap_;
  int parity_words_ = 0;
  std::vector<uint64_t> parity_;
};

struct DecodeResult {
  std::vector<uint8_t> bits;
  bool converged = false;
  int iterations = 0;
};

/// Flooding sum-product decoder with tanh/atanh check updates and message
/// clipping at +-30. LLR convention: log(P(0)/P(1)), positive means bit 0.
class BpDecoder {
 public:
  explicit BpDecoder(const LdpcCode& code)
      : code_(&code),
        v2c_(static_cast<size_t>(code.num_edges())),
        c2v_(static_cast<size_t>(code.num_edges())),
        total_(static_cast<size_t>(code.n())),
        tbuf_(64) {}

  DecodeResult decode(std::span<const double> llrs, int max_iter = 100) {
    const auto& code = *code_;
    if (static_cast<int>(llrs.size()) != code.n())
      throw InvalidArgument("LLR frame length mismatch");
    const auto& ev = code.edge_var();
    const auto& coff = code.check_offset();
    const auto& voff = code.var_offset();
    const auto& vedge = code.var_edges();
    const int ne = static_cast<int>(ev.size());
    const int nc = code.num_checks();
    const int nv = code.n();

    for (int e = 0; e < ne; ++e) v2c_[static_cast<size_t>(e)] = clip(llrs[static_cast<size_t>(ev[static_cast<size_t>(e)])]);

    DecodeResult res;
    res.bits.assign(static_cast<size_t>(nv), 0);
    for (int it = 1; it <= max_iter; ++it) {
      for (int c = 0; c < nc; ++c) {
        const int b = coff[static_cast<size_t>(c)], e = coff[static_cast<size_t>(c) + 1];
        const int deg = e - b;
        if (static_cast<size_t>(deg) > tbuf_.size()) tbuf_.resize(static_cast<size_t>(deg));
        double fwd = 1.0;
        for (int t = 0; t < deg; ++t) {
          tbuf_[static_cast<size_t>(t)] = fwd;
          fwd *= std::tanh(0.5 * v2c_[static_cast<size_t>(b + t)]);
        }
        double bwd = 1.0;
        for (int t = deg - 1; t >= 0; --t) {
          double excl = tbuf_[static_cast<size_t>(t)] * bwd;
          excl = std::clamp(excl, -(1.0 - 1e-15), 1.0 - 1e-15);
          c2v_[static_cast<size_t>(b + t)] = clip(2.0 * std::atanh(excl));
          bwd *= std::tanh(0.5 * v2c_[static_cast<size_t>(b + t)]);
        }
      }
      bool tie = false;
      for (int v = 0; v < nv; ++v) {
        double tot = llrs[static_cast<size_t>(v)];
        for (int t = voff[static_cast<size_t>(v)]; t < voff[static_cast<size_t>(v) + 1]; ++t)
          tot += c2v_[static_cast<size_t>(vedge[static_cast<size_t>(t)])];
        total_[static_cast<size_t>(v)] = tot;
        for (int t = voff[static_cast<size_t>(v)]; t < voff[static_cast<size_t>(v) + 1]; ++t) {
          int e2 = vedge[static_cast<size_t>(t)];
          v2c_[static_cast<size_t>(e2)] = clip(tot - c2v_[static_cast<size_t>(e2)]);
        }
        res.bits[static_cast<size_t>(v)] = tot < 0.0 ? 1 : 0;
        if (tot == 0.0) tie = true;
      }
      res.iterations = it;
      if (!tie && code.syndrome_ok(res.bits)) {
        res.converged = true;
        return res;
      }
    }
    res.converged = false;
    return res;
  }

 private:
  static double clip(double v) { return std::clamp(v, -30.0, 30.0); }

  const LdpcCode* code_;
  std::vector<double> v2c_, c2v_, total_;
  std::vector<double> tbuf_;
};

inline DecodeResult decode(const LdpcCode& code, std::span<const double> llrs, int max_iter = 100) {
  return BpDecoder(code).decode(llrs, max_iter);
}

/// Seeded progressive-edge-growth construction of a (dv,dc)-regular code.
/// Each new edge attaches to the most distant (ideally unreachable) check
/// with spare capacity, which keeps short cycles out. Retries with derived
/// seeds until the result has full rank; the returned code is systematized.
inline LdpcCode make_regular_ldpc(int n, int dv, int dc, uint64_t seed, int max_attempts = 32) {
  if (n <= 0 || dv < 2 || dc <= dv) throw InvalidArgument("bad regular code parameters");
  if ((static_cast<long long>(n) * dv) % dc != 0)
    throw InvalidArgument("n*dv must be divisible by dc");
  const int m = static_cast<int>((static_cast<long long>(n) * dv) / dc);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(attempt));
    std::vector<std::vector<int>> rows(static_cast<size_t>(m));
    std::vector<std::vector<int>> var_adj(static_cast<size_t>(n));
    std::vector<int> check_deg(static_cast<size_t>(m), 0);

    auto bfs_check_dist = [&](int v, std::vector<int>& dist) {
      dist.assign(static_cast<size_t>(m), -1);
      std::vector<int> vdist(static_cast<size_t>(n), -1);
      std::queue<int> q;  // variables, layered with checks
      vdist[static_cast<size_t>(v)] = 0;
      q.push(v);
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int c : var_adj[static_cast<size_t>(u)]) {
          if (dist[static_cast<size_t>(c)] < 0) {
            dist[static_cast<size_t>(c)] = vdist[static_cast<size_t>(u)] + 1;
            for (int u2 : rows[static_cast<size_t>(c)]) {
              if (vdist[static_cast<size_t>(u2)] < 0) {
                vdist[static_cast<size_t>(u2)] = dist[static_cast<size_t>(c)] + 1;
                q.push(u2);
              }
            }
          }
        }
      }
    };

    bool stuck = false;
    std::vector<int> dist;
    for (int v = 0; v < n && !stuck; ++v) {
      for (int t = 0; t < dv && !stuck; ++t) {
        bfs_check_dist(v, dist);
        // candidates: unreached checks first, otherwise the farthest ones;
        // distance 1 means already adjacent and is never allowed
        int best_dist = -2;
        for (int c = 0; c < m; ++c) {
          if (check_deg[static_cast<size_t>(c)] >= dc) continue;
          int d = dist[static_cast<size_t>(c)];
          if (d == 1) continue;
          int rankd = (d < 0) ? INT32_MAX : d;
          if (rankd > best_dist) best_dist = rankd;
        }
        if (best_dist == -2) {
          stuck = true;
          break;
        }
        int best_deg = INT32_MAX;
        std::vector<int> pool;
        for (int c = 0; c < m; ++c) {
          if (check_deg[static_cast<size_t>(c)] >= dc) continue;
          int d = dist[static_cast<size_t>(c)];
          if (d == 1) continue;
          int rankd = (d < 0) ? INT32_MAX : d;
          if (rankd != best_dist) continue;
          if (check_deg[static_cast<size_t>(c)] < best_deg) {
            best_deg = check_deg[static_cast<size_t>(c)];
            pool.clear();
          }
          if (check_deg[static_cast<size_t>(c)] == best_deg) pool.push_back(c);
        }
        int chosen = pool[static_cast<size_t>(rng() % pool.size())];
        rows[static_cast<size_t>(chosen)].push_back(v);
        var_adj[static_cast<size_t>(v)].push_back(chosen);
        ++check_deg[static_cast<size_t>(chosen)];
      }
    }
    if (stuck) continue;

    try {
      LdpcCode code = LdpcCode::from_check_rows(n, std::move(rows));
      code.systematize();
      return code;
    } catch (const RankError&) {
      continue;  // rare; try a derived seed
    } catch (const MalformedFile&) {
      continue;  // parallel edge, possible only in degenerate corners
    }
  }
  throw Error("failed to construct a full-rank regular code");
}

}  // namespace pascm
