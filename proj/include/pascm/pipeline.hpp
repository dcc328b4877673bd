#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pascm/ccdm.hpp"
#include "pascm/ldpc.hpp"
#include "pascm/planning.hpp"

namespace pascm {

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// gamma = 1 - (1-c)m, the fraction of signs carrying data bits.
/// Exact rational arithmetic; requires (m-1)/m <= c < 1.
inline Rational gamma_of(long long c_num, long long c_den, int m) {
  if (c_den <= 0 || c_num < 0 || c_num >= c_den) throw InvalidArgument("code rate must be in [0,1)");
  long long num = c_num * m - static_cast<long long>(m - 1) * c_den;
  if (num < 0) throw UnsupportedRate("code rate below (m-1)/m");
  long long den = c_den;
  long long g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

/// Bit-level interleaver: the order in which the amplitude bit-level strings
/// (levels 2..m) appear in the codeword. The sign level always sits at the
/// end, so the full bit-mapper reads e.g. (4,2,3,1).
struct BitMapper {
  std::vector<int> level_order;

  static BitMapper identity(int m) {
    BitMapper b;
    for (int lev = 2; lev <= m; ++lev) b.level_order.push_back(lev);
    return b;
  }

  static BitMapper parse(const std::string& text, int m) {
    BitMapper b;
    std::string t = text;
    for (char& ch : t)
      if (ch == '(' || ch == ')' || ch == ',') ch = ' ';
    std::istringstream is(t);
    int v;
    while (is >> v) b.level_order.push_back(v);
    if (!b.level_order.empty() && b.level_order.back() == 1) b.level_order.pop_back();
    b.validate(m);
    return b;
  }

  void validate(int m) const {
    if (static_cast<int>(level_order.size()) != m - 1)
      throw InvalidArgument("bit-mapper must order levels 2..m");
    std::vector<bool> seen(static_cast<size_t>(m + 1), false);
    for (int lev : level_order) {
      if (lev < 2 || lev > m || seen[static_cast<size_t>(lev)])
        throw InvalidArgument("bit-mapper is not a permutation of levels 2..m");
      seen[static_cast<size_t>(lev)] = true;
    }
  }

  std::string to_string() const {
    std::string s = "(";
    for (int lev : level_order) s += std::to_string(lev) + ",";
    s += "1)";
    return s;
  }
};

/// A transmission mode: constellation, code, design distribution, matcher
/// and bit-mapper. Immutable in use; simulation helpers derive variants.
struct PasMode {
  std::string id;
  bool uniform = false;
  AskConstellation constellation;
  std::shared_ptr<const LdpcCode> code;
  ShapedInput input;    // design distribution at the design scaling
  MatcherSpec matcher;  // unused for uniform modes
  BitMapper mapper;
  Rational gamma;
  long long nc = 0;
  long long sign_data_bits = 0;

  int m() const { return constellation.m; }

  /// Data bits carried per frame: matcher input plus direct sign bits.
  long long frame_data_bits() const {
    return uniform ? code->k() : matcher.k + sign_data_bits;
  }

  /// Spectral efficiency R = k_c / n_c in bits per channel use.
  double rate() const {
    return static_cast<double>(frame_data_bits()) / static_cast<double>(nc);
  }

  /// Design transmission rate H(A) + gamma (uniform modes: c*m).
  double design_rate() const {
    if (uniform) return static_cast<double>(code->k()) * m() / static_cast<double>(code->n());
    return input.amp_entropy() + gamma.value();
  }

  // Codeword layout: (m-1) blocks of n_c amplitude-level bits in mapper
  // order, then n_c sign bits (data signs first, parity signs last).
  long long pos_of(int level, long long sym) const {
    if (level == 1) return static_cast<long long>(m() - 1) * nc + sym;
    return static_cast<long long>(block_of_level_[static_cast<size_t>(level)]) * nc + sym;
  }

  std::vector<int> block_of_level_;  // filled by make_*_mode
};

namespace detail {

inline void finish_mode(PasMode& mode) {
  const int m = mode.m();
  const int n = mode.code->n();
  if (n % m != 0)
    throw UnsupportedRate("code length not divisible by bits per symbol");
  mode.nc = n / m;
  const long long parity = mode.code->num_checks();
  if (parity > mode.nc) throw UnsupportedRate("code rate below (m-1)/m");
  mode.sign_data_bits = mode.nc - parity;
  mode.gamma = gamma_of(mode.code->k(), n, m);
  mode.mapper.validate(m);
  mode.block_of_level_.assign(static_cast<size_t>(m + 1), -1);
  for (size_t t = 0; t < mode.mapper.level_order.size(); ++t)
    mode.block_of_level_[static_cast<size_t>(mode.mapper.level_order[t])] = static_cast<int>(t);
  if (!mode.code->systematized()) throw Error("mode requires a systematized code");
}

}  // namespace detail

inline PasMode make_pas_mode(std::string id, const AskConstellation& c,
                             std::shared_ptr<const LdpcCode> code, ShapedInput design,
                             MatcherSpec matcher, BitMapper mapper) {
  PasMode mode;
  mode.id = std::move(id);
  mode.uniform = false;
  mode.constellation = c;
  mode.code = std::move(code);
  mode.input = std::move(design);
  mode.matcher = std::move(matcher);
  mode.mapper = std::move(mapper);
  detail::finish_mode(mode);
  if (mode.matcher.composition.n() != mode.nc)
    throw InvalidArgument("matcher output length must equal the symbol count");
  if (mode.matcher.composition.alphabet != mode.constellation.amplitudes)
    throw InvalidArgument("matcher alphabet must match the constellation amplitudes");
  return mode;
}

inline PasMode make_uniform_mode(std::string id, const AskConstellation& c,
                                 std::shared_ptr<const LdpcCode> code, double delta,
                                 BitMapper mapper) {
  PasMode mode;
  mode.id = std::move(id);
  mode.uniform = true;
  mode.constellation = c;
  mode.code = std::move(code);
  mode.input = make_uniform_input(c, delta);
  mode.mapper = std::move(mapper);
  const int m = mode.m();
  const int n = mode.code->n();
  if (n % m != 0) throw UnsupportedRate("code length not divisible by bits per symbol");
  mode.nc = n / m;
  mode.sign_data_bits = 0;
  mode.gamma = Rational{0, 1};
  mode.mapper.validate(m);
  mode.block_of_level_.assign(static_cast<size_t>(m + 1), -1);
  for (size_t t = 0; t < mode.mapper.level_order.size(); ++t)
    mode.block_of_level_[static_cast<size_t>(mode.mapper.level_order[t])] = static_cast<int>(t);
  if (!mode.code->systematized()) throw Error("mode requires a systematized code");
  return mode;
}

/// Same mode rescaled so that delta^2 E[X^2] matches the given SNR.
inline PasMode with_snr(const PasMode& mode, double snr_db) {
  PasMode out = mode;
  const double p = db_to_linear(snr_db);
  out.input.delta = std::sqrt(p / out.input.second_moment());
  return out;
}

/// Replace the design distribution (and recompute the matcher composition).
inline PasMode with_design(const PasMode& mode, ShapedInput design) {
  PasMode out = mode;
  out.input = std::move(design);
  if (!out.uniform) {
    out.matcher = make_matcher(
        choose_composition(out.constellation.amplitudes, out.input.amp_probs, out.nc));
  }
  return out;
}

/// Re-derive the design point at a new power: the distribution/scaling pair
/// maximizing the bit-metric rate, as used along the rate curve.
inline PasMode redesign_at_power(const PasMode& mode, double snr_db,
                                 const Quadrature& q = default_quadrature()) {
  if (mode.uniform) return with_snr(mode, snr_db);
  return with_design(mode, optimize_input_bmd(mode.constellation, db_to_linear(snr_db), q));
}

/// PAS encoding: amplitude labels (bit-level interleaved) plus data sign
/// bits form the systematic part; parity bits become the remaining signs.
inline std::vector<double> pas_encode(const PasMode& mode, std::span<const double> amplitudes,
                                      std::span<const uint8_t> sign_data) {
  if (mode.uniform) throw InvalidArgument("pas_encode requires a shaped mode");
  if (static_cast<long long>(amplitudes.size()) != mode.nc)
    throw InvalidArgument("amplitude frame length mismatch");
  if (static_cast<long long>(sign_data.size()) != mode.sign_data_bits)
    throw InvalidArgument("sign data length mismatch");
  const auto& c = mode.constellation;
  const int m = mode.m();
  const long long nc = mode.nc;

  std::vector<int> amp_idx(static_cast<size_t>(nc));
  for (long long j = 0; j < nc; ++j)
    amp_idx[static_cast<size_t>(j)] = c.amp_index(amplitudes[static_cast<size_t>(j)]);

  std::vector<uint8_t> data(static_cast<size_t>(mode.code->k()));
  for (size_t t = 0; t < mode.mapper.level_order.size(); ++t) {
    const int lev = mode.mapper.level_order[t];
    uint8_t* blk = &data[t * static_cast<size_t>(nc)];
    for (long long j = 0; j < nc; ++j)
      blk[j] = static_cast<uint8_t>(c.amp_label_bit(amp_idx[static_cast<size_t>(j)], lev));
  }
  std::copy(sign_data.begin(), sign_data.end(),
            data.begin() + static_cast<size_t>(m - 1) * static_cast<size_t>(nc));

  std::vector<uint8_t> cw = mode.code->encode(data);

  std::vector<double> symbols(static_cast<size_t>(nc));
  const size_t sign_base = static_cast<size_t>(m - 1) * static_cast<size_t>(nc);
  for (long long j = 0; j < nc; ++j) {
    const double a = amplitudes[static_cast<size_t>(j)];
    const double s = cw[sign_base + static_cast<size_t>(j)] ? 1.0 : -1.0;
    symbols[static_cast<size_t>(j)] = mode.input.delta * a * s;
  }
  return symbols;
}

/// Uniform BICM encoding: all m levels carry code bits.
inline std::vector<double> encode_uniform(const PasMode& mode, std::span<const uint8_t> data) {
  if (!mode.uniform) throw InvalidArgument("encode_uniform requires a uniform mode");
  if (static_cast<int>(data.size()) != mode.code->k())
    throw InvalidArgument("data length mismatch");
  const auto& c = mode.constellation;
  const int m = mode.m();
  const long long nc = mode.nc;
  std::vector<uint8_t> cw = mode.code->encode(data);
  std::vector<double> symbols(static_cast<size_t>(nc));
  for (long long j = 0; j < nc; ++j) {
    uint32_t lab = 0;
    for (int lev = 1; lev <= m; ++lev) {
      lab = (lab << 1) | cw[static_cast<size_t>(mode.pos_of(lev, j))];
    }
    symbols[static_cast<size_t>(j)] =
        mode.input.delta * c.points[static_cast<size_t>(c.point_of_label[lab])];
  }
  return symbols;
}

/// Bitwise soft demapper. For each symbol and level, the LLR
/// log P(B_i=0|...)/P(B_i=1|...) combines the design prior with the channel
/// likelihood; results are placed in codeword order.
inline std::vector<double> demap(const PasMode& mode, std::span<const double> y) {
  if (static_cast<long long>(y.size()) != mode.nc)
    throw InvalidArgument("received frame length mismatch");
  const auto& c = mode.constellation;
  const int m = mode.m();
  const int np = c.num_points();
  constexpr double kDemapClip = 100.0;

  std::vector<double> logp(static_cast<size_t>(np));
  for (int l = 0; l < np; ++l)
    logp[static_cast<size_t>(l)] =
        mode.input.probs[static_cast<size_t>(l)] > 0.0
            ? std::log(mode.input.probs[static_cast<size_t>(l)])
            : -std::numeric_limits<double>::infinity();

  std::vector<double> llrs(static_cast<size_t>(mode.code->n()));
  std::vector<double> u(static_cast<size_t>(np));
  for (long long j = 0; j < mode.nc; ++j) {
    const double yj = y[static_cast<size_t>(j)];
    double amax = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < np; ++l) {
      const double d = yj - mode.input.delta * c.points[static_cast<size_t>(l)];
      u[static_cast<size_t>(l)] = logp[static_cast<size_t>(l)] - 0.5 * d * d;
      amax = std::max(amax, u[static_cast<size_t>(l)]);
    }
    for (int l = 0; l < np; ++l) u[static_cast<size_t>(l)] = std::exp(u[static_cast<size_t>(l)] - amax);
    for (int lev = 1; lev <= m; ++lev) {
      double u0 = 0.0, u1 = 0.0;
      for (int l = 0; l < np; ++l) {
        if (c.point_label_bit(l, lev) == 0)
          u0 += u[static_cast<size_t>(l)];
        else
          u1 += u[static_cast<size_t>(l)];
      }
      double llr;
      if (u0 <= 0.0)
        llr = -kDemapClip;
      else if (u1 <= 0.0)
        llr = kDemapClip;
      else
        llr = std::clamp(std::log(u0) - std::log(u1), -kDemapClip, kDemapClip);
      llrs[static_cast<size_t>(mode.pos_of(lev, j))] = llr;
    }
  }
  return llrs;
}

struct PasDecodeResult {
  std::vector<double> amplitudes;
  std::vector<uint8_t> sign_data;
  bool converged = false;
  int iterations = 0;
};

/// Receive chain: demap, BP decode, invert the bit-mapper, read amplitudes
/// from the systematic part and the data signs from its tail.
inline PasDecodeResult pas_decode(const PasMode& mode, std::span<const double> y,
                                  int max_iter = 100, BpDecoder* decoder = nullptr) {
  if (mode.uniform) throw InvalidArgument("pas_decode requires a shaped mode");
  std::vector<double> llrs = demap(mode, y);
  DecodeResult dec = decoder ? decoder->decode(llrs, max_iter)
                             : decode(*mode.code, llrs, max_iter);
  const auto& c = mode.constellation;
  const int m = mode.m();
  PasDecodeResult out;
  out.converged = dec.converged;
  out.iterations = dec.iterations;
  out.amplitudes.resize(static_cast<size_t>(mode.nc));
  for (long long j = 0; j < mode.nc; ++j) {
    uint32_t lab = 0;
    for (int lev = 2; lev <= m; ++lev)
      lab = (lab << 1) | dec.bits[static_cast<size_t>(mode.pos_of(lev, j))];
    out.amplitudes[static_cast<size_t>(j)] =
        c.amplitudes[static_cast<size_t>(c.amp_of_label[lab])];
  }
  const size_t tail = static_cast<size_t>(m - 1) * static_cast<size_t>(mode.nc);
  out.sign_data.assign(dec.bits.begin() + static_cast<ptrdiff_t>(tail),
                       dec.bits.begin() + static_cast<ptrdiff_t>(tail + static_cast<size_t>(mode.sign_data_bits)));
  return out;
}

struct UniformDecodeResult {
  std::vector<uint8_t> data;
  bool converged = false;
  int iterations = 0;
};

inline UniformDecodeResult decode_uniform(const PasMode& mode, std::span<const double> y,
                                          int max_iter = 100, BpDecoder* decoder = nullptr) {
  if (!mode.uniform) throw InvalidArgument("decode_uniform requires a uniform mode");
  std::vector<double> llrs = demap(mode, y);
  DecodeResult dec = decoder ? decoder->decode(llrs, max_iter)
                             : decode(*mode.code, llrs, max_iter);
  UniformDecodeResult out;
  out.converged = dec.converged;
  out.iterations = dec.iterations;
  out.data.assign(dec.bits.begin(), dec.bits.begin() + mode.code->k());
  return out;
}

// ---- mode configuration files (key = value lines, # comments) ----

namespace detail {

inline std::map<std::string, std::string> parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MalformedFile("cannot open mode config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return kv;
}

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    // decimal fraction
    double v = std::stod(s);
    long long den = 1;
    while (std::fabs(v * den - std::llround(v * den)) > 1e-9 && den < 1000000) den *= 10;
    return Rational{std::llround(v * den), den};
  }
  return Rational{std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
}

}  // namespace detail

/// Build a mode from a config file. Keys: kind (pas|uniform), m, labeling,
/// alist (path, relative to the config) or code (peg:n,dv,dc,seed), snr_db
/// or delta, optional target_rate, mapper, matcher_k, rate (consistency
/// check only), id.
inline PasMode load_mode(const std::string& cfg_path,
                         const Quadrature& q = default_quadrature()) {
  namespace fs = std::filesystem;
  auto kv = detail::parse_config(cfg_path);
  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw MalformedFile("mode config missing key: " + key);
    return it->second;
  };
  auto get = [&](const std::string& key, const std::string& dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
  };

  const int m = std::stoi(need("m"));
  auto c = build_constellation(m, labeling_from_string(get("labeling", "brgc")));

  std::shared_ptr<LdpcCode> code;
  if (kv.count("alist")) {
    fs::path p = kv["alist"];
    if (p.is_relative()) p = fs::path(cfg_path).parent_path() / p;
    code = std::make_shared<LdpcCode>(LdpcCode::load_alist(p.string()));
    code->systematize();
  } else if (kv.count("code")) {
    std::string spec = kv["code"];
    if (spec.rfind("peg:", 0) != 0) throw MalformedFile("unknown code spec: " + spec);
    std::string args = spec.substr(4);
    for (char& ch : args)
      if (ch == ',') ch = ' ';
    std::istringstream is(args);
    int n, dv, dc;
    uint64_t seed = 1;
    if (!(is >> n >> dv >> dc)) throw MalformedFile("code spec needs n,dv,dc");
    is >> seed;
    code = std::make_shared<LdpcCode>(make_regular_ldpc(n, dv, dc, seed));
  } else {
    throw MalformedFile("mode config needs either alist or code");
  }

  if (kv.count("rate")) {
    Rational r = detail::parse_rational(kv["rate"]);
    if (r.num * static_cast<long long>(code->n()) != r.den * static_cast<long long>(code->k()))
      throw MalformedFile("declared rate does not match the code");
  }

  const std::string kind = get("kind", "pas");
  std::string id = get("id", fs::path(cfg_path).stem().string());

  double delta = 0.0;
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  if (kv.count("snr_db")) snr_db = std::stod(kv["snr_db"]);
  if (kv.count("delta")) delta = std::stod(kv["delta"]);
  if (delta <= 0.0 && !(snr_db == snr_db))
    throw MalformedFile("mode config needs snr_db or delta");

  BitMapper mapper = kv.count("mapper") ? BitMapper::parse(kv["mapper"], m)
                                        : BitMapper::identity(m);

  if (kind == "uniform") {
    if (delta <= 0.0)
      delta = std::sqrt(db_to_linear(snr_db) / uniform_second_moment(c));
    return make_uniform_mode(id, c, code, delta, mapper);
  }
  if (kind != "pas") throw MalformedFile("unknown mode kind: " + kind);

  const long long nc = code->n() / m;
  Rational gam = gamma_of(code->k(), code->n(), m);
  ShapedInput design;
  if (kv.count("target_rate")) {
    double target = std::stod(kv["target_rate"]);
    double nu = solve_nu_for_amp_entropy(c, target - gam.value());
    double d = delta;
    if (d <= 0.0) {
      ShapedInput probe = make_mb_input(c, nu, 1.0);
      d = std::sqrt(db_to_linear(snr_db) / probe.second_moment());
    }
    design = make_mb_input(c, nu, d);
  } else if (delta > 0.0) {
    throw MalformedFile("shaped mode with explicit delta also needs target_rate");
  } else {
    design = optimize_input_bmd(c, db_to_linear(snr_db), q);
  }

  auto comp = choose_composition(c.amplitudes, design.amp_probs, nc);
  long long k = kv.count("matcher_k") ? std::stoll(kv["matcher_k"]) : -1;
  auto matcher = make_matcher(std::move(comp), k);
  if (kv.count("matcher_n") && std::stoll(kv["matcher_n"]) != nc)
    throw MalformedFile("matcher_n must equal the symbol count of the code");

  return make_pas_mode(id, c, code, std::move(design), std::move(matcher), std::move(mapper));
}

}  // namespace pascm
