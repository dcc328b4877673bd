#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pascm/constellation.hpp"
#include "pascm/shaping.hpp"

using namespace pascm;

namespace {

std::string label_string(uint32_t lab, int width) {
  std::string s;
  for (int i = width - 1; i >= 0; --i) s += ((lab >> i) & 1) ? '1' : '0';
  return s;
}

}  // namespace

TEST_CASE("4-ASK points and one-bit amplitude labels") {
  auto c = build_constellation(2, LabelingKind::brgc);
  REQUIRE(c.points == std::vector<double>{-3, -1, 1, 3});
  REQUIRE(c.amplitudes == std::vector<double>{3, 1});
  CHECK(c.amp_labels[0] == 0);  // amplitude 3
  CHECK(c.amp_labels[1] == 1);  // amplitude 1
}

TEST_CASE("8-ASK BRGC amplitude labels and full point labels") {
  auto c = build_constellation(3, LabelingKind::brgc);
  REQUIRE(c.amplitudes == std::vector<double>{7, 5, 3, 1});
  CHECK(label_string(c.amp_labels[0], 2) == "00");
  CHECK(label_string(c.amp_labels[1], 2) == "01");
  CHECK(label_string(c.amp_labels[2], 2) == "11");
  CHECK(label_string(c.amp_labels[3], 2) == "10");

  const std::vector<std::string> expect = {"000", "001", "011", "010",
                                           "110", "111", "101", "100"};
  for (int i = 0; i < 8; ++i)
    CHECK(label_string(c.point_labels[static_cast<size_t>(i)], 3) == expect[static_cast<size_t>(i)]);
}

TEST_CASE("8-ASK natural labeling matches the tabulated point labels") {
  auto c = build_constellation(3, LabelingKind::natural);
  const std::vector<std::string> expect = {"000", "001", "010", "011",
                                           "111", "110", "101", "100"};
  for (int i = 0; i < 8; ++i)
    CHECK(label_string(c.point_labels[static_cast<size_t>(i)], 3) == expect[static_cast<size_t>(i)]);
}

TEST_CASE("constellation size limits") {
  CHECK_THROWS_AS(build_constellation(1, LabelingKind::brgc), InvalidArgument);
  CHECK_THROWS_AS(build_constellation(9, LabelingKind::brgc), InvalidArgument);
  CHECK_NOTHROW(build_constellation(8, LabelingKind::natural));
}

TEST_CASE("labels are a bijection for every m and labeling") {
  for (int m = 2; m <= 8; ++m) {
    for (auto kind : {LabelingKind::natural, LabelingKind::brgc}) {
      auto c = build_constellation(m, kind);
      std::set<uint32_t> labs(c.point_labels.begin(), c.point_labels.end());
      CHECK(labs.size() == c.point_labels.size());
      for (uint32_t lab : labs) CHECK(lab < (1u << m));
      for (int i = 0; i < c.num_points(); ++i)
        CHECK(c.point_of_label[c.point_labels[static_cast<size_t>(i)]] == i);
    }
  }
}

TEST_CASE("BRGC amplitude labels induce the BRGC on the whole point set") {
  for (int m = 2; m <= 8; ++m) {
    auto c = build_constellation(m, LabelingKind::brgc);
    for (int i = 0; i < c.num_points(); ++i) {
      uint32_t u = static_cast<uint32_t>(i);
      CHECK(c.point_labels[static_cast<size_t>(i)] == (u ^ (u >> 1)));
    }
  }
}

TEST_CASE("sign bit convention: b(-1)=0, b(+1)=1") {
  auto c = build_constellation(3, LabelingKind::brgc);
  for (int i = 0; i < c.num_points(); ++i) {
    int sign_bit = c.point_label_bit(i, 1);
    CHECK(sign_bit == (c.points[static_cast<size_t>(i)] > 0 ? 1 : 0));
  }
}

TEST_CASE("qam_pair maps two ASK symbols to one complex symbol") {
  CHECK(qam_pair(1, -1, 1.0) == std::complex<double>(1, -1));
  CHECK(qam_pair(3, 3, 0.5) == std::complex<double>(1.5, 1.5));
  CHECK(qam_pair(-7, 5, 2.0) == std::complex<double>(-14, 10));
}

TEST_CASE("qam_pair energy is exactly additive") {
  auto c = build_constellation(3, LabelingKind::brgc);
  for (double x1 : c.points)
    for (double x2 : c.points) {
      double d = 0.35;
      CHECK(std::norm(qam_pair(x1, x2, d)) == (d * x1) * (d * x1) + (d * x2) * (d * x2));
    }
}

TEST_CASE("sign level prior is exactly uniform for symmetric inputs") {
  for (int m = 2; m <= 6; ++m) {
    auto c = build_constellation(m, LabelingKind::brgc);
    auto in = make_mb_input(c, 0.07, 1.0);
    auto [p0, p1] = bit_level_prior(in, 1);
    CHECK(p0 == Catch::Approx(0.5).margin(1e-15));
    CHECK(p1 == Catch::Approx(0.5).margin(1e-15));
  }
}

TEST_CASE("uniform input gives uniform priors at every level") {
  auto c = build_constellation(3, LabelingKind::brgc);
  auto in = make_uniform_input(c, 1.0);
  for (int lev = 1; lev <= 3; ++lev) {
    auto [p0, p1] = bit_level_prior(in, lev);
    CHECK(p0 == Catch::Approx(0.5).margin(1e-12));
  }
}

TEST_CASE("4-ASK amplitude-level prior under a shaped input") {
  // e^{-8 nu} = 1/3 puts 3/8 on each of +-1 and 1/8 on each of +-3.
  auto c = build_constellation(2, LabelingKind::brgc);
  double nu = std::log(3.0) / 8.0;
  auto in = make_mb_input(c, nu, 1.0);
  CHECK(in.probs[0] == Catch::Approx(1.0 / 8).epsilon(1e-12));
  CHECK(in.probs[1] == Catch::Approx(3.0 / 8).epsilon(1e-12));
  auto [p0, p1] = bit_level_prior(in, 2);
  CHECK(p0 == Catch::Approx(0.25).epsilon(1e-12));  // label(3)=0
  CHECK(p1 == Catch::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("bit_level_prior rejects unnormalized inputs") {
  auto c = build_constellation(2, LabelingKind::brgc);
  std::vector<double> probs = {0.3, 0.3, 0.3, 0.3};
  CHECK_THROWS_AS(bit_level_prior(c, probs, 1), InvalidArgument);
}

TEST_CASE("amplitude-sign factorization of symmetric inputs") {
  for (int m = 2; m <= 6; ++m) {
    auto c = build_constellation(m, LabelingKind::brgc);
    auto in = make_mb_input(c, 0.02 * m, 1.0);
    for (int i = 0; i < c.num_points(); ++i) {
      double x = c.points[static_cast<size_t>(i)];
      double pa = in.amp_probs[static_cast<size_t>(c.amp_index(std::fabs(x)))];
      CHECK(in.probs[static_cast<size_t>(i)] == Catch::Approx(0.5 * pa).margin(1e-12));
    }
  }
}
