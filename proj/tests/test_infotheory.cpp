#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pascm/ccdm.hpp"
#include "pascm/infotheory.hpp"
#include "pascm/planning.hpp"

using namespace pascm;

TEST_CASE("capacity formula") {
  CHECK(capacity(3.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(capacity(0.0) == 0.0);
  CHECK(capacity(db_to_linear(4.7712)) == Catch::Approx(1.0).margin(2e-4));
}

TEST_CASE("Gauss-Hermite rule integrates the Gaussian kernel to one") {
  for (int n : {16, 64, 128, 256}) {
    auto q = Quadrature::gauss_hermite(n);
    double s = 0.0;
    for (double w : q.gw) s += w;
    CHECK(s == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("mutual information vanishes as the scaling goes to zero") {
  auto c = build_constellation(2, LabelingKind::brgc);
  auto in = make_uniform_input(c, 1e-6);
  CHECK(mutual_information(in) < 1e-6);
}

TEST_CASE("uniform 4-ASK and 8-ASK at the tabulated rate-m-1 SNRs") {
  auto c4 = build_constellation(2, LabelingKind::brgc);
  double p4 = db_to_linear(5.1181);
  auto in4 = make_uniform_input(c4, std::sqrt(p4 / uniform_second_moment(c4)));
  CHECK(mutual_information(in4) == Catch::Approx(1.0).margin(1e-3));

  auto c8 = build_constellation(3, LabelingKind::brgc);
  double p8 = db_to_linear(12.6187);
  auto in8 = make_uniform_input(c8, std::sqrt(p8 / uniform_second_moment(c8)));
  CHECK(mutual_information(in8) == Catch::Approx(2.0).margin(1e-3));
}

TEST_CASE("optimized 4-ASK input reaches one bit at the tabulated SNR") {
  auto c = build_constellation(2, LabelingKind::brgc);
  auto best = optimize_input(c, db_to_linear(4.8180));
  CHECK(mutual_information(best) == Catch::Approx(1.0).margin(1e-3));
  CHECK(best.power() == Catch::Approx(db_to_linear(4.8180)).epsilon(1e-8));
}

TEST_CASE("optimize_input rejects nonpositive power") {
  auto c = build_constellation(2, LabelingKind::brgc);
  CHECK_THROWS_AS(optimize_input(c, 0.0), InvalidArgument);
}

TEST_CASE("optimized input beats random scalings from the bracket") {
  auto c = build_constellation(3, LabelingKind::brgc);
  const double p = db_to_linear(9.0);
  auto best = optimize_input(c, p);
  double best_mi = mutual_information(best);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ud(std::sqrt(p / uniform_second_moment(c)),
                                            std::sqrt(p));
  for (int t = 0; t < 20; ++t) {
    auto in = make_input_with_power(c, ud(rng), p);
    CHECK(mutual_information(in) <= best_mi + 1e-6);
  }
}

TEST_CASE("power constraint is tight after optimization") {
  for (int m : {2, 3, 4}) {
    auto c = build_constellation(m, LabelingKind::brgc);
    double p = db_to_linear(3.0 + 6.0 * m);
    auto in = optimize_input(c, p);
    CHECK(in.power() == Catch::Approx(p).epsilon(1e-8));
  }
}

TEST_CASE("quadrature refinement changes MI by less than 1e-4 bits") {
  auto fine = Quadrature::gauss_hermite(1280);
  auto base = Quadrature::gauss_hermite(128);
  for (int m : {2, 3, 6}) {
    auto c = build_constellation(m, LabelingKind::brgc);
    double s = m == 2 ? 4.818 : (m == 3 ? 11.8425 : 30.2078);
    auto in = optimize_input(c, db_to_linear(s), base);
    CHECK(std::fabs(mutual_information(in, base) - mutual_information(in, fine)) < 1e-4);
  }
}

TEST_CASE("doubling the node count moves MI by less than 1e-5 bits") {
  auto q256 = Quadrature::gauss_hermite(256);
  for (int m : {2, 3}) {
    auto c = build_constellation(m, LabelingKind::brgc);
    double s = m == 2 ? 4.818 : 11.8425;
    auto in = optimize_input(c, db_to_linear(s));
    CHECK(std::fabs(mutual_information(in) - mutual_information(in, q256)) < 1e-5);
  }
}

TEST_CASE("shaped 4-ASK bit-metric rate at the tabulated BMD SNR") {
  auto c = build_constellation(2, LabelingKind::brgc);
  auto in = optimize_input_bmd(c, db_to_linear(4.8313));
  CHECK(rbmd(in) == Catch::Approx(1.0).margin(2e-3));
}

TEST_CASE("uniform input: independent levels make rbmd the sum of level rates") {
  auto c = build_constellation(3, LabelingKind::brgc);
  double p = db_to_linear(10.0);
  auto in = make_uniform_input(c, std::sqrt(p / uniform_second_moment(c)));
  auto rep = rbmd_report(in);
  double sum_levels = 0.0;
  for (int lev = 1; lev <= 3; ++lev) {
    auto [p0, p1] = bit_level_prior(in, lev);
    double hb = 0.0;
    if (p0 > 0) hb -= p0 * std::log2(p0);
    if (p1 > 0) hb -= p1 * std::log2(p1);
    sum_levels += hb - rep.level_cond_entropy[static_cast<size_t>(lev - 1)];
  }
  CHECK(rep.rbmd == Catch::Approx(sum_levels).margin(1e-6));
}

TEST_CASE("rbmd never exceeds mutual information") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> md(2, 6);
  std::uniform_real_distribution<double> nud(0.0, 0.25);
  std::uniform_real_distribution<double> dd(0.2, 1.2);
  for (int t = 0; t < 50; ++t) {
    auto c = build_constellation(md(rng), LabelingKind::brgc);
    auto in = make_mb_input(c, nud(rng), dd(rng));
    auto rep = rbmd_report(in);
    CHECK(rep.rbmd <= rep.mi + 1e-6);
    CHECK(capacity(in.power()) + 1e-6 >= rep.mi);
    CHECK(rep.rbmd >= -1e-9);
  }
}

TEST_CASE("at very high SNR the sign level resolves and rbmd approaches H(X)") {
  auto c = build_constellation(3, LabelingKind::brgc);
  double nu = 0.05;
  auto probe = make_mb_input(c, nu, 1.0);
  double delta = std::sqrt(db_to_linear(60.0) / probe.second_moment());
  auto in = make_mb_input(c, nu, delta);
  auto rep = rbmd_report(in);
  CHECK(rep.level_cond_entropy[0] < 1e-3);
  CHECK(rep.rbmd == Catch::Approx(in.entropy()).margin(1e-3));
}

TEST_CASE("ccdm divergence closed form") {
  SECTION("degenerate composition has zero divergence") {
    std::vector<long long> counts = {6};
    std::vector<double> pa = {1.0};
    CHECK(ccdm_divergence(counts, pa, 0) == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("balanced pair") {
    std::vector<long long> counts = {2, 2};
    std::vector<double> pa = {0.5, 0.5};
    CHECK(ccdm_divergence(counts, pa, 2) == Catch::Approx(0.5).epsilon(1e-12));
  }
  SECTION("k larger than the codebook is rejected") {
    std::vector<long long> counts = {2, 2};
    std::vector<double> pa = {0.5, 0.5};
    CHECK_THROWS_AS(ccdm_divergence(counts, pa, 3), InvalidArgument);  // log2(6) < 3
  }
  SECTION("zero probability on the support is rejected") {
    std::vector<long long> counts = {2, 2};
    std::vector<double> pa = {1.0, 0.0};
    CHECK_THROWS_AS(ccdm_divergence(counts, pa, 1), InvalidArgument);
  }
}

TEST_CASE("divergence shrinks with the block length for a fixed distribution") {
  auto c = build_constellation(3, LabelingKind::brgc);
  auto in = optimize_input_bmd(c, db_to_linear(11.8481));
  double prev = std::numeric_limits<double>::infinity();
  for (long long n : {200, 2000, 20000}) {
    auto comp = choose_composition(c.amplitudes, in.amp_probs, n);
    long long k = derive_k(comp);
    double d = ccdm_divergence(comp.counts, in.amp_probs, k);
    CHECK(d >= 0.0);
    CHECK(d < prev);
    prev = d;
  }
}
