#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pascm/shaping.hpp"

using namespace pascm;

TEST_CASE("solve_nu at the uniform second moment returns zero") {
  auto c = build_constellation(2, LabelingKind::brgc);
  CHECK(uniform_second_moment(c) == Catch::Approx(5.0));
  CHECK(solve_nu(c, 5.0) == 0.0);
}

TEST_CASE("solve_nu closed form for 4-ASK at target 3") {
  auto c = build_constellation(2, LabelingKind::brgc);
  double nu = solve_nu(c, 3.0);
  CHECK(nu == Catch::Approx(std::log(3.0) / 8.0).epsilon(1e-8));
  auto in = make_mb_input(c, nu, 1.0);
  CHECK(in.second_moment() == Catch::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("solve_nu rejects infeasible targets") {
  auto c = build_constellation(2, LabelingKind::brgc);
  CHECK_THROWS_AS(solve_nu(c, 0.5), InfeasibleTarget);
  CHECK_THROWS_AS(solve_nu(c, 5.5), InfeasibleTarget);
}

TEST_CASE("second moment is strictly decreasing in nu") {
  for (int m = 2; m <= 8; ++m) {
    auto c = build_constellation(m, LabelingKind::brgc);
    double prev = std::numeric_limits<double>::infinity();
    for (double nu = 0.0; nu <= 1.0; nu += 0.05) {
      double e = make_mb_input(c, nu, 1.0).second_moment();
      CHECK(e < prev);
      prev = e;
    }
  }
}

TEST_CASE("Maxwell-Boltzmann probabilities are symmetric and normalized") {
  auto c = build_constellation(4, LabelingKind::brgc);
  auto in = make_mb_input(c, 0.013, 2.0);
  double sum = 0.0;
  for (double p : in.probs) sum += p;
  CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  int np = c.num_points();
  for (int i = 0; i < np / 2; ++i)
    CHECK(in.probs[static_cast<size_t>(i)] ==
          Catch::Approx(in.probs[static_cast<size_t>(np - 1 - i)]).margin(1e-15));
}

TEST_CASE("lambda_shift identity at lambda = 0") {
  auto c = build_constellation(3, LabelingKind::brgc);
  auto in = make_mb_input(c, 0.05, 1.0);
  auto shifted = lambda_shift(in.amp_probs, c.amplitudes, 0.0);
  for (size_t j = 0; j < shifted.size(); ++j)
    CHECK(shifted[j] == Catch::Approx(in.amp_probs[j]).margin(1e-14));
}

TEST_CASE("lambda_shift at lambda = nu reaches the uniform distribution") {
  auto c = build_constellation(3, LabelingKind::brgc);
  double nu = 0.08;
  auto in = make_mb_input(c, nu, 1.0);
  auto shifted = lambda_shift(in.amp_probs, c.amplitudes, nu);
  for (double p : shifted) CHECK(p == Catch::Approx(0.25).margin(1e-12));
  CHECK(entropy_bits(shifted) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("lambda_shift collapses to the smallest amplitude for very negative lambda") {
  auto c = build_constellation(2, LabelingKind::brgc);
  auto in = make_mb_input(c, 0.1, 1.0);
  auto shifted = lambda_shift(in.amp_probs, c.amplitudes, -10.0);
  CHECK(shifted[1] > 0.9999);  // amplitude 1 is the second (descending order)
}

TEST_CASE("Maxwell-Boltzmann family is closed under lambda_shift") {
  auto c = build_constellation(4, LabelingKind::brgc);
  double nu = 0.06, lambda = 0.021;
  auto ref = make_mb_input(c, nu, 1.0);
  auto shifted = lambda_shift(ref.amp_probs, c.amplitudes, lambda);
  auto direct = make_mb_input(c, nu - lambda, 1.0);
  for (size_t j = 0; j < shifted.size(); ++j)
    CHECK(shifted[j] == Catch::Approx(direct.amp_probs[j]).margin(1e-12));
}

TEST_CASE("lambda_shift requires a strictly positive reference") {
  auto c = build_constellation(2, LabelingKind::brgc);
  std::vector<double> bad = {1.0, 0.0};
  CHECK_THROWS_AS(lambda_shift(bad, c.amplitudes, 0.1), InvalidArgument);
}

TEST_CASE("solve_rate endpoints") {
  auto c = build_constellation(3, LabelingKind::brgc);
  double nu = 0.0532;
  double gamma = 0.25;
  auto ref = make_mb_input(c, nu, 1.0);

  SECTION("target at the reference rate gives lambda = 0") {
    double lam = solve_rate(ref.amp_probs, c.amplitudes, gamma, ref.amp_entropy() + gamma);
    CHECK(std::fabs(lam) < 1e-6);
  }
  SECTION("target at the top of the range gives lambda = nu (uniform)") {
    double lam = solve_rate(ref.amp_probs, c.amplitudes, gamma, 2.0 + gamma);
    CHECK(lam == Catch::Approx(nu).margin(1e-4));
    auto shifted = lambda_shift(ref.amp_probs, c.amplitudes, lam);
    CHECK(entropy_bits(shifted) == Catch::Approx(2.0).margin(1e-6));
  }
  SECTION("rates outside the feasible window are rejected") {
    CHECK_THROWS_AS(solve_rate(ref.amp_probs, c.amplitudes, gamma, 2.0 + gamma + 0.01),
                    InfeasibleTarget);
    CHECK_THROWS_AS(solve_rate(ref.amp_probs, c.amplitudes, gamma, gamma - 0.01),
                    InfeasibleTarget);
  }
}

TEST_CASE("solve_rate hits the tabulated 8-ASK adaptation entropy") {
  // Reference operating point R=1.8543 at gamma=1/4, retargeted to R=1.6990.
  auto c = build_constellation(3, LabelingKind::brgc);
  double gamma = 0.25;
  double nu = solve_nu_for_amp_entropy(c, 1.8543 - gamma);
  auto ref = make_mb_input(c, nu, 1.0);
  double lam = solve_rate(ref.amp_probs, c.amplitudes, gamma, 1.6990);
  auto shifted = lambda_shift(ref.amp_probs, c.amplitudes, lam);
  CHECK(entropy_bits(shifted) == Catch::Approx(1.4490).margin(1e-6));
  CHECK(lam < 0.0);
}

TEST_CASE("tilted entropy is strictly increasing in lambda below the peak") {
  auto c = build_constellation(4, LabelingKind::brgc);
  double nu = 0.04;
  auto ref = make_mb_input(c, nu, 1.0);
  double prev = -1.0;
  for (double lam = -0.3; lam < nu; lam += 0.02) {
    double h = entropy_bits(lambda_shift(ref.amp_probs, c.amplitudes, lam));
    CHECK(h > prev);
    prev = h;
  }
}

TEST_CASE("solve_nu_for_amp_entropy round trip") {
  auto c = build_constellation(5, LabelingKind::brgc);
  for (double target : {0.8, 1.9, 3.2, 3.99}) {
    double nu = solve_nu_for_amp_entropy(c, target);
    CHECK(make_mb_input(c, nu, 1.0).amp_entropy() == Catch::Approx(target).margin(1e-8));
  }
  CHECK(solve_nu_for_amp_entropy(c, 4.0) == 0.0);
  CHECK_THROWS_AS(solve_nu_for_amp_entropy(c, 4.1), InfeasibleTarget);
}
