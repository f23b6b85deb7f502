#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "coopeq/games.hpp"

using namespace coopeq;

namespace {

double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("parameter validation names the violated bound") {
  CHECK_THROWS_AS(validate(GameSpec::make_pgg(1, 0.5)), ParameterOutOfRange);
  CHECK_THROWS_AS(validate(GameSpec::make_pgg(4, 0.25)), ParameterOutOfRange);  // gamma == 1/n
  CHECK_THROWS_AS(validate(GameSpec::make_pgg(4, 0.2)), ParameterOutOfRange);
  CHECK_THROWS_AS(validate(GameSpec::make_pgg(4, 1.0)), ParameterOutOfRange);
  CHECK_THROWS_AS(validate(GameSpec::make_pgg(4, 0.5, 0.0)), ParameterOutOfRange);
  CHECK_THROWS_AS(validate(GameSpec::make_pgg(4, 0.5, -3.0)), ParameterOutOfRange);
  CHECK_NOTHROW(validate(GameSpec::make_pgg(4, 0.26)));

  CHECK_THROWS_AS(validate(GameSpec::make_npd(4, 0.1, 0.1)), ParameterOutOfRange);  // b == c
  CHECK_THROWS_AS(validate(GameSpec::make_npd(4, 0.1, 0.3)), ParameterOutOfRange);
  CHECK_THROWS_AS(validate(GameSpec::make_npd(4, 0.3, 0.0)), ParameterOutOfRange);
  CHECK_THROWS_AS(validate(GameSpec::make_npd(1, 0.3, 0.1)), ParameterOutOfRange);
  CHECK_NOTHROW(validate(GameSpec::make_npd(2, 0.3, 0.1)));

  CHECK_THROWS_AS(validate(GameSpec::make_bertrand(4, -0.5, 10)), ParameterOutOfRange);
  CHECK_THROWS_AS(validate(GameSpec::make_bertrand(4, 10, 10)), ParameterOutOfRange);
  CHECK_THROWS_AS(validate(GameSpec::make_bertrand(4, 0, 1.0)), ParameterOutOfRange);  // high == 1
  CHECK_NOTHROW(validate(GameSpec::make_bertrand(4, 0, 1.5)));

  CHECK_THROWS_AS(validate(GameSpec::make_general_pgg(4, 1.0)), ParameterOutOfRange);  // b == 1
  CHECK_THROWS_AS(validate(GameSpec::make_general_pgg(4, 4.0)), ParameterOutOfRange);  // b == n
  CHECK_NOTHROW(validate(GameSpec::make_general_pgg(4, 3.9)));

  const auto msg = [](const GameSpec& s) {
    try {
      validate(s);
    } catch (const ParameterOutOfRange& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  // The factories validate eagerly, so assemble the broken specs by hand.
  auto bad_gamma = GameSpec::make_pgg(4, 0.5);
  bad_gamma.pgg.gamma = 0.2;
  CHECK(msg(bad_gamma).find("gamma") != std::string::npos);
  auto bad_benefit = GameSpec::make_npd(4, 0.3, 0.1);
  bad_benefit.npd.benefit = 0.05;
  CHECK(msg(bad_benefit).find("benefit") != std::string::npos);
}

TEST_CASE("action-range validation") {
  const auto pgg = GameSpec::make_pgg(3, 0.5);
  CHECK_NOTHROW(validate_action(pgg, 0.0));
  CHECK_NOTHROW(validate_action(pgg, 1.0));
  CHECK_THROWS_AS(validate_action(pgg, 1.2), std::domain_error);
  CHECK_THROWS_AS(validate_action(pgg, -0.1), std::domain_error);

  const auto npd = GameSpec::make_npd(3, 0.3, 0.1);
  CHECK_NOTHROW(validate_action(npd, 0.0));
  CHECK_NOTHROW(validate_action(npd, 1.0));
  CHECK_THROWS_AS(validate_action(npd, 0.5), std::domain_error);  // pure profiles only

  const auto bert = GameSpec::make_bertrand(3, 1.0, 10.0);
  CHECK_NOTHROW(validate_action(bert, 1.0));
  CHECK_NOTHROW(validate_action(bert, 10.0));
  CHECK_THROWS_AS(validate_action(bert, 0.5), std::domain_error);
  CHECK_THROWS_AS(validate_action(bert, 10.5), std::domain_error);
}

TEST_CASE("public-goods payoff by hand") {
  const auto spec = GameSpec::make_pgg(3, 0.5);
  // Keep 1 - own, get gamma times the pot.
  const std::vector<double> others{0.5, 0.0};
  CHECK(payoff(spec, 1.0, others) == doctest::Approx(0.0 + 0.5 * 1.5).epsilon(1e-15));
  CHECK(payoff(spec, 0.0, others) == doctest::Approx(1.0 + 0.5 * 0.5).epsilon(1e-15));

  // Full cooperation pays gamma * n, full defection pays the kept endowment.
  const std::vector<double> full{1.0, 1.0};
  CHECK(payoff(spec, 1.0, full) == doctest::Approx(1.5).epsilon(1e-15));
  const std::vector<double> none{0.0, 0.0};
  CHECK(payoff(spec, 0.0, none) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("binary-dilemma payoff by hand") {
  const auto spec = GameSpec::make_npd(3, 0.3, 0.1);
  // A cooperator pays c; each cooperating opponent sends b/(n-1).
  const std::vector<double> one_coop{1.0, 0.0};
  CHECK(payoff(spec, 1.0, one_coop) == doctest::Approx(0.15 - 0.1).epsilon(1e-14));
  CHECK(payoff(spec, 0.0, one_coop) == doctest::Approx(0.15).epsilon(1e-14));
  const std::vector<double> both{1.0, 1.0};
  CHECK(payoff(spec, 1.0, both) == doctest::Approx(0.3 - 0.1).epsilon(1e-14));
  CHECK(payoff(spec, 0.0, both) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("general public-goods payoff by hand") {
  const auto spec = GameSpec::make_general_pgg(4, 3.0);
  // Per-capita return is b/n per unit contributed.
  const std::vector<double> others{1.0, 0.0, 0.5};
  const double pot = 1.5 + 1.0;
  CHECK(payoff(spec, 1.0, others) == doctest::Approx(0.0 + 0.75 * pot).epsilon(1e-14));
  CHECK(payoff(spec, 0.0, others) == doctest::Approx(1.0 + 0.75 * 1.5).epsilon(1e-14));
}

TEST_CASE("price competition: lowest price takes the market, ties split") {
  const auto spec = GameSpec::make_bertrand(3, 1.0, 10.0);
  const std::vector<double> others{5.0, 4.0};
  CHECK(payoff(spec, 3.0, others) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(payoff(spec, 6.0, others) == doctest::Approx(0.0));
  const std::vector<double> tie{3.0, 8.0};
  CHECK(payoff(spec, 3.0, tie) == doctest::Approx(1.5).epsilon(1e-15));

  auto pays = profile_payoffs(spec, std::vector<double>{3.0, 3.0, 8.0});
  CHECK(pays[0] == doctest::Approx(1.5));
  CHECK(pays[1] == doctest::Approx(1.5));
  CHECK(pays[2] == doctest::Approx(0.0));
}

TEST_CASE("price competition: payoffs across a profile always sum to the low price") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(g() % 5);
    const auto spec = GameSpec::make_bertrand(n, 0.5, 9.5);
    std::vector<double> profile(n);
    for (auto& p : profile) {
      p = 0.5 + 9.0 * uniform01(g);
      if (g() % 3 == 0 && &p != &profile.front()) p = profile.front();  // force ties
    }
    const auto pays = profile_payoffs(spec, profile);
    double total = 0.0;
    for (double x : pays) total += x;
    const double low = *std::min_element(profile.begin(), profile.end());
    CHECK(total == doctest::Approx(low).epsilon(1e-12));
  }
}

TEST_CASE("payoffs are invariant under permutations of the opponents") {
  std::mt19937_64 g(17);
  const GameSpec specs[] = {
      GameSpec::make_pgg(5, 0.4),
      GameSpec::make_npd(5, 1.0, 0.25),
      GameSpec::make_bertrand(5, 1.0, 6.0),
      GameSpec::make_general_pgg(5, 2.5),
  };
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> others(4);
      for (auto& a : others) {
        switch (spec.variant) {
          case Variant::Npd: a = (g() % 2 == 0) ? 1.0 : 0.0; break;
          case Variant::Bertrand: a = 1.0 + 5.0 * uniform01(g); break;
          default: a = uniform01(g); break;
        }
      }
      const double own = spec.variant == Variant::Npd      ? double(g() % 2)
                         : spec.variant == Variant::Bertrand ? 1.0 + 5.0 * uniform01(g)
                                                             : uniform01(g);
      const double base = payoff(spec, own, others);
      for (int shuffle = 0; shuffle < 4; ++shuffle) {
        std::shuffle(others.begin(), others.end(), g);
        CHECK(payoff(spec, own, others) == doctest::Approx(base).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("profile payoffs agree with the focal-player form") {
  std::mt19937_64 g(23);
  const auto spec = GameSpec::make_pgg(4, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> profile(4);
    for (auto& a : profile) a = uniform01(g);
    const auto pays = profile_payoffs(spec, profile);
    for (int i = 0; i < 4; ++i) {
      std::vector<double> others;
      for (int j = 0; j < 4; ++j)
        if (j != i) others.push_back(profile[j]);
      CHECK(pays[i] == doctest::Approx(payoff(spec, profile[i], others)).epsilon(1e-14));
    }
  }
}

TEST_CASE("expected symmetric payoff") {
  // Deterministic variants evaluate the pure symmetric profile.
  const auto pgg = GameSpec::make_pgg(4, 0.5);
  CHECK(expected_symmetric_payoff(pgg, {0.6}) ==
        doctest::Approx(1.0 - 0.6 + 0.5 * 4 * 0.6).epsilon(1e-15));

  // The binary dilemma averages over opponents' independent coin flips; the
  // b/(n-1) transfer scaling makes the mean group-size-free: lambda * (b - c).
  const auto npd2 = GameSpec::make_npd(2, 0.3, 0.1);
  CHECK(expected_symmetric_payoff(npd2, {0.5}) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(expected_symmetric_payoff(npd2, {0.0}) == 0.0);
  CHECK(expected_symmetric_payoff(npd2, {1.0}) == doctest::Approx(0.2).epsilon(1e-15));
  const auto npd7 = GameSpec::make_npd(7, 1.0, 0.25);
  CHECK(expected_symmetric_payoff(npd7, {0.4}) ==
        doctest::Approx(0.4 * (1.0 - 0.25)).epsilon(1e-14));

  // General form reduces to 1 - x + b * x at a symmetric contribution.
  const auto gpgg = GameSpec::make_general_pgg(6, 2.0);
  CHECK(expected_symmetric_payoff(gpgg, {0.3}) ==
        doctest::Approx(1.0 - 0.3 + 2.0 * 0.3).epsilon(1e-14));
}

TEST_CASE("variant names") {
  CHECK(to_string(Variant::Pgg) == "pgg");
  CHECK(to_string(Variant::Npd) == "npd");
  CHECK(to_string(Variant::Bertrand) == "bertrand");
  CHECK(to_string(Variant::GeneralPgg) == "gpgg");
}
