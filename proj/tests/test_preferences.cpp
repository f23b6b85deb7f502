#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "coopeq/games.hpp"
#include "coopeq/preferences.hpp"

using namespace coopeq;

TEST_CASE("inequity-averse utility by hand") {
  const auto p = PreferenceParams::fehr_schmidt(1.0, 0.5);
  const std::vector<double> pays{1.0, 3.0};
  CHECK(fs_utility(p, pays, 0) == doctest::Approx(1.0 - 1.0 * 2.0).epsilon(1e-15));
  CHECK(fs_utility(p, pays, 1) == doctest::Approx(3.0 - 0.5 * 2.0).epsilon(1e-15));

  // Disadvantage and advantage average over the n-1 opponents separately.
  const std::vector<double> trio{2.0, 5.0, 1.0};
  CHECK(fs_utility(p, trio, 0) ==
        doctest::Approx(2.0 - 1.0 * (3.0 / 2.0) - 0.5 * (1.0 / 2.0)).epsilon(1e-15));

  // Equal payoffs carry no inequity term.
  const std::vector<double> flat{4.0, 4.0, 4.0};
  CHECK(fs_utility(p, flat, 1) == doctest::Approx(4.0));
}

TEST_CASE("welfare-mixing utilities by hand") {
  const auto one = PreferenceParams::charness_rabin(0.6);
  const std::vector<double> pays{1.0, 3.0};
  // Own weight alpha, remainder on the total with the focal player included.
  CHECK(cr_utility(one, pays, 0) == doctest::Approx(0.6 * 1.0 + 0.4 * 4.0).epsilon(1e-15));
  CHECK(cr_utility(one, pays, 1) == doctest::Approx(0.6 * 3.0 + 0.4 * 4.0).epsilon(1e-15));

  const auto two = PreferenceParams::charness_rabin(0.5, 0.25);
  const std::vector<double> trio{2.0, 5.0, 1.0};
  const double social = 0.25 * 1.0 + 0.75 * 8.0;
  CHECK(cr_utility(two, trio, 0) == doctest::Approx(0.5 * 2.0 + 0.5 * social).epsilon(1e-15));

  CHECK(utility(one, pays, 0) == cr_utility(one, pays, 0));
  CHECK(utility(PreferenceParams::fehr_schmidt(0.4, 0.2), pays, 0) ==
        fs_utility(PreferenceParams::fehr_schmidt(0.4, 0.2), pays, 0));
}

TEST_CASE("preference parameter validation") {
  CHECK_THROWS_AS(validate(PreferenceParams::fehr_schmidt(0.2, 0.4)), std::domain_error);
  CHECK_THROWS_AS(validate(PreferenceParams::fehr_schmidt(0.2, -0.1)), std::domain_error);
  CHECK_NOTHROW(validate(PreferenceParams::fehr_schmidt(0.4, 0.4)));
  CHECK_THROWS_AS(validate(PreferenceParams::charness_rabin(1.2)), std::domain_error);
  CHECK_THROWS_AS(validate(PreferenceParams::charness_rabin(-0.1)), std::domain_error);
  CHECK_THROWS_AS(validate(PreferenceParams::charness_rabin(0.5, 1.2)), std::domain_error);
  CHECK_NOTHROW(validate(PreferenceParams::charness_rabin(0.0)));
  CHECK_NOTHROW(validate(PreferenceParams::charness_rabin(1.0, 1.0)));
}

TEST_CASE("guilt threshold in the binary dilemma") {
  // At b = 0.3, c = 0.1 the cutoff is c(n-1)/(b + c(n-1)): 0.25 at n = 2,
  // 0.4 at n = 3. Ties cooperate.
  const auto npd2 = GameSpec::make_npd(2, 0.3, 0.1);
  CHECK(cooperates(PreferenceParams::fehr_schmidt(0.5, 0.25), npd2));
  CHECK_FALSE(cooperates(PreferenceParams::fehr_schmidt(0.5, 0.2499), npd2));

  const auto npd3 = GameSpec::make_npd(3, 0.3, 0.1);
  CHECK(cooperates(PreferenceParams::fehr_schmidt(0.5, 0.4), npd3));
  CHECK_FALSE(cooperates(PreferenceParams::fehr_schmidt(0.5, 0.399), npd3));

  for (int n = 2; n <= 9; ++n) {
    const auto spec = GameSpec::make_npd(n, 0.3, 0.1);
    const auto t = cooperation_threshold(PreferenceModel::FehrSchmidt, spec);
    CHECK(t.parameter == "beta");
    CHECK(t.side == ThresholdSide::CooperateAtOrAbove);
    const double expected = 0.1 * (n - 1) / (0.3 + 0.1 * (n - 1));
    CHECK(t.value == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("guilt threshold in the public-goods game is 1 - gamma") {
  for (double gamma : {0.35, 0.5, 0.75}) {
    for (int n : {3, 4, 10}) {
      const auto spec = GameSpec::make_pgg(n, gamma);
      const auto t = cooperation_threshold(PreferenceModel::FehrSchmidt, spec);
      CHECK(t.value == doctest::Approx(1.0 - gamma).epsilon(1e-12));
      CHECK(t.admits(PreferenceParams::fehr_schmidt(2.0, 1.0 - gamma + 1e-9)));
      CHECK_FALSE(t.admits(PreferenceParams::fehr_schmidt(2.0, 1.0 - gamma - 1e-9)));
    }
  }
}

TEST_CASE("one-parameter welfare thresholds recovered by bisecting the predicate") {
  auto bisect = [](const GameSpec& spec) {
    double lo = 0.0, hi = 1.0;  // cooperates at alpha=0 (pure welfare), not at 1 (selfish)
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (cooperates(PreferenceParams::charness_rabin(mid), spec))
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  // Binary dilemma: the cutoff 1 - c/b carries no group-size term at all,
  // which is what makes the model predict no group-size effect there.
  const double at2 = bisect(GameSpec::make_npd(2, 0.3, 0.1));
  CHECK(at2 == doctest::Approx(1.0 - 0.1 / 0.3).epsilon(1e-9));
  for (int n : {3, 5, 8, 12}) {
    const auto spec = GameSpec::make_npd(n, 0.3, 0.1);
    CHECK(bisect(spec) == doctest::Approx(at2).epsilon(1e-9));
    const auto t = cooperation_threshold(PreferenceModel::CharnessRabinOne, spec);
    CHECK(t.side == ThresholdSide::CooperateAtOrBelow);
    CHECK(t.value == doctest::Approx(at2).epsilon(1e-9));
  }

  // Public goods: the cutoff (gamma n - 1) / (gamma (n - 1)) rises with the
  // group, so a fixed welfare weight cooperates more easily in larger groups.
  double prev = 0.0;
  for (int n : {4, 6, 20}) {
    const double expected = (0.4 * n - 1.0) / (0.4 * (n - 1.0));
    const double found = bisect(GameSpec::make_pgg(n, 0.4));
    CHECK(found == doctest::Approx(expected).epsilon(1e-9));
    CHECK(found > prev);
    prev = found;
  }
}

TEST_CASE("measuring deviation against universal defection") {
  // Lone defector among cooperators versus the all-defect outcome. In the
  // binary dilemma at b = 0.3, c = 0.1, n = 3 the defector earns 0.3 while
  // cooperators earn 0.05, so guilt must clear 0.3 / 0.25 = 1.2.
  const auto spec = GameSpec::make_npd(3, 0.3, 0.1);
  const auto base = DeviationBaseline::AllDefect;
  CHECK(cooperates(PreferenceParams::fehr_schmidt(2.0, 1.21), spec, base));
  CHECK_FALSE(cooperates(PreferenceParams::fehr_schmidt(2.0, 1.19), spec, base));

  // The welfare mixer always prefers the deviation profile here: it beats
  // universal defection on own payoff and on the total alike.
  for (double alpha : {0.0, 0.5, 1.0})
    CHECK_FALSE(cooperates(PreferenceParams::charness_rabin(alpha), spec, base));
}

TEST_CASE("threshold admits() agrees with the predicate on a parameter grid") {
  const GameSpec specs[] = {
      GameSpec::make_pgg(4, 0.5),
      GameSpec::make_pgg(12, 0.35),
      GameSpec::make_npd(2, 0.3, 0.1),
      GameSpec::make_npd(7, 1.0, 0.3),
      GameSpec::make_general_pgg(6, 2.5),
  };
  // A grid point landing exactly on the threshold (say 0.7 at b=1, c=0.3,
  // n=7) may round to opposite sides along the two evaluation routes, so the
  // knife edge itself is exempt.
  auto away_from_edge = [](double x, double edge) { return std::abs(x - edge) > 1e-9; };
  for (const auto& spec : specs) {
    const auto fs_t = cooperation_threshold(PreferenceModel::FehrSchmidt, spec);
    for (int i = 0; i <= 100; ++i) {
      const double beta = i / 100.0;
      if (!away_from_edge(beta, fs_t.value)) continue;
      const auto p = PreferenceParams::fehr_schmidt(1.0, beta);
      CHECK(fs_t.admits(p) == cooperates(p, spec));
    }
    const auto cr_t = cooperation_threshold(PreferenceModel::CharnessRabinOne, spec);
    for (int i = 0; i <= 100; ++i) {
      const double alpha = i / 100.0;
      if (!away_from_edge(alpha, cr_t.value)) continue;
      const auto p = PreferenceParams::charness_rabin(alpha);
      CHECK(cr_t.admits(p) == cooperates(p, spec));
    }
  }
}

TEST_CASE("unsupported threshold and predicate requests throw") {
  const auto pgg = GameSpec::make_pgg(4, 0.5);
  CHECK_THROWS_AS(cooperation_threshold(PreferenceModel::CharnessRabinTwo, pgg),
                  std::invalid_argument);
  const auto bert = GameSpec::make_bertrand(4, 1.0, 10.0);
  CHECK_THROWS_AS(cooperation_threshold(PreferenceModel::FehrSchmidt, bert),
                  std::invalid_argument);
  CHECK_THROWS_AS(cooperates(PreferenceParams::fehr_schmidt(0.5, 0.25), bert),
                  std::invalid_argument);
  CHECK_THROWS_AS(deviation_profiles(bert), std::invalid_argument);
}

TEST_CASE("deviation profiles match direct payoff evaluation") {
  const auto spec = GameSpec::make_npd(4, 0.3, 0.1);
  const auto [defect, coop] = deviation_profiles(spec);
  REQUIRE(defect.size() == 4);
  REQUIRE(coop.size() == 4);
  const std::vector<double> all_but_focal{1.0, 1.0, 1.0};
  CHECK(defect[0] == doctest::Approx(payoff(spec, 0.0, all_but_focal)));
  CHECK(defect[1] == doctest::Approx(payoff(spec, 1.0, std::vector<double>{0.0, 1.0, 1.0})));
  CHECK(coop[0] == doctest::Approx(payoff(spec, 1.0, all_but_focal)));

  // The precomputed-profile predicate is the plain predicate.
  for (double beta : {0.1, 0.3, 0.5}) {
    const auto p = PreferenceParams::fehr_schmidt(0.9, beta);
    CHECK(cooperates(p, defect, coop) == cooperates(p, spec));
  }

  const auto [defect_low, base_low] = deviation_profiles(spec, DeviationBaseline::AllDefect);
  CHECK(base_low[0] == doctest::Approx(payoff(spec, 0.0, std::vector<double>{0.0, 0.0, 0.0})));
}

TEST_CASE("population text format") {
  const auto pop = PopulationSpec::parse(
      "# Fehr-Schmidt with uniform envy and proportional guilt\n"
      "model = fs\n"
      "alpha = uniform 0 2\n"
      "beta = scaled\n"
      "samples = 500\n"
      "seed = 42\n");
  CHECK(pop.model == PreferenceModel::FehrSchmidt);
  CHECK(pop.alpha.kind == ParamDist::Kind::Uniform);
  CHECK(pop.alpha.a == 0.0);
  CHECK(pop.alpha.b == 2.0);
  CHECK(pop.beta.kind == ParamDist::Kind::Scaled);
  CHECK(pop.sample_count == 500);
  CHECK(pop.seed == 42);

  const auto explicit_pop = PopulationSpec::parse(
      "model = cr1\n"
      "agent = 0.2\n"
      "agent = 0.9\n");
  REQUIRE(explicit_pop.explicit_agents.size() == 2);
  CHECK(explicit_pop.explicit_agents[0].cr1.alpha == 0.2);
  CHECK(explicit_pop.explicit_agents[1].cr1.alpha == 0.9);

  CHECK_THROWS_AS(PopulationSpec::parse("model = fs\nwobble = 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(PopulationSpec::parse("model = fs\nalpha = triangular 0 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(PopulationSpec::parse("model = zzz\n"), std::invalid_argument);
  CHECK_THROWS_AS(PopulationSpec::parse("model = fs\nalpha = const xyz\n"),
                  std::invalid_argument);
}

TEST_CASE("population sampling is deterministic and respects bounds") {
  auto pop = PopulationSpec::default_for(PreferenceModel::FehrSchmidt);
  pop.sample_count = 2000;
  pop.seed = 9;
  const auto agents = sample_population(pop);
  const auto again = sample_population(pop);
  REQUIRE(agents.size() == 2000);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    CHECK(agents[i].fs.alpha == again[i].fs.alpha);
    CHECK(agents[i].fs.beta == again[i].fs.beta);
    CHECK(agents[i].fs.beta >= 0.0);
    CHECK(agents[i].fs.beta <= agents[i].fs.alpha);  // guilt never exceeds envy
  }

  pop.seed = 10;
  const auto shifted = sample_population(pop);
  bool any_diff = false;
  for (std::size_t i = 0; i < agents.size(); ++i)
    if (shifted[i].fs.alpha != agents[i].fs.alpha) any_diff = true;
  CHECK(any_diff);

  auto cr2 = PopulationSpec::default_for(PreferenceModel::CharnessRabinTwo);
  cr2.sample_count = 500;
  for (const auto& a : sample_population(cr2)) {
    CHECK(a.cr2.alpha >= 0.0);
    CHECK(a.cr2.alpha <= 1.0);
    CHECK(a.cr2.delta >= 0.0);
    CHECK(a.cr2.delta <= 1.0);
  }
}

TEST_CASE("cooperative fraction: closed-form masses") {
  // Proportional-guilt population: P(beta >= t) with alpha ~ U[0,2],
  // beta = alpha * U[0,1] is (2 - t - t ln(2/t)) / 2.
  auto pop = PopulationSpec::default_for(PreferenceModel::FehrSchmidt);
  pop.sample_count = 4000;
  const auto mu = mu_fraction(pop, GameSpec::make_npd(2, 0.3, 0.1));  // cutoff 0.25
  REQUIRE(mu.analytic.has_value());
  CHECK(*mu.analytic == doctest::Approx(0.61506980729002048).epsilon(1e-14));
  CHECK(mu.sample_count == 4000);
  CHECK(std::abs(mu.value - *mu.analytic) <= 2.0 / std::sqrt(4000.0));

  // Welfare weight uniform on [0, 1]: the cooperative mass equals the cutoff.
  PopulationSpec cr1;
  cr1.model = PreferenceModel::CharnessRabinOne;
  cr1.alpha = ParamDist::uniform(0.0, 1.0);
  cr1.sample_count = 4000;
  const auto mu1 = mu_fraction(cr1, GameSpec::make_npd(3, 0.4, 0.1));  // cutoff 1 - c/b = 0.75
  REQUIRE(mu1.analytic.has_value());
  CHECK(*mu1.analytic == doctest::Approx(0.75).epsilon(1e-12));

  // Explicit agents count exactly; no analytic route.
  PopulationSpec fixed;
  fixed.model = PreferenceModel::CharnessRabinOne;
  fixed.explicit_agents = {PreferenceParams::charness_rabin(0.1),
                           PreferenceParams::charness_rabin(0.5),
                           PreferenceParams::charness_rabin(0.74),
                           PreferenceParams::charness_rabin(0.76)};
  const auto muf = mu_fraction(fixed, GameSpec::make_npd(3, 0.4, 0.1));
  CHECK(muf.value == doctest::Approx(0.75));
  CHECK(muf.sample_count == 4);
}

TEST_CASE("two-parameter welfare predicate has no single cutoff but still counts") {
  auto pop = PopulationSpec::default_for(PreferenceModel::CharnessRabinTwo);
  pop.sample_count = 1500;
  const auto mu = mu_fraction(pop, GameSpec::make_pgg(4, 0.5));
  CHECK_FALSE(mu.analytic.has_value());
  CHECK(mu.value >= 0.0);
  CHECK(mu.value <= 1.0);
}
