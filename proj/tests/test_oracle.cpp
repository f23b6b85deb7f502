#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "coopeq/equilibrium.hpp"
#include "coopeq/games.hpp"
#include "coopeq/oracle.hpp"

using namespace coopeq;
using oracle::VerificationReport;

namespace {

void require_clean(const VerificationReport& rep) {
  CHECK(rep.all_pass());
  if (!rep.all_pass()) {
    for (const auto& c : rep.checks)
      if (!c.pass) MESSAGE(c.name, ": ", c.note, " (residual ", c.residual, ")");
  }
}

}  // namespace

TEST_CASE("grid best response finds the dominant action") {
  // Public goods below the cooperative return: contribute nothing.
  const auto pgg = GameSpec::make_pgg(4, 0.5);
  CHECK(oracle::best_response(pgg, {0.7}).value == 0.0);
  // The binary dilemma's dominant action is defection for any opponent mix.
  const auto npd = GameSpec::make_npd(5, 0.3, 0.1);
  CHECK(oracle::best_response(npd, {0.0}).value == 0.0);
  CHECK(oracle::best_response(npd, {0.9}).value == 0.0);
}

TEST_CASE("reconstructed forecasts match the closed forms on fixed cases") {
  const GameSpec cases[] = {
      GameSpec::make_pgg(5, 0.4),
      GameSpec::make_pgg(3, 0.75),
      GameSpec::make_npd(5, 1.0, 0.25),
      GameSpec::make_npd(2, 0.3, 0.1),
      GameSpec::make_general_pgg(6, 3.0),
  };
  for (const auto& spec : cases) {
    for (auto structure :
         {CoalitionStructure::Selfish, CoalitionStructure::FullyCooperative}) {
      const auto fast = forecast(spec, structure);
      const auto slow = oracle::generic_forecast(spec, structure);
      CHECK(std::abs(fast.forecast - slow.forecast) <= 1e-6);
      CHECK(std::abs(fast.incentive - slow.incentive) <= 1e-6);
      CHECK(std::abs(fast.disincentive - slow.disincentive) <= 1e-6);
      CHECK(std::abs(fast.tau_pair - slow.tau_pair) <= 1e-6);
    }
  }
}

TEST_CASE("subset enumeration refuses oversized groups") {
  oracle::GridSearchConfig cfg;
  cfg.max_players_exhaustive = 12;
  CHECK_THROWS_AS(oracle::generic_forecast(GameSpec::make_pgg(13, 0.5),
                                           CoalitionStructure::FullyCooperative, cfg),
                  std::invalid_argument);
}

TEST_CASE("equilibrium verification accepts the solver and rejects corruption") {
  const auto spec = GameSpec::make_pgg(8, 0.4);
  const auto pred = solve(spec);
  CHECK(oracle::verify_equilibrium(spec, pred).pass);

  auto shifted = pred;
  shifted.equilibrium.value = std::min(1.0, shifted.equilibrium.value + 0.05);
  shifted.equilibrium_payoff =
      expected_symmetric_payoff(spec, shifted.equilibrium);
  CHECK_FALSE(oracle::verify_equilibrium(spec, shifted).pass);
}

TEST_CASE("random-instance equivalence scan is clean and deterministic") {
  const auto rep = oracle::equivalence_scan(60, 321);
  CHECK(rep.checks.size() >= 60);
  require_clean(rep);

  const auto again = oracle::equivalence_scan(60, 321);
  CHECK(rep.to_json() == again.to_json());

  const auto other_seed = oracle::equivalence_scan(60, 322);
  CHECK(rep.to_json() != other_seed.to_json());
}

TEST_CASE("binomial identities hold to near machine precision") {
  const auto rep = oracle::binomial_identity_scan(30, 101);
  require_clean(rep);
  for (const auto& c : rep.checks) CHECK(c.residual <= 1e-10);
}

TEST_CASE("monotonicity scan is clean") { require_clean(oracle::monotonicity_scan()); }

TEST_CASE("threshold and population-direction scan is clean") {
  require_clean(oracle::threshold_scan(97));
}

TEST_CASE("price-competition scan is clean") { require_clean(oracle::bertrand_scan()); }

TEST_CASE("negative control: the oracle catches planted corruption") {
  const auto rep = oracle::negative_control();
  require_clean(rep);
  CHECK(rep.checks.size() >= 2);
}

TEST_CASE("verification report bookkeeping") {
  auto rep = oracle::binomial_identity_scan(6, 5);
  CHECK(rep.failures() == 0);
  const auto solo = rep.checks.size();

  VerificationReport other;
  other.suite = "synthetic";
  oracle::CheckResult bad;
  bad.name = "synthetic/failure";
  bad.pass = false;
  bad.residual = 1.0;
  other.checks.push_back(bad);
  rep.merge(other);
  CHECK(rep.checks.size() == solo + 1);
  CHECK(rep.failures() == 1);
  CHECK_FALSE(rep.all_pass());

  const auto json = rep.to_json();
  CHECK(json.find("\"synthetic/failure\"") != std::string::npos);
  CHECK(json.find("\"checks\"") != std::string::npos);
}
