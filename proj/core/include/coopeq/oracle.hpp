#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "coopeq/equilibrium.hpp"
#include "coopeq/preferences.hpp"

// Brute-force cross-checks for every closed form in the library. Everything
// here recomputes from first principles - grid search over actions, explicit
// subset enumeration for the abandonment cascade, Pascal-triangle binomials -
// and shares no formulas with the closed-form paths it verifies.

namespace coopeq::oracle {

struct GridSearchConfig {
  int grid_points = 1001;          // points per action grid (inclusive endpoints)
  double tolerance = 1e-6;         // closed-form vs grid agreement bound
  int max_players_exhaustive = 12; // cap for 2^(n-1) subset enumeration
};

// Best reply on the action grid when every opponent plays `others` (a mixed
// cooperation probability in the binary dilemma). First maximizer wins ties.
SymmetricAction best_response(const GameSpec& spec, SymmetricAction others,
                              const GridSearchConfig& cfg = {});

// Forecast rebuilt from scratch: reference play and temptation by grid
// search, cascade floors by searching reaction profiles (m opponents moved to
// a common weakly-improving action, the rest faithful), and the value by
// explicit enumeration of deviating subsets. Throws beyond the enumeration
// cap. The price-competition temptation follows the literal grid (see
// bertrand_scan for the unit-undercut reconciliation).
ForecastReport generic_forecast(const GameSpec& spec, CoalitionStructure structure,
                                const GridSearchConfig& cfg = {});

struct CheckResult {
  std::string name;
  std::map<std::string, double> params;
  double residual = 0.0;
  bool pass = false;
  std::string note;
};

// Re-derives the action-selection stage of a prediction: the payoff field
// must match an independent evaluation, meet the winning forecast, and be the
// lowest admissible symmetric action on the grid (one automatic 10x grid
// refinement before declaring failure).
CheckResult verify_equilibrium(const GameSpec& spec, const Prediction& prediction,
                               const GridSearchConfig& cfg = {});

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  std::size_t failures() const;
  void merge(VerificationReport other);
  std::string to_json() const;  // stable field order, shortest-round-trip floats
};

// Random game instances: closed-form forecasts against generic_forecast
// (public-goods and binary families) and every prediction against
// verify_equilibrium.
VerificationReport equivalence_scan(std::size_t samples, std::uint64_t seed,
                                    const GridSearchConfig& cfg = {});

// The binomial bookkeeping identities behind the binary-dilemma payoff.
VerificationReport binomial_identity_scan(int max_players = 30, int lambda_points = 101);

// Forecast and equilibrium monotonicity in group size and game parameters.
VerificationReport monotonicity_scan();

// Threshold direction and fixed-population cooperative-fraction direction for
// one model/game pair.
VerificationReport proposition_scan(PreferenceModel model, Variant family,
                                    std::span<const int> sizes, const GameSpec& base,
                                    const PopulationSpec& pop);

// proposition_scan over all supported pairs plus the two-parameter welfare
// model's direct-predicate directions.
VerificationReport threshold_scan(std::uint64_t seed);

// Price-competition pipeline: the closed-form price against an independent
// unit-undercut reconstruction, with the continuous-grid divergence recorded.
VerificationReport bertrand_scan(const GridSearchConfig& cfg = {});

// Injects known corruptions (shifted forecast, displaced equilibrium) and
// passes only if the oracle flags every one.
VerificationReport negative_control(const GridSearchConfig& cfg = {});

// All of the above in a fixed order under one report.
VerificationReport run_all(std::size_t samples, std::uint64_t seed,
                           const GridSearchConfig& cfg = {});

}  // namespace coopeq::oracle
