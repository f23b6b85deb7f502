#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "coopeq/games.hpp"

// Cooperative-equilibrium machinery. Players entertain one of two coalition
// structures: Selfish (everyone alone) or FullyCooperative (the grand
// coalition). A structure induces a reference profile (the structure's joint
// best play), a per-player temptation to deviate (incentive I), the worst
// credible loss once deviations cascade (disincentive D), and an abandonment
// probability tau = I / (I + D). Independence across opponents collapses the
// value forecast to two events: nobody abandons (probability
// tau_nobody = (1 - tau)^(n-1)) or somebody does. The structure with the
// higher forecast wins, and the equilibrium action is the lowest symmetric
// action whose payoff still meets that forecast.

namespace coopeq {

enum class CoalitionStructure { Selfish, FullyCooperative };

std::string to_string(CoalitionStructure s);

struct ForecastReport {
  CoalitionStructure structure = CoalitionStructure::Selfish;
  SymmetricAction reference_profile{};  // the structure's prescribed play
  double incentive = 0.0;               // I  >= 0
  double disincentive = 0.0;            // D  >= 0
  double tau_pair = 0.0;                // tau in [0, 1]; 0 when I = D = 0
  double tau_nobody = 0.0;              // (1 - tau)^(n-1)
  double e_nobody = 0.0;                // payoff when nobody abandons
  double e_deviation = 0.0;             // worst-case payoff once someone does
  double forecast = 0.0;                // e_nobody*tau_nobody + e_deviation*(1-tau_nobody)
};

struct Prediction {
  GameSpec game;
  CoalitionStructure winning_structure = CoalitionStructure::Selfish;
  SymmetricAction equilibrium{};
  double equilibrium_payoff = 0.0;
  ForecastReport selfish;
  ForecastReport cooperative;
};

// Closed-form forecast of either structure for any supported game.
ForecastReport forecast(const GameSpec& spec, CoalitionStructure structure);

// Cooperative forecast value for the linear public-goods game.
double v_pgg(double gamma, int players);

// Cooperative forecast value for the binary dilemma.
double v_npd(double benefit, double cost, int players);

// Cooperative-equilibrium price for price competition, clamped to [low, high].
double bertrand_ce_price(double low, double high, int players);

// Ties between the two forecasts go to FullyCooperative.
CoalitionStructure winning_structure(double v_selfish, double v_cooperative);

// Full prediction: both forecasts, the winning structure, and the lowest
// symmetric action whose payoff meets the winning forecast.
Prediction solve(const GameSpec& spec);

// Re-solves with one named field varied ("n", "gamma", "endowment", "b", "c",
// "low", "high", "bn"); values for "n" must be integral. Throws on a vary name
// that does not apply to the variant or on a value that fails validation,
// naming the offending value.
std::vector<Prediction> sweep(const GameSpec& base, std::string_view vary,
                              std::span<const double> values);

// Group-size sweep for the generalized public-goods game, with the group
// benefit supplied per size.
std::vector<Prediction> sweep_general_pgg(std::span<const int> sizes,
                                          const std::function<double(int)>& benefit);

}  // namespace coopeq
