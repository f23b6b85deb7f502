#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Parameterized n-player social dilemmas with a common shape: every player
// picks one action from a shared range, payoffs are invariant under
// permutations of the opponents, and the stage game has a unique symmetric
// Nash outcome that is Pareto-dominated by joint cooperation.
//
// Conventions used throughout:
//   * public-goods contributions are fractions of the endowment, so the
//     endowment itself is presentation metadata (payoffs are in units of it);
//   * the dilemma with a binary cooperate/defect choice encodes defect = 0,
//     cooperate = 1, and a SymmetricAction in (0,1) means the mixed strategy
//     cooperating with that probability;
//   * price competition uses integer-free real prices in [low, high] and
//     splits demand equally among the lowest-priced sellers.

namespace coopeq {

enum class Variant { Pgg, Npd, Bertrand, GeneralPgg };

std::string to_string(Variant v);

class ParameterOutOfRange : public std::domain_error {
 public:
  explicit ParameterOutOfRange(const std::string& what) : std::domain_error(what) {}
};

struct GameSpec {
  Variant variant = Variant::Pgg;
  int players = 0;

  struct PggParams {
    double gamma = 0.0;      // per-capita return, 1/n < gamma < 1
    double endowment = 1.0;  // currency scale for reporting only
  };
  struct NpdParams {
    double benefit = 0.0;  // b > c > 0; a cooperator pays c, each other player gains b/(n-1)
    double cost = 0.0;
  };
  struct BertrandParams {
    double low = 0.0;   // 0 <= low < high, high > 1
    double high = 0.0;
  };
  struct GeneralPggParams {
    double benefit = 0.0;  // group benefit b at this group size, 1 < b < n
  };

  PggParams pgg;
  NpdParams npd;
  BertrandParams bertrand;
  GeneralPggParams general_pgg;

  static GameSpec make_pgg(int players, double gamma, double endowment = 1.0);
  static GameSpec make_npd(int players, double benefit, double cost);
  static GameSpec make_bertrand(int players, double low, double high);
  static GameSpec make_general_pgg(int players, double benefit);
};

// Checks every parameter bound, throwing ParameterOutOfRange with a message
// naming the violated constraint. Returns its argument so calls can be chained.
const GameSpec& validate(const GameSpec& spec);

// One action shared by all players. Contribution fraction for public goods,
// cooperation probability for the binary dilemma, price for competition.
struct SymmetricAction {
  double value = 0.0;
};

// Action-range check for a single player's action in this game.
// Pure binary-dilemma actions must be exactly 0 or 1.
void validate_action(const GameSpec& spec, double action);

// Focal player's payoff under a pure profile; `others` holds the remaining
// players-1 actions in any order.
double payoff(const GameSpec& spec, double own, std::span<const double> others);

// Payoffs of every player under a full pure profile (profile.size() == players).
std::vector<double> profile_payoffs(const GameSpec& spec, std::span<const double> profile);

// Expected payoff of one player when all players independently play `a`.
// Deterministic games evaluate the pure profile; the binary dilemma averages
// over the binomial number of cooperating opponents.
double expected_symmetric_payoff(const GameSpec& spec, SymmetricAction a);

}  // namespace coopeq
