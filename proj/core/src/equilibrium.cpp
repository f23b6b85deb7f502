#include "coopeq/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "fmt.hpp"

namespace coopeq {

using detail::fmt;

std::string to_string(CoalitionStructure s) {
  return s == CoalitionStructure::Selfish ? "selfish" : "cooperative";
}

double v_pgg(double gamma, int players) {
  const int n = players;
  // (gamma*n - 1) / (gamma*(n - 1)) lies in (0, 1); the log route keeps the
  // (n-1)-th power stable for group sizes in the tens of thousands.
  const double base = (gamma * n - 1.0) / (gamma * (n - 1));
  const double r = std::exp((n - 1) * std::log(base));
  return gamma * n * r + gamma * (1.0 - r);
}

double v_npd(double benefit, double cost, int players) {
  const int n = players;
  const double stay = 1.0 - cost / benefit;
  const double q = std::exp((n - 1) * std::log(stay));
  return (benefit - cost) * q - cost * (1.0 - q);
}

double bertrand_ce_price(double low, double high, int players) {
  const int n = players;
  // Undercutting happens in whole currency units; when a one-unit cut cannot
  // beat an equal split of the cooperative price there is no temptation and
  // the ceiling itself survives.
  if ((high - 1.0) * n <= high) return high;
  const double raw =
      high * std::exp((n - 1) * (std::log(high) - std::log((high - 1.0) * n)));
  return std::clamp(raw, low, high);
}

namespace {

ForecastReport assemble(CoalitionStructure structure, double reference, double incentive,
                        double disincentive, double e_nobody, double e_deviation,
                        int players) {
  ForecastReport r;
  r.structure = structure;
  r.reference_profile = {reference};
  r.incentive = incentive;
  r.disincentive = disincentive;
  const double total = incentive + disincentive;
  r.tau_pair = total > 0.0 ? incentive / total : 0.0;
  r.tau_nobody = std::pow(1.0 - r.tau_pair, players - 1);
  r.e_nobody = e_nobody;
  r.e_deviation = e_deviation;
  r.forecast = e_nobody * r.tau_nobody + e_deviation * (1.0 - r.tau_nobody);
  return r;
}

}  // namespace

ForecastReport forecast(const GameSpec& spec, CoalitionStructure structure) {
  validate(spec);
  const int n = spec.players;

  if (structure == CoalitionStructure::Selfish) {
    // Singleton coalitions prescribe stage-Nash play; nobody gains by leaving
    // a coalition of one, so the abandonment probability is zero and the
    // deviation branch inherits the stay value.
    switch (spec.variant) {
      case Variant::Pgg:
      case Variant::GeneralPgg:
        return assemble(structure, 0.0, 0.0, 0.0, 1.0, 1.0, n);
      case Variant::Npd:
        return assemble(structure, 0.0, 0.0, 0.0, 0.0, 0.0, n);
      case Variant::Bertrand: {
        const double floor_split = spec.bertrand.low / n;
        return assemble(structure, spec.bertrand.low, 0.0, 0.0, floor_split, floor_split, n);
      }
    }
    throw std::logic_error("forecast: unknown variant");
  }

  switch (spec.variant) {
    case Variant::Pgg:
    case Variant::GeneralPgg: {
      const double per_capita = spec.variant == Variant::Pgg
                                    ? spec.pgg.gamma
                                    : spec.general_pgg.benefit / n;
      // Full contribution: the defection temptation is the kept endowment net
      // of the lost own return; the cascade floor is everyone at zero.
      const double incentive = 1.0 - per_capita;
      const double disincentive = per_capita * n - 1.0;
      return assemble(structure, 1.0, incentive, disincentive, per_capita * n,
                      per_capita, n);
    }
    case Variant::Npd: {
      const double b = spec.npd.benefit;
      const double c = spec.npd.cost;
      // Defecting from all-cooperate keeps the cost; the cascade floor is a
      // lone cooperator paying c for nothing.
      return assemble(structure, 1.0, c, b - c, b - c, -c, n);
    }
    case Variant::Bertrand: {
      const double h = spec.bertrand.high;
      // A deviator undercuts by one currency unit and takes the whole market;
      // the cascade floor is the undercut seller's zero.
      const double incentive = std::max(0.0, (h - 1.0) - h / n);
      return assemble(structure, h, incentive, h / n, h / n, 0.0, n);
    }
  }
  throw std::logic_error("forecast: unknown variant");
}

CoalitionStructure winning_structure(double v_selfish, double v_cooperative) {
  return v_cooperative >= v_selfish ? CoalitionStructure::FullyCooperative
                                    : CoalitionStructure::Selfish;
}

Prediction solve(const GameSpec& spec) {
  validate(spec);
  Prediction p;
  p.game = spec;
  p.selfish = forecast(spec, CoalitionStructure::Selfish);
  p.cooperative = forecast(spec, CoalitionStructure::FullyCooperative);
  const double v_bar = std::max(p.selfish.forecast, p.cooperative.forecast);
  p.winning_structure = winning_structure(p.selfish.forecast, p.cooperative.forecast);

  // Lowest symmetric action whose payoff meets the winning forecast. Payoffs
  // rise with the common action in every variant, so the bound is the action
  // at which the symmetric payoff equals v_bar, clamped into the action range.
  switch (spec.variant) {
    case Variant::Pgg: {
      const double slope = spec.pgg.gamma * spec.players - 1.0;
      p.equilibrium = {std::clamp((v_bar - 1.0) / slope, 0.0, 1.0)};
      break;
    }
    case Variant::GeneralPgg: {
      const double slope = spec.general_pgg.benefit - 1.0;
      p.equilibrium = {std::clamp((v_bar - 1.0) / slope, 0.0, 1.0)};
      break;
    }
    case Variant::Npd: {
      const double margin = spec.npd.benefit - spec.npd.cost;
      p.equilibrium = {std::clamp(v_bar / margin, 0.0, 1.0)};
      break;
    }
    case Variant::Bertrand: {
      p.equilibrium = {
          bertrand_ce_price(spec.bertrand.low, spec.bertrand.high, spec.players)};
      break;
    }
  }
  p.equilibrium_payoff = expected_symmetric_payoff(spec, p.equilibrium);
  return p;
}

namespace {

GameSpec with_field(const GameSpec& base, std::string_view vary, double value) {
  GameSpec s = base;
  const bool is_n = vary == "n" || vary == "players";
  if (is_n) {
    if (!(std::floor(value) == value) || value < 2 || value > 1e9)
      throw std::invalid_argument(fmt("sweep: group size must be an integer >= 2 (got %g)", value));
    s.players = static_cast<int>(value);
    return s;
  }
  switch (base.variant) {
    case Variant::Pgg:
      if (vary == "gamma") { s.pgg.gamma = value; return s; }
      if (vary == "endowment") { s.pgg.endowment = value; return s; }
      throw std::invalid_argument(
          fmt("sweep: pgg can vary n, gamma or endowment (got \"%.*s\")",
              static_cast<int>(vary.size()), vary.data()));
    case Variant::Npd:
      if (vary == "b") { s.npd.benefit = value; return s; }
      if (vary == "c") { s.npd.cost = value; return s; }
      throw std::invalid_argument(fmt("sweep: npd can vary n, b or c (got \"%.*s\")",
                                      static_cast<int>(vary.size()), vary.data()));
    case Variant::Bertrand:
      if (vary == "low") { s.bertrand.low = value; return s; }
      if (vary == "high") { s.bertrand.high = value; return s; }
      throw std::invalid_argument(
          fmt("sweep: bertrand can vary n, low or high (got \"%.*s\")",
              static_cast<int>(vary.size()), vary.data()));
    case Variant::GeneralPgg:
      if (vary == "bn") { s.general_pgg.benefit = value; return s; }
      throw std::invalid_argument(fmt("sweep: gpgg can vary n or bn (got \"%.*s\")",
                                      static_cast<int>(vary.size()), vary.data()));
  }
  throw std::logic_error("sweep: unknown variant");
}

}  // namespace

std::vector<Prediction> sweep(const GameSpec& base, std::string_view vary,
                              std::span<const double> values) {
  validate(base);
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  std::vector<Prediction> out;
  out.reserve(values.size());
  for (double v : values) {
    GameSpec s = with_field(base, vary, v);
    try {
      validate(s);
    } catch (const ParameterOutOfRange& e) {
      throw ParameterOutOfRange(fmt("sweep value %g: %s", v, e.what()));
    }
    out.push_back(solve(s));
  }
  return out;
}

std::vector<Prediction> sweep_general_pgg(std::span<const int> sizes,
                                          const std::function<double(int)>& benefit) {
  if (sizes.empty()) throw std::invalid_argument("sweep: empty size list");
  std::vector<Prediction> out;
  out.reserve(sizes.size());
  for (int n : sizes) {
    GameSpec s;
    s.variant = Variant::GeneralPgg;
    s.players = n;
    s.general_pgg.benefit = benefit(n);
    try {
      validate(s);
    } catch (const ParameterOutOfRange& e) {
      throw ParameterOutOfRange(fmt("sweep size %d: %s", n, e.what()));
    }
    out.push_back(solve(s));
  }
  return out;
}

}  // namespace coopeq
