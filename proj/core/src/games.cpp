#include "coopeq/games.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fmt.hpp"

namespace coopeq {

using detail::fmt;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Pgg: return "pgg";
    case Variant::Npd: return "npd";
    case Variant::Bertrand: return "bertrand";
    case Variant::GeneralPgg: return "gpgg";
  }
  throw std::logic_error("to_string: unknown variant");
}

GameSpec GameSpec::make_pgg(int players, double gamma, double endowment) {
  GameSpec s;
  s.variant = Variant::Pgg;
  s.players = players;
  s.pgg = {gamma, endowment};
  validate(s);
  return s;
}

GameSpec GameSpec::make_npd(int players, double benefit, double cost) {
  GameSpec s;
  s.variant = Variant::Npd;
  s.players = players;
  s.npd = {benefit, cost};
  validate(s);
  return s;
}

GameSpec GameSpec::make_bertrand(int players, double low, double high) {
  GameSpec s;
  s.variant = Variant::Bertrand;
  s.players = players;
  s.bertrand = {low, high};
  validate(s);
  return s;
}

GameSpec GameSpec::make_general_pgg(int players, double benefit) {
  GameSpec s;
  s.variant = Variant::GeneralPgg;
  s.players = players;
  s.general_pgg = {benefit};
  validate(s);
  return s;
}

namespace {

void require_finite(double x, const char* name) {
  if (!std::isfinite(x))
    throw ParameterOutOfRange(fmt("%s must be finite (got %g)", name, x));
}

}  // namespace

const GameSpec& validate(const GameSpec& spec) {
  const int n = spec.players;
  if (n < 2)
    throw ParameterOutOfRange(fmt("players must be at least 2 (got %d)", n));
  switch (spec.variant) {
    case Variant::Pgg: {
      const auto& p = spec.pgg;
      require_finite(p.gamma, "pgg.gamma");
      require_finite(p.endowment, "pgg.endowment");
      // gamma <= 1/n kills the dilemma (contributing stops paying off in the
      // aggregate); gamma >= 1 makes contribution dominant.
      if (!(p.gamma > 1.0 / n))
        throw ParameterOutOfRange(
            fmt("pgg.gamma must exceed 1/players = %g (got %g)", 1.0 / n, p.gamma));
      if (!(p.gamma < 1.0))
        throw ParameterOutOfRange(fmt("pgg.gamma must be below 1 (got %g)", p.gamma));
      if (!(p.endowment > 0.0))
        throw ParameterOutOfRange(fmt("pgg.endowment must be positive (got %g)", p.endowment));
      break;
    }
    case Variant::Npd: {
      const auto& p = spec.npd;
      require_finite(p.benefit, "npd.benefit");
      require_finite(p.cost, "npd.cost");
      if (!(p.cost > 0.0))
        throw ParameterOutOfRange(fmt("npd.cost must be positive (got %g)", p.cost));
      if (!(p.benefit > p.cost))
        throw ParameterOutOfRange(
            fmt("npd.benefit must exceed npd.cost = %g (got %g)", p.cost, p.benefit));
      break;
    }
    case Variant::Bertrand: {
      const auto& p = spec.bertrand;
      require_finite(p.low, "bertrand.low");
      require_finite(p.high, "bertrand.high");
      if (!(p.low >= 0.0))
        throw ParameterOutOfRange(fmt("bertrand.low must be non-negative (got %g)", p.low));
      if (!(p.high > p.low))
        throw ParameterOutOfRange(
            fmt("bertrand.high must exceed bertrand.low = %g (got %g)", p.low, p.high));
      // prices live on a unit-currency scale; a ceiling at or below one unit
      // leaves no room to undercut.
      if (!(p.high > 1.0))
        throw ParameterOutOfRange(fmt("bertrand.high must exceed 1 (got %g)", p.high));
      break;
    }
    case Variant::GeneralPgg: {
      const auto& p = spec.general_pgg;
      require_finite(p.benefit, "gpgg.benefit");
      if (!(p.benefit > 1.0))
        throw ParameterOutOfRange(fmt("gpgg.benefit must exceed 1 (got %g)", p.benefit));
      if (!(p.benefit < n))
        throw ParameterOutOfRange(
            fmt("gpgg.benefit must be below players = %d (got %g)", n, p.benefit));
      break;
    }
  }
  return spec;
}

void validate_action(const GameSpec& spec, double action) {
  if (!std::isfinite(action))
    throw ParameterOutOfRange(fmt("action must be finite (got %g)", action));
  switch (spec.variant) {
    case Variant::Pgg:
    case Variant::GeneralPgg:
      if (action < 0.0 || action > 1.0)
        throw ParameterOutOfRange(
            fmt("contribution fraction must lie in [0, 1] (got %g)", action));
      break;
    case Variant::Npd:
      if (action != 0.0 && action != 1.0)
        throw ParameterOutOfRange(
            fmt("pure action must be 0 (defect) or 1 (cooperate) (got %g)", action));
      break;
    case Variant::Bertrand:
      if (action < spec.bertrand.low || action > spec.bertrand.high)
        throw ParameterOutOfRange(fmt("price must lie in [%g, %g] (got %g)",
                                      spec.bertrand.low, spec.bertrand.high, action));
      break;
  }
}

namespace {

double pgg_like_payoff(double own, double others_sum, double per_capita) {
  return 1.0 - own + per_capita * (own + others_sum);
}

// Winner-take-min price competition: lowest price serves the whole (unit)
// market, exact ties split it evenly.
double bertrand_payoff(double own, double min_all, int ties_at_min) {
  if (own > min_all) return 0.0;
  return own / ties_at_min;
}

}  // namespace

double payoff(const GameSpec& spec, double own, std::span<const double> others) {
  validate(spec);
  if (static_cast<int>(others.size()) != spec.players - 1)
    throw std::invalid_argument(fmt("payoff: expected %d opponent actions, got %zu",
                                    spec.players - 1, others.size()));
  validate_action(spec, own);
  for (double a : others) validate_action(spec, a);

  switch (spec.variant) {
    case Variant::Pgg: {
      const double sum = std::accumulate(others.begin(), others.end(), 0.0);
      return pgg_like_payoff(own, sum, spec.pgg.gamma);
    }
    case Variant::GeneralPgg: {
      const double sum = std::accumulate(others.begin(), others.end(), 0.0);
      return pgg_like_payoff(own, sum, spec.general_pgg.benefit / spec.players);
    }
    case Variant::Npd: {
      const double coop = std::accumulate(others.begin(), others.end(), 0.0);
      return spec.npd.benefit * coop / (spec.players - 1) - spec.npd.cost * own;
    }
    case Variant::Bertrand: {
      double min_all = own;
      for (double p : others) min_all = std::min(min_all, p);
      int ties = own == min_all ? 1 : 0;
      for (double p : others)
        if (p == min_all) ++ties;
      return bertrand_payoff(own, min_all, ties);
    }
  }
  throw std::logic_error("payoff: unknown variant");
}

std::vector<double> profile_payoffs(const GameSpec& spec, std::span<const double> profile) {
  validate(spec);
  if (static_cast<int>(profile.size()) != spec.players)
    throw std::invalid_argument(fmt("profile_payoffs: expected %d actions, got %zu",
                                    spec.players, profile.size()));
  for (double a : profile) validate_action(spec, a);

  const int n = spec.players;
  std::vector<double> out(profile.size());
  switch (spec.variant) {
    case Variant::Pgg:
    case Variant::GeneralPgg: {
      const double per_capita = spec.variant == Variant::Pgg
                                    ? spec.pgg.gamma
                                    : spec.general_pgg.benefit / n;
      const double sum = std::accumulate(profile.begin(), profile.end(), 0.0);
      for (int i = 0; i < n; ++i)
        out[i] = pgg_like_payoff(profile[i], sum - profile[i], per_capita);
      break;
    }
    case Variant::Npd: {
      const double coop = std::accumulate(profile.begin(), profile.end(), 0.0);
      for (int i = 0; i < n; ++i)
        out[i] = spec.npd.benefit * (coop - profile[i]) / (n - 1) -
                 spec.npd.cost * profile[i];
      break;
    }
    case Variant::Bertrand: {
      const double min_all = *std::min_element(profile.begin(), profile.end());
      const int ties =
          static_cast<int>(std::count(profile.begin(), profile.end(), min_all));
      for (int i = 0; i < n; ++i) out[i] = bertrand_payoff(profile[i], min_all, ties);
      break;
    }
  }
  return out;
}

double expected_symmetric_payoff(const GameSpec& spec, SymmetricAction a) {
  validate(spec);
  const int n = spec.players;
  switch (spec.variant) {
    case Variant::Pgg:
    case Variant::GeneralPgg: {
      validate_action(spec, a.value);
      const double per_capita = spec.variant == Variant::Pgg
                                    ? spec.pgg.gamma
                                    : spec.general_pgg.benefit / n;
      return pgg_like_payoff(a.value, (n - 1) * a.value, per_capita);
    }
    case Variant::Npd: {
      const double lam = a.value;
      if (!(lam >= 0.0 && lam <= 1.0) || !std::isfinite(lam))
        throw ParameterOutOfRange(
            fmt("cooperation probability must lie in [0, 1] (got %g)", lam));
      if (lam == 0.0) return 0.0;
      if (lam == 1.0) return spec.npd.benefit - spec.npd.cost;
      // Binomial mixture over the number of cooperating opponents, folded over
      // the focal player's own mixing. Log-space weights keep the sum stable
      // for any group size.
      const double log_l = std::log(lam);
      const double log_m = std::log1p(-lam);
      double expected_gift = 0.0;  // E[b * K / (n-1)], K cooperators among others
      for (int k = 0; k <= n - 1; ++k) {
        const double log_w = std::lgamma(n) - std::lgamma(k + 1) - std::lgamma(n - k) +
                             k * log_l + (n - 1 - k) * log_m;
        const double w = std::exp(log_w);
        expected_gift += w * (spec.npd.benefit * k / (n - 1));
      }
      return lam * (expected_gift - spec.npd.cost) + (1.0 - lam) * expected_gift;
    }
    case Variant::Bertrand: {
      validate_action(spec, a.value);
      // identical prices split the market n ways
      return a.value / n;
    }
  }
  throw std::logic_error("expected_symmetric_payoff: unknown variant");
}

}  // namespace coopeq
