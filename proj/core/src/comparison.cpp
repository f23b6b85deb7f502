#include "coopeq/comparison.hpp"

#include <cmath>

#include "fmt.hpp"

namespace coopeq {

using detail::fmt;

std::string to_string(BehaviorModel m) {
  switch (m) {
    case BehaviorModel::FehrSchmidt: return "fs";
    case BehaviorModel::CharnessRabinOne: return "cr1";
    case BehaviorModel::CharnessRabinTwo: return "cr2";
    case BehaviorModel::CoopEquilibrium: return "ce";
  }
  throw std::logic_error("to_string: unknown behavior model");
}

int free_parameter_count(BehaviorModel m) {
  switch (m) {
    case BehaviorModel::FehrSchmidt: return 2;
    case BehaviorModel::CharnessRabinOne: return 1;
    case BehaviorModel::CharnessRabinTwo: return 2;
    case BehaviorModel::CoopEquilibrium: return 0;
  }
  throw std::logic_error("free_parameter_count: unknown behavior model");
}

std::string to_string(GroupSizeEffect e) {
  switch (e) {
    case GroupSizeEffect::None: return "none";
    case GroupSizeEffect::Positive: return "positive";
    case GroupSizeEffect::Negative: return "negative";
    case GroupSizeEffect::Mixed: return "mixed";
  }
  throw std::logic_error("to_string: unknown effect");
}

GroupSizeEffect classify_direction(std::span<const double> series, double tol) {
  if (series.size() < 2)
    throw std::invalid_argument("classify_direction: need at least two points");
  bool up = false, down = false;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double d = series[i] - series[i - 1];
    if (d > tol) up = true;
    if (d < -tol) down = true;
  }
  if (up && down) return GroupSizeEffect::Mixed;
  if (up) return GroupSizeEffect::Positive;
  if (down) return GroupSizeEffect::Negative;
  return GroupSizeEffect::None;
}

ComparisonConfig ComparisonConfig::standard(std::size_t samples, std::uint64_t seed) {
  ComparisonConfig c;
  for (int n = 4; n <= 40; ++n) c.pgg_sweep.push_back(GameSpec::make_pgg(n, 0.5));
  for (int n = 2; n <= 12; ++n) c.npd_sweep.push_back(GameSpec::make_npd(n, 0.3, 0.1));
  c.samples = samples;
  c.seed = seed;
  return c;
}

namespace {

void check_sweep(const std::vector<GameSpec>& sweep, Variant want) {
  if (sweep.size() < 2)
    throw std::invalid_argument(
        fmt("model_comparison: %s sweep needs at least two group sizes",
            to_string(want).c_str()));
  for (const auto& s : sweep) {
    validate(s);
    if (s.variant != want)
      throw std::invalid_argument(
          fmt("model_comparison: expected a %s sweep, found %s",
              to_string(want).c_str(), to_string(s.variant).c_str()));
    // only n may vary
    const auto& first = sweep.front();
    const bool same = want == Variant::Pgg
                          ? s.pgg.gamma == first.pgg.gamma &&
                                s.pgg.endowment == first.pgg.endowment
                          : s.npd.benefit == first.npd.benefit &&
                                s.npd.cost == first.npd.cost;
    if (!same)
      throw std::invalid_argument(
          "model_comparison: sweeps may vary the group size only");
  }
}

PopulationSpec population_for(const ComparisonConfig& cfg, BehaviorModel m) {
  const std::optional<PopulationSpec>* override_pop = nullptr;
  PreferenceModel pm = PreferenceModel::FehrSchmidt;
  std::uint64_t lane = 0;
  switch (m) {
    case BehaviorModel::FehrSchmidt:
      override_pop = &cfg.fs_population; pm = PreferenceModel::FehrSchmidt; lane = 1;
      break;
    case BehaviorModel::CharnessRabinOne:
      override_pop = &cfg.cr1_population; pm = PreferenceModel::CharnessRabinOne; lane = 2;
      break;
    case BehaviorModel::CharnessRabinTwo:
      override_pop = &cfg.cr2_population; pm = PreferenceModel::CharnessRabinTwo; lane = 3;
      break;
    case BehaviorModel::CoopEquilibrium:
      throw std::logic_error("population_for: the equilibrium row has no population");
  }
  if (*override_pop) return **override_pop;
  PopulationSpec pop = PopulationSpec::default_for(pm);
  pop.sample_count = cfg.samples;
  pop.seed = cfg.seed * 4 + lane;  // disjoint deterministic seed lanes per model
  return pop;
}

std::vector<double> mu_series(const std::vector<GameSpec>& sweep,
                              const std::vector<PreferenceParams>& agents) {
  std::vector<double> out;
  out.reserve(sweep.size());
  for (const auto& spec : sweep) {
    const auto [defect_pay, base_pay] = deviation_profiles(spec);
    std::size_t coop = 0;
    for (const auto& p : agents)
      if (cooperates(p, defect_pay, base_pay)) ++coop;
    out.push_back(static_cast<double>(coop) / static_cast<double>(agents.size()));
  }
  return out;
}

std::vector<double> equilibrium_series(const std::vector<GameSpec>& sweep) {
  std::vector<double> out;
  out.reserve(sweep.size());
  for (const auto& spec : sweep) out.push_back(solve(spec).equilibrium.value);
  return out;
}

}  // namespace

std::vector<ComparisonRow> model_comparison(const ComparisonConfig& config) {
  check_sweep(config.pgg_sweep, Variant::Pgg);
  check_sweep(config.npd_sweep, Variant::Npd);
  if (config.models.empty())
    throw std::invalid_argument("model_comparison: empty model list");

  std::vector<ComparisonRow> rows;
  rows.reserve(config.models.size());
  for (BehaviorModel m : config.models) {
    ComparisonRow row;
    row.model = m;
    row.free_parameters = free_parameter_count(m);
    if (m == BehaviorModel::CoopEquilibrium) {
      row.pgg_series = equilibrium_series(config.pgg_sweep);
      row.npd_series = equilibrium_series(config.npd_sweep);
    } else {
      const auto agents = sample_population(population_for(config, m));
      row.pgg_series = mu_series(config.pgg_sweep, agents);
      row.npd_series = mu_series(config.npd_sweep, agents);
    }
    row.pgg_effect = classify_direction(row.pgg_series);
    row.npd_effect = classify_direction(row.npd_series);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace coopeq
