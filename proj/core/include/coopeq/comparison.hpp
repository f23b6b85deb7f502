#pragma once

#include <optional>
#include <span>
#include <vector>

#include "coopeq/equilibrium.hpp"
#include "coopeq/preferences.hpp"

// Qualitative group-size comparison: how each behavior model's predicted
// cooperation level moves as the group grows, holding everything else fixed.
// Social-preference models contribute the cooperative fraction of a fixed
// sampled population; the cooperative equilibrium contributes its predicted
// symmetric action.

namespace coopeq {

enum class BehaviorModel { FehrSchmidt, CharnessRabinOne, CharnessRabinTwo, CoopEquilibrium };

std::string to_string(BehaviorModel m);

int free_parameter_count(BehaviorModel m);

enum class GroupSizeEffect { None, Positive, Negative, Mixed };

std::string to_string(GroupSizeEffect e);

// Direction of a series: None if every step stays within tol, Mixed if steps
// go both ways, otherwise the one direction present.
GroupSizeEffect classify_direction(std::span<const double> series, double tol = 1e-12);

struct ComparisonRow {
  BehaviorModel model = BehaviorModel::CoopEquilibrium;
  GroupSizeEffect pgg_effect = GroupSizeEffect::None;
  GroupSizeEffect npd_effect = GroupSizeEffect::None;
  int free_parameters = 0;
  std::vector<double> pgg_series;  // one value per sweep point
  std::vector<double> npd_series;
};

struct ComparisonConfig {
  std::vector<GameSpec> pgg_sweep;  // public-goods games differing only in n
  std::vector<GameSpec> npd_sweep;  // binary dilemmas differing only in n
  std::vector<BehaviorModel> models = {
      BehaviorModel::FehrSchmidt, BehaviorModel::CharnessRabinOne,
      BehaviorModel::CharnessRabinTwo, BehaviorModel::CoopEquilibrium};
  // population overrides; when absent the model's default population is used
  // with `samples` draws seeded from `seed`
  std::optional<PopulationSpec> fs_population;
  std::optional<PopulationSpec> cr1_population;
  std::optional<PopulationSpec> cr2_population;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;

  // field-scale defaults: gamma-0.5 public goods over n = 4..40 and a
  // (0.3, 0.1) binary dilemma over n = 2..12
  static ComparisonConfig standard(std::size_t samples, std::uint64_t seed);
};

// One row per requested model. Each sweep needs at least two sizes and must
// vary nothing but n; the sampled population is drawn once per model and held
// fixed across sizes.
std::vector<ComparisonRow> model_comparison(const ComparisonConfig& config);

}  // namespace coopeq
