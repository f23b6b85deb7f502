#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coopeq/games.hpp"

// Social-preference models evaluated on material payoff vectors, the
// cooperation predicate they induce in the symmetric dilemmas, closed-form
// parameter thresholds for that predicate, and the cooperative fraction of a
// parameter population.

namespace coopeq {

enum class PreferenceModel { FehrSchmidt, CharnessRabinOne, CharnessRabinTwo };

std::string to_string(PreferenceModel m);

struct PreferenceParams {
  PreferenceModel model = PreferenceModel::FehrSchmidt;
  struct Fs {
    double alpha = 0.0;  // envy weight,  alpha >= beta
    double beta = 0.0;   // guilt weight, 0 <= beta <= alpha
  } fs;
  struct Cr1 {
    double alpha = 0.0;  // own-payoff weight in [0, 1]
  } cr1;
  struct Cr2 {
    double alpha = 0.0;  // social weight in [0, 1]
    double delta = 0.0;  // maximin-vs-total mix in [0, 1]
  } cr2;

  static PreferenceParams fehr_schmidt(double alpha, double beta);
  static PreferenceParams charness_rabin(double alpha);
  static PreferenceParams charness_rabin(double alpha, double delta);
};

void validate(const PreferenceParams& p);

// Inequity-averse utility: own payoff less envy at higher payoffs less guilt
// at lower ones, both averaged over the n-1 opponents.
double fs_utility(const PreferenceParams& p, std::span<const double> payoffs,
                  std::size_t focal);

// Welfare-mixing utility. The one-parameter form blends own payoff with the
// group total (focal included); the two-parameter form blends own payoff with
// a min/total mixture.
double cr_utility(const PreferenceParams& p, std::span<const double> payoffs,
                  std::size_t focal);

// Dispatch on p.model.
double utility(const PreferenceParams& p, std::span<const double> payoffs,
               std::size_t focal);

// Which profile the cooperation predicate measures defection against.
enum class DeviationBaseline {
  FullCooperation,  // unilateral defection from everyone-cooperates
  AllDefect,        // unilateral defection compared with everyone-defects
};

// True when defecting does not raise the focal player's utility (ties count
// as cooperative). Supported for the public-goods variants and the binary
// dilemma.
bool cooperates(const PreferenceParams& p, const GameSpec& spec,
                DeviationBaseline baseline = DeviationBaseline::FullCooperation);

// Same predicate on precomputed payoff profiles (focal player at index 0):
// the profile after the focal player defects and the baseline profile it is
// measured against. Lets callers amortize the payoff work across a population.
bool cooperates(const PreferenceParams& p, std::span<const double> defect_payoffs,
                std::span<const double> baseline_payoffs);

// The two payoff profiles entering that comparison, in the same order.
std::pair<std::vector<double>, std::vector<double>> deviation_profiles(
    const GameSpec& spec, DeviationBaseline baseline = DeviationBaseline::FullCooperation);

enum class ThresholdSide { CooperateAtOrAbove, CooperateAtOrBelow };

struct CooperationThreshold {
  PreferenceModel model = PreferenceModel::FehrSchmidt;
  Variant game = Variant::Pgg;
  std::string parameter;  // "beta" or "alpha"
  ThresholdSide side = ThresholdSide::CooperateAtOrAbove;
  double value = 0.0;

  // Applies the threshold to the relevant parameter of p.
  bool admits(const PreferenceParams& p) const;
};

// Closed-form threshold for the FullCooperation predicate. Supported pairs:
// FehrSchmidt or CharnessRabinOne crossed with Pgg, GeneralPgg or Npd.
// The two-parameter welfare model has no single-parameter threshold and
// throws, as does price competition.
CooperationThreshold cooperation_threshold(PreferenceModel m, const GameSpec& spec);

// --- populations ------------------------------------------------------------

struct ParamDist {
  enum class Kind {
    Constant,  // a
    Uniform,   // [a, b]
    Scaled,    // this parameter = (anchor parameter) * U[0, 1]
  };
  Kind kind = Kind::Constant;
  double a = 0.0;
  double b = 0.0;

  static ParamDist constant(double v) { return {Kind::Constant, v, v}; }
  static ParamDist uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static ParamDist scaled() { return {Kind::Scaled, 0.0, 0.0}; }
};

// A population is either a parametric sampler (per-parameter distributions,
// sample count, seed) or an explicit agent list. Guilt draws are forced onto
// 0 <= beta <= alpha: Scaled draws beta = alpha*U[0,1]; Uniform/Constant
// truncate at alpha.
struct PopulationSpec {
  PreferenceModel model = PreferenceModel::FehrSchmidt;
  ParamDist alpha = ParamDist::constant(0.0);
  ParamDist beta = ParamDist::scaled();    // FehrSchmidt only
  ParamDist delta = ParamDist::constant(0.0);  // CharnessRabinTwo only
  std::vector<PreferenceParams> explicit_agents;  // overrides the sampler when non-empty
  std::size_t sample_count = 10000;
  std::uint64_t seed = 1;

  static PopulationSpec default_for(PreferenceModel m);
  // key = value lines; '#' starts a comment. Keys: model, alpha, beta, delta,
  // samples, seed, agent (repeatable). Distributions are written
  // "const V" | "uniform LO HI" | "scaled".
  static PopulationSpec parse(const std::string& text);
  static PopulationSpec load(const std::filesystem::path& path);
};

// Deterministic draw of the whole population (same spec => same agents).
std::vector<PreferenceParams> sample_population(const PopulationSpec& pop);

struct MuFraction {
  double value = 0.0;                    // cooperative fraction by direct predicate count
  std::optional<double> analytic;       // threshold mass when a closed form exists
  std::size_t sample_count = 0;
};

// Fraction of the population whose preferences make cooperation (weakly)
// optimal in `spec`. When the threshold mass has a closed form under the
// population's distributions, both routes are computed and must agree within
// 2/sqrt(sample_count); disagreement throws.
MuFraction mu_fraction(const PopulationSpec& pop, const GameSpec& spec,
                       DeviationBaseline baseline = DeviationBaseline::FullCooperation);

}  // namespace coopeq
