#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coopeq/games.hpp"

// Experiment-side helpers: per-condition summaries of subject decisions and a
// two-sided Mann-Whitney rank-sum comparison between conditions.

namespace coopeq::stats {

struct DecisionRecord {
  double decision = 0.0;  // currency contribution (public goods) or 0/1 (binary dilemma)
  std::map<std::string, std::string> meta;  // extra columns, kept verbatim
};

struct DecisionDataset {
  std::string condition;
  Variant variant = Variant::Pgg;  // Pgg or Npd
  double endowment = 10.0;         // contribution ceiling for public-goods data
  std::vector<DecisionRecord> records;

  std::vector<double> decisions() const;
};

struct ConditionSummary {
  std::string condition;
  Variant variant = Variant::Pgg;
  std::size_t subjects = 0;
  std::optional<double> pct_free_riders;        // public goods: decision == 0
  std::optional<double> pct_full_contributors;  // public goods: decision == endowment
  std::optional<double> pct_cooperators;        // binary dilemma: decision == 1
  double mean = 0.0;
  double sem = 0.0;  // sample-sd (n-1 denominator) over sqrt(n); 0 for n == 1
};

ConditionSummary summarize(const DecisionDataset& data);

struct RankSumResult {
  double u_a = 0.0;  // Mann-Whitney U of the first sample (midranks under ties)
  double u_b = 0.0;
  double p_value = 1.0;  // two-sided
  bool exact = false;    // true when every rank split was enumerated
};

// Exact by enumeration for tie-free samples with both sizes at most 8;
// otherwise a normal approximation with tie-corrected variance, continuity
// correction and (tie-free only) a kurtosis term. Pass allow_exact = false to
// force the approximation even where enumeration would apply (used to gauge
// the approximation against the exact tail).
RankSumResult rank_sum(std::span<const double> a, std::span<const double> b,
                       bool allow_exact = true);

// Delimited text (comma or tab), one header line naming at least `condition`,
// `variant` and `decision` in any order; extra columns ride along as metadata.
// Binary-dilemma decisions accept 0/1/C/D. Rows are grouped by condition in
// order of first appearance.
std::vector<DecisionDataset> load_decisions(std::istream& in, double endowment);
std::vector<DecisionDataset> load_decisions_file(const std::filesystem::path& path,
                                                 double endowment);

}  // namespace coopeq::stats
