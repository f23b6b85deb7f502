#include "cli.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "coopeq/comparison.hpp"
#include "coopeq/equilibrium.hpp"
#include "coopeq/games.hpp"
#include "coopeq/oracle.hpp"
#include "coopeq/preferences.hpp"
#include "coopeq/stats.hpp"

namespace coopeq::cli {

namespace {

using nlohmann::ordered_json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Format parse_format(const std::string& name) {
  const std::string f = lower(name);
  if (f == "text") return Format::Text;
  if (f == "csv") return Format::Csv;
  if (f == "json") return Format::Json;
  throw std::invalid_argument("format must be text, csv or json (got \"" + name + "\")");
}

std::string format_double(double v, int precision) {
  precision = std::clamp(precision, 1, 17);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_range(const std::string& text) {
  double parts[3] = {0.0, 0.0, 1.0};
  int count = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t colon = text.find(':', pos);
    const std::string piece =
        text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
    if (count == 3 || piece.empty())
      throw std::invalid_argument("range must be START:END or START:END:STEP (got \"" +
                                  text + "\")");
    std::size_t used = 0;
    parts[count++] = std::stod(piece, &used);
    if (used != piece.size())
      throw std::invalid_argument("range has a non-numeric part \"" + piece + "\"");
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (count < 2)
    throw std::invalid_argument("range must be START:END or START:END:STEP (got \"" +
                                text + "\")");
  const double start = parts[0], end = parts[1];
  double step = count == 3 ? parts[2] : 1.0;
  if (count == 2 && end < start) step = -1.0;
  if (step == 0.0 || (end - start) * step < 0.0)
    throw std::invalid_argument("range step does not move from START toward END in \"" +
                                text + "\"");
  std::vector<double> out;
  const double slack = 1e-9 * std::abs(step);
  for (int i = 0;; ++i) {
    // snap accumulated points to 12 significant digits so 0.3 + 3*0.2 reads 0.9
    const double v = std::stod(format_double(start + i * step, 12));
    if ((step > 0.0 && v > end + slack) || (step < 0.0 && v < end - slack)) break;
    out.push_back(v);
    if (out.size() > 1000000) throw std::invalid_argument("range \"" + text + "\" is too long");
  }
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string piece =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (piece.empty())
      throw std::invalid_argument("values must be a comma-separated list (got \"" + text +
                                  "\")");
    std::size_t used = 0;
    out.push_back(std::stod(piece, &used));
    if (used != piece.size())
      throw std::invalid_argument("values has a non-numeric entry \"" + piece + "\"");
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("values list is empty");
  return out;
}

ordered_json to_json(const OutputRecord& r) {
  ordered_json j;
  j["command"] = r.command;
  j["params"] = r.params;
  if (r.seed) j["seed"] = *r.seed;
  j["results"] = r.results;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

OutputRecord record_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("command") || !j.contains("params") ||
      !j.contains("results"))
    throw std::invalid_argument("record is missing command, params or results");
  OutputRecord r;
  r.command = j.at("command").get<std::string>();
  r.params = j.at("params");
  if (!r.params.is_object()) throw std::invalid_argument("record params must be an object");
  if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
  r.results = j.at("results");
  if (!r.results.is_array()) throw std::invalid_argument("record results must be an array");
  if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

OutputRecord record_from_json_text(const std::string& text) {
  return record_from_json(ordered_json::parse(text));
}

bool operator==(const OutputRecord& a, const OutputRecord& b) {
  return to_json(a).dump() == to_json(b).dump();
}

namespace {

std::string cell_text(const ordered_json& v, int precision) {
  switch (v.type()) {
    case ordered_json::value_t::string: return v.get<std::string>();
    case ordered_json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case ordered_json::value_t::number_integer:
      return std::to_string(v.get<long long>());
    case ordered_json::value_t::number_unsigned:
      return std::to_string(v.get<unsigned long long>());
    case ordered_json::value_t::number_float:
      return format_double(v.get<double>(), precision);
    default: return v.dump();
  }
}

std::string param_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_exact(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ',';
      out += param_text(e);
    }
    return out;
  }
  return v.dump();
}

std::vector<std::string> block_keys(const ordered_json& row) {
  std::vector<std::string> keys;
  for (auto it = row.begin(); it != row.end(); ++it) keys.push_back(it.key());
  return keys;
}

// consecutive rows with the same key set form one table
std::vector<std::pair<std::size_t, std::size_t>> blocks_of(const ordered_json& results) {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  std::size_t start = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i > 0 && block_keys(results[i]) != block_keys(results[start])) {
      blocks.emplace_back(start, i);
      start = i;
    }
  }
  if (start < results.size()) blocks.emplace_back(start, results.size());
  return blocks;
}

std::string preamble(const OutputRecord& r, bool with_notes) {
  std::string out = "# command: " + r.command + "\n";
  std::string params;
  for (auto it = r.params.begin(); it != r.params.end(); ++it) {
    if (!params.empty()) params += ' ';
    params += it.key() + "=" + param_text(it.value());
  }
  out += "# params: " + params + "\n";
  if (r.seed) out += "# seed: " + std::to_string(*r.seed) + "\n";
  if (with_notes)
    for (const auto& n : r.notes) out += "# note: " + n + "\n";
  return out;
}

std::string render_text(const OutputRecord& r, int precision) {
  std::string out = preamble(r, false);
  for (const auto& [lo, hi] : blocks_of(r.results)) {
    out += '\n';
    const auto keys = block_keys(r.results[lo]);
    std::vector<std::size_t> width(keys.size());
    std::vector<bool> numeric(keys.size(), true);
    for (std::size_t c = 0; c < keys.size(); ++c) width[c] = keys[c].size();
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t c = 0; c < keys.size(); ++c) {
        const auto& v = r.results[i].at(keys[c]);
        width[c] = std::max(width[c], cell_text(v, precision).size());
        if (!v.is_number()) numeric[c] = false;
      }
    auto emit_row = [&](const std::function<std::string(std::size_t)>& cell,
                        bool align_right_numeric) {
      std::string line;
      for (std::size_t c = 0; c < keys.size(); ++c) {
        std::string s = cell(c);
        const bool right = align_right_numeric && numeric[c];
        if (s.size() < width[c]) {
          const std::string pad(width[c] - s.size(), ' ');
          s = right ? pad + s : s + pad;
        }
        if (c) line += "  ";
        line += s;
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + "\n";
    };
    emit_row([&](std::size_t c) { return keys[c]; }, false);
    emit_row([&](std::size_t c) { return std::string(width[c], '-'); }, false);
    for (std::size_t i = lo; i < hi; ++i)
      emit_row([&](std::size_t c) { return cell_text(r.results[i].at(keys[c]), precision); },
               true);
  }
  if (!r.notes.empty()) {
    out += '\n';
    for (const auto& n : r.notes) out += "# note: " + n + "\n";
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_csv(const OutputRecord& r, int precision) {
  std::string out = preamble(r, true);
  bool first_block = true;
  for (const auto& [lo, hi] : blocks_of(r.results)) {
    if (!first_block) out += '\n';
    first_block = false;
    const auto keys = block_keys(r.results[lo]);
    std::string header;
    for (std::size_t c = 0; c < keys.size(); ++c) {
      if (c) header += ',';
      header += csv_escape(keys[c]);
    }
    out += header + "\n";
    for (std::size_t i = lo; i < hi; ++i) {
      std::string line;
      for (std::size_t c = 0; c < keys.size(); ++c) {
        if (c) line += ',';
        line += csv_escape(cell_text(r.results[i].at(keys[c]), precision));
      }
      out += line + "\n";
    }
  }
  return out;
}

}  // namespace

std::string render(const OutputRecord& r, Format format, int precision) {
  switch (format) {
    case Format::Text: return render_text(r, precision);
    case Format::Csv: return render_csv(r, precision);
    case Format::Json: return to_json(r).dump(2) + "\n";
  }
  throw std::logic_error("render: unknown format");
}

// --- commands ---------------------------------------------------------------

namespace {

struct RunResult {
  OutputRecord record;
  int exit_code = 0;
};

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

ordered_json spec_params(const GameSpec& spec) {
  ordered_json p;
  p["variant"] = to_string(spec.variant);
  p["n"] = spec.players;
  switch (spec.variant) {
    case Variant::Pgg:
      p["gamma"] = spec.pgg.gamma;
      p["endowment"] = spec.pgg.endowment;
      break;
    case Variant::Npd:
      p["b"] = spec.npd.benefit;
      p["c"] = spec.npd.cost;
      break;
    case Variant::Bertrand:
      p["low"] = spec.bertrand.low;
      p["high"] = spec.bertrand.high;
      break;
    case Variant::GeneralPgg:
      p["bn"] = spec.general_pgg.benefit;
      break;
  }
  return p;
}

void push_kv(ordered_json& results, const char* quantity, ordered_json value) {
  results.push_back(ordered_json{{"quantity", quantity}, {"value", std::move(value)}});
}

// scale multiplies every payoff-denominated number (public-goods commands
// report in currency units of the endowment; the fraction stays unscaled)
RunResult cmd_predict(const GameSpec& spec, double scale) {
  const Prediction p = solve(spec);
  RunResult rr;
  rr.record.command = "predict " + to_string(spec.variant);
  rr.record.params = spec_params(spec);
  if (spec.variant == Variant::GeneralPgg && scale != 1.0)
    rr.record.params["endowment"] = scale;

  auto& rows = rr.record.results;
  switch (spec.variant) {
    case Variant::Pgg:
    case Variant::GeneralPgg:
      push_kv(rows, "contribution_fraction", p.equilibrium.value);
      push_kv(rows, "contribution", p.equilibrium.value * scale);
      break;
    case Variant::Npd:
      push_kv(rows, "cooperation_probability", p.equilibrium.value);
      break;
    case Variant::Bertrand:
      push_kv(rows, "price", p.equilibrium.value);
      break;
  }
  push_kv(rows, "expected_payoff", p.equilibrium_payoff * scale);
  push_kv(rows, "winning_structure", to_string(p.winning_structure));
  push_kv(rows, "forecast_selfish", p.selfish.forecast * scale);
  push_kv(rows, "forecast_cooperative", p.cooperative.forecast * scale);
  push_kv(rows, "cooperative_incentive", p.cooperative.incentive * scale);
  push_kv(rows, "cooperative_disincentive", p.cooperative.disincentive * scale);
  push_kv(rows, "cooperative_tau", p.cooperative.tau_pair);
  push_kv(rows, "cooperative_stay_probability", p.cooperative.tau_nobody);
  return rr;
}

RunResult render_sweep(std::string command, ordered_json params,
                       const std::vector<Prediction>& preds, std::string_view vary,
                       double gpgg_scale) {
  RunResult rr;
  rr.record.command = std::move(command);
  rr.record.params = std::move(params);
  for (const auto& p : preds) {
    double scale = 1.0;
    double varied = 0.0;
    switch (p.game.variant) {
      case Variant::Pgg:
        scale = p.game.pgg.endowment;
        varied = vary == "gamma" ? p.game.pgg.gamma
                 : vary == "endowment" ? p.game.pgg.endowment
                                       : p.game.players;
        break;
      case Variant::Npd:
        varied = vary == "b" ? p.game.npd.benefit
                 : vary == "c" ? p.game.npd.cost
                               : p.game.players;
        break;
      case Variant::Bertrand:
        varied = vary == "low" ? p.game.bertrand.low
                 : vary == "high" ? p.game.bertrand.high
                                  : p.game.players;
        break;
      case Variant::GeneralPgg:
        scale = gpgg_scale;
        varied = vary == "bn" ? p.game.general_pgg.benefit : p.game.players;
        break;
    }
    ordered_json row;
    if (vary == "n")
      row[std::string(vary)] = p.game.players;
    else
      row[std::string(vary)] = varied;
    row["equilibrium"] = p.equilibrium.value * scale;
    row["payoff"] = p.equilibrium_payoff * scale;
    row["forecast_selfish"] = p.selfish.forecast * scale;
    row["forecast_cooperative"] = p.cooperative.forecast * scale;
    rr.record.results.push_back(std::move(row));
  }
  return rr;
}

std::string count_word(int n) {
  switch (n) {
    case 0: return "none";
    case 1: return "one";
    case 2: return "two";
    default: return std::to_string(n);
  }
}

std::vector<BehaviorModel> parse_models(const std::string& text) {
  std::vector<BehaviorModel> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string piece = lower(
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (piece == "fs") out.push_back(BehaviorModel::FehrSchmidt);
    else if (piece == "cr1") out.push_back(BehaviorModel::CharnessRabinOne);
    else if (piece == "cr2") out.push_back(BehaviorModel::CharnessRabinTwo);
    else if (piece == "ce") out.push_back(BehaviorModel::CoopEquilibrium);
    else
      throw std::invalid_argument("unknown model \"" + piece +
                                  "\" (expected fs, cr1, cr2 or ce)");
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("model list is empty");
  return out;
}

std::vector<int> int_sizes(const std::vector<double>& values, const char* what) {
  std::vector<int> out;
  for (double v : values) {
    if (v != std::floor(v) || v < 2 || v > 1000000)
      throw std::invalid_argument(std::string(what) +
                                  " sizes must be whole numbers >= 2 (got " +
                                  format_exact(v) + ")");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

struct CompareArgs {
  std::string models = "fs,cr1,cr2,ce";
  std::string game = "both";
  double gamma = 0.5;
  double b = 0.3;
  double c = 0.1;
  std::string pgg_range = "4:40";
  std::string npd_range = "2:12";
  std::size_t samples = 10000;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> configs;
};

RunResult cmd_compare(const CompareArgs& a) {
  const std::string game = lower(a.game);
  if (game != "both" && game != "pgg" && game != "npd")
    throw std::invalid_argument("--game must be both, pgg or npd");

  ComparisonConfig cfg;
  cfg.models = parse_models(a.models);
  for (int n : int_sizes(parse_range(a.pgg_range), "pgg"))
    cfg.pgg_sweep.push_back(GameSpec::make_pgg(n, a.gamma));
  for (int n : int_sizes(parse_range(a.npd_range), "npd"))
    cfg.npd_sweep.push_back(GameSpec::make_npd(n, a.b, a.c));
  cfg.samples = a.samples;

  for (const auto& path : a.configs) {
    PopulationSpec pop = PopulationSpec::load(path);
    switch (pop.model) {
      case PreferenceModel::FehrSchmidt: cfg.fs_population = pop; break;
      case PreferenceModel::CharnessRabinOne: cfg.cr1_population = pop; break;
      case PreferenceModel::CharnessRabinTwo: cfg.cr2_population = pop; break;
    }
  }

  // the shared seed is consumed only by sampled populations without overrides
  const bool stochastic = std::any_of(
      cfg.models.begin(), cfg.models.end(), [&](BehaviorModel m) {
        switch (m) {
          case BehaviorModel::FehrSchmidt: return !cfg.fs_population.has_value();
          case BehaviorModel::CharnessRabinOne: return !cfg.cr1_population.has_value();
          case BehaviorModel::CharnessRabinTwo: return !cfg.cr2_population.has_value();
          case BehaviorModel::CoopEquilibrium: return false;
        }
        return false;
      });
  std::optional<std::uint64_t> seed;
  if (stochastic) {
    seed = a.seed ? *a.seed : fresh_seed();
    cfg.seed = *seed;
  }

  const auto rows = model_comparison(cfg);

  RunResult rr;
  rr.record.command = "compare";
  rr.record.params["models"] = a.models;
  rr.record.params["game"] = game;
  rr.record.params["gamma"] = a.gamma;
  rr.record.params["b"] = a.b;
  rr.record.params["c"] = a.c;
  rr.record.params["pgg_range"] = a.pgg_range;
  rr.record.params["npd_range"] = a.npd_range;
  if (stochastic) rr.record.params["samples"] = a.samples;
  rr.record.seed = seed;
  for (const auto& row : rows) {
    ordered_json r;
    r["model"] = to_string(row.model);
    if (game != "npd") r["pgg"] = to_string(row.pgg_effect);
    if (game != "pgg") r["npd"] = to_string(row.npd_effect);
    r["free_parameters"] = count_word(row.free_parameters);
    rr.record.results.push_back(std::move(r));
  }
  rr.record.notes.push_back(
      "cell = direction of predicted cooperation as the group grows "
      "(population fraction for preference models, equilibrium action for ce)");
  return rr;
}

struct VerifyArgs {
  std::string suite = "all";
  std::size_t samples = 200;
  std::optional<std::uint64_t> seed;
};

RunResult cmd_verify(const VerifyArgs& a) {
  const std::string suite = lower(a.suite);
  const bool seeded = suite == "all" || suite == "equivalence" || suite == "propositions";
  std::optional<std::uint64_t> seed;
  if (seeded) seed = a.seed ? *a.seed : fresh_seed();

  oracle::VerificationReport rep;
  if (suite == "all") rep = oracle::run_all(a.samples, *seed);
  else if (suite == "equivalence") rep = oracle::equivalence_scan(a.samples, *seed);
  else if (suite == "binomial") rep = oracle::binomial_identity_scan();
  else if (suite == "monotonicity") rep = oracle::monotonicity_scan();
  else if (suite == "propositions") rep = oracle::threshold_scan(*seed);
  else if (suite == "bertrand") rep = oracle::bertrand_scan();
  else if (suite == "negative-control") rep = oracle::negative_control();
  else
    throw std::invalid_argument(
        "--suite must be all, equivalence, binomial, monotonicity, propositions, "
        "bertrand or negative-control (got \"" + a.suite + "\")");

  RunResult rr;
  rr.record.command = "verify";
  rr.record.params["suite"] = suite;
  if (suite == "all" || suite == "equivalence") rr.record.params["samples"] = a.samples;
  rr.record.seed = seed;
  for (const auto& c : rep.checks) {
    ordered_json row;
    row["check"] = c.name;
    row["status"] = c.pass ? "pass" : "FAIL";
    row["residual"] = c.residual;
    row["note"] = c.note;
    rr.record.results.push_back(std::move(row));
  }
  rr.record.notes.push_back("checks: " + std::to_string(rep.checks.size()) +
                            ", failures: " + std::to_string(rep.failures()));
  rr.exit_code = rep.all_pass() ? 0 : 2;
  return rr;
}

std::string two_decimals_trimmed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s.empty() || s == "-0") s = "0";
  return s;
}

struct TablesArgs {
  int table = 0;
  std::size_t samples = 10000;
  std::optional<std::uint64_t> seed;
};

RunResult cmd_tables(const TablesArgs& a) {
  RunResult rr;
  rr.record.command = "tables";
  rr.record.params["table"] = a.table;

  if (a.table == 3) {
    const std::uint64_t seed = a.seed ? *a.seed : fresh_seed();
    rr.record.params["samples"] = a.samples;
    rr.record.seed = seed;
    for (const auto& row : model_comparison(ComparisonConfig::standard(a.samples, seed))) {
      ordered_json r;
      std::string name = to_string(row.model);
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      r["model"] = name;
      r["pgg"] = to_string(row.pgg_effect);
      r["npd"] = to_string(row.npd_effect);
      r["free_parameters"] = count_word(row.free_parameters);
      rr.record.results.push_back(std::move(r));
    }
    rr.record.notes.push_back(
        "predicted direction of cooperation in the group size; ce plays with no free "
        "parameters");
    return rr;
  }

  if (a.table == 4) {
    const double observed[] = {3.92, 6.91};  // bundled reference means
    const int sizes[] = {4, 40};
    const char* conditions[] = {"S", "L"};
    for (int i = 0; i < 2; ++i) {
      const Prediction p = solve(GameSpec::make_pgg(sizes[i], 0.5, 10.0));
      ordered_json r;
      r["condition"] = conditions[i];
      r["players"] = sizes[i];
      r["mean_contribution"] = two_decimals_trimmed(observed[i]);
      r["ce_prediction"] = two_decimals_trimmed(10.0 * p.equilibrium.value);
      rr.record.results.push_back(std::move(r));
    }
    rr.record.notes.push_back(
        "contributions on a ten-cent endowment with marginal return 0.5; observed "
        "means are the bundled two-condition study statistics");
    return rr;
  }

  if (a.table == 5) {
    const double observed[] = {41.33, 25.64};  // bundled reference rates
    const int sizes[] = {2, 11};
    const char* conditions[] = {"S", "L"};
    for (int i = 0; i < 2; ++i) {
      const Prediction p = solve(GameSpec::make_npd(sizes[i], 0.3, 0.1));
      ordered_json r;
      r["condition"] = conditions[i];
      r["players"] = sizes[i];
      r["pct_cooperators"] = two_decimals_trimmed(observed[i]);
      r["ce_prediction"] = two_decimals_trimmed(100.0 * p.equilibrium.value);
      rr.record.results.push_back(std::move(r));
    }
    rr.record.notes.push_back(
        "cooperation rates in percent for the 0.30-benefit, 0.10-cost binary dilemma; "
        "observed rates are the bundled two-condition study statistics");
    return rr;
  }

  throw std::invalid_argument("--table must be 3, 4 or 5");
}

struct AnalyzeArgs {
  std::string input;
  double endowment = 10.0;
};

RunResult cmd_analyze(const AnalyzeArgs& a) {
  std::vector<stats::DecisionDataset> datasets;
  if (a.input == "-")
    datasets = stats::load_decisions(std::cin, a.endowment);
  else
    datasets = stats::load_decisions_file(a.input, a.endowment);

  RunResult rr;
  rr.record.command = "analyze";
  rr.record.params["input"] = a.input;
  rr.record.params["endowment"] = a.endowment;

  for (const auto& d : datasets) {
    const stats::ConditionSummary s = stats::summarize(d);
    ordered_json row;
    row["condition"] = s.condition;
    row["subjects"] = static_cast<std::int64_t>(s.subjects);
    if (s.pct_free_riders) row["pct_free_riders"] = *s.pct_free_riders;
    if (s.pct_full_contributors) row["pct_full_contributors"] = *s.pct_full_contributors;
    if (s.pct_cooperators) row["pct_cooperators"] = *s.pct_cooperators;
    row["mean"] = s.mean;
    row["sem"] = s.sem;
    rr.record.results.push_back(std::move(row));
  }

  if (datasets.size() == 2) {
    const auto xs = datasets[0].decisions();
    const auto ys = datasets[1].decisions();
    const stats::RankSumResult t = stats::rank_sum(xs, ys);
    ordered_json row;
    row["comparison"] = datasets[0].condition + " vs " + datasets[1].condition;
    row["u_first"] = t.u_a;
    row["u_second"] = t.u_b;
    row["p_value"] = t.p_value;
    row["method"] = t.exact ? "exact" : "approx";
    rr.record.results.push_back(std::move(row));
  } else {
    rr.record.notes.push_back("rank-sum comparison reported only for exactly two conditions");
  }
  return rr;
}

// --- argument wiring --------------------------------------------------------

struct GameFlags {
  int n = 0;
  double gamma = 0.0;
  double endowment = 1.0;
  double b = 0.0;
  double c = 0.0;
  double low = 0.0;
  double high = 0.0;
  double bn = 0.0;
};

void add_game_options(CLI::App* cmd, Variant v, GameFlags& g, bool require_all) {
  auto* n = cmd->add_option("--n", g.n, "number of players");
  if (require_all) n->required();
  switch (v) {
    case Variant::Pgg: {
      auto* opt = cmd->add_option("--gamma", g.gamma, "marginal per-capita return");
      if (require_all) opt->required();
      cmd->add_option("--endowment", g.endowment,
                      "currency endowment for reported values (default 1)");
      break;
    }
    case Variant::Npd: {
      auto* ob = cmd->add_option("--b", g.b, "benefit handed to the other players");
      auto* oc = cmd->add_option("--c", g.c, "cost of cooperating");
      if (require_all) { ob->required(); oc->required(); }
      break;
    }
    case Variant::Bertrand: {
      auto* ol = cmd->add_option("--low", g.low, "competitive floor price");
      auto* oh = cmd->add_option("--high", g.high, "monopoly ceiling price");
      if (require_all) { ol->required(); oh->required(); }
      break;
    }
    case Variant::GeneralPgg: {
      auto* ob = cmd->add_option("--bn", g.bn, "group benefit multiplier");
      if (require_all) ob->required();
      cmd->add_option("--endowment", g.endowment,
                      "currency endowment for reported values (default 1)");
      break;
    }
  }
}

GameSpec spec_from_flags(Variant v, const GameFlags& g) {
  switch (v) {
    case Variant::Pgg: return GameSpec::make_pgg(g.n, g.gamma, g.endowment);
    case Variant::Npd: return GameSpec::make_npd(g.n, g.b, g.c);
    case Variant::Bertrand: return GameSpec::make_bertrand(g.n, g.low, g.high);
    case Variant::GeneralPgg: return GameSpec::make_general_pgg(g.n, g.bn);
  }
  throw std::logic_error("spec_from_flags: unknown variant");
}

const std::vector<std::string>& vary_fields(Variant v) {
  static const std::vector<std::string> pgg = {"n", "gamma", "endowment"};
  static const std::vector<std::string> npd = {"n", "b", "c"};
  static const std::vector<std::string> bertrand = {"n", "low", "high"};
  static const std::vector<std::string> gpgg = {"n", "bn"};
  switch (v) {
    case Variant::Pgg: return pgg;
    case Variant::Npd: return npd;
    case Variant::Bertrand: return bertrand;
    case Variant::GeneralPgg: return gpgg;
  }
  throw std::logic_error("vary_fields: unknown variant");
}

struct SweepArgs {
  GameFlags flags;
  std::string vary;
  std::string range;
  std::string values;
  double bn_gamma = 0.5;
  double bn_cap = 10.0;
};

RunResult cmd_sweep(Variant v, const SweepArgs& a, const CLI::App* cmd) {
  const std::string vary = lower(a.vary);
  const auto& allowed = vary_fields(v);
  if (std::find(allowed.begin(), allowed.end(), vary) == allowed.end()) {
    std::string list;
    for (const auto& f : allowed) list += (list.empty() ? "" : ", ") + f;
    throw std::invalid_argument("--vary for " + to_string(v) + " must be one of: " + list);
  }
  if (a.range.empty() == a.values.empty())
    throw std::invalid_argument("give exactly one of --range or --values");
  const std::vector<double> values =
      a.range.empty() ? parse_values(a.values) : parse_range(a.range);

  ordered_json params;
  params["variant"] = to_string(v);
  params["vary"] = vary;
  params["values"] = values;

  // the generalized game sweeps group size with a capped-linear benefit
  if (v == Variant::GeneralPgg && vary == "n") {
    const std::vector<int> sizes = int_sizes(values, "gpgg");
    params["bn_gamma"] = a.bn_gamma;
    params["bn_cap"] = a.bn_cap;
    if (a.flags.endowment != 1.0) params["endowment"] = a.flags.endowment;
    const double g = a.bn_gamma, cap = a.bn_cap;
    const auto preds =
        sweep_general_pgg(sizes, [g, cap](int n) { return std::min(g * n, cap); });
    return render_sweep("sweep gpgg", std::move(params), preds, vary, a.flags.endowment);
  }

  // base spec: the varied field may be omitted; it then starts at the first
  // sweep value
  if (vary == "n" && values.front() != std::floor(values.front()))
    throw std::invalid_argument("--vary n needs whole-number values");
  GameFlags g = a.flags;
  const bool varied_given = cmd->count("--" + vary) > 0;
  if (!varied_given) {
    const double first = values.front();
    if (vary == "n") g.n = static_cast<int>(first);
    else if (vary == "gamma") g.gamma = first;
    else if (vary == "endowment") g.endowment = first;
    else if (vary == "b") g.b = first;
    else if (vary == "c") g.c = first;
    else if (vary == "low") g.low = first;
    else if (vary == "high") g.high = first;
    else if (vary == "bn") g.bn = first;
  }
  const GameSpec base = spec_from_flags(v, g);

  ordered_json base_params = spec_params(base);
  for (auto it = base_params.begin(); it != base_params.end(); ++it)
    if (it.key() != "variant" && it.key() != vary) params[it.key()] = it.value();
  if (v == Variant::GeneralPgg && a.flags.endowment != 1.0)
    params["endowment"] = a.flags.endowment;

  const auto preds = sweep(base, vary, values);
  return render_sweep("sweep " + to_string(v), std::move(params), preds, vary,
                      a.flags.endowment);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "cooperative-equilibrium and social-preference predictions for symmetric "
      "social dilemmas"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format_name = "text";
  int precision = 4;
  std::string out_path;
  app.add_option("--format", format_name, "output format: text, csv or json")
      ->default_val("text");
  app.add_option("--precision", precision,
                 "significant digits for floating output (text/csv)")
      ->default_val(4);
  app.add_option("--out", out_path, "write output to this file instead of stdout");

  std::function<RunResult()> chosen;

  // predict
  auto* predict = app.add_subcommand(
      "predict", "equilibrium prediction and both coalition forecasts for one game");
  predict->require_subcommand(1);
  predict->fallthrough();
  static const std::pair<const char*, Variant> kVariants[] = {
      {"pgg", Variant::Pgg},
      {"npd", Variant::Npd},
      {"bertrand", Variant::Bertrand},
      {"gpgg", Variant::GeneralPgg},
  };
  static const char* kVariantHelp[] = {
      "linear public-goods game (contribute a fraction of the endowment)",
      "n-player binary dilemma (cooperate with probability lambda)",
      "price competition on [low, high]",
      "public-goods game with a group-size-dependent benefit",
  };
  auto predict_flags = std::make_shared<std::array<GameFlags, 4>>();
  for (int i = 0; i < 4; ++i) {
    auto [name, variant] = kVariants[i];
    auto* sub = predict->add_subcommand(name, kVariantHelp[i]);
    sub->fallthrough();
    add_game_options(sub, variant, (*predict_flags)[i], /*require_all=*/true);
    sub->callback([&chosen, predict_flags, i, variant] {
      chosen = [predict_flags, i, variant] {
        const GameFlags& g = (*predict_flags)[i];
        const GameSpec spec = spec_from_flags(variant, g);
        const double scale = variant == Variant::Pgg ? g.endowment
                             : variant == Variant::GeneralPgg ? g.endowment
                                                              : 1.0;
        return cmd_predict(spec, scale);
      };
    });
  }

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "re-solve while one parameter runs over a range; one row per value");
  sweep_cmd->require_subcommand(1);
  sweep_cmd->fallthrough();
  auto sweep_args = std::make_shared<std::array<SweepArgs, 4>>();
  for (int i = 0; i < 4; ++i) {
    auto [name, variant] = kVariants[i];
    auto* sub = sweep_cmd->add_subcommand(name, kVariantHelp[i]);
    sub->fallthrough();
    SweepArgs& sa = (*sweep_args)[i];
    add_game_options(sub, variant, sa.flags, /*require_all=*/false);
    sub->add_option("--vary", sa.vary, "parameter to vary")->required();
    sub->add_option("--range", sa.range, "START:END or START:END:STEP (inclusive)");
    sub->add_option("--values", sa.values, "comma-separated explicit values");
    if (variant == Variant::GeneralPgg) {
      sub->add_option("--bn-gamma", sa.bn_gamma,
                      "per-player slope of the capped-linear benefit (group-size sweeps)");
      sub->add_option("--bn-cap", sa.bn_cap,
                      "benefit cap of the capped-linear schedule (group-size sweeps)");
    }
    sub->callback([&chosen, sweep_args, i, variant, sub] {
      chosen = [sweep_args, i, variant, sub] {
        return cmd_sweep(variant, (*sweep_args)[i], sub);
      };
    });
  }

  // compare
  auto* compare = app.add_subcommand(
      "compare", "group-size effect and free-parameter count per behavior model");
  compare->fallthrough();
  auto ca = std::make_shared<CompareArgs>();
  compare->add_option("--models", ca->models, "comma list from fs, cr1, cr2, ce");
  compare->add_option("--game", ca->game, "both, pgg or npd");
  compare->add_option("--gamma", ca->gamma, "public-goods marginal return");
  compare->add_option("--b", ca->b, "binary-dilemma benefit");
  compare->add_option("--c", ca->c, "binary-dilemma cost");
  compare->add_option("--pgg-range", ca->pgg_range, "public-goods group sizes START:END[:STEP]");
  compare->add_option("--npd-range", ca->npd_range, "binary-dilemma group sizes START:END[:STEP]");
  compare->add_option("--samples", ca->samples, "population draws per preference model");
  compare->add_option("--seed", ca->seed, "population seed (auto-generated when omitted)");
  compare->add_option("--config", ca->configs, "population file (repeatable, one model each)")
      ->check(CLI::ExistingFile);
  compare->callback([&chosen, ca] { chosen = [ca] { return cmd_compare(*ca); }; });

  // verify
  auto* verify = app.add_subcommand(
      "verify", "run the brute-force verification suites against the closed forms");
  verify->fallthrough();
  auto va = std::make_shared<VerifyArgs>();
  verify->add_option("--suite", va->suite,
                     "all, equivalence, binomial, monotonicity, propositions, bertrand "
                     "or negative-control");
  verify->add_option("--samples", va->samples, "random game count for the equivalence scan");
  verify->add_option("--seed", va->seed, "scan seed (auto-generated when omitted)");
  verify->callback([&chosen, va] { chosen = [va] { return cmd_verify(*va); }; });

  // tables
  auto* tables = app.add_subcommand(
      "tables", "bundled prediction tables: 3 = model sign grid, 4 = public-goods "
                "contributions, 5 = binary-dilemma cooperation rates");
  tables->fallthrough();
  auto ta = std::make_shared<TablesArgs>();
  tables->add_option("--table", ta->table, "3, 4 or 5")->required();
  tables->add_option("--samples", ta->samples, "population draws (table 3)");
  tables->add_option("--seed", ta->seed, "population seed for table 3 (auto when omitted)");
  tables->callback([&chosen, ta] { chosen = [ta] { return cmd_tables(*ta); }; });

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "summarize a decision file per condition; rank-sum p for two conditions");
  analyze->fallthrough();
  auto aa = std::make_shared<AnalyzeArgs>();
  analyze->add_option("--input", aa->input, "delimited decision file, or - for stdin")
      ->required();
  analyze->add_option("--endowment", aa->endowment,
                      "contribution ceiling for public-goods decisions");
  analyze->callback([&chosen, aa] { chosen = [aa] { return cmd_analyze(*aa); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!chosen) throw std::logic_error("no command selected");
    const RunResult rr = chosen();
    const std::string text = render(rr.record, parse_format(format_name), precision);
    if (out_path.empty()) {
      std::fputs(text.c_str(), stdout);
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open --out file \"" + out_path + "\"");
      f << text;
    }
    return rr.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace coopeq::cli
