#include "coopeq/preferences.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fmt.hpp"
#include "rng.hpp"

namespace coopeq {

using detail::fmt;

std::string to_string(PreferenceModel m) {
  switch (m) {
    case PreferenceModel::FehrSchmidt: return "fs";
    case PreferenceModel::CharnessRabinOne: return "cr1";
    case PreferenceModel::CharnessRabinTwo: return "cr2";
  }
  throw std::logic_error("to_string: unknown preference model");
}

PreferenceParams PreferenceParams::fehr_schmidt(double alpha, double beta) {
  PreferenceParams p;
  p.model = PreferenceModel::FehrSchmidt;
  p.fs = {alpha, beta};
  validate(p);
  return p;
}

PreferenceParams PreferenceParams::charness_rabin(double alpha) {
  PreferenceParams p;
  p.model = PreferenceModel::CharnessRabinOne;
  p.cr1 = {alpha};
  validate(p);
  return p;
}

PreferenceParams PreferenceParams::charness_rabin(double alpha, double delta) {
  PreferenceParams p;
  p.model = PreferenceModel::CharnessRabinTwo;
  p.cr2 = {alpha, delta};
  validate(p);
  return p;
}

void validate(const PreferenceParams& p) {
  switch (p.model) {
    case PreferenceModel::FehrSchmidt:
      if (!(p.fs.beta >= 0.0))
        throw ParameterOutOfRange(fmt("fs.beta must be non-negative (got %g)", p.fs.beta));
      if (!(p.fs.alpha >= p.fs.beta))
        throw ParameterOutOfRange(fmt("fs.alpha must be at least fs.beta = %g (got %g)",
                                      p.fs.beta, p.fs.alpha));
      return;
    case PreferenceModel::CharnessRabinOne:
      if (!(p.cr1.alpha >= 0.0 && p.cr1.alpha <= 1.0))
        throw ParameterOutOfRange(fmt("cr1.alpha must lie in [0, 1] (got %g)", p.cr1.alpha));
      return;
    case PreferenceModel::CharnessRabinTwo:
      if (!(p.cr2.alpha >= 0.0 && p.cr2.alpha <= 1.0))
        throw ParameterOutOfRange(fmt("cr2.alpha must lie in [0, 1] (got %g)", p.cr2.alpha));
      if (!(p.cr2.delta >= 0.0 && p.cr2.delta <= 1.0))
        throw ParameterOutOfRange(fmt("cr2.delta must lie in [0, 1] (got %g)", p.cr2.delta));
      return;
  }
  throw std::logic_error("validate: unknown preference model");
}

namespace {

void check_focal(std::span<const double> payoffs, std::size_t focal) {
  if (payoffs.size() < 2)
    throw std::invalid_argument(
        fmt("utility needs at least 2 payoffs (got %zu)", payoffs.size()));
  if (focal >= payoffs.size())
    throw std::invalid_argument(
        fmt("focal index %zu out of range for %zu payoffs", focal, payoffs.size()));
}

}  // namespace

double fs_utility(const PreferenceParams& p, std::span<const double> payoffs,
                  std::size_t focal) {
  if (p.model != PreferenceModel::FehrSchmidt)
    throw std::invalid_argument("fs_utility: params are not Fehr-Schmidt");
  check_focal(payoffs, focal);
  const double own = payoffs[focal];
  double envy = 0.0, guilt = 0.0;
  for (std::size_t j = 0; j < payoffs.size(); ++j) {
    if (j == focal) continue;
    envy += std::max(payoffs[j] - own, 0.0);
    guilt += std::max(own - payoffs[j], 0.0);
  }
  const double scale = 1.0 / (static_cast<double>(payoffs.size()) - 1.0);
  return own - p.fs.alpha * scale * envy - p.fs.beta * scale * guilt;
}

double cr_utility(const PreferenceParams& p, std::span<const double> payoffs,
                  std::size_t focal) {
  check_focal(payoffs, focal);
  const double own = payoffs[focal];
  double total = 0.0;
  for (double x : payoffs) total += x;
  if (p.model == PreferenceModel::CharnessRabinOne) {
    return p.cr1.alpha * own + (1.0 - p.cr1.alpha) * total;
  }
  if (p.model == PreferenceModel::CharnessRabinTwo) {
    const double lowest = *std::min_element(payoffs.begin(), payoffs.end());
    return (1.0 - p.cr2.alpha) * own +
           p.cr2.alpha * (p.cr2.delta * lowest + (1.0 - p.cr2.delta) * total);
  }
  throw std::invalid_argument("cr_utility: params are not a welfare-mixing model");
}

double utility(const PreferenceParams& p, std::span<const double> payoffs,
               std::size_t focal) {
  validate(p);
  return p.model == PreferenceModel::FehrSchmidt ? fs_utility(p, payoffs, focal)
                                                 : cr_utility(p, payoffs, focal);
}

bool cooperates(const PreferenceParams& p, const GameSpec& spec,
                DeviationBaseline baseline) {
  validate(p);
  const auto [defect_payoffs, base_payoffs] = deviation_profiles(spec, baseline);
  return cooperates(p, defect_payoffs, base_payoffs);
}

std::pair<std::vector<double>, std::vector<double>> deviation_profiles(
    const GameSpec& spec, DeviationBaseline baseline) {
  validate(spec);
  if (spec.variant == Variant::Bertrand)
    throw std::invalid_argument(
        "cooperates: no cooperate/defect dichotomy in price competition");
  const auto n = static_cast<std::size_t>(spec.players);
  std::vector<double> profile(n, 1.0);
  profile[0] = 0.0;
  std::vector<double> base(n, baseline == DeviationBaseline::FullCooperation ? 1.0 : 0.0);
  return {profile_payoffs(spec, profile), profile_payoffs(spec, base)};
}

bool cooperates(const PreferenceParams& p, std::span<const double> defect_payoffs,
                std::span<const double> baseline_payoffs) {
  // ties count as cooperative
  return utility(p, defect_payoffs, 0) <= utility(p, baseline_payoffs, 0);
}

bool CooperationThreshold::admits(const PreferenceParams& p) const {
  if (p.model != model)
    throw std::invalid_argument("threshold and parameters use different models");
  double x = 0.0;
  if (parameter == "beta")
    x = p.fs.beta;
  else
    x = model == PreferenceModel::FehrSchmidt ? p.fs.alpha : p.cr1.alpha;
  return side == ThresholdSide::CooperateAtOrAbove ? x >= value : x <= value;
}

CooperationThreshold cooperation_threshold(PreferenceModel m, const GameSpec& spec) {
  validate(spec);
  const int n = spec.players;
  CooperationThreshold t;
  t.model = m;
  t.game = spec.variant;

  double per_capita = 0.0;
  switch (spec.variant) {
    case Variant::Pgg: per_capita = spec.pgg.gamma; break;
    case Variant::GeneralPgg: per_capita = spec.general_pgg.benefit / n; break;
    case Variant::Npd: break;
    case Variant::Bertrand:
      throw std::invalid_argument(
          "cooperation_threshold: no cooperate/defect dichotomy in price competition");
  }

  if (m == PreferenceModel::FehrSchmidt) {
    t.parameter = "beta";
    t.side = ThresholdSide::CooperateAtOrAbove;
    if (spec.variant == Variant::Npd) {
      const double b = spec.npd.benefit, c = spec.npd.cost;
      // guilt over the defection gap (b/(n-1) + c per opponent) must outweigh
      // the kept cost c
      t.value = c * (n - 1) / (b + c * (n - 1));
    } else {
      t.value = 1.0 - per_capita;
    }
    return t;
  }
  if (m == PreferenceModel::CharnessRabinOne) {
    t.parameter = "alpha";
    t.side = ThresholdSide::CooperateAtOrBelow;
    if (spec.variant == Variant::Npd) {
      t.value = 1.0 - spec.npd.cost / spec.npd.benefit;
    } else {
      t.value = (per_capita * n - 1.0) / (per_capita * (n - 1));
    }
    return t;
  }
  throw std::invalid_argument(
      "cooperation_threshold: the two-parameter welfare model has no "
      "single-parameter threshold; use the direct predicate");
}

// --- populations ------------------------------------------------------------

PopulationSpec PopulationSpec::default_for(PreferenceModel m) {
  PopulationSpec pop;
  pop.model = m;
  switch (m) {
    case PreferenceModel::FehrSchmidt:
      pop.alpha = ParamDist::uniform(0.0, 2.0);
      pop.beta = ParamDist::scaled();
      break;
    case PreferenceModel::CharnessRabinOne:
      pop.alpha = ParamDist::uniform(0.0, 1.0);
      break;
    case PreferenceModel::CharnessRabinTwo:
      pop.alpha = ParamDist::uniform(0.0, 1.0);
      pop.delta = ParamDist::uniform(0.0, 1.0);
      break;
  }
  return pop;
}

namespace {

ParamDist parse_dist(const std::string& body, int line_no) {
  std::istringstream in(body);
  std::string kind;
  in >> kind;
  if (kind == "scaled") return ParamDist::scaled();
  if (kind == "const") {
    double v = 0.0;
    if (!(in >> v))
      throw std::invalid_argument(fmt("population config line %d: const needs a value", line_no));
    return ParamDist::constant(v);
  }
  if (kind == "uniform") {
    double lo = 0.0, hi = 0.0;
    if (!(in >> lo >> hi))
      throw std::invalid_argument(
          fmt("population config line %d: uniform needs LO and HI", line_no));
    if (!(lo <= hi))
      throw std::invalid_argument(
          fmt("population config line %d: uniform needs LO <= HI (got %g, %g)", line_no, lo, hi));
    return ParamDist::uniform(lo, hi);
  }
  throw std::invalid_argument(
      fmt("population config line %d: unknown distribution \"%s\" "
          "(want const, uniform or scaled)",
          line_no, kind.c_str()));
}

}  // namespace

PopulationSpec PopulationSpec::parse(const std::string& text) {
  PopulationSpec pop;
  bool saw_model = false;
  std::vector<std::vector<double>> agent_rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    std::string key = line.substr(0, eq == std::string::npos ? line.size() : eq);
    key.erase(std::remove_if(key.begin(), key.end(), [](unsigned char c) { return std::isspace(c); }),
              key.end());
    if (key.empty()) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument(fmt("population config line %d: expected key = value", line_no));
      continue;
    }
    if (eq == std::string::npos)
      throw std::invalid_argument(fmt("population config line %d: expected key = value", line_no));
    const std::string body = line.substr(eq + 1);

    if (key == "model") {
      std::istringstream bs(body);
      std::string name;
      bs >> name;
      if (name == "fs") pop.model = PreferenceModel::FehrSchmidt;
      else if (name == "cr1") pop.model = PreferenceModel::CharnessRabinOne;
      else if (name == "cr2") pop.model = PreferenceModel::CharnessRabinTwo;
      else
        throw std::invalid_argument(
            fmt("population config line %d: unknown model \"%s\" (want fs, cr1 or cr2)",
                line_no, name.c_str()));
      saw_model = true;
      // defaults for the chosen model; later lines override
      const auto defaults = default_for(pop.model);
      pop.alpha = defaults.alpha;
      pop.beta = defaults.beta;
      pop.delta = defaults.delta;
    } else if (key == "alpha") {
      pop.alpha = parse_dist(body, line_no);
    } else if (key == "beta") {
      pop.beta = parse_dist(body, line_no);
    } else if (key == "delta") {
      pop.delta = parse_dist(body, line_no);
    } else if (key == "samples") {
      long long v = 0;
      std::istringstream bs(body);
      if (!(bs >> v) || v < 1)
        throw std::invalid_argument(
            fmt("population config line %d: samples must be a positive integer", line_no));
      pop.sample_count = static_cast<std::size_t>(v);
    } else if (key == "seed") {
      unsigned long long v = 0;
      std::istringstream bs(body);
      if (!(bs >> v))
        throw std::invalid_argument(fmt("population config line %d: bad seed", line_no));
      pop.seed = v;
    } else if (key == "agent") {
      std::istringstream bs(body);
      std::vector<double> row;
      double x = 0.0;
      while (bs >> x) row.push_back(x);
      if (row.empty())
        throw std::invalid_argument(
            fmt("population config line %d: agent needs parameter values", line_no));
      agent_rows.push_back(std::move(row));
    } else {
      throw std::invalid_argument(
          fmt("population config line %d: unknown key \"%s\"", line_no, key.c_str()));
    }
  }
  if (!saw_model)
    throw std::invalid_argument("population config: missing \"model = fs|cr1|cr2\" line");

  for (const auto& row : agent_rows) {
    PreferenceParams p;
    switch (pop.model) {
      case PreferenceModel::FehrSchmidt:
        if (row.size() != 2)
          throw std::invalid_argument("population config: fs agents need \"alpha beta\"");
        p = PreferenceParams::fehr_schmidt(row[0], row[1]);
        break;
      case PreferenceModel::CharnessRabinOne:
        if (row.size() != 1)
          throw std::invalid_argument("population config: cr1 agents need \"alpha\"");
        p = PreferenceParams::charness_rabin(row[0]);
        break;
      case PreferenceModel::CharnessRabinTwo:
        if (row.size() != 2)
          throw std::invalid_argument("population config: cr2 agents need \"alpha delta\"");
        p = PreferenceParams::charness_rabin(row[0], row[1]);
        break;
    }
    pop.explicit_agents.push_back(p);
  }
  return pop;
}

PopulationSpec PopulationSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error(fmt("cannot open population config %s", path.string().c_str()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

namespace {

void check_dist_bounds(const PopulationSpec& pop) {
  const bool fs = pop.model == PreferenceModel::FehrSchmidt;
  if (pop.alpha.kind == ParamDist::Kind::Scaled)
    throw std::invalid_argument("population: scaled is only valid for beta");
  if (pop.delta.kind == ParamDist::Kind::Scaled)
    throw std::invalid_argument("population: scaled is only valid for beta");
  const double alo = pop.alpha.a, ahi = pop.alpha.kind == ParamDist::Kind::Uniform
                                            ? pop.alpha.b
                                            : pop.alpha.a;
  if (fs) {
    if (alo < 0.0)
      throw ParameterOutOfRange(fmt("population: fs alpha must be non-negative (got %g)", alo));
    if (pop.beta.kind != ParamDist::Kind::Scaled && pop.beta.a < 0.0)
      throw ParameterOutOfRange(fmt("population: fs beta must be non-negative (got %g)", pop.beta.a));
  } else {
    const double hi = ahi;
    if (alo < 0.0 || hi > 1.0)
      throw ParameterOutOfRange(
          fmt("population: welfare-model alpha must stay in [0, 1] (got [%g, %g])", alo, hi));
    if (pop.model == PreferenceModel::CharnessRabinTwo) {
      const double dlo = pop.delta.a;
      const double dhi = pop.delta.kind == ParamDist::Kind::Uniform ? pop.delta.b : pop.delta.a;
      if (dlo < 0.0 || dhi > 1.0)
        throw ParameterOutOfRange(
            fmt("population: delta must stay in [0, 1] (got [%g, %g])", dlo, dhi));
    }
  }
}

double draw(const ParamDist& d, std::mt19937_64& g) {
  switch (d.kind) {
    case ParamDist::Kind::Constant: return d.a;
    case ParamDist::Kind::Uniform:
      return d.a == d.b ? d.a : detail::uniform(g, d.a, d.b);
    case ParamDist::Kind::Scaled:
      throw std::logic_error("draw: scaled handled by the caller");
  }
  throw std::logic_error("draw: unknown distribution kind");
}

}  // namespace

std::vector<PreferenceParams> sample_population(const PopulationSpec& pop) {
  if (!pop.explicit_agents.empty()) return pop.explicit_agents;
  check_dist_bounds(pop);
  if (pop.sample_count == 0)
    throw std::invalid_argument("population: sample_count must be positive");

  std::mt19937_64 gen(pop.seed);
  std::vector<PreferenceParams> agents;
  agents.reserve(pop.sample_count);
  for (std::size_t i = 0; i < pop.sample_count; ++i) {
    PreferenceParams p;
    p.model = pop.model;
    const double alpha = draw(pop.alpha, gen);
    switch (pop.model) {
      case PreferenceModel::FehrSchmidt: {
        double beta = pop.beta.kind == ParamDist::Kind::Scaled
                          ? alpha * detail::uniform01(gen)
                          : std::min(draw(pop.beta, gen), alpha);  // truncate onto beta <= alpha
        p.fs = {alpha, beta};
        break;
      }
      case PreferenceModel::CharnessRabinOne:
        p.cr1 = {alpha};
        break;
      case PreferenceModel::CharnessRabinTwo:
        p.cr2 = {alpha, draw(pop.delta, gen)};
        break;
    }
    validate(p);
    agents.push_back(p);
  }
  return agents;
}

namespace {

// Closed-form mass of the cooperative region under the population's
// distributions, when one exists.
std::optional<double> analytic_mass(const PopulationSpec& pop, const CooperationThreshold& t) {
  auto indicator = [](bool b) { return b ? 1.0 : 0.0; };

  if (pop.model == PreferenceModel::CharnessRabinOne) {
    // cooperate iff alpha <= t
    const auto& a = pop.alpha;
    if (a.kind == ParamDist::Kind::Constant || a.a == a.b)
      return indicator(a.a <= t.value);
    return std::clamp((t.value - a.a) / (a.b - a.a), 0.0, 1.0);
  }

  // Fehr-Schmidt: cooperate iff beta >= t
  const auto& a = pop.alpha;
  const auto& b = pop.beta;
  const double alpha_min = a.a;
  auto prob_alpha_ge = [&](double x) {
    if (a.kind == ParamDist::Kind::Constant || a.a == a.b) return indicator(a.a >= x);
    return std::clamp((a.b - x) / (a.b - a.a), 0.0, 1.0);
  };

  if (b.kind == ParamDist::Kind::Scaled) {
    if (t.value <= 0.0) return 1.0;
    if (a.kind == ParamDist::Kind::Constant || a.a == a.b) {
      if (a.a <= 0.0) return 0.0;
      return std::clamp(1.0 - t.value / a.a, 0.0, 1.0);
    }
    // beta = alpha * U[0,1], alpha ~ U[a.a, a.b]
    if (t.value >= a.b) return 0.0;
    const double m = std::max(a.a, t.value);
    return ((a.b - m) - t.value * std::log(a.b / m)) / (a.b - a.a);
  }
  if (b.kind == ParamDist::Kind::Constant || b.a == b.b) {
    // effective beta = min(v, alpha)
    const double v = b.a;
    if (t.value <= 0.0) return 1.0;
    if (v < t.value) return 0.0;
    return prob_alpha_ge(t.value);
  }
  // beta ~ U[b.a, b.b] truncated at alpha: closed form only when the
  // truncation never binds
  if (b.b <= alpha_min) {
    if (t.value <= b.a) return 1.0;
    if (t.value > b.b) return 0.0;
    return (b.b - t.value) / (b.b - b.a);
  }
  return std::nullopt;
}

}  // namespace

MuFraction mu_fraction(const PopulationSpec& pop, const GameSpec& spec,
                       DeviationBaseline baseline) {
  validate(spec);
  const auto [defect_pay, base_pay] = deviation_profiles(spec, baseline);
  const std::vector<PreferenceParams> agents = sample_population(pop);
  std::size_t coop = 0;
  for (const auto& p : agents)
    if (cooperates(p, defect_pay, base_pay)) ++coop;

  MuFraction out;
  out.sample_count = agents.size();
  out.value = static_cast<double>(coop) / static_cast<double>(agents.size());

  if (!pop.explicit_agents.empty()) {
    out.analytic = out.value;  // exact count over the listed agents
    return out;
  }
  if (baseline != DeviationBaseline::FullCooperation) return out;
  if (pop.model == PreferenceModel::CharnessRabinTwo) return out;

  const CooperationThreshold t = cooperation_threshold(pop.model, spec);
  out.analytic = analytic_mass(pop, t);
  if (out.analytic) {
    const double slack = 2.0 / std::sqrt(static_cast<double>(out.sample_count));
    if (std::abs(out.value - *out.analytic) > slack)
      throw std::runtime_error(
          fmt("mu_fraction self-check failed: predicate count %.6f vs threshold mass %.6f "
              "(slack %.6f); the sampler and the closed form disagree",
              out.value, *out.analytic, slack));
  }
  return out;
}

}  // namespace coopeq
