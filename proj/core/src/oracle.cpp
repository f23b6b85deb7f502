#include "coopeq/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "fmt.hpp"
#include "rng.hpp"

namespace coopeq::oracle {

using detail::fmt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ActionGrid {
  double lo = 0.0, hi = 1.0;
  int points = 2;
  double at(int i) const {
    return i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1);
  }
  double step() const { return (hi - lo) / (points - 1); }
};

ActionGrid make_grid(const GameSpec& spec, int points) {
  if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (spec.variant == Variant::Bertrand)
    return {spec.bertrand.low, spec.bertrand.high, points};
  return {0.0, 1.0, points};
}

// C(n, 0..n) by the multiplicative recurrence; exact through the group sizes
// the oracle enumerates.
std::vector<double> pascal_row(int n) {
  if (n > 1000) throw std::invalid_argument("oracle binomials capped at 1000 players");
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 1.0);
  for (int i = 1; i <= n; ++i) row[i] = row[i - 1] * (n - i + 1) / i;
  return row;
}

// Focal payoff when every opponent plays `a`. Binary-dilemma actions are
// cooperation probabilities; the expectation enumerates realized cooperator
// counts instead of reusing any closed form.
double vs_common(const GameSpec& spec, double own, double a) {
  const int n = spec.players;
  if (spec.variant != Variant::Npd) {
    const std::vector<double> others(static_cast<std::size_t>(n) - 1, a);
    return payoff(spec, own, others);
  }
  const auto binom = pascal_row(n - 1);
  double gift = 0.0;
  for (int k = 0; k <= n - 1; ++k)
    gift += binom[k] * std::pow(a, k) * std::pow(1.0 - a, n - 1 - k) *
            (spec.npd.benefit * k / (n - 1));
  return gift - spec.npd.cost * own;
}

// Focal payoff when m opponents move to the common action g and the remaining
// n-1-m stay at the (pure) reference.
double mixed_payoff(const GameSpec& spec, double own, int m, double g, double ref) {
  const int n = spec.players;
  if (spec.variant != Variant::Npd) {
    std::vector<double> others(static_cast<std::size_t>(n) - 1, ref);
    for (int i = 0; i < m; ++i) others[i] = g;
    return payoff(spec, own, others);
  }
  const auto binom = pascal_row(m);
  double gift = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double coop = k + (n - 1 - m) * ref;
    gift += binom[k] * std::pow(g, k) * std::pow(1.0 - g, m - k) *
            (spec.npd.benefit * coop / (n - 1));
  }
  return gift - spec.npd.cost * own;
}

double sym_expected(const GameSpec& spec, double a) { return vs_common(spec, a, a); }

// Lowest symmetric grid action no player wants to leave unilaterally.
double grid_nash(const GameSpec& spec, const ActionGrid& grid) {
  for (int i = 0; i < grid.points; ++i) {
    const double a = grid.at(i);
    const double stay = vs_common(spec, a, a);
    double best = stay;
    for (int j = 0; j < grid.points; ++j)
      best = std::max(best, vs_common(spec, grid.at(j), a));
    if (stay >= best - 1e-12) return a;
  }
  throw std::runtime_error("oracle: no symmetric equilibrium on the action grid");
}

double welfare_opt(const GameSpec& spec, const ActionGrid& grid) {
  double best_a = grid.at(0), best_u = sym_expected(spec, grid.at(0));
  for (int i = 1; i < grid.points; ++i) {
    const double u = sym_expected(spec, grid.at(i));
    if (u > best_u) {
      best_u = u;
      best_a = grid.at(i);
    }
  }
  return best_a;
}

}  // namespace

SymmetricAction best_response(const GameSpec& spec, SymmetricAction others,
                              const GridSearchConfig& cfg) {
  validate(spec);
  const ActionGrid grid = make_grid(spec, cfg.grid_points);
  if (others.value < grid.lo || others.value > grid.hi)
    throw ParameterOutOfRange(fmt("best_response: opponent action %g outside [%g, %g]",
                                  others.value, grid.lo, grid.hi));
  double best_a = grid.at(0), best_u = vs_common(spec, grid.at(0), others.value);
  for (int i = 1; i < grid.points; ++i) {
    const double u = vs_common(spec, grid.at(i), others.value);
    if (u > best_u) {
      best_u = u;
      best_a = grid.at(i);
    }
  }
  return {best_a};
}

ForecastReport generic_forecast(const GameSpec& spec, CoalitionStructure structure,
                                const GridSearchConfig& cfg) {
  validate(spec);
  const int n = spec.players;
  if (n > cfg.max_players_exhaustive)
    throw std::invalid_argument(
        fmt("generic_forecast enumerates 2^(n-1) subsets; capped at %d players (got %d)",
            cfg.max_players_exhaustive, n));
  const ActionGrid grid = make_grid(spec, cfg.grid_points);

  const double ref = structure == CoalitionStructure::Selfish ? grid_nash(spec, grid)
                                                              : welfare_opt(spec, grid);
  const double e_ref = vs_common(spec, ref, ref);

  // temptation: best unilateral move against fully faithful opponents
  double sigma_star = ref, best_u = e_ref;
  for (int i = 0; i < grid.points; ++i) {
    const double u = vs_common(spec, grid.at(i), ref);
    if (u > best_u) {
      best_u = u;
      sigma_star = grid.at(i);
    }
  }
  const double incentive = std::max(0.0, best_u - e_ref);

  // reactions any opponent could credibly join: common actions that do not
  // hurt a lone mover against fully faithful opponents
  std::vector<double> reactions;
  for (int i = 0; i < grid.points; ++i) {
    const double g = grid.at(i);
    if (vs_common(spec, g, ref) >= e_ref - 1e-12) reactions.push_back(g);
  }

  // cascade floors: for the deviator (at sigma_star) and for a faithful player
  double dev_floor = kInf, faithful_floor = kInf;
  for (int m = 1; m <= n - 1; ++m) {
    for (double g : reactions) {
      dev_floor = std::min(dev_floor, mixed_payoff(spec, sigma_star, m, g, ref));
      faithful_floor = std::min(faithful_floor, mixed_payoff(spec, ref, m, g, ref));
    }
  }
  const double disincentive = std::max(0.0, e_ref - dev_floor);
  const double e_dev = faithful_floor;

  const double total = incentive + disincentive;
  const double tau = total > 0.0 ? incentive / total : 0.0;

  // value by explicit enumeration of which opponents abandon; each subset gets
  // the exact product of per-player stay/leave probabilities
  double v = 0.0, tau_nobody = 0.0;
  const int others_n = n - 1;
  for (unsigned mask = 0; mask < (1u << others_n); ++mask) {
    double prob = 1.0;
    for (int j = 0; j < others_n; ++j) prob *= (mask >> j) & 1u ? tau : 1.0 - tau;
    v += prob * (mask == 0 ? e_ref : e_dev);
    if (mask == 0) tau_nobody = prob;
  }

  ForecastReport out;
  out.structure = structure;
  out.reference_profile = {ref};
  out.incentive = incentive;
  out.disincentive = disincentive;
  out.tau_pair = tau;
  out.tau_nobody = tau_nobody;
  out.e_nobody = e_ref;
  out.e_deviation = e_dev;
  out.forecast = v;
  return out;
}

CheckResult verify_equilibrium(const GameSpec& spec, const Prediction& prediction,
                               const GridSearchConfig& cfg) {
  validate(spec);
  CheckResult res;
  res.name = fmt("equilibrium/%s", to_string(spec.variant).c_str());
  res.params["n"] = spec.players;
  res.params["predicted_action"] = prediction.equilibrium.value;

  const double u_indep = sym_expected(spec, prediction.equilibrium.value);
  const double payoff_residual = std::abs(u_indep - prediction.equilibrium_payoff);
  const double v_bar =
      std::max(prediction.selfish.forecast, prediction.cooperative.forecast);
  const double shortfall = std::max(0.0, v_bar - prediction.equilibrium_payoff);
  res.params["forecast"] = v_bar;
  res.params["payoff_residual"] = payoff_residual;

  // lowest admissible symmetric action on the grid, refined once before
  // declaring a mismatch
  bool action_ok = false;
  double gap = kInf, grid_min = kInf, step = 0.0;
  for (const int points : {cfg.grid_points, 10 * (cfg.grid_points - 1) + 1}) {
    const ActionGrid grid = make_grid(spec, points);
    step = grid.step();
    grid_min = kInf;
    for (int i = 0; i < grid.points; ++i) {
      if (sym_expected(spec, grid.at(i)) >= v_bar - cfg.tolerance) {
        grid_min = grid.at(i);
        break;
      }
    }
    if (grid_min == kInf) continue;  // forecast unattainable on this grid
    gap = std::abs(grid_min - prediction.equilibrium.value);
    if (gap <= step + 1e-9) {
      action_ok = true;
      break;
    }
  }
  res.params["grid_minimum"] = grid_min;
  res.params["action_gap"] = gap;

  res.residual = std::max(payoff_residual, shortfall);
  res.pass = action_ok && payoff_residual <= 1e-9 && shortfall <= 1e-9;
  if (!res.pass) {
    if (grid_min == kInf)
      res.note = "no symmetric action attains the forecast on the grid";
    else if (!action_ok)
      res.note = fmt("grid minimum %g vs predicted %g (slack %g)", grid_min,
                     prediction.equilibrium.value, step + 1e-9);
    else
      res.note = "payoff field inconsistent with the forecast or the game";
  }
  return res;
}

// --- report ----------------------------------------------------------------

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; }));
}

void VerificationReport::merge(VerificationReport other) {
  for (auto& c : other.checks) checks.push_back(std::move(c));
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["seed"] = seed;
  j["failures"] = failures();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.params) jc["params"][k] = v;
    jc["residual"] = c.residual;
    jc["pass"] = c.pass;
    if (!c.note.empty()) jc["note"] = c.note;
    j["checks"].push_back(std::move(jc));
  }
  return j.dump(2);
}

// --- suites -----------------------------------------------------------------

namespace {

double report_gap(const ForecastReport& a, const ForecastReport& b) {
  double gap = std::abs(a.forecast - b.forecast);
  gap = std::max(gap, std::abs(a.incentive - b.incentive));
  gap = std::max(gap, std::abs(a.disincentive - b.disincentive));
  gap = std::max(gap, std::abs(a.tau_pair - b.tau_pair));
  gap = std::max(gap, std::abs(a.e_nobody - b.e_nobody));
  gap = std::max(gap, std::abs(a.e_deviation - b.e_deviation));
  return gap;
}

}  // namespace

VerificationReport equivalence_scan(std::size_t samples, std::uint64_t seed,
                                    const GridSearchConfig& cfg) {
  VerificationReport rep;
  rep.suite = "equivalence";
  rep.seed = seed;
  std::mt19937_64 gen(seed);

  for (std::size_t s = 0; s < samples; ++s) {
    const int family = detail::uniform_int(gen, 0, 3);
    GameSpec spec;
    switch (family) {
      case 0: {
        const int n = detail::uniform_int(gen, 2, cfg.max_players_exhaustive);
        spec = GameSpec::make_pgg(n, detail::uniform(gen, 1.0 / n + 0.02, 0.97));
        break;
      }
      case 1: {
        const int n = detail::uniform_int(gen, 2, cfg.max_players_exhaustive);
        const double c = detail::uniform(gen, 0.05, 0.5);
        spec = GameSpec::make_npd(n, c + detail::uniform(gen, 0.05, 2.0), c);
        break;
      }
      case 2: {
        const int n = detail::uniform_int(gen, 2, cfg.max_players_exhaustive);
        spec = GameSpec::make_general_pgg(n, detail::uniform(gen, 1.05, n - 0.05));
        break;
      }
      default: {
        const int n = detail::uniform_int(gen, 2, cfg.max_players_exhaustive);
        const double low = detail::uniform(gen, 0.0, 2.0);
        const double high = std::max(low, 1.0) + detail::uniform(gen, 0.2, 9.0);
        spec = GameSpec::make_bertrand(n, low, high);
        break;
      }
    }

    CheckResult c;
    c.name = fmt("equivalence/%s", to_string(spec.variant).c_str());
    c.params["sample"] = static_cast<double>(s);
    c.params["n"] = spec.players;
    switch (spec.variant) {
      case Variant::Pgg: c.params["gamma"] = spec.pgg.gamma; break;
      case Variant::Npd:
        c.params["b"] = spec.npd.benefit;
        c.params["c"] = spec.npd.cost;
        break;
      case Variant::Bertrand:
        c.params["low"] = spec.bertrand.low;
        c.params["high"] = spec.bertrand.high;
        break;
      case Variant::GeneralPgg: c.params["bn"] = spec.general_pgg.benefit; break;
    }

    const Prediction pred = solve(spec);
    double forecast_gap = 0.0;
    if (spec.variant != Variant::Bertrand) {
      for (const auto structure :
           {CoalitionStructure::Selfish, CoalitionStructure::FullyCooperative}) {
        forecast_gap = std::max(
            forecast_gap, report_gap(generic_forecast(spec, structure, cfg),
                                     forecast(spec, structure)));
      }
    } else {
      // the grid cannot see the unit-currency undercut, so only the
      // convention-free pieces are compared here; bertrand_scan owns the rest
      const ForecastReport gf =
          generic_forecast(spec, CoalitionStructure::FullyCooperative, cfg);
      const ForecastReport cf = forecast(spec, CoalitionStructure::FullyCooperative);
      forecast_gap = std::abs(gf.disincentive - cf.disincentive);
      forecast_gap = std::max(forecast_gap, std::abs(gf.e_nobody - cf.e_nobody));
      forecast_gap = std::max(forecast_gap, std::abs(gf.e_deviation - cf.e_deviation));
      forecast_gap = std::max(
          forecast_gap, report_gap(generic_forecast(spec, CoalitionStructure::Selfish, cfg),
                                   forecast(spec, CoalitionStructure::Selfish)));
      c.note = "price temptation compared under the unit-undercut reconstruction only";
    }

    const CheckResult eq = verify_equilibrium(spec, pred, cfg);
    c.params["forecast_gap"] = forecast_gap;
    c.params["action_gap"] = eq.params.at("action_gap");
    c.residual = std::max(forecast_gap, eq.residual);
    c.pass = forecast_gap <= cfg.tolerance && eq.pass;
    if (!c.pass && !eq.pass) c.note = eq.note;
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

VerificationReport binomial_identity_scan(int max_players, int lambda_points) {
  VerificationReport rep;
  rep.suite = "binomial";
  if (max_players < 2 || lambda_points < 2)
    throw std::invalid_argument("binomial_identity_scan: need n >= 2 and >= 2 grid points");

  for (int n = 2; n <= max_players; ++n) {
    const auto binom = pascal_row(n - 1);
    double worst_count = 0.0, worst_payoff = 0.0;
    for (int i = 0; i < lambda_points; ++i) {
      const double lam = static_cast<double>(i) / (lambda_points - 1);
      // expected defectors among n-1 independent mixers
      double defectors = 0.0;
      for (int k = 0; k <= n - 1; ++k)
        defectors += std::pow(lam, n - 1 - k) * std::pow(1.0 - lam, k) * binom[k] * k;
      worst_count = std::max(worst_count, std::abs(defectors - (1.0 - lam) * (n - 1)));

      // the full mixture payoff must collapse to lam * (b - c)
      for (const auto& [b, cst] : {std::pair{0.3, 0.1}, std::pair{1.0, 0.25}}) {
        const GameSpec spec = GameSpec::make_npd(n, b, cst);
        const double direct = expected_symmetric_payoff(spec, {lam});
        worst_payoff = std::max(worst_payoff, std::abs(direct - lam * (b - cst)));
      }
    }
    CheckResult c1;
    c1.name = fmt("binomial/defector-count/n=%d", n);
    c1.params["n"] = n;
    c1.residual = worst_count;
    c1.pass = worst_count <= 1e-10;
    rep.checks.push_back(std::move(c1));

    CheckResult c2;
    c2.name = fmt("binomial/payoff-collapse/n=%d", n);
    c2.params["n"] = n;
    c2.residual = worst_payoff;
    c2.pass = worst_payoff <= 1e-10;
    rep.checks.push_back(std::move(c2));
  }
  return rep;
}

namespace {

int pgg_min_players(double gamma) {
  int n = static_cast<int>(std::floor(1.0 / gamma)) + 1;
  return std::max(n, 2);
}

CheckResult series_check(std::string name, std::span<const double> xs, bool strict,
                         bool increasing, double tol) {
  CheckResult c;
  c.name = std::move(name);
  c.pass = true;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double d = increasing ? xs[i] - xs[i - 1] : xs[i - 1] - xs[i];
    const bool ok = strict ? d > 0.0 : d >= -tol;
    if (!ok) {
      c.pass = false;
      c.residual = std::max(c.residual, -d);
      if (c.note.empty()) c.note = fmt("direction breaks at index %zu (step %g)", i, d);
    }
  }
  return c;
}

}  // namespace

VerificationReport monotonicity_scan() {
  VerificationReport rep;
  rep.suite = "monotonicity";

  for (const double gamma : {0.3, 0.5, 0.7, 0.9}) {
    {
      std::vector<double> vs;
      for (int n = pgg_min_players(gamma); n <= 10000; ++n) vs.push_back(v_pgg(gamma, n));
      auto c = series_check(fmt("monotonic/pgg-value-in-n/gamma=%g", gamma), vs,
                            /*strict=*/true, /*increasing=*/true, 0.0);
      c.params["gamma"] = gamma;
      rep.checks.push_back(std::move(c));
    }
    {
      std::vector<double> xs;
      for (int n = pgg_min_players(gamma); n <= 200; ++n)
        xs.push_back(solve(GameSpec::make_pgg(n, gamma)).equilibrium.value);
      auto c = series_check(fmt("monotonic/pgg-contribution-in-n/gamma=%g", gamma), xs,
                            /*strict=*/false, /*increasing=*/true, 1e-12);
      c.params["gamma"] = gamma;
      rep.checks.push_back(std::move(c));
    }
  }
  for (const int n : {3, 5, 10, 40}) {
    std::vector<double> vs;
    for (int i = 0; i < 200; ++i) {
      const double lo = 1.0 / n + 0.01, hi = 0.99;
      vs.push_back(v_pgg(lo + (hi - lo) * i / 199.0, n));
    }
    auto c = series_check(fmt("monotonic/pgg-value-in-gamma/n=%d", n), vs, true, true, 0.0);
    c.params["n"] = n;
    rep.checks.push_back(std::move(c));
  }

  for (const auto& [b, cst] : {std::pair{0.3, 0.1}, std::pair{1.0, 0.25}, std::pair{2.0, 1.5}}) {
    std::vector<double> vs, lams;
    bool resurrected = false;
    bool seen_zero = false;
    for (int n = 2; n <= 200; ++n) {
      vs.push_back(v_npd(b, cst, n));
      const double lam = solve(GameSpec::make_npd(n, b, cst)).equilibrium.value;
      if (seen_zero && lam > 0.0) resurrected = true;
      if (lam == 0.0) seen_zero = true;
      lams.push_back(lam);
    }
    // The value converges to -c; once consecutive doubles are within rounding
    // of that limit the strict decrease flattens out, so require strictness
    // only while the series is still numerically above -c.
    CheckResult c1;
    c1.name = fmt("monotonic/npd-value-in-n/b=%g,c=%g", b, cst);
    c1.pass = true;
    c1.params["b"] = b;
    c1.params["c"] = cst;
    for (std::size_t i = 1; i < vs.size(); ++i) {
      const bool saturated = vs[i - 1] <= -cst + 1e-12;
      const bool ok = saturated ? vs[i] <= vs[i - 1] : vs[i] < vs[i - 1];
      if (!ok || vs[i] < -cst - 1e-12) {
        c1.pass = false;
        c1.residual = vs[i] - vs[i - 1];
        c1.note = fmt("direction breaks at index %zu", i);
        break;
      }
    }
    rep.checks.push_back(std::move(c1));
    auto c2 = series_check(fmt("monotonic/npd-rate-in-n/b=%g,c=%g", b, cst), lams,
                           false, /*increasing=*/false, 0.0);
    c2.params["b"] = b;
    c2.params["c"] = cst;
    if (resurrected) {
      c2.pass = false;
      c2.note = "cooperation returned after hitting zero";
    }
    rep.checks.push_back(std::move(c2));
  }
  for (const int n : {2, 6, 12}) {
    std::vector<double> in_b, in_c;
    for (int i = 0; i < 200; ++i) in_b.push_back(v_npd(0.15 + 2.0 * i / 199.0, 0.1, n));
    for (int i = 0; i < 200; ++i) in_c.push_back(v_npd(1.0, 0.05 + 0.9 * i / 199.0, n));
    auto c1 = series_check(fmt("monotonic/npd-value-in-b/n=%d", n), in_b, true, true, 0.0);
    c1.params["n"] = n;
    rep.checks.push_back(std::move(c1));
    auto c2 = series_check(fmt("monotonic/npd-value-in-c/n=%d", n), in_c, true, false, 0.0);
    c2.params["n"] = n;
    rep.checks.push_back(std::move(c2));
  }

  for (const auto& [low, high] :
       {std::pair{1.0, 10.0}, std::pair{0.0, 5.0}, std::pair{2.0, 3.0}, std::pair{1.0, 1.5}}) {
    std::vector<double> prices;
    for (int n = 2; n <= 200; ++n) prices.push_back(bertrand_ce_price(low, high, n));
    auto c = series_check(fmt("monotonic/bertrand-price-in-n/low=%g,high=%g", low, high),
                          prices, false, /*increasing=*/false, 0.0);
    c.params["low"] = low;
    c.params["high"] = high;
    const double floor_gap = std::abs(prices.back() - low);
    c.params["floor_gap"] = floor_gap;
    if (floor_gap > 1e-9) {
      c.pass = false;
      c.note = fmt("price at n=200 is %g, floor %g", prices.back(), low);
    }
    rep.checks.push_back(std::move(c));
  }

  {
    CheckResult c;
    c.name = "monotonic/pgg-degenerate-gamma";
    c.pass = true;
    for (const int n : {4, 10}) {
      for (const double eps : {1e-3, 1e-6, 1e-9, 1e-12}) {
        const double gamma = (1.0 + eps) / n;
        const Prediction p = solve(GameSpec::make_pgg(n, gamma));
        const bool ok = std::isfinite(p.equilibrium_payoff) &&
                        std::isfinite(p.cooperative.forecast) &&
                        p.equilibrium.value == 0.0;
        if (!ok) {
          c.pass = false;
          c.note = fmt("n=%d eps=%g gives action %g", n, eps, p.equilibrium.value);
        }
      }
    }
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

namespace {

enum class Direction { Up, Down, Flat };

void expected_directions(PreferenceModel model, Variant family, bool* has_threshold,
                         Direction* threshold_dir, Direction* mu_dir) {
  const bool npd = family == Variant::Npd;
  switch (model) {
    case PreferenceModel::FehrSchmidt:
      *has_threshold = true;
      *threshold_dir = npd ? Direction::Up : Direction::Flat;
      *mu_dir = npd ? Direction::Down : Direction::Flat;
      return;
    case PreferenceModel::CharnessRabinOne:
      *has_threshold = true;
      *threshold_dir = npd ? Direction::Flat : Direction::Up;
      *mu_dir = npd ? Direction::Flat : Direction::Up;
      return;
    case PreferenceModel::CharnessRabinTwo:
      *has_threshold = false;
      *mu_dir = npd ? Direction::Down : Direction::Up;
      return;
  }
  throw std::logic_error("expected_directions: unknown model");
}

CheckResult direction_check(std::string name, std::span<const double> xs, Direction dir,
                            bool strict) {
  if (dir == Direction::Flat) {
    CheckResult c;
    c.name = std::move(name);
    c.pass = true;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (xs[i] != xs[0]) {
        c.pass = false;
        c.residual = std::max(c.residual, std::abs(xs[i] - xs[0]));
        if (c.note.empty()) c.note = fmt("value changes at index %zu", i);
      }
    }
    return c;
  }
  return series_check(std::move(name), xs, strict, dir == Direction::Up, 0.0);
}

}  // namespace

VerificationReport proposition_scan(PreferenceModel model, Variant family,
                                    std::span<const int> sizes, const GameSpec& base,
                                    const PopulationSpec& pop) {
  validate(base);
  if (base.variant != family)
    throw std::invalid_argument("proposition_scan: base game does not match the family");
  if (family == Variant::Bertrand)
    throw std::invalid_argument("proposition_scan: no cooperate/defect dichotomy in price competition");
  if (sizes.size() < 2)
    throw std::invalid_argument("proposition_scan: need at least two group sizes");
  if (pop.model != model)
    throw std::invalid_argument("proposition_scan: population model does not match");

  VerificationReport rep;
  rep.suite = "threshold";
  rep.seed = pop.seed;

  bool has_threshold = false;
  Direction threshold_dir = Direction::Flat, mu_dir = Direction::Flat;
  expected_directions(model, family, &has_threshold, &threshold_dir, &mu_dir);

  const std::string pair =
      fmt("%s-%s", to_string(model).c_str(), to_string(base.variant).c_str());

  std::vector<GameSpec> specs;
  for (const int n : sizes) {
    GameSpec s = base;
    s.players = n;
    validate(s);
    specs.push_back(s);
  }

  if (has_threshold) {
    std::vector<double> ts;
    for (const auto& s : specs) ts.push_back(cooperation_threshold(model, s).value);
    rep.checks.push_back(direction_check(fmt("threshold/%s/direction", pair.c_str()), ts,
                                         threshold_dir, /*strict=*/true));

    // the closed form and the direct utility comparison must agree agent by agent
    CheckResult agree;
    agree.name = fmt("threshold/%s/predicate-agreement", pair.c_str());
    agree.pass = true;
    const auto agents = sample_population(pop);
    for (const auto& s : specs) {
      const CooperationThreshold t = cooperation_threshold(model, s);
      const auto [defect_pay, base_pay] = deviation_profiles(s);
      for (const auto& a : agents) {
        if (t.admits(a) != cooperates(a, defect_pay, base_pay)) {
          agree.pass = false;
          agree.note = fmt("threshold %g disagrees with the direct comparison at n=%d",
                           t.value, s.players);
        }
      }
    }
    rep.checks.push_back(std::move(agree));
  }

  {
    const auto agents = sample_population(pop);
    std::vector<double> mus;
    for (const auto& s : specs) {
      const auto [defect_pay, base_pay] = deviation_profiles(s);
      std::size_t coop = 0;
      for (const auto& a : agents)
        if (cooperates(a, defect_pay, base_pay)) ++coop;
      mus.push_back(static_cast<double>(coop) / static_cast<double>(agents.size()));
    }
    rep.checks.push_back(direction_check(fmt("threshold/%s/mu", pair.c_str()), mus, mu_dir,
                                         /*strict=*/false));
  }
  return rep;
}

VerificationReport threshold_scan(std::uint64_t seed) {
  VerificationReport rep;
  rep.suite = "threshold";
  rep.seed = seed;

  std::vector<int> npd_sizes, pgg_sizes;
  for (int n = 2; n <= 100; ++n) npd_sizes.push_back(n);
  for (int n = 3; n <= 100; ++n) pgg_sizes.push_back(n);

  const GameSpec npd = GameSpec::make_npd(2, 0.3, 0.1);
  const GameSpec pgg = GameSpec::make_pgg(3, 0.5);

  PopulationSpec fs_pop;
  fs_pop.model = PreferenceModel::FehrSchmidt;
  fs_pop.alpha = ParamDist::constant(3.0);
  fs_pop.beta = ParamDist::uniform(0.0, 3.0);
  fs_pop.sample_count = 2000;
  fs_pop.seed = seed;

  PopulationSpec cr1_pop = PopulationSpec::default_for(PreferenceModel::CharnessRabinOne);
  cr1_pop.sample_count = 2000;
  cr1_pop.seed = seed + 1;

  PopulationSpec cr2_pop = PopulationSpec::default_for(PreferenceModel::CharnessRabinTwo);
  cr2_pop.sample_count = 2000;
  cr2_pop.seed = seed + 2;

  rep.merge(proposition_scan(PreferenceModel::FehrSchmidt, Variant::Npd, npd_sizes, npd, fs_pop));
  rep.merge(proposition_scan(PreferenceModel::FehrSchmidt, Variant::Pgg, pgg_sizes, pgg, fs_pop));
  rep.merge(proposition_scan(PreferenceModel::CharnessRabinOne, Variant::Npd, npd_sizes, npd, cr1_pop));
  rep.merge(proposition_scan(PreferenceModel::CharnessRabinOne, Variant::Pgg, pgg_sizes, pgg, cr1_pop));
  rep.merge(proposition_scan(PreferenceModel::CharnessRabinTwo, Variant::Npd, npd_sizes, npd, cr2_pop));
  rep.merge(proposition_scan(PreferenceModel::CharnessRabinTwo, Variant::Pgg, pgg_sizes, pgg, cr2_pop));

  {
    // the public-goods welfare threshold climbs toward (but never reaches) 1
    CheckResult c;
    c.name = "threshold/cr1-pgg/limit";
    c.pass = true;
    double prev = -kInf;
    for (int n = 3; n <= 1000; ++n) {
      const double t =
          cooperation_threshold(PreferenceModel::CharnessRabinOne, GameSpec::make_pgg(n, 0.5))
              .value;
      if (!(t > prev) || !(t < 1.0)) {
        c.pass = false;
        c.note = fmt("threshold %g at n=%d breaks the climb toward 1", t, n);
      }
      prev = t;
    }
    const double expected_gap = (1.0 - 0.5) / (0.5 * 999.0);
    const double gap = 1.0 - prev;
    c.residual = std::abs(gap - expected_gap);
    if (c.residual > 1e-12) {
      c.pass = false;
      c.note = fmt("terminal gap %g, expected %g", gap, expected_gap);
    }
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

VerificationReport bertrand_scan(const GridSearchConfig& cfg) {
  VerificationReport rep;
  rep.suite = "bertrand";

  // Cases where the unit-undercut lattice reconstruction and the closed form
  // agree: either the undercut cascade has room above the floor (high - 2 >=
  // low) or the floor clamps both to the same price.
  std::vector<std::array<double, 3>> match_cases = {
      {1.0, 10.0, 2}, {1.0, 10.0, 4}, {1.0, 10.0, 10}, {0.0, 5.0, 2},
      {0.0, 5.0, 3},  {1.5, 4.0, 3},  {2.0, 12.0, 5},  {9.0, 10.0, 4},
      {1.0, 1.5, 6},  {0.5, 8.0, 7},
  };

  for (const auto& [low, high, players] : match_cases) {
    const int n = static_cast<int>(players);
    const GameSpec spec = GameSpec::make_bertrand(n, low, high);
    const double closed = bertrand_ce_price(low, high, n);

    // independent reconstruction on the whole-currency-unit undercut lattice
    std::vector<double> lattice = {high};
    for (double p = high - 1.0; p > low; p -= 1.0) lattice.push_back(p);
    lattice.push_back(low);

    const double e_ref = high / n;
    std::vector<double> others_ref(static_cast<std::size_t>(n) - 1, high);
    double best_dev = e_ref, sigma_star = high;
    for (const double p : lattice) {
      const double u = payoff(spec, p, others_ref);
      if (u > best_dev) {
        best_dev = u;
        sigma_star = p;
      }
    }
    const double incentive = std::max(0.0, best_dev - e_ref);

    std::vector<double> reactions;
    for (const double p : lattice)
      if (payoff(spec, p, others_ref) >= e_ref - 1e-12) reactions.push_back(p);

    double dev_floor = kInf, faithful_floor = kInf;
    for (int m = 1; m <= n - 1; ++m) {
      for (const double g : reactions) {
        std::vector<double> others(static_cast<std::size_t>(n) - 1, high);
        for (int i = 0; i < m; ++i) others[i] = g;
        dev_floor = std::min(dev_floor, payoff(spec, sigma_star, others));
        faithful_floor = std::min(faithful_floor, payoff(spec, high, others));
      }
    }
    const double disincentive = std::max(0.0, e_ref - dev_floor);
    const double total = incentive + disincentive;
    const double tau = total > 0.0 ? incentive / total : 0.0;
    double stay_all = 1.0;
    for (int j = 0; j < n - 1; ++j) stay_all *= 1.0 - tau;
    const double v2 = e_ref * stay_all + faithful_floor * (1.0 - stay_all);
    const double v_bar = std::max(v2, low / n);

    // lowest price meeting the reconstructed forecast
    const ActionGrid grid = make_grid(spec, 10 * (cfg.grid_points - 1) + 1);
    double price2 = kInf;
    for (int i = 0; i < grid.points; ++i) {
      if (grid.at(i) / n >= v_bar - cfg.tolerance) {
        price2 = grid.at(i);
        break;
      }
    }

    CheckResult c;
    c.name = fmt("bertrand/unit-undercut/low=%g,high=%g,n=%d", low, high, n);
    c.params["low"] = low;
    c.params["high"] = high;
    c.params["n"] = n;
    c.params["closed_form"] = closed;
    c.params["reconstructed"] = price2;
    if (n <= cfg.max_players_exhaustive) {
      // record how far the literal continuous-grid temptation sits from the
      // unit-undercut convention; informational, not a failure
      const ForecastReport gf =
          generic_forecast(spec, CoalitionStructure::FullyCooperative, cfg);
      c.params["grid_incentive"] = gf.incentive;
      c.params["unit_incentive"] = incentive;
    }
    c.residual = std::abs(price2 - closed);
    c.pass = c.residual <= grid.step() + 1e-9;
    c.note = "undercuts happen in whole currency units; the continuous grid "
             "would tempt at one grid step instead";
    rep.checks.push_back(std::move(c));
  }

  // Floor- and ceiling-adjacent prices. When the one-unit undercut lands on or
  // below the floor, the lattice story and the closed form part ways (the
  // closed form lets the price war run to zero profit, the lattice stops at
  // the floor), so here we check internal consistency of the prediction
  // instead of a reconstruction match: the price lies in [low, high], the
  // payoff is the even market split, the payoff covers both forecasts, and
  // the price equals the ceiling / the clamped cooperative price / the floor
  // according to which regime holds.
  std::vector<std::array<double, 3>> regime_cases = {
      {2.0, 3.0, 2}, {2.0, 3.0, 5}, {1.0, 1.5, 2}, {1.0, 1.5, 3}};
  for (const auto& [low, high, players] : regime_cases) {
    const int n = static_cast<int>(players);
    const GameSpec spec = GameSpec::make_bertrand(n, low, high);
    const Prediction pred = solve(spec);
    const double price = pred.equilibrium.value;
    const double v_s = pred.selfish.forecast;
    const double v_c = pred.cooperative.forecast;

    CheckResult c;
    c.name = fmt("bertrand/price-regime/low=%g,high=%g,n=%d", low, high, n);
    c.params["low"] = low;
    c.params["high"] = high;
    c.params["n"] = n;
    c.params["price"] = price;
    c.params["selfish_forecast"] = v_s;
    c.params["cooperative_forecast"] = v_c;

    double worst = 0.0;
    std::string why;
    auto require = [&](double violation, const char* what) {
      if (violation > worst) {
        worst = violation;
        why = what;
      }
    };
    require(std::max(low - price, price - high), "price outside [low, high]");
    require(std::abs(pred.equilibrium_payoff - price / n) - 1e-12,
            "payoff is not the even market split");
    require(std::max(v_s, v_c) - pred.equilibrium_payoff - 1e-9,
            "payoff below a coalition forecast");
    if ((high - 1.0) * n <= high) {
      require(std::abs(price - high) - 1e-12, "no-temptation regime must price at the ceiling");
    } else if (v_c > v_s + 1e-9) {
      const double want = std::clamp(n * v_c, low, high);
      require(std::abs(price - want) - 1e-9, "cooperative price mismatch");
    } else if (v_s > v_c + 1e-9) {
      require(std::abs(price - low) - 1e-12, "selfish regime must price at the floor");
    }
    c.residual = std::max(0.0, worst);
    c.pass = worst <= 0.0;
    c.note = c.pass ? "regime-consistent" : why;
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

VerificationReport negative_control(const GridSearchConfig& cfg) {
  VerificationReport rep;
  rep.suite = "negative-control";

  {
    // a forecast shifted by 1e-3 must be flagged by the grid re-derivation
    const GameSpec spec = GameSpec::make_pgg(10, 0.5);
    const ForecastReport good = forecast(spec, CoalitionStructure::FullyCooperative);
    const ForecastReport grid = generic_forecast(spec, CoalitionStructure::FullyCooperative, cfg);
    const double gap = std::abs(grid.forecast - (good.forecast + 1e-3));
    CheckResult c;
    c.name = "negative-control/detects-forecast-shift";
    c.residual = gap;
    c.pass = gap > cfg.tolerance;
    c.note = c.pass ? "corrupted forecast rejected" : "corrupted forecast slipped through";
    rep.checks.push_back(std::move(c));
  }
  {
    // a displaced equilibrium action (payoff recomputed to stay self-consistent)
    // must fail the minimality check
    const GameSpec spec = GameSpec::make_pgg(40, 0.5);
    Prediction pred = solve(spec);
    pred.equilibrium.value += 0.05;
    pred.equilibrium_payoff = expected_symmetric_payoff(spec, pred.equilibrium);
    const CheckResult eq = verify_equilibrium(spec, pred, cfg);
    CheckResult c;
    c.name = "negative-control/detects-displaced-equilibrium";
    c.residual = eq.params.at("action_gap");
    c.pass = !eq.pass;
    c.note = c.pass ? "displaced action rejected" : "displaced action slipped through";
    rep.checks.push_back(std::move(c));
  }
  {
    // an understated equilibrium no longer meets the forecast
    const GameSpec spec = GameSpec::make_npd(2, 0.3, 0.1);
    Prediction pred = solve(spec);
    pred.equilibrium.value = 0.4;
    pred.equilibrium_payoff = expected_symmetric_payoff(spec, pred.equilibrium);
    const CheckResult eq = verify_equilibrium(spec, pred, cfg);
    CheckResult c;
    c.name = "negative-control/detects-forecast-shortfall";
    c.residual = eq.residual;
    c.pass = !eq.pass;
    c.note = c.pass ? "understated action rejected" : "understated action slipped through";
    rep.checks.push_back(std::move(c));
  }
  {
    // a corrupted payoff field must trip the independent evaluation
    const GameSpec spec = GameSpec::make_npd(3, 0.3, 0.1);
    Prediction pred = solve(spec);
    pred.equilibrium_payoff += 1e-3;
    const CheckResult eq = verify_equilibrium(spec, pred, cfg);
    CheckResult c;
    c.name = "negative-control/detects-payoff-corruption";
    c.residual = eq.residual;
    c.pass = !eq.pass;
    c.note = c.pass ? "corrupted payoff rejected" : "corrupted payoff slipped through";
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

VerificationReport run_all(std::size_t samples, std::uint64_t seed,
                           const GridSearchConfig& cfg) {
  VerificationReport rep;
  rep.suite = "all";
  rep.seed = seed;
  rep.merge(equivalence_scan(samples, seed, cfg));
  rep.merge(binomial_identity_scan());
  rep.merge(monotonicity_scan());
  rep.merge(threshold_scan(seed + 1000));
  rep.merge(bertrand_scan(cfg));
  rep.merge(negative_control(cfg));
  return rep;
}

}  // namespace coopeq::oracle
