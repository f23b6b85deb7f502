#include "coopeq/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fmt.hpp"

namespace coopeq::stats {

using detail::fmt;

std::vector<double> DecisionDataset::decisions() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.decision);
  return out;
}

ConditionSummary summarize(const DecisionDataset& data) {
  if (data.records.empty())
    throw std::invalid_argument(
        fmt("summarize: condition \"%s\" has no decisions", data.condition.c_str()));
  if (data.variant != Variant::Pgg && data.variant != Variant::Npd)
    throw std::invalid_argument("summarize: only public-goods and binary-dilemma data");

  ConditionSummary s;
  s.condition = data.condition;
  s.variant = data.variant;
  s.subjects = data.records.size();

  const auto xs = data.decisions();
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }

  auto pct_equal = [&](double target) {
    const auto hits = std::count(xs.begin(), xs.end(), target);
    return 100.0 * static_cast<double>(hits) / n;
  };
  if (data.variant == Variant::Pgg) {
    s.pct_free_riders = pct_equal(0.0);
    s.pct_full_contributors = pct_equal(data.endowment);
  } else {
    s.pct_cooperators = pct_equal(1.0);
  }
  return s;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Midranks of the combined sample, returned aligned with (a then b).
std::vector<double> midranks(std::span<const double> a, std::span<const double> b,
                             bool* has_ties) {
  const std::size_t total = a.size() + b.size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  auto value = [&](std::size_t i) { return i < a.size() ? a[i] : b[i - a.size()]; };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return value(i) < value(j); });

  std::vector<double> ranks(total);
  *has_ties = false;
  std::size_t i = 0;
  while (i < total) {
    std::size_t j = i;
    while (j + 1 < total && value(order[j + 1]) == value(order[i])) ++j;
    if (j > i) *has_ties = true;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // average of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

// Exact two-sided tail by enumerating every assignment of the ranks 1..N to
// the first sample. Tie-free only, so U is integral and the comparison can be
// done in integers (doubled to dodge the half-integer mean).
double exact_two_sided(int na, int nb, long long u_obs_doubled) {
  const int total = na + nb;
  const long long target = std::llabs(u_obs_doubled - static_cast<long long>(na) * nb);
  long long hits = 0, splits = 0;
  for (unsigned mask = 0; mask < (1u << total); ++mask) {
    if (std::popcount(mask) != na) continue;
    ++splits;
    long long rank_sum = 0;
    for (int r = 0; r < total; ++r)
      if (mask & (1u << r)) rank_sum += r + 1;
    const long long u2 = 2 * (rank_sum - static_cast<long long>(na) * (na + 1) / 2);
    if (std::llabs(u2 - static_cast<long long>(na) * nb) >= target) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(splits);
}

}  // namespace

RankSumResult rank_sum(std::span<const double> a, std::span<const double> b,
                       bool allow_exact) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("rank_sum: both samples must be non-empty");
  for (double x : a)
    if (!std::isfinite(x)) throw std::invalid_argument("rank_sum: non-finite value");
  for (double x : b)
    if (!std::isfinite(x)) throw std::invalid_argument("rank_sum: non-finite value");

  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  bool has_ties = false;
  const std::vector<double> ranks = midranks(a, b, &has_ties);
  double rank_sum_a = 0.0;
  for (int i = 0; i < na; ++i) rank_sum_a += ranks[i];

  RankSumResult res;
  res.u_a = rank_sum_a - 0.5 * na * (na + 1);
  res.u_b = static_cast<double>(na) * nb - res.u_a;

  if (allow_exact && !has_ties && na <= 8 && nb <= 8) {
    res.exact = true;
    res.p_value = exact_two_sided(na, nb, std::llround(2.0 * res.u_a));
    return res;
  }

  // Normal approximation. Variance under ties follows the midrank correction;
  // the tie-free branch sharpens the tail with the exact kurtosis of U.
  const double n = na, m = nb, total = n + m;
  double tie_term = 0.0;
  {
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    std::size_t i = 0;
    while (i < all.size()) {
      std::size_t j = i;
      while (j + 1 < all.size() && all[j + 1] == all[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double mean = 0.5 * n * m;
  const double var =
      n * m / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
  if (var <= 0.0) {
    res.p_value = 1.0;  // every observation identical
    return res;
  }
  const double z = std::max(0.0, (std::abs(res.u_a - mean) - 0.5) / std::sqrt(var));
  double p = 2.0 * normal_cdf(-z);
  if (!has_ties) {
    const double kurt =
        -6.0 * (n * n + n * m + m * m + n + m) / (5.0 * n * m * (total + 1.0));
    p = 2.0 * (normal_cdf(-z) - normal_pdf(z) * (kurt / 24.0) * (3.0 * z - z * z * z));
  }
  res.p_value = std::clamp(p, 0.0, 1.0);
  return res;
}

// --- dataset I/O ------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

}  // namespace

std::vector<DecisionDataset> load_decisions(std::istream& in, double endowment) {
  if (!(endowment > 0.0))
    throw ParameterOutOfRange(fmt("endowment must be positive (got %g)", endowment));

  std::string header;
  if (!std::getline(in, header) || trim(header).empty())
    throw std::runtime_error("decision data: missing header line");
  const char sep = header.find('\t') != std::string::npos ? '\t' : ',';
  const std::vector<std::string> cols = split(header, sep);

  int i_cond = -1, i_var = -1, i_dec = -1;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const std::string name = lower(cols[i]);
    if (name == "condition") i_cond = static_cast<int>(i);
    else if (name == "variant") i_var = static_cast<int>(i);
    else if (name == "decision") i_dec = static_cast<int>(i);
  }
  if (i_cond < 0 || i_var < 0 || i_dec < 0)
    throw std::runtime_error(
        "decision data: header must name condition, variant and decision columns");

  std::vector<DecisionDataset> datasets;
  auto find_or_add = [&](const std::string& cond, Variant v, int line_no) -> DecisionDataset& {
    for (auto& d : datasets) {
      if (d.condition == cond) {
        if (d.variant != v)
          throw std::runtime_error(
              fmt("decision data line %d: condition \"%s\" mixes game variants",
                  line_no, cond.c_str()));
        return d;
      }
    }
    DecisionDataset d;
    d.condition = cond;
    d.variant = v;
    d.endowment = endowment;
    datasets.push_back(std::move(d));
    return datasets.back();
  };

  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line, sep);
    if (cells.size() != cols.size())
      throw std::runtime_error(fmt("decision data line %d: expected %zu cells, got %zu",
                                   line_no, cols.size(), cells.size()));

    const std::string var_name = lower(cells[i_var]);
    Variant v;
    if (var_name == "pgg") v = Variant::Pgg;
    else if (var_name == "npd") v = Variant::Npd;
    else
      throw std::runtime_error(fmt("decision data line %d: variant must be pgg or npd (got \"%s\")",
                                   line_no, cells[i_var].c_str()));

    DecisionRecord rec;
    const std::string& raw = cells[i_dec];
    if (v == Variant::Npd) {
      const std::string d = lower(raw);
      if (d == "1" || d == "c") rec.decision = 1.0;
      else if (d == "0" || d == "d") rec.decision = 0.0;
      else
        throw std::runtime_error(
            fmt("decision data line %d: binary decision must be 0/1/C/D (got \"%s\")",
                line_no, raw.c_str()));
    } else {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(raw, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != raw.size() || raw.empty())
        throw std::runtime_error(
            fmt("decision data line %d: bad contribution \"%s\"", line_no, raw.c_str()));
      if (x < 0.0 || x > endowment)
        throw std::runtime_error(
            fmt("decision data line %d: contribution %g outside [0, %g]", line_no, x, endowment));
      rec.decision = x;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const int idx = static_cast<int>(i);
      if (idx == i_cond || idx == i_var || idx == i_dec) continue;
      rec.meta[cols[i]] = cells[i];
    }
    find_or_add(cells[i_cond], v, line_no).records.push_back(std::move(rec));
  }
  if (datasets.empty()) throw std::runtime_error("decision data: no decision rows");
  return datasets;
}

std::vector<DecisionDataset> load_decisions_file(const std::filesystem::path& path,
                                                 double endowment) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error(fmt("cannot open decision data %s", path.string().c_str()));
  return load_decisions(in, endowment);
}

}  // namespace coopeq::stats
