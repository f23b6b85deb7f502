#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// Command-line front end over the coopeq library: predict, sweep, compare,
// verify, tables, analyze. Every command produces one OutputRecord which the
// renderers turn into aligned text, CSV with a commented preamble, or JSON.
// Split out of main() so tests can drive commands and renderers in-process.

namespace coopeq::cli {

enum class Format { Text, Csv, Json };

Format parse_format(const std::string& name);  // "text" | "csv" | "json"

// One command's worth of output. `params` is a flat object echoing the
// resolved inputs; `results` is an array of flat row objects. Rows that share
// a key set render as one table; a new key set starts a new block. `seed` is
// present exactly when the command consumed randomness.
struct OutputRecord {
  std::string command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  std::vector<std::string> notes;
};

nlohmann::ordered_json to_json(const OutputRecord& r);
OutputRecord record_from_json(const nlohmann::ordered_json& j);
OutputRecord record_from_json_text(const std::string& text);

bool operator==(const OutputRecord& a, const OutputRecord& b);

// `precision` = significant digits for floating cells in text/CSV; JSON always
// carries shortest-round-trip doubles.
std::string render(const OutputRecord& r, Format format, int precision);

// "%.{precision}g" with the C locale.
std::string format_double(double v, int precision);

// Shortest decimal string that parses back to exactly `v`.
std::string format_exact(double v);

// "A:B" or "A:B:STEP" -> inclusive grid (end admitted within 1e-9*step).
// STEP defaults to 1 and must move from A toward B.
std::vector<double> parse_range(const std::string& text);

// Comma-separated doubles, e.g. "2,4,8".
std::vector<double> parse_values(const std::string& text);

// Full CLI: parses argv, runs the command, writes to stdout or --out.
// Exit codes: 0 success, 1 usage or input error, 2 verification failure.
int run(int argc, const char* const* argv);

}  // namespace coopeq::cli
