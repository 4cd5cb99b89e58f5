#ifndef CFWP_CONFIG_HPP
#define CFWP_CONFIG_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "cfwp/verdict.hpp"

namespace cfwp {

using Json = nlohmann::ordered_json;

/// Validated run configuration. The geometry block follows
///   {"m": int, "alpha": str, "beta": str, "gamma": str|null,
///    "params": {name: number}, "hints": {profile: hint}}
/// with hint one of {"type":"power","p":x,"coeff":x},
/// {"type":"bounded-below","c":x}, {"type":"none"}. Unknown keys anywhere
/// are rejected.
struct RunConfig {
    Json raw;  // the validated document (geometry block echoed into reports)
    CfwpGeometry geometry;
    std::optional<ModeIndex> mode;
    std::optional<SweepGrid> sweep_grid;
    ClassifyOptions classify;
    Window window;
};

/// Parse a config document. Throws ConfigError on any violation.
RunConfig parse_config(const Json& doc);

/// Read + parse a config file. Throws IOError / ConfigError.
RunConfig load_config(const std::string& path);

/// Apply `--set key.path=value` overrides to a raw document before parsing.
/// Values are parsed as JSON scalars, falling back to strings.
void apply_overrides(Json& doc, const std::vector<std::string>& sets);

/// Window from the CFWP_WINDOW environment variable ("tmin,tmax"), falling
/// back to the given default. Throws ConfigError on a malformed value.
Window window_from_env(Window fallback);

// Report serialization (deterministic field order).
Json to_json(const HypothesisReport& rep);
Json to_json(const HypothesesOutcome& out);
Json to_json(const ModeIndex& mode);
Json to_json(const ModeVerdict& verdict);
Json to_json(const IdentityReport& rep);
Json sweep_report_to_json(const SweepReport& report, const Json& geometry_block);

/// Atomic file write (temp + rename). Throws IOError.
void write_file_atomic(const std::string& path, const std::string& content);

/// Locale-independent decimal with 17 significant digits (CSV output).
std::string format_17(double v);

}  // namespace cfwp

#endif
