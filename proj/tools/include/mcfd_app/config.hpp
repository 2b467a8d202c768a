#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mcfd/grid_domain.hpp"
#include "mcfd/time_stepper.hpp"

namespace mcfd::app {

inline constexpr int kSchemaVersion = 1;

/// Rejected configuration: JSON syntax, unknown or mistyped field, invalid value.
/// `line` is 0 when the problem has no location in a file (flags, defaults).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string field = {}, int line = 0)
        : std::runtime_error(what), field_(std::move(field)), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    std::string field_;
    int line_;
};

/// One curve of a convergence study.
struct ConvergenceVariant {
    OptionStyle style = OptionStyle::european;
    SpatialScheme scheme = SpatialScheme::compact;
    bool smoothing = true;

    /// e.g. "european-compact-smooth", "european-central-raw".
    std::string id() const;
    static ConvergenceVariant parse(std::string_view id);
};

struct StudySettings {
    std::vector<int> convergence_N = {48, 96, 192, 384};
    /// Self-computed reference (compact scheme, smoothed payoff) for studies.
    int reference_N = 3072;
    std::vector<ConvergenceVariant> variants = {
        {OptionStyle::european, SpatialScheme::compact, false},
        {OptionStyle::european, SpatialScheme::compact, true},
        {OptionStyle::european, SpatialScheme::central, false},
        {OptionStyle::american, SpatialScheme::compact, true},
    };
    std::vector<int> stability_N = {384};
    std::vector<double> stability_ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    int dispersion_samples = 65;
    int amplification_samples = 512;
    std::vector<std::string> tables = {"2", "3", "4", "5"};
    double table_tolerance = 0.005;
    /// Concurrent solver runs in studies; 0 uses the hardware concurrency.
    int threads = 0;
};

struct RunConfig {
    MarketParams market;
    double L = 2.0;
    int N = 1536;
    /// Explicit number of time steps; when unset M = ceil(T / (ratio dx^2)).
    std::optional<int> M;
    double ratio = 0.4;
    SolverConfig solver;
    std::vector<double> spots = {90.0, 100.0, 110.0};
    std::string out_dir = "out";
    bool verbose = false;
    StudySettings studies;

    GridSpec grid() const;
    GridSpec grid(int N_override) const;
    /// Throws ConfigError on invalid values.
    void validate() const;
};

/// Command-line overrides; unset members leave the file or default value alone.
struct Overrides {
    std::optional<std::string> config_path;
    std::optional<int> N;
    std::optional<int> M;
    std::optional<double> L;
    std::optional<double> ratio;
    std::optional<bool> smooth;
    std::optional<VolMode> vol;
    std::optional<std::string> out_dir;
    std::optional<std::vector<std::string>> tables;
    std::optional<int> threads;
    bool verbose = false;
};

/// Applies a JSON document on top of `config`. `text` (the source) is used
/// only to attach line numbers to field errors.
void apply_json(RunConfig& config, const nlohmann::json& doc, std::string_view text = {});

RunConfig parse_config(std::string_view text, const RunConfig& base = {});
RunConfig load_config_file(const std::string& path, const RunConfig& base = {});

/// Defaults, then the config file, then the flags.
RunConfig resolve_config(const Overrides& overrides);

/// The resolved configuration in the file schema (loadable by parse_config).
nlohmann::json to_json(const RunConfig& config);

std::string to_string(VolMode mode);
std::string to_string(OptionStyle style);
std::string to_string(SpatialScheme scheme);
VolMode parse_vol_mode(std::string_view s);

}  // namespace mcfd::app
