#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcfd_app/config.hpp"

namespace mcfd::app {

enum class Command {
    price_european,
    price_american,
    greeks,
    convergence_study,
    dispersion_report,
    stability_sweep,
    reproduce_tables,
};

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view name);
std::span<const Command> all_commands();

inline constexpr int kExitOk = 0;
inline constexpr int kExitReproductionFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverError = 3;

struct RunOutcome {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> artifacts;  // includes the manifest (last)
    std::filesystem::path manifest;
};

/// Runs one command with a resolved configuration and writes its artifacts and
/// manifest.json into config.out_dir. Progress goes to `log`, results to `out`.
/// Solver errors propagate as exceptions (see run_guarded).
RunOutcome run(Command command, const RunConfig& config, std::ostream& out, std::ostream& log);

/// run() with solver and configuration errors mapped to exit codes and
/// reported on `log`.
int run_guarded(Command command, const RunConfig& config, std::ostream& out, std::ostream& log);

// ---------------------------------------------------------------------------
// Table reproduction

struct TableCell {
    std::string table;     // "2" .. "5"
    double S = 0.0;
    std::string quantity;  // "price", "delta", "gamma"
    double computed = 0.0;
    double reference = 0.0;
    double relative_deviation = 0.0;
    bool pass = false;
};

struct TableReport {
    std::vector<TableCell> cells;
    bool all_pass() const;
};

/// Published values for one table entry.
struct TableTarget {
    std::string table;
    OptionStyle style;
    VolMode vol;
    double S;
    std::string quantity;
    double value;
};

std::span<const TableTarget> table_targets();

/// Called after each table's solve with the table id, solution and wall time.
using TableSolveHook = std::function<void(const std::string& table, const SolutionSurface&, double seconds)>;

/// Solves each selected table on config.grid() and compares every cell with
/// the published value at config.studies.table_tolerance (relative).
TableReport reproduce_tables(const RunConfig& config, const TableSolveHook& on_solve = {});

}  // namespace mcfd::app
