#include "mcfd_app/commands.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "mcfd/american.hpp"
#include "mcfd/error.hpp"
#include "mcfd/greeks_analysis.hpp"
#include "mcfd_app/artifacts.hpp"

namespace mcfd::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 7> kCommands{{
    {Command::price_european, "price-european"},
    {Command::price_american, "price-american"},
    {Command::greeks, "greeks"},
    {Command::convergence_study, "convergence-study"},
    {Command::dispersion_report, "dispersion-report"},
    {Command::stability_sweep, "stability-sweep"},
    {Command::reproduce_tables, "reproduce-tables"},
}};

constexpr std::array<Command, 7> kCommandList{Command::price_european,    Command::price_american,
                                              Command::greeks,            Command::convergence_study,
                                              Command::dispersion_report, Command::stability_sweep,
                                              Command::reproduce_tables};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs f(0) .. f(count - 1) on up to `threads` workers; rethrows the first error.
template <class F>
void parallel_for(int count, int threads, F f) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct SolveRecord {
    std::string label;
    GridStamp stamp;
    double seconds = 0.0;
    int n_s = 0;
    std::map<int, int> histogram;
};

/// Shared state of one command: configuration, logging, solver statistics,
/// artifacts and phase timings.
class RunContext {
public:
    RunContext(Command command, const RunConfig& config, std::ostream& out, std::ostream& log)
        : command_(command), config_(config), out_(out), log_(log), dir_(config.out_dir) {
        fs::create_directories(dir_);
    }

    const RunConfig& config() const { return config_; }
    std::string name() const { return std::string(to_string(command_)); }
    std::ostream& out() { return out_; }

    void info(const std::string& line) {
        std::lock_guard lock(log_mutex_);
        log_ << "[" << name() << "] " << line << "\n";
    }
    void debug(const std::string& line) {
        if (config_.verbose) info(line);
    }

    fs::path artifact(const std::string& file) {
        std::lock_guard lock(artifact_mutex_);
        artifacts_.push_back(dir_ / file);
        return artifacts_.back();
    }

    SolverConfig solver_config(bool smoothing, SpatialScheme scheme, int stored_slices, const std::string& label,
                               int M) {
        SolverConfig c = config_.solver;
        c.smoothing = smoothing;
        c.scheme = scheme;
        c.stored_slices = stored_slices;
        if (config_.verbose) {
            const int every = std::max(1, M / 10);
            c.on_level = [this, label, every, M](const LevelStats& s) {
                if (s.level % every == 0 || s.level == M) {
                    debug(label + " level " + std::to_string(s.level) + "/" + std::to_string(M) +
                          " tau=" + fixed(s.tau, 6) + " iterations=" + std::to_string(s.iterations));
                }
            };
        }
        return c;
    }

    template <class Surface, class Solve>
    Surface timed_solve(const std::string& label, const GridSpec& grid, Solve solve) {
        const auto t0 = std::chrono::steady_clock::now();
        debug(label + " start N=" + std::to_string(grid.N()) + " M=" + std::to_string(grid.M()));
        Surface s = solve();
        record(label, s, seconds_since(t0));
        return s;
    }

    void record(const std::string& label, const SolutionSurface& s, double seconds) {
        SolveRecord rec{label, GridStamp::of(s.grid, s.smoothed), seconds, s.max_iterations(),
                        s.iteration_histogram()};
        info(label + " done in " + fixed(rec.seconds, 3) + " s (n_s=" + std::to_string(rec.n_s) + ")");
        std::lock_guard lock(record_mutex_);
        records_.push_back(std::move(rec));
    }

    SolutionSurface european(const std::string& label, const MarketParams& p, const GridSpec& grid, bool smoothing,
                             SpatialScheme scheme, int stored_slices) {
        auto cfg = solver_config(smoothing, scheme, stored_slices, label, grid.M());
        return timed_solve<SolutionSurface>(label, grid, [&] { return solve_european(p, grid, cfg); });
    }

    AmericanSurface american(const std::string& label, const MarketParams& p, const GridSpec& grid, bool smoothing,
                             SpatialScheme scheme, int stored_slices) {
        auto cfg = solver_config(smoothing, scheme, stored_slices, label, grid.M());
        return timed_solve<AmericanSurface>(label, grid, [&] { return solve_american(p, grid, cfg); });
    }

    void phase(const std::string& name, double seconds) { phases_[name] = seconds; }

    RunOutcome finish(int exit_code, double total_seconds) {
        json solves = json::array();
        for (const auto& r : records_) {
            json hist = json::object();
            for (const auto& [n, count] : r.histogram) hist[std::to_string(n)] = count;
            solves.push_back({{"label", r.label},
                              {"grid", r.stamp.to_json()},
                              {"seconds", r.seconds},
                              {"n_s", r.n_s},
                              {"iteration_histogram", hist}});
        }
        json files = json::array();
        for (const auto& a : artifacts_) files.push_back(a.filename().string());
        json doc = to_json(config_);
        doc["run"] = {{"command", name()},
                      {"exit_code", exit_code},
                      {"artifacts", files},
                      {"timings", {{"total_seconds", total_seconds}, {"phases", phases_}}},
                      {"solves", solves}};
        RunOutcome outcome;
        outcome.exit_code = exit_code;
        outcome.manifest = artifact("manifest.json");
        write_json(outcome.manifest, doc);
        outcome.artifacts = artifacts_;
        return outcome;
    }

private:
    Command command_;
    const RunConfig& config_;
    std::ostream& out_;
    std::ostream& log_;
    fs::path dir_;
    std::mutex log_mutex_, artifact_mutex_, record_mutex_;
    std::vector<fs::path> artifacts_;
    std::vector<SolveRecord> records_;
    std::map<std::string, double> phases_;
};

json market_json(const MarketParams& p) {
    return {{"r", p.r},     {"sigma", p.sigma}, {"lambda", p.lambda}, {"mu_J", p.mu_J}, {"sigma_J", p.sigma_J},
            {"K", p.K},     {"S0", p.S0},       {"T", p.T},           {"vol", to_string(p.vol_mode)}};
}

json solver_json(const SolutionSurface& s) {
    json hist = json::object();
    for (const auto& [n, count] : s.iteration_histogram()) hist[std::to_string(n)] = count;
    return {{"n_s", s.max_iterations()}, {"iteration_histogram", hist}};
}

/// Prices, nodal slice and stored surface of one solve.
void write_price_artifacts(RunContext& ctx, const std::string& prefix, const SolutionSurface& s, json& doc) {
    const auto& cfg = ctx.config();
    const auto stamp = GridStamp::of(s.grid, s.smoothed);
    const std::string maturity = "values at t = 0 (tau = T = " + exact(s.params.T) + ")";
    CsvWriter prices(ctx.artifact(prefix + "_prices.csv"), ctx.name(), stamp, {"S", "price"}, {maturity});
    json rows = json::array();
    for (double S : cfg.spots) {
        const double v = s.price(S);
        prices.row({fixed(S, 6), fixed(v, 6)});
        rows.push_back({{"S", S}, {"price", v}});
        ctx.out() << prefix << " S=" << fixed(S, 2) << " price=" << fixed(v, 6) << "\n";
    }
    doc["prices"] = rows;

    CsvWriter slice(ctx.artifact(prefix + "_slice.csv"), ctx.name(), stamp, {"x", "S", "value"}, {maturity});
    const auto& fin = s.final_slice();
    for (int n = 0; n <= s.grid.N(); ++n) {
        slice.row({exact(s.grid.x(n)), exact(s.params.S0 * std::exp(s.grid.x(n))), exact(fin[n])});
    }

    CsvWriter surface(ctx.artifact(prefix + "_surface.csv"), ctx.name(), stamp, {"level", "tau", "x", "S", "value"});
    for (std::size_t i = 0; i < s.slices.size(); ++i) {
        for (int n = 0; n <= s.grid.N(); ++n) {
            surface.row({std::to_string(s.levels[i]), exact(s.taus[i]), exact(s.grid.x(n)),
                         exact(s.params.S0 * std::exp(s.grid.x(n))), exact(s.slices[i][n])});
        }
    }
}

json base_doc(RunContext& ctx, const GridStamp& stamp, const MarketParams& p) {
    return {{"schema_version", kSchemaVersion}, {"command", ctx.name()}, {"grid", stamp.to_json()},
            {"market", market_json(p)}};
}

int cmd_price(RunContext& ctx, OptionStyle style) {
    const auto& cfg = ctx.config();
    const auto grid = cfg.grid();
    const std::string prefix = to_string(style);
    json doc = base_doc(ctx, GridStamp::of(grid, cfg.solver.smoothing), cfg.market);
    if (style == OptionStyle::european) {
        auto s = ctx.european(prefix, cfg.market, grid, cfg.solver.smoothing, cfg.solver.scheme,
                              cfg.solver.stored_slices);
        write_price_artifacts(ctx, prefix, s, doc);
        doc["solver"] = solver_json(s);
    } else {
        auto s = ctx.american(prefix, cfg.market, grid, cfg.solver.smoothing, cfg.solver.scheme,
                              cfg.solver.stored_slices);
        write_price_artifacts(ctx, prefix, s, doc);
        doc["solver"] = solver_json(s);
        if (auto node = s.exercise_boundary_node()) {
            const double x = grid.x(*node);
            doc["exercise_boundary"] = {{"node", *node}, {"x", x}, {"S", cfg.market.S0 * std::exp(x)}};
            ctx.out() << prefix << " exercise boundary S*=" << fixed(cfg.market.S0 * std::exp(x), 6) << "\n";
        } else {
            doc["exercise_boundary"] = nullptr;
        }
    }
    write_json(ctx.artifact(prefix + ".json"), doc);
    return kExitOk;
}

int cmd_greeks(RunContext& ctx) {
    const auto& cfg = ctx.config();
    const auto grid = cfg.grid();
    const auto stamp = GridStamp::of(grid, cfg.solver.smoothing);
    auto s = ctx.european("european", cfg.market, grid, cfg.solver.smoothing, cfg.solver.scheme, 0);
    const auto g = compute_greeks(s.final_slice(), grid, cfg.market);

    json doc = base_doc(ctx, stamp, cfg.market);
    json rows = json::array();
    CsvWriter spots(ctx.artifact("greeks.csv"), ctx.name(), stamp, {"S", "price", "delta", "gamma"});
    for (double S : cfg.spots) {
        const double v = s.price(S), d = g.delta_at(S), gm = g.gamma_at(S);
        spots.row({fixed(S, 6), fixed(v, 6), fixed(d, 6), fixed(gm, 6)});
        rows.push_back({{"S", S}, {"price", v}, {"delta", d}, {"gamma", gm}});
        ctx.out() << "greeks S=" << fixed(S, 2) << " price=" << fixed(v, 6) << " delta=" << fixed(d, 6)
                  << " gamma=" << fixed(gm, 6) << "\n";
    }
    CsvWriter nodes(ctx.artifact("greeks_grid.csv"), ctx.name(), stamp, {"x", "S", "value", "delta", "gamma"});
    for (int n = 0; n <= grid.N(); ++n) {
        nodes.row({exact(grid.x(n)), exact(g.spot[n]), exact(s.final_slice()[n]), exact(g.delta[n]),
                   exact(g.gamma[n])});
    }
    doc["greeks"] = rows;
    doc["solver"] = solver_json(s);
    write_json(ctx.artifact("greeks.json"), doc);
    return kExitOk;
}

/// Reference solutions (compact scheme, smoothed payoff) per option style.
std::map<OptionStyle, GridFunction> references(RunContext& ctx, const std::set<OptionStyle>& styles,
                                               const GridSpec& ref_grid) {
    const auto& cfg = ctx.config();
    std::vector<OptionStyle> list(styles.begin(), styles.end());
    std::vector<GridFunction> out(list.size());
    parallel_for(static_cast<int>(list.size()), cfg.studies.threads, [&](int i) {
        const std::string label = "reference-" + to_string(list[i]) + "-N" + std::to_string(ref_grid.N());
        out[i] = list[i] == OptionStyle::european
                     ? ctx.european(label, cfg.market, ref_grid, true, SpatialScheme::compact, 0).final_slice()
                     : ctx.american(label, cfg.market, ref_grid, true, SpatialScheme::compact, 0).final_slice();
    });
    std::map<OptionStyle, GridFunction> refs;
    for (std::size_t i = 0; i < list.size(); ++i) refs[list[i]] = std::move(out[i]);
    return refs;
}

int cmd_convergence(RunContext& ctx) {
    const auto& cfg = ctx.config();
    const auto& st = cfg.studies;
    const auto ref_grid = cfg.grid(st.reference_N);
    const auto stamp = GridStamp::of(ref_grid, true);

    std::set<OptionStyle> styles;
    for (const auto& v : st.variants) styles.insert(v.style);
    auto t0 = std::chrono::steady_clock::now();
    auto refs = references(ctx, styles, ref_grid);
    ctx.phase("references", seconds_since(t0));

    struct Job {
        std::size_t variant;
        int N;
        double error = 0.0;
        double seconds = 0.0;
        int M = 0;
        double ratio = 0.0;
    };
    std::vector<Job> jobs;
    for (std::size_t v = 0; v < st.variants.size(); ++v) {
        for (int N : st.convergence_N) jobs.push_back({v, N});
    }
    t0 = std::chrono::steady_clock::now();
    parallel_for(static_cast<int>(jobs.size()), st.threads, [&](int i) {
        auto& job = jobs[i];
        const auto& var = st.variants[job.variant];
        const auto grid = cfg.grid(job.N);
        const std::string label = var.id() + "-N" + std::to_string(job.N);
        const auto start = std::chrono::steady_clock::now();
        const GridFunction u =
            var.style == OptionStyle::european
                ? ctx.european(label, cfg.market, grid, var.smoothing, var.scheme, 0).final_slice()
                : ctx.american(label, cfg.market, grid, var.smoothing, var.scheme, 0).final_slice();
        job.seconds = seconds_since(start);
        job.error = relative_l2_error(u, grid, refs.at(var.style), ref_grid);
        job.M = grid.M();
        job.ratio = grid.mesh_ratio();
    });
    ctx.phase("study", seconds_since(t0));

    const std::vector<std::string> notes = {
        "reference: compact scheme, smoothed payoff, N=" + std::to_string(ref_grid.N()) +
        " (stamp above); error = relative l2 at tau = T on the shared nodes"};
    CsvWriter errors(ctx.artifact("convergence.csv"), ctx.name(), stamp,
                     {"variant", "N", "M", "dx", "mesh_ratio", "smoothing", "relative_l2_error"}, notes);
    CsvWriter orders(ctx.artifact("convergence_orders.csv"), ctx.name(), stamp, {"variant", "order", "r_squared"},
                     notes);
    json doc = base_doc(ctx, stamp, cfg.market);
    doc["variants"] = json::array();
    for (std::size_t v = 0; v < st.variants.size(); ++v) {
        const auto& var = st.variants[v];
        std::vector<int> Ns;
        std::vector<double> errs;
        json points = json::array();
        for (const auto& job : jobs) {
            if (job.variant != v) continue;
            Ns.push_back(job.N);
            errs.push_back(job.error);
            errors.row({var.id(), std::to_string(job.N), std::to_string(job.M), exact(2.0 * cfg.L / job.N),
                        fixed(job.ratio, 6), var.smoothing ? "on" : "off", exact(job.error)});
            points.push_back({{"N", job.N}, {"M", job.M}, {"error", job.error}, {"seconds", job.seconds}});
        }
        json entry = {{"variant", var.id()}, {"points", points}};
        if (Ns.size() >= 3) {
            const auto fit = convergence_order(Ns, errs);
            orders.row({var.id(), fixed(fit.order, 6), fixed(fit.r_squared, 6)});
            entry["order"] = fit.order;
            entry["r_squared"] = fit.r_squared;
            ctx.out() << "convergence " << var.id() << " order=" << fixed(fit.order, 3)
                      << " r2=" << fixed(fit.r_squared, 4) << "\n";
        }
        doc["variants"].push_back(entry);
    }
    write_json(ctx.artifact("convergence.json"), doc);
    return kExitOk;
}

int cmd_dispersion(RunContext& ctx) {
    const auto& cfg = ctx.config();
    const auto stamp = GridStamp::of(cfg.grid(), cfg.solver.smoothing);
    const int n = cfg.studies.dispersion_samples;
    CsvWriter csv(ctx.artifact("dispersion.csv"), ctx.name(), stamp,
                  {"scheme", "omega", "omega1_re", "omega1_im", "omega2"},
                  {"modified wavenumbers at scaled wavenumber omega in [0, pi]"});
    json doc = base_doc(ctx, stamp, cfg.market);
    json schemes = json::object();
    for (auto scheme : all_dispersion_schemes()) {
        json rows = json::array();
        for (int k = 0; k < n; ++k) {
            const double w = std::acos(-1.0) * k / (n - 1);
            const auto mw = modified_wavenumber(scheme, w);
            csv.row({std::string(to_string(scheme)), exact(w), exact(mw.first.real()), exact(mw.first.imag()),
                     exact(mw.second)});
            rows.push_back({w, mw.first.real(), mw.first.imag(), mw.second});
        }
        schemes[std::string(to_string(scheme))] = rows;
    }
    doc["columns"] = {"omega", "omega1_re", "omega1_im", "omega2"};
    doc["schemes"] = schemes;
    write_json(ctx.artifact("dispersion.json"), doc);
    ctx.out() << "dispersion " << all_dispersion_schemes().size() << " schemes x " << n << " samples\n";
    return kExitOk;
}

int cmd_stability(RunContext& ctx) {
    const auto& cfg = ctx.config();
    const auto& st = cfg.studies;
    const auto ref_grid = cfg.grid(st.reference_N);
    const auto stamp = GridStamp::of(ref_grid, cfg.solver.smoothing);

    auto t0 = std::chrono::steady_clock::now();
    const auto reference = ctx.european("reference-N" + std::to_string(ref_grid.N()), cfg.market, ref_grid,
                                        cfg.solver.smoothing, cfg.solver.scheme, 0)
                               .final_slice();
    ctx.phase("reference", seconds_since(t0));

    // run the cells concurrently, then tabulate through the library sweep
    std::vector<std::pair<int, double>> cells;
    for (int N : st.stability_N) {
        for (double r : st.stability_ratios) cells.emplace_back(N, r);
    }
    std::vector<GridFunction> results(cells.size());
    t0 = std::chrono::steady_clock::now();
    parallel_for(static_cast<int>(cells.size()), st.threads, [&](int i) {
        const auto [N, r] = cells[i];
        const auto grid = GridSpec::from_mesh_ratio(cfg.L, N, r, cfg.market.T);
        results[i] = ctx.european("N" + std::to_string(N) + "-ratio" + fixed(r, 3), cfg.market, grid,
                                  cfg.solver.smoothing, cfg.solver.scheme, 0)
                         .final_slice();
    });
    ctx.phase("sweep", seconds_since(t0));
    auto lookup = [&](const GridSpec& g) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto probe = GridSpec::from_mesh_ratio(cfg.L, cells[i].first, cells[i].second, cfg.market.T);
            if (probe.N() == g.N() && probe.M() == g.M()) return results[i];
        }
        throw std::logic_error("stability cell missing");
    };
    const auto table = stability_sweep(st.stability_N, st.stability_ratios, cfg.L, cfg.market.T, lookup, reference,
                                       ref_grid);

    const std::vector<std::string> notes = {"reference N=" + std::to_string(ref_grid.N()) +
                                            " (stamp above); spread = max/min error over the row"};
    CsvWriter csv(ctx.artifact("stability.csv"), ctx.name(), stamp,
                  {"N", "dx", "ratio", "M", "relative_l2_error", "flagged"}, notes);
    CsvWriter rows(ctx.artifact("stability_rows.csv"), ctx.name(), stamp, {"N", "dx", "spread"}, notes);
    json doc = base_doc(ctx, stamp, cfg.market);
    doc["rows"] = json::array();
    for (const auto& row : table.rows) {
        json cells_json = json::array();
        for (const auto& c : row.cells) {
            csv.row({std::to_string(c.N), exact(c.dx), fixed(c.ratio, 6), std::to_string(c.M), exact(c.error),
                     c.flagged ? "1" : "0"});
            cells_json.push_back(
                {{"ratio", c.ratio}, {"M", c.M}, {"error", c.error}, {"flagged", c.flagged}});
        }
        rows.row({std::to_string(row.N), exact(row.dx), fixed(row.spread, 6)});
        doc["rows"].push_back({{"N", row.N}, {"dx", row.dx}, {"spread", row.spread}, {"cells", cells_json}});
        ctx.out() << "stability N=" << row.N << " spread=" << fixed(row.spread, 6) << "\n";
    }

    // von Neumann sweep on the same (dx, ratio) combinations
    CsvWriter amp(ctx.artifact("amplification.csv"), ctx.name(), stamp,
                  {"N", "ratio", "sigma", "theta", "abs_p1", "abs_p2", "bound"});
    CsvWriter amp_sum(ctx.artifact("amplification_summary.csv"), ctx.name(), stamp,
                      {"N", "ratio", "sigma", "max_root", "bound", "min_separation", "stable"});
    doc["amplification"] = json::array();
    bool all_stable = true;
    for (const auto& [N, r] : cells) {
        const auto grid = GridSpec::from_mesh_ratio(cfg.L, N, r, cfg.market.T);
        for (const auto& rep : amplification_sweep(grid, cfg.market, st.amplification_samples)) {
            for (const auto& e : rep.entries) {
                amp.row({std::to_string(N), fixed(r, 6), exact(rep.sigma), exact(e.theta), exact(std::abs(e.p1)),
                         exact(std::abs(e.p2)), exact(rep.bound)});
            }
            amp_sum.row({std::to_string(N), fixed(r, 6), exact(rep.sigma), exact(rep.max_root), exact(rep.bound),
                         exact(rep.min_separation), rep.stable() ? "1" : "0"});
            all_stable = all_stable && rep.stable();
            doc["amplification"].push_back({{"N", N},
                                            {"ratio", r},
                                            {"sigma", rep.sigma},
                                            {"max_root", rep.max_root},
                                            {"bound", rep.bound},
                                            {"min_separation", rep.min_separation},
                                            {"stable", rep.stable()}});
        }
    }
    ctx.out() << "stability max spread=" << fixed(table.max_spread(), 6)
              << " von-neumann=" << (all_stable ? "stable" : "UNSTABLE") << "\n";
    write_json(ctx.artifact("stability.json"), doc);
    return kExitOk;
}

int cmd_tables(RunContext& ctx) {
    const auto& cfg = ctx.config();
    const auto grid = cfg.grid();
    const auto stamp = GridStamp::of(grid, cfg.solver.smoothing);
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = reproduce_tables(cfg, [&](const std::string& table, const SolutionSurface& s, double sec) {
        ctx.record("table" + table, s, sec);
    });
    ctx.phase("tables", seconds_since(t0));

    CsvWriter csv(ctx.artifact("tables.csv"), ctx.name(), stamp,
                  {"table", "S", "quantity", "computed", "reference", "relative_deviation", "pass"},
                  {"tolerance " + exact(cfg.studies.table_tolerance) + " relative"});
    json doc = base_doc(ctx, stamp, cfg.market);
    doc["tolerance"] = cfg.studies.table_tolerance;
    doc["cells"] = json::array();
    for (const auto& c : report.cells) {
        csv.row({c.table, fixed(c.S, 2), c.quantity, fixed(c.computed, 6), fixed(c.reference, 6),
                 exact(c.relative_deviation), c.pass ? "PASS" : "FAIL"});
        doc["cells"].push_back({{"table", c.table},
                                {"S", c.S},
                                {"quantity", c.quantity},
                                {"computed", c.computed},
                                {"reference", c.reference},
                                {"relative_deviation", c.relative_deviation},
                                {"pass", c.pass}});
        ctx.out() << (c.pass ? "PASS" : "FAIL") << " table " << c.table << " S=" << fixed(c.S, 0) << " "
                  << c.quantity << " computed=" << fixed(c.computed, 6) << " reference=" << fixed(c.reference, 6)
                  << " dev=" << fixed(100.0 * c.relative_deviation, 4) << "%\n";
    }
    doc["all_pass"] = report.all_pass();
    write_json(ctx.artifact("tables.json"), doc);
    return report.all_pass() ? kExitOk : kExitReproductionFailed;
}

}  // namespace

std::string_view to_string(Command command) {
    for (const auto& [c, name] : kCommands) {
        if (c == command) return name;
    }
    return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
    for (const auto& [c, n] : kCommands) {
        if (n == name) return c;
    }
    return std::nullopt;
}

std::span<const Command> all_commands() { return kCommandList; }

bool TableReport::all_pass() const {
    for (const auto& c : cells) {
        if (!c.pass) return false;
    }
    return true;
}

std::span<const TableTarget> table_targets() {
    using enum OptionStyle;
    static const std::vector<TableTarget> targets = {
        {"2", european, VolMode::constant, 90.0, "price", 9.285416},
        {"2", european, VolMode::constant, 100.0, "price", 3.149018},
        {"2", european, VolMode::constant, 110.0, "price", 1.401182},
        {"2", european, VolMode::constant, 90.0, "delta", -0.846716},
        {"2", european, VolMode::constant, 100.0, "delta", -0.355661},
        {"2", european, VolMode::constant, 110.0, "delta", -0.058103},
        {"2", european, VolMode::constant, 90.0, "gamma", 0.034862},
        {"2", european, VolMode::constant, 100.0, "gamma", 0.048828},
        {"2", european, VolMode::constant, 110.0, "gamma", 0.012131},
        {"3", european, VolMode::local, 90.0, "price", 9.317322},
        {"3", european, VolMode::local, 100.0, "price", 3.183682},
        {"3", european, VolMode::local, 110.0, "price", 1.407743},
        {"4", american, VolMode::constant, 90.0, "price", 10.003862},
        {"4", american, VolMode::constant, 100.0, "price", 3.241208},
        {"4", american, VolMode::constant, 110.0, "price", 1.419791},
        {"5", american, VolMode::local, 90.0, "price", 10.008880},
        {"5", american, VolMode::local, 100.0, "price", 3.275955},
        {"5", american, VolMode::local, 110.0, "price", 1.426403},
    };
    return targets;
}

TableReport reproduce_tables(const RunConfig& config, const TableSolveHook& on_solve) {
    TableReport report;
    const auto grid = config.grid();
    SolverConfig solver = config.solver;
    solver.stored_slices = 0;
    for (const auto& table : config.studies.tables) {
        std::vector<const TableTarget*> cells;
        for (const auto& t : table_targets()) {
            if (t.table == table) cells.push_back(&t);
        }
        if (cells.empty()) continue;
        MarketParams p = config.market;
        p.vol_mode = cells.front()->vol;
        const auto t0 = std::chrono::steady_clock::now();
        const SolutionSurface s = cells.front()->style == OptionStyle::european
                                      ? solve_european(p, grid, solver)
                                      : static_cast<SolutionSurface>(solve_american(p, grid, solver));
        if (on_solve) on_solve(table, s, seconds_since(t0));
        std::optional<GreeksSlice> greeks;
        for (const auto* t : cells) {
            double v = 0.0;
            if (t->quantity == "price") {
                v = s.price(t->S);
            } else {
                if (!greeks) greeks = compute_greeks(s.final_slice(), grid, p);
                v = t->quantity == "delta" ? greeks->delta_at(t->S) : greeks->gamma_at(t->S);
            }
            const double dev = std::abs(v - t->value) / std::abs(t->value);
            report.cells.push_back(
                {t->table, t->S, t->quantity, v, t->value, dev, dev <= config.studies.table_tolerance});
        }
    }
    return report;
}

RunOutcome run(Command command, const RunConfig& config, std::ostream& out, std::ostream& log) {
    config.validate();
    RunContext ctx(command, config, out, log);
    const auto t0 = std::chrono::steady_clock::now();
    int code = kExitOk;
    switch (command) {
        case Command::price_european: code = cmd_price(ctx, OptionStyle::european); break;
        case Command::price_american: code = cmd_price(ctx, OptionStyle::american); break;
        case Command::greeks: code = cmd_greeks(ctx); break;
        case Command::convergence_study: code = cmd_convergence(ctx); break;
        case Command::dispersion_report: code = cmd_dispersion(ctx); break;
        case Command::stability_sweep: code = cmd_stability(ctx); break;
        case Command::reproduce_tables: code = cmd_tables(ctx); break;
    }
    return ctx.finish(code, seconds_since(t0));
}

int run_guarded(Command command, const RunConfig& config, std::ostream& out, std::ostream& log) {
    try {
        const auto outcome = run(command, config, out, log);
        log << "[" << to_string(command) << "] wrote " << outcome.artifacts.size() << " artifacts to "
            << config.out_dir << "\n";
        return outcome.exit_code;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const InvalidParameter& e) {
        log << "invalid parameter: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const InnerIterationDivergence& e) {
        log << "solver error: " << e.what() << " (level " << e.level() << ", last update " << e.last_update()
            << ")\n";
        return kExitSolverError;
    } catch (const SingularSystem& e) {
        log << "solver error: " << e.what() << "\n";
        return kExitSolverError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitSolverError;
    }
}

}  // namespace mcfd::app
