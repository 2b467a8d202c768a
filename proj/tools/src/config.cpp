#include "mcfd_app/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mcfd/error.hpp"

namespace mcfd::app {

using nlohmann::json;

std::string to_string(VolMode mode) { return mode == VolMode::local ? "local" : "constant"; }
std::string to_string(OptionStyle style) { return style == OptionStyle::american ? "american" : "european"; }
std::string to_string(SpatialScheme scheme) { return scheme == SpatialScheme::central ? "central" : "compact"; }

VolMode parse_vol_mode(std::string_view s) {
    if (s == "constant") return VolMode::constant;
    if (s == "local") return VolMode::local;
    throw ConfigError("vol must be 'constant' or 'local' (got '" + std::string(s) + "')", "market.vol");
}

std::string ConvergenceVariant::id() const {
    return to_string(style) + "-" + to_string(scheme) + "-" + (smoothing ? "smooth" : "raw");
}

ConvergenceVariant ConvergenceVariant::parse(std::string_view id) {
    for (auto style : {OptionStyle::european, OptionStyle::american}) {
        for (auto scheme : {SpatialScheme::compact, SpatialScheme::central}) {
            for (bool smooth : {true, false}) {
                ConvergenceVariant v{style, scheme, smooth};
                if (v.id() == id) return v;
            }
        }
    }
    throw ConfigError("unknown convergence variant '" + std::string(id) +
                          "' (expected <european|american>-<compact|central>-<smooth|raw>)",
                      "studies.variants");
}

GridSpec RunConfig::grid() const {
    if (M) return GridSpec(L, N, *M, market.T);
    return GridSpec::from_mesh_ratio(L, N, ratio, market.T);
}

GridSpec RunConfig::grid(int N_override) const { return GridSpec::from_mesh_ratio(L, N_override, ratio, market.T); }

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError("field '" + field + "': " + what, field);
}

void require_grid_N(int n, const std::string& field) {
    require(n >= 8 && n % 2 == 0, field, "N must be even and at least 8 (got " + std::to_string(n) + ")");
}

}  // namespace

void RunConfig::validate() const {
    try {
        market.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("invalid market parameters: ") + e.what(), "market");
    }
    require(L > 0.0, "grid.L", "L must be positive");
    require_grid_N(N, "grid.N");
    require(!M || *M >= 2, "grid.M", "M must be at least 2");
    require(ratio > 0.0, "grid.ratio", "mesh ratio must be positive");
    try {
        solver.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("invalid solver settings: ") + e.what(), "solver");
    }
    for (double S : spots) require(S > 0.0, "output.spots", "spot prices must be positive");

    const auto& s = studies;
    require_grid_N(s.reference_N, "studies.reference_N");
    for (int n : s.convergence_N) {
        require_grid_N(n, "studies.convergence_N");
        require(s.reference_N % n == 0 && s.reference_N > n, "studies.convergence_N",
                "every N must divide reference_N = " + std::to_string(s.reference_N));
    }
    for (int n : s.stability_N) {
        require_grid_N(n, "studies.stability_N");
        require(s.reference_N % n == 0 && s.reference_N > n, "studies.stability_N",
                "every N must divide reference_N = " + std::to_string(s.reference_N));
    }
    for (double r : s.stability_ratios) require(r > 0.0, "studies.stability_ratios", "ratios must be positive");
    require(s.dispersion_samples >= 2, "studies.dispersion_samples", "need at least 2 samples");
    require(s.amplification_samples >= 2, "studies.amplification_samples", "need at least 2 samples");
    for (const auto& t : s.tables) {
        require(t == "2" || t == "3" || t == "4" || t == "5", "studies.tables",
                "tables are \"2\", \"3\", \"4\" or \"5\" (got \"" + t + "\")");
    }
    require(s.table_tolerance > 0.0, "studies.table_tolerance", "tolerance must be positive");
    require(s.threads >= 0, "studies.threads", "threads must be non-negative");
}

namespace {

/// Line of the first occurrence of the dotted field path in the source text.
int locate_field(std::string_view text, const std::string& path) {
    if (text.empty()) return 0;
    std::size_t pos = 0;
    std::stringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '.')) {
        const auto bracket = part.find('[');
        if (bracket != std::string::npos) part.resize(bracket);
        const auto found = text.find("\"" + part + "\"", pos);
        if (found == std::string_view::npos) break;
        pos = found;
    }
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        const int line = locate_field(text_, path);
        std::string msg = "field '" + path + "': " + what;
        if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
        throw ConfigError(msg, path, line);
    }

    double number(const json& v, const std::string& path) const {
        if (!v.is_number()) fail(path, std::string("expected a number, got ") + v.type_name());
        return v.get<double>();
    }

    int integer(const json& v, const std::string& path) const {
        if (!v.is_number_integer()) fail(path, std::string("expected an integer, got ") + v.type_name());
        const auto i = v.get<long long>();
        if (i < -(1LL << 30) || i > (1LL << 30)) fail(path, "integer out of range");
        return static_cast<int>(i);
    }

    bool flag(const json& v, const std::string& path) const {
        if (v.is_boolean()) return v.get<bool>();
        if (v.is_string() && (v == "on" || v == "off")) return v == "on";
        fail(path, std::string("expected true/false or \"on\"/\"off\", got ") + v.dump());
    }

    std::string string(const json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, std::string("expected a string, got ") + v.type_name());
        return v.get<std::string>();
    }

    template <class T, class F>
    std::vector<T> list(const json& v, const std::string& path, F element) const {
        if (!v.is_array()) fail(path, std::string("expected an array, got ") + v.type_name());
        std::vector<T> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(element(v[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }

    using Handler = std::function<void(const json&, const std::string&)>;

    void object(const json& v, const std::string& path, const std::map<std::string, Handler>& fields) const {
        if (!v.is_object()) fail(path, std::string("expected an object, got ") + v.type_name());
        for (const auto& [key, value] : v.items()) {
            const std::string sub = path.empty() ? key : path + "." + key;
            auto it = fields.find(key);
            if (it == fields.end()) fail(sub, "unknown field");
            it->second(value, sub);
        }
    }

    template <class F>
    void guarded(const std::string& path, F f) const {
        try {
            f();
        } catch (const ConfigError& e) {
            if (e.line() > 0) throw;
            fail(e.field().empty() ? path : e.field(), e.what());
        }
    }

private:
    std::string_view text_;
};

}  // namespace

void apply_json(RunConfig& c, const json& doc, std::string_view text) {
    const Reader rd(text);
    auto num = [&rd](double& target) {
        return [&rd, t = &target](const json& v, const std::string& p) { *t = rd.number(v, p); };
    };
    auto integer = [&rd](int& target) {
        return [&rd, t = &target](const json& v, const std::string& p) { *t = rd.integer(v, p); };
    };
    auto ints = [&rd](std::vector<int>& target) {
        return [&rd, t = &target](const json& v, const std::string& p) {
            *t = rd.list<int>(v, p, [&rd](const json& e, const std::string& q) { return rd.integer(e, q); });
        };
    };
    auto nums = [&rd](std::vector<double>& target) {
        return [&rd, t = &target](const json& v, const std::string& p) {
            *t = rd.list<double>(v, p, [&rd](const json& e, const std::string& q) { return rd.number(e, q); });
        };
    };

    bool grid_ratio = false, grid_M = false;
    auto& m = c.market;
    auto& s = c.studies;
    rd.object(
        doc, "",
        {
            {"schema_version",
             [&](const json& v, const std::string& p) {
                 if (rd.integer(v, p) != kSchemaVersion) {
                     rd.fail(p, "unsupported schema version (this build reads " + std::to_string(kSchemaVersion) + ")");
                 }
             }},
            {"market",
             [&](const json& v, const std::string& p) {
                 rd.object(v, p,
                           {{"r", num(m.r)},
                            {"sigma", num(m.sigma)},
                            {"lambda", num(m.lambda)},
                            {"mu_J", num(m.mu_J)},
                            {"sigma_J", num(m.sigma_J)},
                            {"K", num(m.K)},
                            {"S0", num(m.S0)},
                            {"T", num(m.T)},
                            {"vol", [&](const json& e, const std::string& q) {
                                 rd.guarded(q, [&] { m.vol_mode = parse_vol_mode(rd.string(e, q)); });
                             }}});
             }},
            {"grid",
             [&](const json& v, const std::string& p) {
                 rd.object(v, p,
                           {{"L", num(c.L)},
                            {"N", integer(c.N)},
                            {"M",
                             [&](const json& e, const std::string& q) {
                                 grid_M = true;
                                 if (e.is_null()) {
                                     c.M.reset();
                                 } else {
                                     c.M = rd.integer(e, q);
                                 }
                             }},
                            {"ratio", [&](const json& e, const std::string& q) {
                                 grid_ratio = true;
                                 c.ratio = rd.number(e, q);
                             }}});
             }},
            {"solver",
             [&](const json& v, const std::string& p) {
                 rd.object(v, p,
                           {{"smoothing",
                             [&](const json& e, const std::string& q) { c.solver.smoothing = rd.flag(e, q); }},
                            {"epsilon", num(c.solver.epsilon_inner)},
                            {"max_inner_iterations", integer(c.solver.max_inner_iterations)},
                            {"stored_slices", integer(c.solver.stored_slices)},
                            {"scheme", [&](const json& e, const std::string& q) {
                                 const auto id = rd.string(e, q);
                                 if (id != "compact" && id != "central") {
                                     rd.fail(q, "scheme must be 'compact' or 'central'");
                                 }
                                 c.solver.scheme = id == "central" ? SpatialScheme::central : SpatialScheme::compact;
                             }}});
             }},
            {"output",
             [&](const json& v, const std::string& p) {
                 rd.object(v, p,
                           {{"dir", [&](const json& e, const std::string& q) { c.out_dir = rd.string(e, q); }},
                            {"spots", nums(c.spots)},
                            {"verbose", [&](const json& e, const std::string& q) { c.verbose = rd.flag(e, q); }}});
             }},
            {"studies",
             [&](const json& v, const std::string& p) {
                 rd.object(
                     v, p,
                     {{"convergence_N", ints(s.convergence_N)},
                      {"reference_N", integer(s.reference_N)},
                      {"variants",
                       [&](const json& e, const std::string& q) {
                           s.variants = rd.list<ConvergenceVariant>(e, q, [&](const json& x, const std::string& r) {
                               ConvergenceVariant out;
                               rd.guarded(r, [&] { out = ConvergenceVariant::parse(rd.string(x, r)); });
                               return out;
                           });
                       }},
                      {"stability_N", ints(s.stability_N)},
                      {"stability_ratios", nums(s.stability_ratios)},
                      {"dispersion_samples", integer(s.dispersion_samples)},
                      {"amplification_samples", integer(s.amplification_samples)},
                      {"tables",
                       [&](const json& e, const std::string& q) {
                           s.tables = rd.list<std::string>(e, q, [&](const json& x, const std::string& r) {
                               return x.is_number_integer() ? std::to_string(x.get<int>()) : rd.string(x, r);
                           });
                       }},
                      {"table_tolerance", num(s.table_tolerance)},
                      {"threads", integer(s.threads)}});
             }},
            // written by run manifests; carries no configuration
            {"run", [](const json&, const std::string&) {}},
        });
    if (grid_ratio && !grid_M) c.M.reset();
    c.solver.mesh_ratio = c.ratio;
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        throw ConfigError("line " + std::to_string(line) + ": JSON syntax error: " + e.what(), {}, line);
    }
    RunConfig c = base;
    apply_json(c, doc, text);
    return c;
}

RunConfig load_config_file(const std::string& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), base);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ":" + e.what(), e.field(), e.line());
    }
}

RunConfig resolve_config(const Overrides& o) {
    RunConfig c;
    if (o.config_path) c = load_config_file(*o.config_path, c);
    if (o.L) c.L = *o.L;
    if (o.N) c.N = *o.N;
    if (o.ratio) {
        c.ratio = *o.ratio;
        c.M.reset();
    }
    if (o.M) c.M = *o.M;
    if (o.smooth) c.solver.smoothing = *o.smooth;
    if (o.vol) c.market.vol_mode = *o.vol;
    if (o.out_dir) c.out_dir = *o.out_dir;
    if (o.tables) c.studies.tables = *o.tables;
    if (o.threads) c.studies.threads = *o.threads;
    if (o.verbose) c.verbose = true;
    c.solver.mesh_ratio = c.ratio;
    c.validate();
    return c;
}

json to_json(const RunConfig& c) {
    const auto& m = c.market;
    const auto& s = c.studies;
    json variants = json::array();
    for (const auto& v : s.variants) variants.push_back(v.id());
    return json{
        {"schema_version", kSchemaVersion},
        {"market",
         {{"r", m.r},
          {"sigma", m.sigma},
          {"lambda", m.lambda},
          {"mu_J", m.mu_J},
          {"sigma_J", m.sigma_J},
          {"K", m.K},
          {"S0", m.S0},
          {"T", m.T},
          {"vol", to_string(m.vol_mode)}}},
        {"grid", {{"L", c.L}, {"N", c.N}, {"M", c.M ? json(*c.M) : json(nullptr)}, {"ratio", c.ratio}}},
        {"solver",
         {{"smoothing", c.solver.smoothing},
          {"epsilon", c.solver.epsilon_inner},
          {"max_inner_iterations", c.solver.max_inner_iterations},
          {"stored_slices", c.solver.stored_slices},
          {"scheme", to_string(c.solver.scheme)}}},
        {"output", {{"dir", c.out_dir}, {"spots", c.spots}, {"verbose", c.verbose}}},
        {"studies",
         {{"convergence_N", s.convergence_N},
          {"reference_N", s.reference_N},
          {"variants", variants},
          {"stability_N", s.stability_N},
          {"stability_ratios", s.stability_ratios},
          {"dispersion_samples", s.dispersion_samples},
          {"amplification_samples", s.amplification_samples},
          {"tables", s.tables},
          {"table_tolerance", s.table_tolerance},
          {"threads", s.threads}}},
    };
}

}  // namespace mcfd::app
