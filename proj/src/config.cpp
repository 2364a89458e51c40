#include <hjmm/config.hpp>

#include <hjmm/error.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace hjmm {

namespace {

using nlohmann::json;

/// Collects diagnostics instead of stopping at the first one.
class Diagnostics {
public:
    void add(const std::string& where, const std::string& what) { items_.push_back(where + ": " + what); }
    bool empty() const { return items_.empty(); }
    [[noreturn]] void raise() const {
        std::string msg = "invalid config";
        for (const auto& s : items_) msg += "\n  " + s;
        throw Error(ErrorCode::ConfigError, msg);
    }

private:
    std::vector<std::string> items_;
};

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where, Diagnostics& diag) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        diag.add(where + "." + key, "has the wrong type");
        return fallback;
    }
}

template <class T>
T require(const json& obj, const char* key, const std::string& where, Diagnostics& diag) {
    if (!obj.is_object() || !obj.contains(key)) {
        diag.add(where + "." + key, "is required");
        return T{};
    }
    return get_or<T>(obj, key, T{}, where, diag);
}

std::vector<std::pair<double, double>> pairs(const json& arr, const std::string& where, Diagnostics& diag) {
    std::vector<std::pair<double, double>> out;
    if (!arr.is_array()) {
        diag.add(where, "must be an array of [a, b] pairs");
        return out;
    }
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const json& p = arr[k];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            diag.add(where + "[" + std::to_string(k) + "]", "must be a pair of numbers");
            continue;
        }
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
}

Profile parse_profile(const json& obj, const std::string& where, Diagnostics& diag) {
    if (obj.is_number()) return Profile::constant(obj.get<double>());
    if (!obj.is_object()) {
        diag.add(where, "must be a number or a profile object");
        return Profile::constant(1.0);
    }
    const auto kind = require<std::string>(obj, "kind", where, diag);
    if (kind == "constant") return Profile::constant(require<double>(obj, "value", where, diag));
    if (kind == "affine")
        return Profile::affine(require<double>(obj, "c0", where, diag), require<double>(obj, "c1", where, diag));
    if (kind == "exponential_decay")
        return Profile::exponential_decay(require<double>(obj, "c0", where, diag), require<double>(obj, "c1", where, diag),
                                          require<double>(obj, "k", where, diag));
    if (!kind.empty()) diag.add(where + ".kind", "unknown profile kind '" + kind + "'");
    return Profile::constant(1.0);
}

MeasureFamily parse_measure(const json& obj, const std::string& where, Diagnostics& diag) {
    if (!obj.is_object()) return PointMasses{};
    const auto family = require<std::string>(obj, "family", where, diag);
    if (family == "none") return PointMasses{};
    if (family == "point_masses") {
        PointMasses p;
        for (const auto& [y, c] : pairs(obj.value("atoms", json::array()), where + ".atoms", diag)) p.atoms.push_back({y, c});
        return p;
    }
    if (family == "stable_like")
        return StableLike{get_or(obj, "c", 1.0, where, diag), require<double>(obj, "alpha", where, diag),
                          get_or(obj, "y_max", 1.0, where, diag)};
    if (family == "gamma_like") return GammaLike{get_or(obj, "c", 1.0, where, diag), get_or(obj, "beta", 1.0, where, diag)};
    if (family == "user_density") {
        auto nodes = pairs(obj.value("nodes", json::array()), where + ".nodes", diag);
        try {
            return UserDensity(std::move(nodes), get_or(obj, "certified", false, where, diag));
        } catch (const Error& e) {
            diag.add(where + ".nodes", e.what());
            return PointMasses{};
        }
    }
    if (!family.empty()) diag.add(where + ".family", "unknown family '" + family + "'");
    return PointMasses{};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");

    Diagnostics diag;
    RunConfig cfg;
    cfg.version = require<int>(doc, "version", "$", diag);
    if (doc.contains("version") && cfg.version != kConfigVersion)
        diag.add("$.version", "unsupported version " + std::to_string(cfg.version));

    auto section = [&](const char* key) {
        const json v = doc.value(key, json::object());
        if (!v.is_object()) {
            diag.add(std::string("$.") + key, "must be an object");
            return json::object();
        }
        return v;
    };
    const json levy = section("levy");
    if (!doc.contains("levy")) diag.add("$.levy", "is required");
    cfg.levy.drift_a = get_or(levy, "drift_a", 0.0, "$.levy", diag);
    cfg.levy.gaussian_q = get_or(levy, "gaussian_q", 0.0, "$.levy", diag);
    cfg.levy.subordinator_flag = get_or(levy, "subordinator", false, "$.levy", diag);
    cfg.levy.measure = parse_measure(levy.value("measure", json::object()), "$.levy.measure", diag);

    const json grid = section("grid");
    cfg.grid.delta = get_or(grid, "delta", cfg.grid.delta, "$.grid", diag);
    cfg.grid.t_star = get_or(grid, "t_star", cfg.grid.t_star, "$.grid", diag);
    cfg.grid.t_max = get_or(grid, "t_max", cfg.grid.t_max, "$.grid", diag);
    cfg.grid.gamma = get_or(grid, "gamma", cfg.grid.gamma, "$.grid", diag);
    bool grid_ok = true;
    try {
        cfg.grid.validate();
    } catch (const Error& e) {
        diag.add("$.grid", e.what());
        grid_ok = false;
    }

    const json vol = section("volatility");
    if (!doc.contains("volatility")) diag.add("$.volatility", "is required");
    const json terms = vol.value("terms", json::array());
    if (!terms.is_array() || terms.empty()) diag.add("$.volatility.terms", "needs at least one term");
    for (std::size_t k = 0; terms.is_array() && k < terms.size(); ++k) {
        const std::string where = "$.volatility.terms[" + std::to_string(k) + "]";
        if (!terms[k].is_object()) {
            diag.add(where, "must be an object with 'time' and 'maturity' profiles");
            continue;
        }
        cfg.vol.terms.push_back({parse_profile(terms[k].value("time", json(1.0)), where + ".time", diag),
                                 parse_profile(terms[k].value("maturity", json(1.0)), where + ".maturity", diag)});
    }
    // Bounds left out are taken from the grid samples.
    if (grid_ok && !cfg.vol.terms.empty()) {
        double lo = INFINITY, hi = -INFINITY, dmax = 0.0;
        for (Eigen::Index i = 0; i < cfg.grid.time_nodes(); ++i)
            for (Eigen::Index j = i; j < cfg.grid.maturity_nodes(); ++j) {
                const double t = cfg.grid.time(i), x = cfg.grid.time(j) - t;
                lo = std::min(lo, cfg.vol(t, x));
                hi = std::max(hi, cfg.vol(t, x));
                dmax = std::max(dmax, std::abs(cfg.vol.dx(t, x)));
            }
        cfg.vol.lambda_lower = get_or(vol, "lambda_lower", lo, "$.volatility", diag);
        cfg.vol.lambda_upper = get_or(vol, "lambda_upper", hi, "$.volatility", diag);
        cfg.vol.x_derivative_bound = get_or(vol, "x_derivative_bound", dmax, "$.volatility", diag);
        try {
            validate_on_grid(cfg.vol, cfg.grid);
        } catch (const Error& e) {
            diag.add("$.volatility", e.what());
        }
    }

    if (!doc.contains("initial_curve")) diag.add("$.initial_curve", "is required");
    const json curve = doc.value("initial_curve", json::object());
    if (curve.is_object() && curve.value("kind", "") == "table") {
        try {
            cfg.r0 = InitialCurve(CurveTable{pairs(curve.value("points", json::array()), "$.initial_curve.points", diag)});
        } catch (const Error& e) {
            diag.add("$.initial_curve.points", e.what());
        }
    } else if (doc.contains("initial_curve")) {
        cfg.r0 = parse_profile(curve, "$.initial_curve", diag);
    }

    const json solver = section("solver");
    cfg.solver.tol = get_or(solver, "tol", cfg.solver.tol, "$.solver", diag);
    cfg.solver.max_iter = get_or(solver, "max_iter", cfg.solver.max_iter, "$.solver", diag);
    cfg.solver.explosion_threshold = get_or(solver, "explosion_threshold", cfg.solver.explosion_threshold, "$.solver", diag);
    if (!(cfg.solver.tol > 0.0)) diag.add("$.solver.tol", "must be positive");
    if (cfg.solver.max_iter < 1) diag.add("$.solver.max_iter", "must be >= 1");
    if (!(cfg.solver.explosion_threshold > 0.0)) diag.add("$.solver.explosion_threshold", "must be positive");

    const json mc = section("mc");
    cfg.mc.n_paths = get_or<std::size_t>(mc, "n_paths", cfg.mc.n_paths, "$.mc", diag);
    cfg.mc.master_seed = get_or<std::uint64_t>(mc, "master_seed", cfg.mc.master_seed, "$.mc", diag);
    cfg.mc.eps = get_or(mc, "eps", cfg.mc.eps, "$.mc", diag);
    cfg.mc.z_limit = get_or(mc, "z_limit", cfg.mc.z_limit, "$.mc", diag);
    if (mc.contains("checkpoints"))
        for (const auto& [t, T] : pairs(mc["checkpoints"], "$.mc.checkpoints", diag)) {
            if (!(t >= 0.0 && t <= cfg.grid.t_star && t <= T && T <= cfg.grid.t_max))
                diag.add("$.mc.checkpoints", "need 0 <= t <= T* and t <= T <= T_max");
            cfg.mc.checkpoints.push_back({t, T});
        }
    if (cfg.mc.n_paths < 1) diag.add("$.mc.n_paths", "must be >= 1");
    if (!is_finite_activity(cfg.levy) && !(cfg.mc.eps > 0.0 && cfg.mc.eps < 1.0))
        diag.add("$.mc.eps", "must lie in (0, 1) for infinite-activity measures");

    const json outputs = section("outputs");
    cfg.outputs.dir = get_or(outputs, "dir", cfg.outputs.dir, "$.outputs", diag);
    cfg.outputs.csv = get_or(outputs, "csv", cfg.outputs.csv, "$.outputs", diag);
    cfg.outputs.json = get_or(outputs, "json", cfg.outputs.json, "$.outputs", diag);

    if (diag.empty()) {
        const AssumptionReport rep = check_assumptions(cfg.levy, cfg.vol, &cfg.r0, &cfg.grid);
        for (const auto& failure : rep.failures()) diag.add("assumption", failure);
    }
    if (!diag.empty()) diag.raise();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace hjmm
