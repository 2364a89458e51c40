#include <hjmm/commands.hpp>

#include <hjmm/config.hpp>
#include <hjmm/error.hpp>
#include <hjmm/io.hpp>
#include <hjmm/market.hpp>
#include <hjmm/norms.hpp>
#include <hjmm/path_sim.hpp>
#include <hjmm/quadrature.hpp>
#include <hjmm/solver.hpp>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string_view>

namespace hjmm {

using nlohmann::json;

void init_logging() {
    auto logger = spdlog::stderr_color_mt("hjmm");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("HJMM_LOG");
    auto level = spdlog::level::warn;
    if (env && *env) {
        // from_str maps unknown names to off; keep the default instead
        const auto parsed = spdlog::level::from_str(env);
        if (parsed != spdlog::level::off || std::string_view(env) == "off") level = parsed;
    }
    spdlog::set_level(level);
}

namespace {

struct Loaded {
    RunConfig cfg;
    std::string out_dir;
    std::uint64_t seed = 0;
};

std::optional<Loaded> load(const CliOptions& opt) {
    try {
        Loaded l{load_config(opt.config), {}, 0};
        l.out_dir = opt.out.value_or(l.cfg.outputs.dir);
        l.seed = opt.seed.value_or(l.cfg.mc.master_seed);
        spdlog::info("loaded {} (grid delta {}, T* {}, T_max {})", opt.config, l.cfg.grid.delta, l.cfg.grid.t_star,
                     l.cfg.grid.t_max);
        return l;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        std::cerr << e.what() << '\n';
        return std::nullopt;
    }
}

GrowthClassification classify(const RunConfig& cfg) {
    return classify_growth(cfg.levy, cfg.vol.lambda_upper, cfg.grid.t_star);
}

bool refuse_non_existence(const GrowthClassification& g, const CliOptions& opt, const char* what) {
    if (g.verdict == Verdict::ExistenceLogGrowth || opt.allow_explosive) return false;
    std::cerr << what << " refused: classifier verdict " << to_string(g.verdict) << " (rule " << to_string(g.rule_fired)
              << "); pass --allow-explosive to run anyway\n";
    return true;
}

struct PathSolve {
    JumpPath path;
    RateField b;
    RateField a;
    SolverReport report;
};

PathSolve solve_path(const RunConfig& cfg, const LevyExponent& exponent, const GridSpec& grid, const JumpPath& path,
                     const SolverOptions& options) {
    PathSolve out;
    out.path = path;
    out.b = field_b(cfg.vol, path, grid);
    out.a = field_a(cfg.r0, out.b, grid);
    out.report = solve_fixed_point(out.a, cfg.vol, exponent, grid, options);
    return out;
}

}  // namespace

int cmd_classify(const CliOptions& opt) {
    const auto loaded = load(opt);
    if (!loaded) return exit_code::kConfig;
    const RunConfig& cfg = loaded->cfg;

    const GrowthClassification g = classify(cfg);
    json doc = to_json(g);
    doc["family"] = family_name(cfg.levy.measure);
    doc["lambda_bar"] = cfg.vol.lambda_upper;
    doc["t_star"] = cfg.grid.t_star;
    doc["assumptions"] = to_json(check_assumptions(cfg.levy, cfg.vol, &cfg.r0, &cfg.grid));
    const std::string text = doc.dump(2) + '\n';
    std::cout << text;
    if (cfg.outputs.json) write_file(loaded->out_dir, "classification.json", text);

    switch (g.verdict) {
        case Verdict::ExistenceLogGrowth: return exit_code::kOk;
        case Verdict::ExplosionCubicLog: return exit_code::kExplosion;
        case Verdict::Indeterminate: return exit_code::kIndeterminate;
    }
    return exit_code::kIndeterminate;
}

int cmd_solve(const CliOptions& opt) {
    const auto loaded = load(opt);
    if (!loaded) return exit_code::kConfig;
    const RunConfig& cfg = loaded->cfg;
    const GridSpec& grid = cfg.grid;

    const GrowthClassification g = classify(cfg);
    if (refuse_non_existence(g, opt, "solve")) return exit_code::kConfig;

    try {
        const LevyExponent exponent(cfg.levy);
        const JumpPath path = simulate_path(cfg.levy, grid.t_star, path_seed(loaded->seed, 0), cfg.mc.eps);
        spdlog::info("path: {} jumps, drift rate {}", path.jumps.size(), path.drift_rate);
        PathSolve run = solve_path(cfg, exponent, grid, path, cfg.solver);
        if (g.verdict == Verdict::ExistenceLogGrowth)
            run.report.c1_bound = a_priori_bound(exponent, cfg.vol, cfg.r0, run.b.maxCoeff(), grid);
        spdlog::info("solver: {} after {} iterations", to_string(run.report.status), run.report.iterations);

        json doc = to_json(run.report);
        doc["classification"] = to_json(g);
        doc["b_sup"] = run.b.maxCoeff();
        if (cfg.outputs.json) {
            write_file(loaded->out_dir, "solver_report.json", doc.dump(2) + '\n');
            write_file(loaded->out_dir, "path.json", to_json(path).dump(2) + '\n');
        }
        if (cfg.outputs.csv && run.report.status == SolverStatus::Converged) {
            write_file(loaded->out_dir, "field_standard.csv",
                       field_csv(run.report.final_field, grid, Parametrization::Standard));
            write_file(loaded->out_dir, "field_musiela.csv",
                       field_csv(run.report.final_field, grid, Parametrization::Musiela));
        }
        std::cout << to_string(run.report.status) << " after " << run.report.iterations << " iterations\n";
        return run.report.status == SolverStatus::Converged ? exit_code::kOk : exit_code::kNotConverged;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        std::cerr << e.what() << '\n';
        return exit_code::kConfig;
    }
}

namespace {

struct Suite {
    std::string name;
    bool passed = true;
    bool skipped = false;
    json detail = json::object();
};

json to_json(const Suite& s) {
    return {{"name", s.name}, {"passed", s.passed}, {"skipped", s.skipped}, {"detail", s.detail}};
}

Suite skipped(std::string name, std::string why) {
    Suite s{std::move(name)};
    s.skipped = true;
    s.detail["reason"] = std::move(why);
    return s;
}

Suite exponent_suite(const LevyModelSpec& spec) {
    Suite s{"exponent_monotone"};
    double prev = exponent_derivative(spec, 0.0, 1);
    double worst_drop = 0.0;
    double min_second = exponent_derivative(spec, 0.0, 2);
    for (int k = 0; k <= 60; ++k) {
        const double z = std::pow(10.0, -3.0 + 0.1 * k);
        const double jp = exponent_derivative(spec, z, 1);
        worst_drop = std::max(worst_drop, prev - jp - 1e-12 * std::max(1.0, std::abs(jp)));
        min_second = std::min(min_second, exponent_derivative(spec, z, 2));
        prev = jp;
    }
    double worst_fd = 0.0;
    for (double z : {0.1, 1.0, 10.0, 50.0}) {
        const double h = 1e-4 * z;
        const double fd = (exponent(spec, z + h) - exponent(spec, z - h)) / (2.0 * h);
        const double jp = exponent_derivative(spec, z, 1);
        worst_fd = std::max(worst_fd, std::abs(fd - jp) / std::max(1.0, std::abs(jp)));
    }
    s.passed = worst_drop <= 0.0 && min_second >= -1e-14 && worst_fd <= 1e-6;
    s.detail = {{"max_decrease", std::max(0.0, worst_drop)}, {"min_second_derivative", min_second},
                {"max_fd_relative_error", worst_fd}};
    return s;
}

}  // namespace

int cmd_verify(const CliOptions& opt) {
    const auto loaded = load(opt);
    if (!loaded) return exit_code::kConfig;
    const RunConfig& cfg = loaded->cfg;
    const GridSpec& grid = cfg.grid;
    std::vector<Suite> suites;

    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            suites.push_back(body());
        } catch (const Error& e) {
            Suite s{name};
            s.passed = false;
            s.detail["error"] = e.what();
            suites.push_back(s);
        }
    };

    const GrowthClassification g = classify(cfg);
    guarded("exponent_monotone", [&] { return exponent_suite(cfg.levy); });

    std::optional<LevyExponent> exponent;
    std::optional<PathSolve> run;
    try {
        exponent.emplace(cfg.levy);
    } catch (const Error& e) {
        Suite s{"exponent_table"};
        s.passed = false;
        s.detail["error"] = e.what();
        suites.push_back(s);
    }

    if (exponent) {
        guarded("b_positivity", [&] {
            Suite s{"b_positivity"};
            double min_b = INFINITY;
            for (std::uint64_t k = 0; k < 5; ++k) {
                const JumpPath p = simulate_path(cfg.levy, grid.t_star, path_seed(loaded->seed, k), cfg.mc.eps);
                min_b = std::min(min_b, field_b(cfg.vol, p, grid).minCoeff());
            }
            s.passed = min_b > 0.0;
            s.detail["min_b"] = min_b;
            return s;
        });

        guarded("monotone_iterates", [&] {
            const JumpPath p = simulate_path(cfg.levy, grid.t_star, path_seed(loaded->seed, 0), cfg.mc.eps);
            run = solve_path(cfg, *exponent, grid, p, cfg.solver);
            Suite s{"monotone_iterates"};
            double worst = 0.0;
            for (double v : run->report.min_increment_trace) worst = std::min(worst, v);
            s.passed = worst >= -1e-12;
            s.detail = {{"min_increment", worst},
                        {"status", to_string(run->report.status)},
                        {"iterations", run->report.iterations}};
            return s;
        });
    }

    const bool converged = run && run->report.status == SolverStatus::Converged;
    if (run) {
        Suite s{"solve"};
        s.passed = converged || g.verdict != Verdict::ExistenceLogGrowth;
        s.detail = {{"status", to_string(run->report.status)}, {"verdict", to_string(g.verdict)}};
        suites.push_back(s);
    }

    if (!converged) {
        for (const char* name :
             {"norm_embeddings", "a_priori_bound", "uniqueness_two_start", "strong_residual", "drift_identity"})
            suites.push_back(skipped(name, "solver did not converge"));
    } else {
        const RateField& field = run->report.final_field;

        guarded("norm_embeddings", [&] {
            Suite s{"norm_embeddings"};
            double worst_l1 = -INFINITY, worst_sup = -INFINITY;
            for (Eigen::Index i = 0; i < grid.time_nodes(); ++i) {
                const auto slice = musiela_slice(field, i);
                const WeightedNorms n = row_norms(field, grid, i);
                const double scale = 1e-12 * std::max(1.0, n.h1_gamma);
                const double l1 = trapezoid(slice.transpose(), grid.delta);
                worst_l1 = std::max(worst_l1, l1 - n.l2_gamma / std::sqrt(grid.gamma) - n.embedding_slack - scale);
                worst_sup = std::max(worst_sup, n.sup - slice(0) - n.h1_gamma / std::sqrt(grid.gamma) - scale);
            }
            s.passed = worst_l1 <= 0.0 && worst_sup <= 0.0;
            s.detail = {{"max_integral_excess", worst_l1}, {"max_sup_excess", worst_sup}};
            return s;
        });

        guarded("a_priori_bound", [&] {
            if (g.verdict != Verdict::ExistenceLogGrowth) return skipped("a_priori_bound", "not in the existence regime");
            const auto c1 = a_priori_bound(*exponent, cfg.vol, cfg.r0, run->b.maxCoeff(), grid);
            if (!c1) return skipped("a_priori_bound", "no c1 found on [B ||r0||, 1e12]");
            Suite s{"a_priori_bound"};
            double worst = 0.0;
            for (double v : run->report.l2_gamma_trace) worst = std::max(worst, v);
            s.passed = worst <= *c1 * (1.0 + 1e-9);
            s.detail = {{"c1", *c1}, {"max_l2_gamma", worst}};
            return s;
        });

        guarded("uniqueness_two_start", [&] {
            const AssumptionReport a = check_assumptions(cfg.levy, cfg.vol);
            if (!a.second_moment_finite) return skipped("uniqueness_two_start", "second moment infinite");
            SolverOptions from_above = cfg.solver;
            from_above.start = RateField(2.0 * field);
            const SolverReport second = solve_fixed_point(run->a, cfg.vol, *exponent, grid, from_above);
            const UniquenessReport u = uniqueness_contraction_check(field, second.final_field, *exponent, cfg.vol, cfg.r0,
                                                                    run->b.maxCoeff(), grid, 1e-6);
            Suite s{"uniqueness_two_start"};
            s.passed = second.status == SolverStatus::Converged && u.passed;
            s.detail = {{"sup_distance", u.sup_distance},
                        {"K", u.K},
                        {"iterated_sup", u.iterated_sup},
                        {"closed_form_bound", u.closed_form_bound},
                        {"second_start_status", to_string(second.status)}};
            return s;
        });

        // Both refinement suites share one solve on the halved grid.
        const GridSpec fine = grid.refined();
        std::optional<PathSolve> fine_run;
        auto fine_solve = [&]() -> const PathSolve& {
            if (!fine_run) fine_run = solve_path(cfg, *exponent, fine, run->path, cfg.solver);
            return *fine_run;
        };

        guarded("strong_residual", [&] {
            if (!cfg.vol.time_only()) return skipped("strong_residual", "volatility depends on x");
            const StrongResidualReport coarse = strong_residual(field, cfg.vol, *exponent, run->path, cfg.r0, grid);
            const PathSolve& f = fine_solve();
            const StrongResidualReport refined =
                strong_residual(f.report.final_field, cfg.vol, *exponent, f.path, cfg.r0, fine);
            Suite s{"strong_residual"};
            const bool tiny = coarse.inter_jump_max < 1e-10 && refined.inter_jump_max < 1e-10;
            const double ratio = coarse.inter_jump_max / refined.inter_jump_max;
            s.passed = f.report.status == SolverStatus::Converged && (tiny || ratio >= 1.5) &&
                       coarse.jump_max < 1e-10 && refined.jump_max < 1e-10;
            s.detail = {{"inter_jump_max", coarse.inter_jump_max},
                        {"inter_jump_max_refined", refined.inter_jump_max},
                        {"refinement_ratio", ratio},
                        {"jump_max", std::max(coarse.jump_max, refined.jump_max)},
                        {"jumps_checked", coarse.jumps_checked},
                        {"dx_identity_max", coarse.dx_identity_max}};
            return s;
        });

        guarded("drift_identity", [&] {
            Suite s{"drift_identity"};
            const PathSolve& f = fine_solve();
            json rows = json::array();
            bool ok = f.report.status == SolverStatus::Converged;
            const double s0 = 0.0;
            for (const auto& c : default_checkpoints(grid)) {
                const DriftIdentity a = drift_identity_check(*exponent, cfg.vol, field, grid, s0, c.t, c.maturity);
                const DriftIdentity b =
                    drift_identity_check(*exponent, cfg.vol, f.report.final_field, fine, s0, c.t, c.maturity);
                const double scale = std::max({std::abs(a.left), std::abs(a.right), 1.0});
                const bool tiny = a.residual <= 1e-12 * scale && b.residual <= 1e-12 * scale;
                ok = ok && (tiny || a.residual / b.residual >= 1.5);
                rows.push_back({{"t", c.t}, {"T", c.maturity}, {"residual", a.residual}, {"residual_refined", b.residual}});
            }
            s.passed = ok;
            s.detail["checkpoints"] = rows;
            return s;
        });
    }

    bool all = true;
    json doc = json::array();
    for (const auto& s : suites) {
        all = all && s.passed;
        doc.push_back(to_json(s));
        std::cout << (s.skipped ? "SKIP" : s.passed ? "PASS" : "FAIL") << "  " << s.name << '\n';
    }
    if (cfg.outputs.json) write_file(loaded->out_dir, "verify.json", json{{"suites", doc}, {"passed", all}}.dump(2) + '\n');
    return all ? exit_code::kOk : exit_code::kVerifyFailed;
}

int cmd_mc(const CliOptions& opt) {
    const auto loaded = load(opt);
    if (!loaded) return exit_code::kConfig;
    const RunConfig& cfg = loaded->cfg;

    const GrowthClassification g = classify(cfg);
    if (refuse_non_existence(g, opt, "mc")) return exit_code::kConfig;

    try {
        PathModel model{cfg.levy, cfg.vol, cfg.r0, cfg.grid, cfg.solver, cfg.mc.eps};
        const auto checkpoints = cfg.mc.checkpoints.empty() ? default_checkpoints(cfg.grid) : cfg.mc.checkpoints;
        const MartingaleReport rep = martingale_test(model, cfg.mc.n_paths, loaded->seed, checkpoints, opt.threads);
        const bool ok = rep.passed(cfg.mc.z_limit);

        if (cfg.outputs.csv) write_file(loaded->out_dir, "mc_zscores.csv", martingale_csv(rep));
        if (cfg.outputs.json) {
            json doc = to_json(rep);
            doc["z_limit"] = cfg.mc.z_limit;
            doc["passed"] = ok;
            write_file(loaded->out_dir, "mc_summary.json", doc.dump(2) + '\n');
        }
        std::cout << martingale_csv(rep);
        std::cout << (ok ? "PASS" : "FAIL") << " max|z| = " << format_number(rep.max_abs_z) << ", excluded "
                  << rep.excluded << '/' << rep.n_paths << (rep.degenerate ? " (degenerate)" : "") << '\n';
        return ok ? exit_code::kOk : exit_code::kMcFailed;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        std::cerr << e.what() << '\n';
        return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::UnsupportedSpec ? exit_code::kConfig
                                                                                            : exit_code::kMcFailed;
    }
}

}  // namespace hjmm
