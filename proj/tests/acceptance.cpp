// One line per acceptance criterion; exit status is the number of failures.
#include "fixtures.hpp"

#include <hjmm/market.hpp>
#include <hjmm/norms.hpp>
#include <hjmm/path_sim.hpp>
#include <hjmm/quadrature.hpp>
#include <hjmm/solver.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

using namespace hjmm;
using namespace hjmm::test;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

unsigned workers() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

SolverReport solve_on_path(const LevyModelSpec& spec, const VolatilitySpec& vol, const InitialCurve& r0,
                           const GridSpec& g, const JumpPath& path, const LevyExponent& J, SolverOptions opt = {}) {
    const RateField b = field_b(vol, path, g);
    return solve_fixed_point(field_a(r0, b, g), vol, J, g, opt);
}

// r(t, x) = 1 + t + x solves the drift-only equation for any separable lambda.
Outcome closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    const GridSpec g = grid(1.0 / 64.0);
    const LevyModelSpec spec = drift_only(0.7);
    const VolatilitySpec vol = separable(Profile::affine(1.0, 0.5), Profile::exponential_decay(0.1, 0.4, 2.0), 0.1, 0.75);
    const LevyExponent J(spec);
    const JumpPath path = simulate_path(spec, g.t_star, path_seed(1, 0), 0.0);
    const SolverReport rep = solve_on_path(spec, vol, Profile::affine(1.0, 1.0), g, path, J);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < g.time_nodes(); ++i)
        for (Eigen::Index j = i; j < g.maturity_nodes(); ++j)
            worst = std::max(worst, std::abs(rep.final_field(i, j) - (1.0 + g.time(j))));
    const double secs = seconds_since(t0);
    const double limit = 5.0 * g.delta * g.delta;
    return {rep.status == SolverStatus::Converged && worst <= limit && secs < 10.0,
            fmt("max|r - (1+t+x)| = %.3e (limit %.3e), %.2f s", worst, limit, secs)};
}

Outcome monotone_iteration() {
    const GridSpec g = grid(1.0 / 64.0);
    const LevyModelSpec spec = gamma_subordinator();
    const VolatilitySpec vol = constant_vol(0.5);
    const LevyExponent J(spec);
    const InitialCurve r0 = Profile::exponential_decay(0.05, 0.05, 1.0);
    double worst = 0.0;
    int converged = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const JumpPath path = simulate_path(spec, g.t_star, path_seed(2024, k), 1e-3);
        const SolverReport rep = solve_on_path(spec, vol, r0, g, path, J);
        converged += rep.status == SolverStatus::Converged;
        for (double v : rep.min_increment_trace) worst = std::min(worst, v);
    }
    return {worst >= -1e-12 && converged == 20,
            fmt("min over runs of min(h_{n+1} - h_n) = %.3e, %d/20 converged", worst, converged)};
}

Outcome classifier_table() {
    const auto t0 = std::chrono::steady_clock::now();
    LevyModelSpec brownian = drift_only(0.0);
    brownian.gaussian_q = 1.0;
    brownian.subordinator_flag = false;
    const LevyModelSpec negative = point_masses({{-0.5, 1.0}});
    struct Row {
        const char* name;
        LevyModelSpec spec;
        Verdict want;
        double rho;  // NaN: not checked
    };
    const Row rows[] = {
        {"q=1", brownian, Verdict::ExplosionCubicLog, NAN},
        {"negative atom", negative, Verdict::ExplosionCubicLog, NAN},
        {"gamma subordinator", gamma_subordinator(), Verdict::ExistenceLogGrowth, NAN},
        {"stable 0.5", stable(0.5), Verdict::ExistenceLogGrowth, 1.5},
        {"stable 1.5", stable(1.5), Verdict::ExplosionCubicLog, 0.5},
    };
    int ok = 0;
    std::string misses;
    for (const auto& r : rows) {
        const GrowthClassification c = classify_growth(r.spec, 1.0, 1.0);
        bool good = c.verdict == r.want;
        if (!std::isnan(r.rho)) good = good && c.rho && std::abs(*c.rho - r.rho) < 1e-9;
        ok += good;
        if (!good) misses += std::string(" ") + r.name + "->" + to_string(c.verdict);
    }
    const double secs = seconds_since(t0);
    return {ok == 5 && secs < 1.0, fmt("%d/5 verdicts exact, %.3f s%s", ok, secs, misses.c_str())};
}

Outcome exponent_checks() {
    const LevyModelSpec spec = gamma_subordinator();
    const LevyExponent table(spec);
    double worst_j = 0.0;
    for (double z : {0.5, std::exp(1.0) - 1.0, 10.0}) {
        const double want = -std::log1p(z);
        worst_j = std::max({worst_j, std::abs(exponent(spec, z) - want) / std::abs(want),
                            std::abs(table.value(z) - want) / std::abs(want)});
    }
    double worst_fd = 0.0;
    for (int k = 0; k <= 40; ++k) {
        const double z = 0.1 * std::pow(500.0, k / 40.0);
        const double h = 1e-4 * z;
        const double d1 = (exponent(spec, z + h) - exponent(spec, z - h)) / (2 * h);
        const double d2 = (exponent_derivative(spec, z + h, 1) - exponent_derivative(spec, z - h, 1)) / (2 * h);
        const double j1 = exponent_derivative(spec, z, 1), j2 = exponent_derivative(spec, z, 2);
        worst_fd = std::max({worst_fd, std::abs(d1 - j1) / std::abs(j1), std::abs(d2 - j2) / std::abs(j2)});
    }
    return {worst_j <= 1e-8 && worst_fd <= 1e-6,
            fmt("max rel |J + ln(1+z)| = %.2e, max rel FD mismatch on [0.1, 50] = %.2e", worst_j, worst_fd)};
}

Outcome explosion() {
    const GridSpec g = grid(1.0 / 32.0);
    const LevyModelSpec spec = stable(1.5);
    const VolatilitySpec vol = constant_vol(1.0);
    const LevyExponent J(spec);
    SolverOptions opt;
    opt.max_iter = 50;
    opt.explosion_threshold = 1e6;
    int hits = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const JumpPath path = simulate_path(spec, g.t_star, path_seed(99, k), 1e-2);
        const SolverReport rep = solve_on_path(spec, vol, Profile::constant(100.0), g, path, J, opt);
        const auto& tr = rep.l2_gamma_trace;
        const bool monotone = std::is_sorted(tr.begin(), tr.end());
        const bool big = !tr.empty() && !(tr.back() <= 1e6);  // +inf counts
        hits += rep.status == SolverStatus::Exploded && monotone && big && rep.iterations <= 50;
    }
    return {hits >= 18, fmt("%d/20 seeds with monotone L2-gamma growth past 1e6 within 50 iterations", hits)};
}

Outcome uniqueness() {
    const GridSpec g = grid(1.0 / 64.0);
    const LevyModelSpec spec = gamma_subordinator();
    const VolatilitySpec vol = constant_vol(0.5);
    const LevyExponent J(spec);
    const InitialCurve r0 = Profile::constant(0.1);
    const JumpPath path = simulate_path(spec, g.t_star, path_seed(7, 0), 1e-3);
    const RateField b = field_b(vol, path, g);
    const RateField a = field_a(r0, b, g);
    const SolverReport low = solve_fixed_point(a, vol, J, g);
    SolverOptions high;
    high.start = RateField(2.0 * low.final_field);
    const SolverReport up = solve_fixed_point(a, vol, J, g, high);
    const UniquenessReport u = uniqueness_contraction_check(low.final_field, up.final_field, J, vol, r0, b.maxCoeff(), g, 1e-6);

    // Synthetic d = M: n-fold rectangle majorant is M K^n (uw)^n / (n!)^2.
    const double M = 1.0, K = 1.0;
    const auto sups = gronwall_iterate(RateField::Constant(g.time_nodes(), g.maturity_nodes(), M), K, g, 5);
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
        const double want = gronwall_closed_form(M, K, g.t_star, g.t_max, n);
        worst = std::max(worst, std::abs(sups[n] - want) / want);
    }
    const bool ok = low.status == SolverStatus::Converged && up.status == SolverStatus::Converged && u.passed &&
                    worst < 1e-2;
    return {ok, fmt("two-start sup distance %.2e, Gronwall iterate vs closed form max rel err %.2e", u.sup_distance,
                    worst)};
}

Outcome martingale() {
    const auto t0 = std::chrono::steady_clock::now();
    PathModel model;
    model.spec = gamma_subordinator();
    model.vol = constant_vol(0.5);
    model.r0 = Profile::constant(0.1);
    model.eps = 1e-3;
    model.grid = grid(1.0 / 32.0);
    const auto cps = default_checkpoints(model.grid);
    const MartingaleReport coarse = martingale_test(model, 10000, 42, cps, workers());
    model.grid = grid(1.0 / 64.0);
    const MartingaleReport fine = martingale_test(model, 10000, 42, cps, workers());
    const double ratio = coarse.mean_abs_deviation / fine.mean_abs_deviation;
    const double secs = seconds_since(t0);
    return {coarse.passed(4.0) && ratio >= 1.5 && secs < 300.0,
            fmt("max|z| = %.2f, mean abs deviation %.2e -> %.2e (ratio %.2f), %.0f s on %u worker(s)", coarse.max_abs_z,
                coarse.mean_abs_deviation, fine.mean_abs_deviation, ratio, secs, workers())};
}

Outcome strong_solution() {
    const LevyModelSpec spec = gamma_subordinator();
    const VolatilitySpec vol = separable(Profile::affine(0.2, 0.1), Profile::constant(1.0), 0.2, 0.3);
    const LevyExponent J(spec);
    const InitialCurve r0 = Profile::exponential_decay(0.05, 0.03, 1.5);
    const GridSpec g = grid(1.0 / 64.0);
    const JumpPath path = simulate_path(spec, g.t_star, path_seed(11, 0), 1e-3);
    const SolverReport c = solve_on_path(spec, vol, r0, g, path, J);
    const SolverReport f = solve_on_path(spec, vol, r0, g.refined(), path, J);
    const StrongResidualReport rc = strong_residual(c.final_field, vol, J, path, r0, g);
    const StrongResidualReport rf = strong_residual(f.final_field, vol, J, path, r0, g.refined());
    const double ratio = rc.inter_jump_max / rf.inter_jump_max;
    const double jump = std::max(rc.jump_max, rf.jump_max);
    return {ratio >= 1.5 && jump < 1e-10 && rc.jumps_checked > 0,
            fmt("inter-jump residual %.2e -> %.2e (ratio %.2f), jump relation max %.1e over %zu jumps",
                rc.inter_jump_max, rf.inter_jump_max, ratio, jump, rc.jumps_checked)};
}

Outcome embeddings() {
    const GridSpec g = grid(1.0 / 64.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Eigen::Index n = g.maturity_nodes();
    int ok1 = 0, ok2 = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd h(n);
        const double amp = 10.0 * u(rng), rate = 3.0 * u(rng), rough = u(rng);
        for (Eigen::Index k = 0; k < n; ++k) h(k) = amp * std::exp(-rate * k * g.delta) * (1.0 - rough * u(rng));
        const WeightedNorms w = slice_norms(h, g.delta, g.gamma);
        const double rg = 1.0 / std::sqrt(g.gamma);
        ok1 += trapezoid(h, g.delta) <= rg * w.l2_gamma + w.embedding_slack + 1e-12 * w.l2_gamma;
        ok2 += h.maxCoeff() <= h(0) + rg * w.h1_gamma + 1e-12 * w.h1_gamma;
    }
    return {ok1 == 100 && ok2 == 100, fmt("integral bound %d/100, sup bound %d/100", ok1, ok2)};
}

Outcome b_identity() {
    const GridSpec g = grid(1.0 / 16.0);
    // Atom below 1 is compensated by a = 0.3 * 1.0, leaving zero drift.
    const LevyModelSpec spec = point_masses({{0.3, 1.0}, {1.5, 2.0}}, 0.3);
    const VolatilitySpec vol = separable(Profile::affine(1.0, 0.5), Profile::exponential_decay(0.2, 0.3, 1.0), 0.2, 0.75);
    double worst = 0.0, drift = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const JumpPath path = simulate_path(spec, g.t_star, path_seed(3, k), 0.0);
        drift = std::max(drift, std::abs(path.drift_rate));
        const RateField b = field_b(vol, path, g);
        for (Eigen::Index i = 0; i < g.time_nodes(); ++i)
            for (Eigen::Index j = i; j < g.maturity_nodes(); ++j) {
                double prod = 1.0;
                for (const Jump& jp : path.jumps)
                    if (jp.time <= g.time(i) * (1.0 + 1e-14)) prod *= 1.0 + vol.standard(jp.time, g.time(j)) * jp.size;
                worst = std::max(worst, std::abs(b(i, j) - prod) / prod);
            }
    }
    return {worst <= 1e-12 && drift == 0.0, fmt("max relative gap %.2e over 1000 paths", worst)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"deterministic closed form", closed_form},
        {"monotone iteration", monotone_iteration},
        {"classifier truth table", classifier_table},
        {"exponent cross-checks", exponent_checks},
        {"explosion demonstration", explosion},
        {"uniqueness two-start", uniqueness},
        {"martingale self-consistency", martingale},
        {"strong-solution residual", strong_solution},
        {"norm embeddings", embeddings},
        {"b-tilde product identity", b_identity},
    };
    int failures = 0, k = 0;
    for (const auto& [name, run] : criteria) {
        ++k;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %2d %-30s %s  %s\n", k, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
