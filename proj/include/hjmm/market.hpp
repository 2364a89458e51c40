#pragma once

#include <hjmm/grid.hpp>
#include <hjmm/initial_curve.hpp>
#include <hjmm/levy_model.hpp>
#include <hjmm/solver.hpp>
#include <hjmm/volatility.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace hjmm {

/// Bond prices from a field in standard coordinates. Cells with T_j < t_i are NaN.
struct BondSurface {
    RateField price;       // P(t, T) = exp(-int_t^T f(t, u) du)
    RateField discounted;  // P^(t, T) = exp(-int_0^T f(t, u) du) via the flat extension
    Eigen::VectorXd short_rate;
    /// max relative gap between P^ and exp(-int_0^t r ds) P(t, T).
    double product_form_gap = 0.0;
};

BondSurface bond_surface(const RateField& field, const GridSpec& grid);

/// Everything one Monte Carlo path needs.
struct PathModel {
    LevyModelSpec spec;
    VolatilitySpec vol;
    InitialCurve r0;
    GridSpec grid;
    SolverOptions solver;
    double eps = 1e-3;
};

struct Checkpoint {
    double t = 0.0;
    double maturity = 0.0;
};

/// {0.25, 0.5, 0.75} T* x {0.5, 0.75, 1} T_max.
std::vector<Checkpoint> default_checkpoints(const GridSpec& grid);

struct CheckpointStat {
    Checkpoint at;
    double reference = 0.0;  // P(0, T)
    double mean = 0.0;       // mean of P^(t, T) over paths
    double stddev = 0.0;
    /// (mean - reference) / (stddev / sqrt(n)); the raw deviation when n = 1,
    /// 0 when the sample has no spread.
    double z = 0.0;
    bool zero_variance = false;
    /// Control-variate estimate of E[P^(t, T)] and its standard error; the
    /// control is a predictable stochastic exponential with mean exactly 1.
    double cv_mean = 0.0;
    double cv_stderr = 0.0;
    double bias() const { return cv_mean - reference; }
};

struct MartingaleReport {
    std::vector<CheckpointStat> stats;
    std::size_t n_paths = 0;
    std::size_t excluded = 0;  // paths whose solve did not converge
    bool degenerate = false;   // fewer than two usable paths
    double max_abs_z = 0.0;
    /// mean over checkpoints of |cv_mean - P(0, T)|: the discretization bias,
    /// free of the Monte Carlo noise that dominates the plain deviation.
    double mean_abs_deviation = 0.0;
    /// mean over checkpoints of |mean - P(0, T)|.
    double mean_abs_raw_deviation = 0.0;

    double exclusion_fraction() const;
    /// all |z| <= z_limit, exclusions <= 1% and not degenerate.
    bool passed(double z_limit = 4.0) const;
};

/// Per path: simulate -> b~, a~ -> solve -> P^. Path k uses path_seed(master_seed, k);
/// results are reduced in path order, so the report does not depend on `threads`.
///
/// Alongside P^ each path yields the control
///   Y(t, T) = exp(-sum_k S_k (L(t_{k+1}) - L(t_k)) - delta sum_k J_eps(S_k)),
/// S_k = int_{t_k}^T lambda f(t_k, u) du from the solved field and J_eps the
/// exponent of the simulated (truncated) path. S_k is known at t_k, so Y is a
/// martingale with E Y = 1 whatever the grid; P^ - P(0,T)(Y - 1) has the mean
/// of P^ and a spread that vanishes with the step.
MartingaleReport martingale_test(const PathModel& model, std::size_t n_paths, std::uint64_t master_seed,
                                 const std::vector<Checkpoint>& checkpoints, unsigned threads = 1);

/// Runs fn(k) for k in [0, n) on `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

struct DriftIdentity {
    double left = 0.0;   // int_t^T J'(int_s^u sigma) sigma(u) du
    double right = 0.0;  // J(int_s^T sigma) - J(int_s^t sigma)
    double residual = 0.0;
};

/// sigma(s, u) = lambda(s, u) f(s, u) on row s; s <= t <= T grid nodes.
DriftIdentity drift_identity_check(const LevyExponent& exponent, const VolatilitySpec& vol, const RateField& field,
                                   const GridSpec& grid, double s, double t, double maturity);

}  // namespace hjmm
