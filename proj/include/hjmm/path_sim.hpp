#pragma once

#include <hjmm/grid.hpp>
#include <hjmm/levy_model.hpp>
#include <hjmm/volatility.hpp>

#include <cstdint>
#include <vector>

namespace hjmm {

class InitialCurve;

struct Jump {
    double time = 0.0;
    double size = 0.0;
};

/// One realization of L on [0, horizon]: L(t) = drift_rate * t + sum of jumps up to t.
/// For infinite-activity measures, jumps below truncation_eps are dropped and
/// the compensation of [eps, 1) is folded into drift_rate.
struct JumpPath {
    double horizon = 0.0;
    double drift_rate = 0.0;
    std::vector<Jump> jumps;  // strictly increasing times in (0, horizon]
    std::uint64_t seed = 0;
    double truncation_eps = 0.0;

    double L(double t) const;
};

/// Seed of path `index` in an ensemble; independent of how paths are
/// distributed over workers.
std::uint64_t path_seed(std::uint64_t master, std::uint64_t index);

/// Exact compound Poisson sampling of nu restricted to [eps, inf) (the whole
/// measure for point masses). Throws UnsupportedSpec for q > 0 or negative jumps.
JumpPath simulate_path(const LevyModelSpec& spec, double t_star, std::uint64_t seed, double eps);

/// int_0^t lambda~(s, t - s + x) dL(s); the drift part by composite trapezoid
/// with step <= ds, the jump part exactly.
double integrate_against_path(const VolatilitySpec& vol, const JumpPath& path, double t, double x,
                              double ds = 1.0 / 1024.0);

/// b~ on the grid in standard coordinates (t_i, T_j):
///   exp(c * int_0^t lambda(s, T) ds) * prod_{s_k <= t} (1 + lambda(s_k, T) dL_k),
/// with the ds-integral by trapezoid on the grid rows; cells T_j < t_i carry
/// the flat extension. Throws NonPositiveFactor if a jump factor is <= 0.
RateField field_b(const VolatilitySpec& vol, const JumpPath& path, const GridSpec& grid);

/// b~(t, T) at an arbitrary point; `left_limit` excludes a jump exactly at t.
double field_b_at(const VolatilitySpec& vol, const JumpPath& path, double t, double maturity, bool left_limit = false,
                  double ds = 1.0 / 1024.0);

/// a~(t, T) = r0(T) * b~(t, T). Throws NonPositiveInitialCurve if r0 <= 0 on a node.
RateField field_a(const InitialCurve& r0, const RateField& b_field, const GridSpec& grid);

}  // namespace hjmm
