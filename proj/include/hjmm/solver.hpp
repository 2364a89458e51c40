#pragma once

#include <hjmm/grid.hpp>
#include <hjmm/levy_model.hpp>
#include <hjmm/norms.hpp>
#include <hjmm/path_sim.hpp>
#include <hjmm/volatility.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hjmm {

class InitialCurve;

/// The map h -> K h of the fixed-point form, in standard coordinates:
///   (K h)(t, T) = a(t, T) exp( int_0^t J'( int_s^T lambda(s,u) h(s,u) du ) lambda(s,T) ds ),
/// both integrals by trapezoid on the grid. lambda is sampled once at
/// construction so repeated application costs O(rows * cols) J' evaluations.
class FixedPointOperator {
public:
    FixedPointOperator(const VolatilitySpec& vol, const LevyExponent& exponent, const GridSpec& grid);

    RateField apply(const RateField& field, const RateField& a_field) const;

    /// inner(k, j) = int_{s_k}^{T_j} lambda h du for j >= k.
    RateField inner_integral(const RateField& field) const;
    /// E(i, j) = int_0^{t_i} J'(inner) lambda ds for j >= i; zero below the diagonal.
    RateField drift_exponent(const RateField& field) const;

    const RateField& lambda() const { return lambda_; }
    const LevyExponent& exponent() const { return exponent_; }
    const GridSpec& grid() const { return grid_; }

private:
    const LevyExponent& exponent_;
    GridSpec grid_;
    RateField lambda_;
};

RateField apply_K(const RateField& field, const RateField& a_field, const VolatilitySpec& vol,
                  const LevyExponent& exponent, const GridSpec& grid);

enum class SolverStatus { Converged, Exploded, MaxIterations };
std::string to_string(SolverStatus s);

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 200;
    double explosion_threshold = 1e6;
    /// Starting field; h0 = 0 when empty.
    std::optional<RateField> start;
};

struct SolverReport {
    SolverStatus status = SolverStatus::MaxIterations;
    int iterations = 0;
    std::vector<double> sup_norm_trace;
    std::vector<double> l2_gamma_trace;
    std::vector<double> h1_gamma_trace;
    /// min over nodes of h_{n+1} - h_n per iteration (>= 0 for a monotone run from 0).
    std::vector<double> min_increment_trace;
    /// sup |h_{n+1} - h_n| per iteration.
    std::vector<double> difference_trace;
    RateField final_field;
    std::optional<double> c1_bound;
};

SolverReport solve_fixed_point(const RateField& a_field, const VolatilitySpec& vol, const LevyExponent& exponent,
                               const GridSpec& grid, const SolverOptions& options = {});

/// Smallest c1 found with ln(B ||r0||) <= ln c1 - lambda_bar T* J'(lambda_bar c1 / sqrt(gamma)),
/// searched on [B ||r0||, 1e12]; nullopt if none. ||r0|| is the L2_gamma norm on [0, T_max].
std::optional<double> a_priori_bound(const LevyExponent& exponent, const VolatilitySpec& vol, const InitialCurve& r0,
                                     double b_sup, const GridSpec& grid);

/// n-fold application of (G d)(u, w) = K int_0^u int_0^w d(s, z) dz ds on the
/// standard grid (u = t, w = T). Returns sup of each iterate, index 0 = sup d.
std::vector<double> gronwall_iterate(const RateField& d, double K, const GridSpec& grid, int n);

/// M K^n (u w)^n / (n!)^2.
double gronwall_closed_form(double M, double K, double u, double w, int n);

struct UniquenessReport {
    double sup_distance = 0.0;
    double K = 0.0;
    int n = 0;
    std::vector<double> iterated_sup;
    double closed_form_bound = 0.0;
    bool passed = false;
};

/// Compares two fixed points. K = r0* B e^{lambda_bar T* max|J'|} J''(0) lambda_bar^2
/// with max|J'| over [0, lambda_bar max_i ||r_i|| / sqrt(gamma)]. Throws
/// SecondMomentInfinite when J''(0) is not finite.
UniquenessReport uniqueness_contraction_check(const RateField& field1, const RateField& field2,
                                              const LevyExponent& exponent, const VolatilitySpec& vol,
                                              const InitialCurve& r0, double b_sup, const GridSpec& grid,
                                              double tol, int n = 5);

struct StrongResidualReport {
    double inter_jump_max = 0.0;
    double inter_jump_mean = 0.0;
    std::size_t inter_jump_samples = 0;
    double jump_max = 0.0;
    std::size_t jumps_checked = 0;
    double dx_identity_max = 0.0;
};

/// Differential form of a solution for time-only lambda: forward time
/// differences against d_x r + J'(int_0^x lambda r) lambda r + lambda c r on
/// intervals free of jumps; the multiplicative jump relation; and the closed
/// form of d_x r. Throws NotTimeOnly if lambda depends on x.
StrongResidualReport strong_residual(const RateField& field, const VolatilitySpec& vol, const LevyExponent& exponent,
                                     const JumpPath& path, const InitialCurve& r0, const GridSpec& grid);

}  // namespace hjmm
