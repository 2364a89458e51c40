#pragma once

#include <vector>

namespace hjmm {

struct GridSpec;

/// One-dimensional building block for volatility factors and initial curves:
/// constant c0, affine c0 + c1 u, or exponential decay c0 + c1 exp(-k u).
struct Profile {
    enum class Kind { Constant, Affine, ExponentialDecay };

    Kind kind = Kind::Constant;
    double c0 = 0.0;
    double c1 = 0.0;
    double k = 0.0;

    static Profile constant(double v) { return {Kind::Constant, v, 0.0, 0.0}; }
    static Profile affine(double c0, double c1) { return {Kind::Affine, c0, c1, 0.0}; }
    static Profile exponential_decay(double c0, double c1, double k) {
        return {Kind::ExponentialDecay, c0, c1, k};
    }

    double operator()(double u) const;
    double derivative(double u) const;
    /// Bounded on [0, inf).
    bool bounded() const;
    bool is_constant() const;
};

/// lambda~(t, x) = sum_n time_n(t) * maturity_n(t + x).
struct VolTerm {
    Profile time_factor;
    Profile maturity_factor;
};

struct VolatilitySpec {
    std::vector<VolTerm> terms;
    double lambda_lower = 0.0;
    double lambda_upper = 0.0;
    double x_derivative_bound = 0.0;

    /// Musiela form lambda~(t, x).
    double operator()(double t, double x) const { return standard(t, t + x); }
    /// Standard form lambda(t, T) = lambda~(t, T - t).
    double standard(double t, double maturity) const;
    /// d lambda~ / dx at (t, x).
    double dx(double t, double x) const;
    /// lambda~ depends on t only.
    bool time_only() const;
};

/// Checks lambda_lower <= lambda~ <= lambda_upper and |d lambda~/dx| <=
/// x_derivative_bound on every node (t_i, T_j >= t_i) of the grid. Throws
/// DomainError naming the first violation.
void validate_on_grid(const VolatilitySpec& vol, const GridSpec& grid);

}  // namespace hjmm
