#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace hjmm {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // difference between the last two refinement levels
    bool converged = false;
    int evaluations = 0;
};

namespace detail {

inline constexpr double kHalfPi = 1.57079632679489661923;

// Tanh-sinh stops at t = 5.8 where the distance to the endpoint is ~1e-250,
// enough to capture singularities as strong as y^-0.9. Exp-sinh stops at
// |t| = 4.5, i.e. x - a between ~1e-31 and ~1e30.
inline constexpr double kTanhSinhCutoff = 5.8;
inline constexpr double kExpSinhCutoff = 4.5;

}  // namespace detail

/// Tanh-sinh rule on [a, b]. Endpoints are never evaluated, so integrable
/// algebraic singularities at either end are handled. The rule is refined by
/// halving the step until two consecutive levels agree to `rel_tol` relative to
/// the integral of |f|. A non-negligible contribution from the outermost nodes
/// marks the result as not converged (the integrand is not integrable there).
template <class F>
QuadratureResult tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-13, int max_level = 9) {
    using detail::kHalfPi;
    QuadratureResult out;
    const double half = 0.5 * (b - a);
    if (!(half > 0.0)) {
        out.converged = (half == 0.0);
        return out;
    }

    double edge = 0.0;
    auto pair_term = [&](double t, double& abs_sum) {
        const double u = kHalfPi * std::sinh(t);
        const double e = std::exp(-2.0 * u);
        const double complement = 2.0 * e / (1.0 + e);
        const double w = kHalfPi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
        const double xl = a + half * complement;
        const double xr = b - half * complement;
        double s = 0.0;
        if (xl > a) {
            const double v = w * f(xl);
            s += v;
            abs_sum += std::abs(v);
            ++out.evaluations;
        }
        if (xr < b) {
            const double v = w * f(xr);
            s += v;
            abs_sum += std::abs(v);
            ++out.evaluations;
        }
        return s;
    };

    double abs_sum = kHalfPi * std::abs(f(a + half));
    double sum = kHalfPi * f(a + half);
    ++out.evaluations;
    const int k_max = static_cast<int>(detail::kTanhSinhCutoff);
    for (int k = 1; k <= k_max; ++k) sum += pair_term(static_cast<double>(k), abs_sum);

    double step = 1.0;
    double previous = half * step * sum;
    for (int level = 1; level <= max_level; ++level) {
        step *= 0.5;
        double t_last = 0.0;
        for (double t = step; t <= detail::kTanhSinhCutoff; t += 2.0 * step) {
            sum += pair_term(t, abs_sum);
            t_last = t;
        }
        {
            double dummy = 0.0;
            edge = std::abs(half * step * pair_term(t_last, dummy));
        }
        const double current = half * step * sum;
        const double scale = half * step * abs_sum;
        out.value = current;
        out.error = std::abs(current - previous);
        if (!std::isfinite(current)) {
            out.converged = false;
            return out;
        }
        if (level >= 3 && out.error <= rel_tol * scale && edge <= 1e3 * rel_tol * scale + 1e-300) {
            out.converged = true;
            return out;
        }
        previous = current;
    }
    out.converged = false;
    return out;
}

/// Exp-sinh rule on [a, +inf). Same refinement and edge test as tanh_sinh; a
/// slowly decaying tail shows up as a large contribution from the outermost
/// node and is reported as not converged.
template <class F>
QuadratureResult exp_sinh(F&& f, double a, double rel_tol = 1e-13, int max_level = 9) {
    using detail::kHalfPi;
    QuadratureResult out;
    auto term = [&](double t) {
        const double g = std::exp(kHalfPi * std::sinh(t));
        const double w = kHalfPi * std::cosh(t) * g;
        const double x = a + g;
        if (!(x > a) || !std::isfinite(x)) return 0.0;
        ++out.evaluations;
        return w * f(x);
    };

    const double cutoff = detail::kExpSinhCutoff;
    const int k_max = static_cast<int>(cutoff);
    double sum = term(0.0);
    double abs_sum = std::abs(sum);
    for (int k = 1; k <= k_max; ++k) {
        const double lo = term(-static_cast<double>(k));
        const double hi = term(static_cast<double>(k));
        sum += lo + hi;
        abs_sum += std::abs(lo) + std::abs(hi);
    }

    double step = 1.0;
    double previous = step * sum;
    for (int level = 1; level <= max_level; ++level) {
        step *= 0.5;
        double t_last = 0.0;
        for (double t = step; t <= cutoff; t += 2.0 * step) {
            const double lo = term(-t);
            const double hi = term(t);
            sum += lo + hi;
            abs_sum += std::abs(lo) + std::abs(hi);
            t_last = t;
        }
        const double edge = step * (std::abs(term(t_last)) + std::abs(term(-t_last)));
        const double current = step * sum;
        const double scale = step * abs_sum;
        out.value = current;
        out.error = std::abs(current - previous);
        if (!std::isfinite(current)) {
            out.converged = false;
            return out;
        }
        if (level >= 3 && out.error <= rel_tol * scale && edge <= 1e3 * rel_tol * scale + 1e-300) {
            out.converged = true;
            return out;
        }
        previous = current;
    }
    out.converged = false;
    return out;
}

/// Composite trapezoid of uniformly spaced samples.
template <class Derived>
double trapezoid(const Eigen::MatrixBase<Derived>& v, double dx) {
    const Eigen::Index n = v.size();
    if (n < 2) return 0.0;
    return dx * (v.sum() - 0.5 * (v(0) + v(n - 1)));
}

/// Running composite trapezoid: out(k) = integral from sample 0 to sample k.
template <class Derived>
Eigen::VectorXd cumulative_trapezoid(const Eigen::MatrixBase<Derived>& v, double dx) {
    const Eigen::Index n = v.size();
    Eigen::VectorXd out(n);
    if (n == 0) return out;
    out(0) = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) out(k) = out(k - 1) + 0.5 * dx * (v(k - 1) + v(k));
    return out;
}

}  // namespace hjmm
