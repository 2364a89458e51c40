#include <hjmm/solver.hpp>

#include <hjmm/error.hpp>
#include <hjmm/initial_curve.hpp>
#include <hjmm/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjmm {

FixedPointOperator::FixedPointOperator(const VolatilitySpec& vol, const LevyExponent& exponent, const GridSpec& grid)
    : exponent_(exponent), grid_(grid), lambda_(grid.zeros()) {
    for (Eigen::Index k = 0; k < lambda_.rows(); ++k)
        for (Eigen::Index j = k; j < lambda_.cols(); ++j) lambda_(k, j) = vol.standard(grid.time(k), grid.time(j));
}

RateField FixedPointOperator::inner_integral(const RateField& field) const {
    const double d = grid_.delta;
    RateField out = grid_.zeros();
    for (Eigen::Index k = 0; k < out.rows(); ++k) {
        double acc = 0.0;
        double prev = lambda_(k, k) * field(k, k);
        for (Eigen::Index j = k + 1; j < out.cols(); ++j) {
            const double cur = lambda_(k, j) * field(k, j);
            acc += 0.5 * d * (prev + cur);
            out(k, j) = acc;
            prev = cur;
        }
    }
    return out;
}

RateField FixedPointOperator::drift_exponent(const RateField& field) const {
    const RateField inner = inner_integral(field);
    const double d = grid_.delta;
    const Eigen::Index nt = inner.rows();
    const Eigen::Index nT = inner.cols();

    if (!inner.allFinite()) return RateField::Constant(nt, nT, std::numeric_limits<double>::infinity());

    RateField g = grid_.zeros();
    for (Eigen::Index k = 0; k < nt; ++k)
        for (Eigen::Index j = k; j < nT; ++j) g(k, j) = exponent_.derivative(inner(k, j)) * lambda_(k, j);

    RateField e = grid_.zeros();
    for (Eigen::Index i = 1; i < nt; ++i)
        for (Eigen::Index j = i; j < nT; ++j) e(i, j) = e(i - 1, j) + 0.5 * d * (g(i - 1, j) + g(i, j));
    return e;
}

RateField FixedPointOperator::apply(const RateField& field, const RateField& a_field) const {
    RateField out = (a_field.array() * drift_exponent(field).array().exp()).matrix();
    apply_flat_extension(out);
    return out;
}

RateField apply_K(const RateField& field, const RateField& a_field, const VolatilitySpec& vol,
                  const LevyExponent& exponent, const GridSpec& grid) {
    return FixedPointOperator(vol, exponent, grid).apply(field, a_field);
}

std::string to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::Converged: return "Converged";
        case SolverStatus::Exploded: return "Exploded";
        case SolverStatus::MaxIterations: return "MaxIterations";
    }
    return "MaxIterations";
}

SolverReport solve_fixed_point(const RateField& a_field, const VolatilitySpec& vol, const LevyExponent& exponent,
                               const GridSpec& grid, const SolverOptions& options) {
    const FixedPointOperator op(vol, exponent, grid);
    SolverReport rep;
    RateField h = options.start ? *options.start : grid.zeros();
    if (h.rows() != a_field.rows() || h.cols() != a_field.cols())
        throw Error(ErrorCode::DomainError, "solver start field does not match the grid");

    for (int n = 1; n <= options.max_iter; ++n) {
        RateField next = op.apply(h, a_field);
        rep.iterations = n;
        if (!next.allFinite()) {
            const double inf = std::numeric_limits<double>::infinity();
            rep.sup_norm_trace.push_back(inf);
            rep.l2_gamma_trace.push_back(inf);
            rep.h1_gamma_trace.push_back(inf);
            rep.status = SolverStatus::Exploded;
            rep.final_field = std::move(next);
            return rep;
        }
        const WeightedNorms norms = sup_norms(next, grid);
        rep.sup_norm_trace.push_back(norms.sup);
        rep.l2_gamma_trace.push_back(norms.l2_gamma);
        rep.h1_gamma_trace.push_back(norms.h1_gamma);
        const RateField step = next - h;
        rep.min_increment_trace.push_back(step.minCoeff());
        const double diff = step.cwiseAbs().maxCoeff();
        rep.difference_trace.push_back(diff);
        h = std::move(next);
        if (norms.l2_gamma > options.explosion_threshold) {
            rep.status = SolverStatus::Exploded;
            break;
        }
        if (diff < options.tol) {
            rep.status = SolverStatus::Converged;
            break;
        }
    }
    rep.final_field = std::move(h);
    return rep;
}

namespace {

double initial_norm(const InitialCurve& r0, const GridSpec& grid) {
    Eigen::VectorXd v(grid.maturity_nodes());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = r0(grid.time(j));
    return slice_norms(v, grid.delta, grid.gamma).l2_gamma;
}

}  // namespace

std::optional<double> a_priori_bound(const LevyExponent& exponent, const VolatilitySpec& vol, const InitialCurve& r0,
                                     double b_sup, const GridSpec& grid) {
    constexpr double kUpper = 1e12;
    const double base = b_sup * initial_norm(r0, grid);
    if (!(base > 0.0) || !std::isfinite(base) || base > kUpper) return std::nullopt;
    const double lb = vol.lambda_upper;
    const double scale = lb / std::sqrt(grid.gamma);
    auto slack = [&](double c) {
        return std::log(c) - lb * grid.t_star * exponent.derivative(scale * c) - std::log(base);
    };

    if (slack(base) >= 0.0) return base;
    double lo = base;
    double hi = base;
    bool found = false;
    while (hi < kUpper) {
        lo = hi;
        hi = std::min(2.0 * hi, kUpper);
        if (slack(hi) >= 0.0) {
            found = true;
            break;
        }
    }
    if (!found) return std::nullopt;
    for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slack(mid) >= 0.0 ? hi : lo) = mid;
    }
    return hi;
}

std::vector<double> gronwall_iterate(const RateField& d, double K, const GridSpec& grid, int n) {
    const double h = grid.delta;
    std::vector<double> out{d.cwiseAbs().maxCoeff()};
    RateField cur = d;
    for (int it = 0; it < n; ++it) {
        RateField rows(cur.rows(), cur.cols());
        for (Eigen::Index i = 0; i < cur.rows(); ++i) rows.row(i) = cumulative_trapezoid(cur.row(i).transpose(), h);
        for (Eigen::Index j = 0; j < cur.cols(); ++j) cur.col(j) = K * cumulative_trapezoid(rows.col(j), h);
        out.push_back(cur.cwiseAbs().maxCoeff());
    }
    return out;
}

double gronwall_closed_form(double M, double K, double u, double w, int n) {
    return M * std::pow(K * u * w, n) / std::pow(std::tgamma(n + 1.0), 2);
}

UniquenessReport uniqueness_contraction_check(const RateField& field1, const RateField& field2,
                                              const LevyExponent& exponent, const VolatilitySpec& vol,
                                              const InitialCurve& r0, double b_sup, const GridSpec& grid,
                                              double tol, int n) {
    double j2 = std::numeric_limits<double>::infinity();
    try {
        j2 = exponent.second_derivative(0.0);
    } catch (const Error&) {
    }
    if (!std::isfinite(j2))
        throw Error(ErrorCode::SecondMomentInfinite, "J''(0) = int y^2 nu(dy) is not finite; uniqueness check needs it");

    UniquenessReport rep;
    rep.n = n;
    const RateField d = (field1 - field2).cwiseAbs();
    rep.sup_distance = d.maxCoeff();

    double r0_star = 0.0;
    for (Eigen::Index j = 0; j < grid.maturity_nodes(); ++j) r0_star = std::max(r0_star, r0(grid.time(j)));
    const double lb = vol.lambda_upper;
    const double norm = std::max(sup_norms(field1, grid).l2_gamma, sup_norms(field2, grid).l2_gamma);
    const double jp_max =
        std::max(std::abs(exponent.derivative(0.0)), std::abs(exponent.derivative(lb * norm / std::sqrt(grid.gamma))));
    rep.K = r0_star * b_sup * std::exp(lb * grid.t_star * jp_max) * j2 * lb * lb;

    rep.iterated_sup = gronwall_iterate(d, rep.K, grid, n);
    rep.closed_form_bound = gronwall_closed_form(rep.sup_distance, rep.K, grid.t_star, grid.t_max, n);
    rep.passed = rep.sup_distance < tol;
    return rep;
}

StrongResidualReport strong_residual(const RateField& field, const VolatilitySpec& vol, const LevyExponent& exponent,
                                     const JumpPath& path, const InitialCurve& r0, const GridSpec& grid) {
    if (!vol.time_only()) throw Error(ErrorCode::NotTimeOnly, "strong residual needs lambda~(t, x) = lambda~(t)");

    StrongResidualReport rep;
    const double d = grid.delta;
    const Eigen::Index nt = grid.time_nodes();
    const Eigen::Index nT = grid.maturity_nodes();
    const double c = path.drift_rate;
    auto lam = [&](double t) { return vol.standard(t, t); };

    auto has_jump = [&](double a, double b) {
        return std::any_of(path.jumps.begin(), path.jumps.end(), [&](const Jump& j) { return j.time > a && j.time <= b; });
    };
    auto dx = [&](const Eigen::VectorXd& r, Eigen::Index k) {
        const Eigen::Index len = r.size();
        if (k == 0) return (-3.0 * r(0) + 4.0 * r(1) - r(2)) / (2.0 * d);
        if (k == len - 1) return (3.0 * r(k) - 4.0 * r(k - 1) + r(k - 2)) / (2.0 * d);
        return (r(k + 1) - r(k - 1)) / (2.0 * d);
    };

    // Between jumps.
    double sum = 0.0;
    for (Eigen::Index i = 0; i + 1 < nt; ++i) {
        const Eigen::Index len = nT - i;
        if (len < 4 || has_jump(grid.time(i), grid.time(i + 1))) continue;
        const Eigen::VectorXd r = musiela_slice(field, i).transpose();
        const Eigen::VectorXd r_next = musiela_slice(field, i + 1).transpose();
        const double l = lam(grid.time(i));
        const Eigen::VectorXd inner = cumulative_trapezoid((l * r).eval(), d);
        for (Eigen::Index k = 0; k + 1 < len; ++k) {
            const double rhs = dx(r, k) + exponent.derivative(inner(k)) * l * r(k) + l * c * r(k);
            const double res = std::abs((r_next(k) - r(k)) / d - rhs);
            rep.inter_jump_max = std::max(rep.inter_jump_max, res);
            sum += res;
            ++rep.inter_jump_samples;
        }
    }
    if (rep.inter_jump_samples > 0) rep.inter_jump_mean = sum / static_cast<double>(rep.inter_jump_samples);

    // At jumps: a~ and the drift exponent are continuous in t, so
    // r(s, x) / r(s-, x) is the ratio of b~ across the jump.
    for (const auto& jump : path.jumps) {
        if (jump.time > grid.t_star) break;
        const double target = 1.0 + lam(jump.time) * jump.size;
        for (Eigen::Index j = 0; j < nT; ++j) {
            const double maturity = grid.time(j);
            if (maturity < jump.time) continue;
            const double ratio =
                field_b_at(vol, path, jump.time, maturity) / field_b_at(vol, path, jump.time, maturity, true);
            rep.jump_max = std::max(rep.jump_max, std::abs(ratio - target));
        }
        ++rep.jumps_checked;
    }

    // d_x r = r [r0'/r0 + int_0^t J''(inner) lambda^2 f(s, t + x) ds] on a few rows.
    const FixedPointOperator op(vol, exponent, grid);
    const RateField inner = op.inner_integral(field);
    std::vector<Eigen::Index> rows{nt / 2, nt - 1};
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    for (Eigen::Index i : rows) {
        const Eigen::Index len = nT - i;
        if (len < 3) continue;
        const Eigen::VectorXd r = musiela_slice(field, i).transpose();
        const Eigen::Index stride = std::max<Eigen::Index>(1, len / 16);
        for (Eigen::Index k = 1; k + 1 < len; k += stride) {
            const Eigen::Index j = i + k;
            const double maturity = grid.time(j);
            Eigen::VectorXd integrand(i + 1);
            for (Eigen::Index m = 0; m <= i; ++m) {
                const double l = lam(grid.time(m));
                integrand(m) = exponent.second_derivative(inner(m, j)) * l * l * field(m, j);
            }
            const double formula = r(k) * (r0.derivative(maturity) / r0(maturity) + trapezoid(integrand, d));
            rep.dx_identity_max = std::max(rep.dx_identity_max, std::abs(dx(r, k) - formula));
        }
    }
    return rep;
}

}  // namespace hjmm
