#include <hjmm/market.hpp>

#include <hjmm/error.hpp>
#include <hjmm/path_sim.hpp>
#include <hjmm/quadrature.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace hjmm {

BondSurface bond_surface(const RateField& field, const GridSpec& grid) {
    const Eigen::Index nt = field.rows();
    const Eigen::Index nT = field.cols();
    const double d = grid.delta;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    BondSurface out;
    out.price = RateField::Constant(nt, nT, nan);
    out.discounted = RateField::Constant(nt, nT, nan);
    out.short_rate = field.diagonal().head(nt);
    const Eigen::VectorXd short_integral = cumulative_trapezoid(out.short_rate, d);

    for (Eigen::Index i = 0; i < nt; ++i) {
        const Eigen::VectorXd from_zero = cumulative_trapezoid(field.row(i).transpose(), d);
        for (Eigen::Index j = i; j < nT; ++j) {
            out.price(i, j) = std::exp(-(from_zero(j) - from_zero(i)));
            out.discounted(i, j) = std::exp(-from_zero(j));
            const double product = std::exp(-short_integral(i)) * out.price(i, j);
            out.product_form_gap =
                std::max(out.product_form_gap, std::abs(out.discounted(i, j) - product) / out.discounted(i, j));
        }
        out.price(i, i) = 1.0;
    }
    return out;
}

std::vector<Checkpoint> default_checkpoints(const GridSpec& grid) {
    std::vector<Checkpoint> out;
    for (double ft : {0.25, 0.5, 0.75})
        for (double fT : {0.5, 0.75, 1.0}) out.push_back({ft * grid.t_star, fT * grid.t_max});
    return out;
}

double MartingaleReport::exclusion_fraction() const {
    return n_paths == 0 ? 0.0 : static_cast<double>(excluded) / static_cast<double>(n_paths);
}

bool MartingaleReport::passed(double z_limit) const {
    return !degenerate && exclusion_fraction() <= 0.01 && max_abs_z <= z_limit;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

MartingaleReport martingale_test(const PathModel& model, std::size_t n_paths, std::uint64_t master_seed,
                                 const std::vector<Checkpoint>& checkpoints, unsigned threads) {
    const GridSpec& grid = model.grid;
    const LevyExponent exponent(model.spec);

    std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
    for (const auto& c : checkpoints) {
        const Eigen::Index i = grid.index_of(c.t);
        const Eigen::Index j = grid.index_of(c.maturity);
        if (i >= grid.time_nodes() || j < i)
            throw Error(ErrorCode::DomainError, "checkpoint needs t <= T* and t <= T");
        cells.emplace_back(i, j);
    }

    const FixedPointOperator op(model.vol, exponent, grid);
    Eigen::VectorXd r0_nodes(grid.maturity_nodes());
    for (Eigen::Index j = 0; j < r0_nodes.size(); ++j) r0_nodes(j) = model.r0(grid.time(j));
    const Eigen::VectorXd r0_integral = cumulative_trapezoid(r0_nodes, grid.delta);

    // One row of checkpoint values per path; NaN marks an excluded path.
    Eigen::MatrixXd values(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(cells.size()));
    Eigen::MatrixXd controlled(values.rows(), values.cols());
    parallel_for(n_paths, threads, [&](std::size_t k) {
        const JumpPath path = simulate_path(model.spec, grid.t_star, path_seed(master_seed, k), model.eps);
        const RateField a = field_a(model.r0, field_b(model.vol, path, grid), grid);
        const SolverReport rep = solve_fixed_point(a, model.vol, exponent, grid, model.solver);
        const auto row = static_cast<Eigen::Index>(k);
        if (rep.status != SolverStatus::Converged) {
            values.row(row).setConstant(std::numeric_limits<double>::quiet_NaN());
            controlled.row(row).setConstant(std::numeric_limits<double>::quiet_NaN());
            return;
        }
        const BondSurface bonds = bond_surface(rep.final_field, grid);
        const RateField inner = op.inner_integral(rep.final_field);

        std::vector<std::vector<Jump>> by_interval(static_cast<std::size_t>(grid.time_nodes() - 1));
        for (const auto& jump : path.jumps) {
            auto idx = static_cast<Eigen::Index>(std::ceil(jump.time / grid.delta - 1e-12)) - 1;
            by_interval[static_cast<std::size_t>(std::clamp<Eigen::Index>(idx, 0, grid.time_nodes() - 2))].push_back(jump);
        }
        auto j_eps = [&](double z) { return exponent.value(z) - small_jump_exponent(model.spec, path.truncation_eps, z); };
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto [i, j] = cells[c];
            double log_y = 0.0;
            for (Eigen::Index m = 0; m < i; ++m) {
                const auto& jumps = by_interval[static_cast<std::size_t>(m)];
                double phi = inner(m, j);
                double from = grid.time(m);
                // Between jumps phi is frozen; after each jump it takes the
                // jump's effect on row m into account, so it stays predictable.
                Eigen::VectorXd weighted;
                if (!jumps.empty()) weighted = (op.lambda().row(m).segment(m, j - m + 1).array() *
                                                rep.final_field.row(m).segment(m, j - m + 1).array()).matrix().transpose();
                for (const auto& jump : jumps) {
                    const double len = jump.time - from;
                    log_y -= phi * (path.drift_rate * len + jump.size) + len * j_eps(phi);
                    for (Eigen::Index u = 0; u < weighted.size(); ++u)
                        weighted(u) *= 1.0 + op.lambda()(m, m + u) * jump.size;
                    phi = trapezoid(weighted, grid.delta);
                    from = jump.time;
                }
                const double len = grid.time(m + 1) - from;
                log_y -= phi * path.drift_rate * len + len * j_eps(phi);
            }
            const double p_hat = bonds.discounted(i, j);
            const double reference = std::exp(-r0_integral(j));
            values(row, static_cast<Eigen::Index>(c)) = p_hat;
            controlled(row, static_cast<Eigen::Index>(c)) = p_hat - reference * std::expm1(log_y);
        }
    });

    MartingaleReport out;
    out.n_paths = n_paths;
    std::vector<Eigen::Index> used;
    for (Eigen::Index k = 0; k < values.rows(); ++k) {
        if (std::isnan(values(k, 0)))
            ++out.excluded;
        else
            used.push_back(k);
    }
    const double n = static_cast<double>(used.size());
    out.degenerate = used.size() < 2;

    for (std::size_t c = 0; c < cells.size(); ++c) {
        CheckpointStat st;
        st.at = checkpoints[c];
        st.reference = std::exp(-r0_integral(cells[c].second));
        const auto col = static_cast<Eigen::Index>(c);
        double sum = 0.0, cv_sum = 0.0;
        for (Eigen::Index k : used) {
            sum += values(k, col);
            cv_sum += controlled(k, col);
        }
        st.mean = used.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / n;
        st.cv_mean = used.empty() ? std::numeric_limits<double>::quiet_NaN() : cv_sum / n;
        double ss = 0.0, cv_ss = 0.0;
        for (Eigen::Index k : used) {
            const double e = values(k, col) - st.mean;
            const double e_cv = controlled(k, col) - st.cv_mean;
            ss += e * e;
            cv_ss += e_cv * e_cv;
        }
        if (used.size() >= 2) st.cv_stderr = std::sqrt(cv_ss / (n - 1.0) / n);
        const double deviation = st.mean - st.reference;
        if (used.size() < 2) {
            st.z = deviation;
        } else {
            st.stddev = std::sqrt(ss / (n - 1.0));
            const double se = st.stddev / std::sqrt(n);
            // Relative to the scale of P^, a spread at rounding level is no spread.
            if (se <= 1e-14 * std::max(1.0, std::abs(st.mean))) {
                st.zero_variance = true;
                st.z = 0.0;
            } else {
                st.z = deviation / se;
            }
        }
        out.max_abs_z = std::max(out.max_abs_z, std::abs(st.z));
        out.mean_abs_raw_deviation += std::abs(deviation) / static_cast<double>(cells.size());
        out.mean_abs_deviation += std::abs(st.bias()) / static_cast<double>(cells.size());
        out.stats.push_back(st);
    }
    return out;
}

DriftIdentity drift_identity_check(const LevyExponent& exponent, const VolatilitySpec& vol, const RateField& field,
                                   const GridSpec& grid, double s, double t, double maturity) {
    const Eigen::Index is = grid.index_of(s);
    const Eigen::Index it = grid.index_of(t);
    const Eigen::Index iT = grid.index_of(maturity);
    if (!(is <= it && it <= iT) || is >= grid.time_nodes())
        throw Error(ErrorCode::DomainError, "drift identity needs s <= t <= T with s <= T*");

    const Eigen::Index len = iT - is + 1;
    Eigen::VectorXd sigma(len);
    for (Eigen::Index k = 0; k < len; ++k) sigma(k) = vol.standard(s, grid.time(is + k)) * field(is, is + k);
    const Eigen::VectorXd inner = cumulative_trapezoid(sigma, grid.delta);

    const Eigen::Index from = it - is;
    Eigen::VectorXd integrand(len - from);
    for (Eigen::Index k = from; k < len; ++k) integrand(k - from) = exponent.derivative(inner(k)) * sigma(k);

    DriftIdentity out;
    out.left = trapezoid(integrand, grid.delta);
    out.right = exponent.value(inner(len - 1)) - exponent.value(inner(from));
    out.residual = std::abs(out.left - out.right);
    return out;
}

}  // namespace hjmm
