#include <hjmm/path_sim.hpp>

#include <hjmm/error.hpp>
#include <hjmm/initial_curve.hpp>
#include <hjmm/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hjmm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform on [0, 1) from the top 53 bits; std::uniform_real_distribution is
// not specified bit-for-bit across standard libraries.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& rng, double rate) { return -std::log1p(-uniform(rng)) / rate; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Draws one jump size from nu restricted to [eps, inf), normalized.
class SizeSampler {
public:
    SizeSampler(const LevyModelSpec& spec, double eps) : spec_(spec), eps_(eps) {
        std::visit(overloaded{
                       [&](const PointMasses& p) {
                           for (const auto& a : p.atoms) add(a.intensity);
                       },
                       [&](const StableLike& s) {
                           pieces_.push_back({0.0, s.y_max, s.c, -1.0 - s.alpha});
                           add(pieces_.back().moment(0, eps, s.y_max));
                       },
                       [&](const GammaLike& g) {
                           add(eps < 1.0 ? mass(spec, eps, 1.0) : 0.0);
                           add(mass(spec, std::max(eps, 1.0), std::numeric_limits<double>::infinity()));
                           beta_ = g.beta;
                       },
                       [&](const UserDensity& u) {
                           for (const auto& piece : u.pieces()) {
                               pieces_.push_back(piece);
                               add(piece.moment(0, eps, piece.hi));
                           }
                       },
                   },
                   spec.measure);
    }

    double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

    double draw(std::mt19937_64& rng) const {
        const std::size_t k = choose(uniform(rng));
        return std::visit(overloaded{
                              [&](const PointMasses& p) { return p.atoms[k].size; },
                              [&](const StableLike&) { return pieces_[0].sample(eps_, uniform(rng)); },
                              [&](const GammaLike&) { return gamma_region(k, rng); },
                              [&](const UserDensity&) { return pieces_[k].sample(eps_, uniform(rng)); },
                          },
                          spec_.measure);
    }

private:
    void add(double m) { cumulative_.push_back(total() + m); }

    std::size_t choose(double u) const {
        const double target = u * total();
        for (std::size_t k = 0; k < cumulative_.size(); ++k)
            if (target < cumulative_[k]) return k;
        // u * total may round up to total; return the last non-empty slot.
        std::size_t k = cumulative_.size() - 1;
        while (k > 0 && cumulative_[k] == cumulative_[k - 1]) --k;
        return k;
    }

    // Region 0: [eps, 1) with density ~ e^{-beta y} / y, proposal 1/y.
    // Region 1: [max(eps,1), inf) with proposal beta e^{-beta y}, acceptance 1/y.
    double gamma_region(std::size_t k, std::mt19937_64& rng) const {
        if (k == 0) {
            for (;;) {
                const double y = eps_ * std::pow(1.0 / eps_, uniform(rng));
                if (uniform(rng) < std::exp(-beta_ * (y - eps_))) return y;
            }
        }
        const double lo = std::max(eps_, 1.0);
        for (;;) {
            const double y = lo + exponential(rng, beta_);
            if (uniform(rng) < lo / y) return y;
        }
    }

    const LevyModelSpec& spec_;
    double eps_;
    double beta_ = 1.0;
    std::vector<PowerLawPiece> pieces_;
    std::vector<double> cumulative_;
};

}  // namespace

double JumpPath::L(double t) const {
    double out = drift_rate * t;
    for (const auto& j : jumps) {
        if (j.time > t) break;
        out += j.size;
    }
    return out;
}

std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ index);
}

JumpPath simulate_path(const LevyModelSpec& spec, double t_star, std::uint64_t seed, double eps) {
    validate(spec);
    if (spec.gaussian_q > 0.0)
        throw Error(ErrorCode::UnsupportedSpec, "q > 0 is not simulated; the classifier places it in the explosion regime");
    if (has_negative_jumps(spec))
        throw Error(ErrorCode::UnsupportedSpec,
                    "negative jumps are not simulated; the classifier places them in the explosion regime");
    if (!(t_star > 0.0)) throw Error(ErrorCode::DomainError, "path horizon must be positive");

    JumpPath path;
    path.horizon = t_star;
    path.seed = seed;

    const bool finite = is_finite_activity(spec);
    if (!finite && !(eps > 0.0 && eps < 1.0))
        throw Error(ErrorCode::DomainError, "truncation eps must lie in (0, 1) for infinite-activity measures");
    path.truncation_eps = finite ? 0.0 : eps;
    path.drift_rate = spec.drift_a - first_moment(spec, finite ? 0.0 : eps, 1.0);

    const SizeSampler sampler(spec, path.truncation_eps);
    const double rate = sampler.total();
    if (!(rate > 0.0)) return path;

    std::mt19937_64 rng(seed);
    double t = exponential(rng, rate);
    while (t <= t_star) {
        path.jumps.push_back({t, sampler.draw(rng)});
        t += exponential(rng, rate);
    }
    return path;
}

double integrate_against_path(const VolatilitySpec& vol, const JumpPath& path, double t, double x, double ds) {
    if (!(t >= 0.0) || t > path.horizon * (1.0 + 1e-12) || !(x >= 0.0)) {
        std::ostringstream os;
        os << "integrate_against_path outside [0, T*] x [0, inf): t = " << t << ", x = " << x;
        throw Error(ErrorCode::DomainError, os.str());
    }
    const double maturity = t + x;
    double out = 0.0;
    if (path.drift_rate != 0.0 && t > 0.0) {
        const auto n = static_cast<Eigen::Index>(std::ceil(t / ds));
        const double h = t / static_cast<double>(n);
        Eigen::VectorXd v(n + 1);
        for (Eigen::Index k = 0; k <= n; ++k) v(k) = vol.standard(static_cast<double>(k) * h, maturity);
        out += path.drift_rate * trapezoid(v, h);
    }
    for (const auto& j : path.jumps) {
        if (j.time > t) break;
        out += vol.standard(j.time, maturity) * j.size;
    }
    return out;
}

namespace {

double log_jump_factor(const VolatilitySpec& vol, const Jump& j, double maturity) {
    const double factor = 1.0 + vol.standard(j.time, maturity) * j.size;
    if (!(factor > 0.0)) {
        std::ostringstream os;
        os << "1 + lambda * dL = " << factor << " at jump time " << j.time << " (maturity " << maturity << ")";
        throw Error(ErrorCode::NonPositiveFactor, os.str());
    }
    return std::log1p(vol.standard(j.time, maturity) * j.size);
}

}  // namespace

RateField field_b(const VolatilitySpec& vol, const JumpPath& path, const GridSpec& grid) {
    const Eigen::Index nt = grid.time_nodes();
    const Eigen::Index nT = grid.maturity_nodes();
    const double d = grid.delta;

    RateField log_b = grid.zeros();
    if (path.drift_rate != 0.0) {
        for (Eigen::Index j = 0; j < nT; ++j) {
            const double maturity = grid.time(j);
            double acc = 0.0;
            double prev = vol.standard(0.0, maturity);
            for (Eigen::Index i = 1; i < nt; ++i) {
                const double cur = vol.standard(grid.time(i), maturity);
                acc += 0.5 * d * (prev + cur);
                log_b(i, j) = path.drift_rate * acc;
                prev = cur;
            }
        }
    }

    // Jumps in (t_{i-1}, t_i] first enter row i.
    RateField increments = grid.zeros();
    for (const auto& jump : path.jumps) {
        auto row = static_cast<Eigen::Index>(std::ceil(jump.time / d - 1e-12));
        row = std::clamp<Eigen::Index>(row, 0, nt - 1);
        if (jump.time > grid.time(row) * (1.0 + 1e-12) + 1e-300) continue;  // beyond T*
        for (Eigen::Index j = 0; j < nT; ++j) increments(row, j) += log_jump_factor(vol, jump, grid.time(j));
    }
    for (Eigen::Index i = 1; i < nt; ++i) increments.row(i) += increments.row(i - 1);

    RateField out = (log_b + increments).array().exp().matrix();
    apply_flat_extension(out);
    return out;
}

double field_b_at(const VolatilitySpec& vol, const JumpPath& path, double t, double maturity, bool left_limit,
                  double ds) {
    if (!(maturity >= t)) throw Error(ErrorCode::DomainError, "field_b_at needs maturity >= t");
    double log_b = 0.0;
    if (path.drift_rate != 0.0 && t > 0.0) {
        const auto n = static_cast<Eigen::Index>(std::ceil(t / ds));
        const double h = t / static_cast<double>(n);
        Eigen::VectorXd v(n + 1);
        for (Eigen::Index k = 0; k <= n; ++k) v(k) = vol.standard(static_cast<double>(k) * h, maturity);
        log_b += path.drift_rate * trapezoid(v, h);
    }
    for (const auto& jump : path.jumps) {
        if (jump.time > t || (left_limit && jump.time == t)) break;
        log_b += log_jump_factor(vol, jump, maturity);
    }
    return std::exp(log_b);
}

RateField field_a(const InitialCurve& r0, const RateField& b_field, const GridSpec& grid) {
    RateField out = b_field;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double v = r0(grid.time(j));
        if (!(v > 0.0)) {
            std::ostringstream os;
            os << "(A1) the initial curve must be positive: r0(" << grid.time(j) << ") = " << v;
            throw Error(ErrorCode::NonPositiveInitialCurve, os.str());
        }
        out.col(j) *= v;
    }
    return out;
}

}  // namespace hjmm
