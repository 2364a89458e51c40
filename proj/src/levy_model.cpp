#include <hjmm/levy_model.hpp>

#include <hjmm/error.hpp>
#include <hjmm/grid.hpp>
#include <hjmm/initial_curve.hpp>
#include <hjmm/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hjmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesCutoff = 1e-4;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// (e^{-x} - 1 + x) / x^2
double phi(double x) {
    if (std::abs(x) < kSeriesCutoff) return 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0;
    return (std::expm1(-x) + x) / (x * x);
}

// (1 - e^{-x}) / x
double psi(double x) {
    if (std::abs(x) < kSeriesCutoff) return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    return -std::expm1(-x) / x;
}

template <class F>
double integrate_piece(F&& f, double a, double b, const char* what) {
    if (!(b > a)) return 0.0;
    const QuadratureResult r = std::isinf(b) ? exp_sinh(f, a) : tanh_sinh(f, a, b);
    if (!r.converged) {
        std::ostringstream os;
        os << what << ": quadrature over [" << a << ", " << b << "] did not converge";
        throw Error(ErrorCode::NonIntegrable, os.str());
    }
    return r.value;
}

/// Integral of kernel(y) * y^2 nu(y) over [lo, hi] for density families; the
/// factor y^2 is folded into the density so that no y^{-1-alpha} is formed.
template <class Kernel>
double integrate_density(const MeasureFamily& measure, double lo, double hi, Kernel&& kernel, const char* what) {
    return std::visit(
        overloaded{
            [](const PointMasses&) { return 0.0; },
            [&](const StableLike& s) {
                const double b = std::min(hi, s.y_max);
                auto f = [&](double y) { return kernel(y) * s.c * std::pow(y, 1.0 - s.alpha); };
                return integrate_piece(f, lo, b, what);
            },
            [&](const GammaLike& g) {
                auto f = [&](double y) { return kernel(y) * g.c * y * std::exp(-g.beta * y); };
                return integrate_piece(f, lo, hi, what);
            },
            [&](const UserDensity& u) {
                double total = 0.0;
                for (const auto& piece : u.pieces()) {
                    const double a = std::max(lo, piece.lo);
                    const double b = std::min(hi, piece.hi);
                    if (!(b > a)) continue;
                    auto f = [&](double y) { return kernel(y) * piece.coef * std::pow(y, piece.power + 2.0); };
                    total += integrate_piece(f, a, b, what);
                }
                return total;
            },
        },
        measure);
}

double upper_support(const MeasureFamily& measure) {
    return std::visit(overloaded{
                          [](const PointMasses& p) {
                              double m = -kInf;
                              for (const auto& a : p.atoms) m = std::max(m, a.size);
                              return m;
                          },
                          [](const StableLike& s) { return s.y_max; },
                          [](const GammaLike&) { return kInf; },
                          [](const UserDensity& u) { return u.upper(); },
                      },
                      measure);
}

void check_z(double z) {
    if (!(z >= 0.0) || !std::isfinite(z)) {
        std::ostringstream os;
        os << "exponent argument must be finite and >= 0, got " << z;
        throw Error(ErrorCode::DomainError, os.str());
    }
}

double density_exponent(const MeasureFamily& m, double z) {
    const double up = upper_support(m);
    const double small = integrate_density(m, 0.0, std::min(1.0, up), [z](double y) { return z * z * phi(z * y); },
                                           "J2");
    const double large =
        up > 1.0 ? integrate_density(m, 1.0, up, [z](double y) { return std::expm1(-z * y) / (y * y); }, "J3") : 0.0;
    return small + large;
}

double density_derivative(const MeasureFamily& m, double z) {
    const double up = upper_support(m);
    const double small =
        integrate_density(m, 0.0, std::min(1.0, up), [z](double y) { return z * psi(z * y); }, "J2'");
    const double large =
        up > 1.0 ? integrate_density(m, 1.0, up, [z](double y) { return std::exp(-z * y) / y; }, "J3'") : 0.0;
    return small - large;
}

double density_second_derivative(const MeasureFamily& m, double z) {
    const double up = upper_support(m);
    auto kernel = [z](double y) { return std::exp(-z * y); };
    const double small = integrate_density(m, 0.0, std::min(1.0, up), kernel, "J2''");
    const double large = up > 1.0 ? integrate_density(m, 1.0, up, kernel, "J3''") : 0.0;
    return small + large;
}

}  // namespace

// ---------------------------------------------------------------------------
// PowerLawPiece / UserDensity
// ---------------------------------------------------------------------------

double PowerLawPiece::density(double y) const {
    if (y < lo || y > hi || y <= 0.0) return 0.0;
    return coef * std::pow(y, power);
}

double PowerLawPiece::moment(int k, double a, double b) const {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (!(b > a)) return 0.0;
    const double p = power + k + 1.0;
    if (std::abs(p) < 1e-14) return a > 0.0 ? coef * std::log(b / a) : kInf;
    if (a == 0.0 && p < 0.0) return kInf;
    return coef * (std::pow(b, p) - std::pow(a, p)) / p;
}

double PowerLawPiece::sample(double a, double u) const {
    a = std::max(a, lo);
    const double p = power + 1.0;
    if (std::abs(p) < 1e-14) return a * std::pow(hi / a, u);
    const double lo_p = std::pow(a, p);
    const double hi_p = std::pow(hi, p);
    return std::pow(lo_p + u * (hi_p - lo_p), 1.0 / p);
}

UserDensity::UserDensity(std::vector<std::pair<double, double>> nodes, bool certified)
    : nodes_(std::move(nodes)), certified_(certified) {
    if (nodes_.size() < 2) throw Error(ErrorCode::DomainError, "user density needs at least two nodes");
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (!(nodes_[k].first > 0.0) || !(nodes_[k].second > 0.0))
            throw Error(ErrorCode::DomainError, "user density nodes must have positive abscissa and value");
        if (k > 0 && !(nodes_[k].first > nodes_[k - 1].first))
            throw Error(ErrorCode::DomainError, "user density abscissae must be strictly increasing");
    }
    auto slope = [&](std::size_t k) {
        return std::log(nodes_[k + 1].second / nodes_[k].second) / std::log(nodes_[k + 1].first / nodes_[k].first);
    };
    const double p0 = slope(0);
    pieces_.push_back({0.0, nodes_[0].first, nodes_[0].second / std::pow(nodes_[0].first, p0), p0});
    for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
        const double p = slope(k);
        pieces_.push_back({nodes_[k].first, nodes_[k + 1].first, nodes_[k].second / std::pow(nodes_[k].first, p), p});
    }
}

double UserDensity::operator()(double y) const {
    for (const auto& piece : pieces_)
        if (y > piece.lo && y <= piece.hi) return piece.density(y);
    return 0.0;
}

// ---------------------------------------------------------------------------
// Spec queries
// ---------------------------------------------------------------------------

std::string family_name(const MeasureFamily& measure) {
    return std::visit(overloaded{
                          [](const PointMasses&) { return std::string("point_masses"); },
                          [](const StableLike&) { return std::string("stable_like"); },
                          [](const GammaLike&) { return std::string("gamma_like"); },
                          [](const UserDensity&) { return std::string("user_density"); },
                      },
                      measure);
}

void validate(const LevyModelSpec& spec) {
    if (!std::isfinite(spec.drift_a)) throw Error(ErrorCode::DomainError, "drift a must be finite");
    if (!(spec.gaussian_q >= 0.0) || !std::isfinite(spec.gaussian_q))
        throw Error(ErrorCode::DomainError, "gaussian q must be finite and >= 0");
    std::visit(overloaded{
                   [](const PointMasses& p) {
                       for (const auto& a : p.atoms) {
                           if (!(a.intensity > 0.0) || !std::isfinite(a.intensity))
                               throw Error(ErrorCode::DomainError, "point mass intensities must be positive");
                           if (a.size == 0.0 || !std::isfinite(a.size))
                               throw Error(ErrorCode::DomainError, "point mass locations must be finite and non-zero");
                       }
                   },
                   [](const StableLike& s) {
                       if (!(s.alpha > 0.0 && s.alpha < 2.0))
                           throw Error(ErrorCode::DomainError,
                                       "stable-like alpha must lie in (0, 2); otherwise int (y^2 ^ 1) nu(dy) diverges");
                       if (!(s.c > 0.0)) throw Error(ErrorCode::DomainError, "stable-like c must be positive");
                       if (!(s.y_max > 0.0) || !std::isfinite(s.y_max))
                           throw Error(ErrorCode::DomainError, "stable-like y_max must be positive and finite");
                   },
                   [](const GammaLike& g) {
                       if (!(g.c > 0.0) || !(g.beta > 0.0))
                           throw Error(ErrorCode::DomainError, "gamma-like c and beta must be positive");
                   },
                   [](const UserDensity& u) {
                       if (u.nodes().size() < 2)
                           throw Error(ErrorCode::DomainError, "user density needs at least two nodes");
                   },
               },
               spec.measure);
}

double support_infimum(const LevyModelSpec& spec) {
    return std::visit(overloaded{
                          [](const PointMasses& p) {
                              double m = kInf;
                              for (const auto& a : p.atoms) m = std::min(m, a.size);
                              return m;
                          },
                          [](const auto&) { return 0.0; },
                      },
                      spec.measure);
}

bool has_negative_jumps(const LevyModelSpec& spec) { return support_infimum(spec) < 0.0; }

bool is_finite_activity(const LevyModelSpec& spec) { return std::holds_alternative<PointMasses>(spec.measure); }

// ---------------------------------------------------------------------------
// Exponent
// ---------------------------------------------------------------------------

double exponent(const LevyModelSpec& spec, double z) {
    check_z(z);
    double out = -spec.drift_a * z + 0.5 * spec.gaussian_q * z * z;
    if (const auto* p = std::get_if<PointMasses>(&spec.measure)) {
        for (const auto& a : p->atoms) {
            const double x = z * a.size;
            out += std::abs(a.size) < 1.0 ? a.intensity * x * x * phi(x) : a.intensity * std::expm1(-x);
        }
        return out;
    }
    return out + density_exponent(spec.measure, z);
}

double exponent_derivative(const LevyModelSpec& spec, double z, int order) {
    check_z(z);
    if (order != 1 && order != 2) throw Error(ErrorCode::DomainError, "derivative order must be 1 or 2");
    if (const auto* p = std::get_if<PointMasses>(&spec.measure)) {
        double out = order == 1 ? -spec.drift_a + spec.gaussian_q * z : spec.gaussian_q;
        for (const auto& a : p->atoms) {
            const double x = z * a.size;
            if (order == 2)
                out += a.intensity * a.size * a.size * std::exp(-x);
            else if (std::abs(a.size) < 1.0)
                out += a.intensity * a.size * x * psi(x);
            else
                out -= a.intensity * a.size * std::exp(-x);
        }
        return out;
    }
    if (order == 1) return -spec.drift_a + spec.gaussian_q * z + density_derivative(spec.measure, z);
    return spec.gaussian_q + density_second_derivative(spec.measure, z);
}

double small_jump_moment(const LevyModelSpec& spec, double x) {
    if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "small_jump_moment needs x > 0");
    if (const auto* p = std::get_if<PointMasses>(&spec.measure)) {
        double out = 0.0;
        for (const auto& a : p->atoms)
            if (a.size > 0.0 && a.size <= x) out += a.intensity * a.size * a.size;
        return out;
    }
    return integrate_density(spec.measure, 0.0, x, [](double) { return 1.0; }, "U");
}

double first_moment(const LevyModelSpec& spec, double lo, double hi) {
    if (const auto* p = std::get_if<PointMasses>(&spec.measure)) {
        double out = 0.0;
        for (const auto& a : p->atoms)
            if (a.size >= lo && a.size < hi) out += a.intensity * a.size;
        return out;
    }
    lo = std::max(lo, 0.0);
    return integrate_density(spec.measure, lo, hi, [](double y) { return 1.0 / y; }, "first moment");
}

double mass(const LevyModelSpec& spec, double lo, double hi) {
    if (const auto* p = std::get_if<PointMasses>(&spec.measure)) {
        double out = 0.0;
        for (const auto& a : p->atoms)
            if (a.size >= lo && a.size < hi) out += a.intensity;
        return out;
    }
    if (!(lo > 0.0)) return kInf;
    return integrate_density(spec.measure, lo, hi, [](double y) { return 1.0 / (y * y); }, "mass");
}

double small_jump_exponent(const LevyModelSpec& spec, double eps, double z) {
    check_z(z);
    if (is_finite_activity(spec) || !(eps > 0.0)) return 0.0;
    return integrate_density(spec.measure, 0.0, eps, [z](double y) { return z * z * phi(z * y); }, "small jumps");
}

std::vector<double> log_growth_profile(const LevyModelSpec& spec, double lambda_bar, double t_star,
                                       const std::vector<double>& z) {
    std::vector<double> out;
    out.reserve(z.size());
    for (double v : z) out.push_back(std::log(v) - lambda_bar * t_star * exponent_derivative(spec, v, 1));
    return out;
}

// ---------------------------------------------------------------------------
// LevyExponent
// ---------------------------------------------------------------------------

LevyExponent::LevyExponent(LevyModelSpec spec, double table_limit) : spec_(std::move(spec)) {
    validate(spec_);
    if (is_finite_activity(spec_) || !(table_limit > 0.0)) return;
    table_limit_ = table_limit;
    const auto n = static_cast<std::size_t>(std::ceil(std::log1p(table_limit) / step_)) + 1;
    table_.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double z = std::expm1(static_cast<double>(k) * step_);
        table_.push_back(
            {exponent(spec_, z), exponent_derivative(spec_, z, 1), exponent_derivative(spec_, z, 2) * (1.0 + z)});
    }
    table_limit_ = std::expm1(static_cast<double>(n) * step_);
}

namespace {

// Cubic Hermite on [0, 1] with endpoint values v0, v1 and slopes s0, s1.
double hermite(double t, double v0, double s0, double v1, double s1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * s0 + (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * s1;
}

}  // namespace

std::pair<std::size_t, double> LevyExponent::locate(double z) const {
    const double w = std::log1p(z) / step_;
    auto k = static_cast<std::size_t>(w);
    if (k + 1 >= table_.size()) k = table_.size() - 2;
    return {k, w - static_cast<double>(k)};
}

double LevyExponent::value(double z) const {
    if (table_.empty() || !(z <= table_limit_)) return exponent(spec_, z);
    check_z(z);
    const auto [k, t] = locate(z);
    const Node& a = table_[k];
    const Node& b = table_[k + 1];
    // dJ/dw = J'(z) (1 + z)
    const double za = std::expm1(static_cast<double>(k) * step_);
    const double zb = std::expm1(static_cast<double>(k + 1) * step_);
    return hermite(t, a.j, step_ * a.jp * (1.0 + za), b.j, step_ * b.jp * (1.0 + zb));
}

double LevyExponent::derivative(double z) const {
    if (table_.empty() || !(z <= table_limit_)) return exponent_derivative(spec_, z, 1);
    check_z(z);
    const auto [k, t] = locate(z);
    const Node& a = table_[k];
    const Node& b = table_[k + 1];
    return hermite(t, a.jp, step_ * a.dw, b.jp, step_ * b.dw);
}

double LevyExponent::second_derivative(double z) const { return exponent_derivative(spec_, z, 2); }

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::ExistenceLogGrowth: return "ExistenceLogGrowth";
        case Verdict::ExplosionCubicLog: return "ExplosionCubicLog";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

std::string to_string(GrowthRule r) {
    switch (r) {
        case GrowthRule::NecessaryCondition: return "NecessaryCondition";
        case GrowthRule::Subordinator: return "Subordinator";
        case GrowthRule::TauberianRhoGt1: return "TauberianRhoGt1";
        case GrowthRule::TauberianRhoLt1: return "TauberianRhoLt1";
        case GrowthRule::TauberianRhoEq1Integral: return "TauberianRhoEq1Integral";
        case GrowthRule::None: return "None";
    }
    return "None";
}

namespace {

GrowthClassification from_rho(double rho, std::string notes) {
    GrowthClassification out;
    out.rho = rho;
    out.notes = std::move(notes);
    if (rho > 1.0) {
        out.verdict = Verdict::ExistenceLogGrowth;
        out.rule_fired = GrowthRule::TauberianRhoGt1;
    } else if (rho < 1.0) {
        out.verdict = Verdict::ExplosionCubicLog;
        out.rule_fired = GrowthRule::TauberianRhoLt1;
    } else {
        // rho = 1 with a constant slowly varying factor: M does not vanish at 0,
        // so the integral test cannot fire.
        out.verdict = Verdict::Indeterminate;
        out.rule_fired = GrowthRule::TauberianRhoEq1Integral;
        out.notes += "; rho = 1 with constant M, integral test not satisfied";
    }
    return out;
}

// Least-squares slope of log U against log x on [1e-6, 1e-2].
GrowthClassification estimate_rho(const LevyModelSpec& spec) {
    constexpr int n = 41;
    std::vector<double> lx, lu;
    for (int i = 0; i < n; ++i) {
        const double x = std::pow(10.0, -6.0 + 4.0 * i / (n - 1));
        const double u = small_jump_moment(spec, x);
        if (!(u > 0.0)) {
            GrowthClassification out = from_rho(kInf, "U vanishes near 0");
            return out;
        }
        lx.push_back(std::log(x));
        lu.push_back(std::log(u));
    }
    double mx = 0.0, mu = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += lx[i];
        mu += lu[i];
    }
    mx /= n;
    mu /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (lu[i] - mu);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = lu[i] - mu - slope * (lx[i] - mx);
        rss += r * r;
    }
    const double se = std::sqrt(rss / (n - 2) / sxx);
    GrowthClassification out;
    if (std::abs(slope - 1.0) < 0.1) {
        out.verdict = Verdict::Indeterminate;
        out.rule_fired = GrowthRule::TauberianRhoEq1Integral;
        out.notes = "estimated rho within 0.1 of 1; slowly varying factor unknown for a tabulated density";
        out.rho = slope;
    } else {
        out = from_rho(slope, "rho estimated by log-log regression of U on [1e-6, 1e-2]");
    }
    out.rho_band = std::make_pair(slope - 2.0 * se, slope + 2.0 * se);
    return out;
}

bool finite_variation(const LevyModelSpec& spec) {
    try {
        return std::isfinite(first_moment(spec, 0.0, 1.0));
    } catch (const Error&) {
        return false;
    }
}

}  // namespace

GrowthClassification classify_growth(const LevyModelSpec& spec, double lambda_bar, double t_star) {
    GrowthClassification out;
    if (!(lambda_bar > 0.0) || !(t_star > 0.0)) {
        out.notes = "lambda_bar and t_star must be positive";
        return out;
    }
    const double lower = -1.0 / lambda_bar;

    if (spec.gaussian_q > 0.0) {
        out.verdict = Verdict::ExplosionCubicLog;
        out.rule_fired = GrowthRule::NecessaryCondition;
        out.notes = "Gaussian part q > 0";
        return out;
    }
    bool below_support = false;
    if (const auto* p = std::get_if<PointMasses>(&spec.measure)) {
        for (const auto& a : p->atoms) {
            if (a.size < 0.0 && a.size > lower) {
                out.verdict = Verdict::ExplosionCubicLog;
                out.rule_fired = GrowthRule::NecessaryCondition;
                out.notes = "nu charges (-1/lambda_bar, 0)";
                return out;
            }
            if (a.size <= lower) below_support = true;
        }
    }
    if (below_support) {
        out.notes = "(A2) violated: jumps at or below -1/lambda_bar";
        return out;
    }

    const auto tail_rule = [&] {
        return std::visit(
            overloaded{
                [](const PointMasses&) { return from_rho(kInf, "finite activity, U vanishes near 0"); },
                [](const StableLike& s) { return from_rho(2.0 - s.alpha, "stable-like: rho = 2 - alpha"); },
                [](const GammaLike&) { return from_rho(2.0, "gamma-like: rho = 2"); },
                [&spec](const UserDensity& u) {
                    if (!u.certified()) {
                        GrowthClassification g;
                        g.notes = "user density without integrability certificates";
                        return g;
                    }
                    return estimate_rho(spec);
                },
            },
            spec.measure);
    };

    if (spec.subordinator_flag) {
        if (finite_variation(spec)) {
            out.verdict = Verdict::ExistenceLogGrowth;
            out.rule_fired = GrowthRule::Subordinator;
            out.notes = "subordinator plus linear drift";
            // the index is still worth reporting
            const GrowthClassification tail = tail_rule();
            out.rho = tail.rho;
            out.rho_band = tail.rho_band;
            return out;
        }
        out.notes = "subordinator flag ignored: int_0^1 y nu(dy) diverges; ";
    }

    GrowthClassification tail = tail_rule();
    tail.notes = out.notes + tail.notes;
    return tail;
}

// ---------------------------------------------------------------------------
// Assumptions
// ---------------------------------------------------------------------------

bool AssumptionReport::all_passed() const {
    for (const auto* c : {&a1, &a2, &a3, &a4})
        if (c->evaluated && !c->passed) return false;
    return true;
}

std::vector<std::string> AssumptionReport::failures() const {
    std::vector<std::string> out;
    for (const auto* c : {&a1, &a2, &a3, &a4})
        if (c->evaluated && !c->passed) out.push_back(c->label + " " + c->detail);
    return out;
}

AssumptionReport check_assumptions(const LevyModelSpec& spec, const VolatilitySpec& vol, const InitialCurve* r0,
                                   const GridSpec* grid) {
    AssumptionReport rep;
    rep.a1.label = "(A1)";
    rep.a2.label = "(A2)";
    rep.a3.label = "(A3)";
    rep.a4.label = "(A4)";
    const double lambda_bar = vol.lambda_upper;

    if (r0 != nullptr && grid != nullptr) {
        rep.a1.evaluated = true;
        rep.a1.passed = true;
        rep.a1.detail = "initial curve positive on the maturity grid";
        for (Eigen::Index j = 0; j < grid->maturity_nodes(); ++j) {
            const double x = grid->time(j);
            const double v = (*r0)(x);
            if (!(v > 0.0)) {
                std::ostringstream os;
                os << "initial curve must be positive: r0(" << x << ") = " << v;
                rep.a1.passed = false;
                rep.a1.detail = os.str();
                break;
            }
        }
    }

    rep.support_infimum = support_infimum(spec);
    rep.a2.evaluated = true;
    if (!(lambda_bar > 0.0)) {
        rep.a2.detail = "lambda_bar must be positive";
    } else {
        const double lower = -1.0 / lambda_bar;
        rep.a2.passed = rep.support_infimum > lower;
        std::ostringstream os;
        os << "support infimum " << rep.support_infimum << (rep.a2.passed ? " > " : " <= ") << lower
           << " = -1/lambda_bar";
        rep.a2.detail = os.str();
    }

    rep.a3.evaluated = true;
    rep.a3.passed = true;
    rep.a3.detail = "separable volatility with bounded maturity factors";
    for (const auto& term : vol.terms) {
        if (!term.maturity_factor.bounded()) {
            rep.a3.passed = false;
            rep.a3.detail = "maturity factor unbounded on [0, inf)";
        }
    }
    if (vol.terms.empty()) {
        rep.a3.passed = false;
        rep.a3.detail = "volatility has no terms";
    }

    rep.a4.evaluated = true;
    try {
        validate(spec);
        const double lower = lambda_bar > 0.0 ? -1.0 / lambda_bar : 0.0;
        if (const auto* p = std::get_if<PointMasses>(&spec.measure)) {
            for (const auto& a : p->atoms) {
                if (a.size > lower && a.size < 1.0) rep.a4_small_jumps += a.intensity * a.size * a.size;
                if (a.size >= 1.0) rep.a4_large_jumps += a.intensity * a.size;
                if (a.size > 0.0) rep.second_moment += a.intensity * a.size * a.size;
            }
        } else {
            rep.a4_small_jumps = integrate_density(spec.measure, 0.0, 1.0, [](double) { return 1.0; }, "(A4)");
            rep.a4_large_jumps =
                integrate_density(spec.measure, 1.0, kInf, [](double y) { return 1.0 / y; }, "(A4)");
        }
        rep.a4.passed = std::isfinite(rep.a4_small_jumps) && std::isfinite(rep.a4_large_jumps);
        std::ostringstream os;
        os << "int y^2 nu on (-1/lambda_bar, 1) = " << rep.a4_small_jumps << ", int_1^inf y nu = " << rep.a4_large_jumps;
        rep.a4.detail = os.str();
    } catch (const Error& e) {
        rep.a4.passed = false;
        rep.a4.detail = e.what();
        rep.a4_small_jumps = kInf;
    }

    if (!std::holds_alternative<PointMasses>(spec.measure)) {
        try {
            rep.second_moment = integrate_density(spec.measure, 0.0, kInf, [](double) { return 1.0; }, "second moment");
        } catch (const Error&) {
            rep.second_moment = kInf;
        }
    }
    rep.second_moment_finite = std::isfinite(rep.second_moment);
    return rep;
}

}  // namespace hjmm
