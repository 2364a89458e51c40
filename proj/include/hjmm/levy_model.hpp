#pragma once

#include <hjmm/volatility.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hjmm {

class InitialCurve;
struct GridSpec;

// ---------------------------------------------------------------------------
// Levy measure families
// ---------------------------------------------------------------------------

struct Atom {
    double size = 0.0;       // jump size y_k
    double intensity = 0.0;  // mass c_k > 0
};

/// Finite measure sum_k c_k delta_{y_k}: a compound Poisson process.
struct PointMasses {
    std::vector<Atom> atoms;
};

/// Density c * y^(-1-alpha) on (0, y_max].
struct StableLike {
    double c = 1.0;
    double alpha = 0.5;
    double y_max = 1.0;
};

/// Density c * y^(-1) * exp(-beta * y) on (0, inf).
struct GammaLike {
    double c = 1.0;
    double beta = 1.0;
};

/// Density integrated exactly on [lo, hi]: coef * y^power.
struct PowerLawPiece {
    double lo = 0.0;
    double hi = 0.0;
    double coef = 0.0;
    double power = 0.0;

    double density(double y) const;
    /// integral of y^k * density over [a, b] intersected with [lo, hi]
    double moment(int k, double a, double b) const;
    /// inverse CDF of the density restricted to [a, hi], u in [0, 1)
    double sample(double a, double u) const;
};

/// Density given by a table of (y, nu(y)) nodes, interpolated log-log linearly
/// between nodes, extended below the first node with the power law of the
/// first segment and zero above the last node. `certified` declares that the
/// user vouches for the integrability of the table and its small-y behaviour.
class UserDensity {
public:
    UserDensity() = default;
    UserDensity(std::vector<std::pair<double, double>> nodes, bool certified);

    double operator()(double y) const;
    const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }
    const std::vector<PowerLawPiece>& pieces() const { return pieces_; }
    bool certified() const { return certified_; }
    double upper() const { return nodes_.empty() ? 0.0 : nodes_.back().first; }

private:
    std::vector<std::pair<double, double>> nodes_;
    std::vector<PowerLawPiece> pieces_;
    bool certified_ = false;
};

using MeasureFamily = std::variant<PointMasses, StableLike, GammaLike, UserDensity>;

/// Characteristic triplet (a, q, nu) of the driving Levy process.
struct LevyModelSpec {
    double drift_a = 0.0;
    double gaussian_q = 0.0;
    MeasureFamily measure = PointMasses{};
    bool subordinator_flag = false;
};

std::string family_name(const MeasureFamily& measure);

/// Throws DomainError for malformed parameters (alpha outside (0,2), negative
/// masses, unsorted tables, ...).
void validate(const LevyModelSpec& spec);

/// Infimum of the support of nu (0 for density families, +inf for nu = 0).
double support_infimum(const LevyModelSpec& spec);

bool has_negative_jumps(const LevyModelSpec& spec);
bool is_finite_activity(const LevyModelSpec& spec);

// ---------------------------------------------------------------------------
// Exponent J(z) = -a z + q z^2 / 2 + int (e^{-zy} - 1 + z y 1_{(-1,1)}(y)) nu(dy)
// ---------------------------------------------------------------------------

double exponent(const LevyModelSpec& spec, double z);

/// J'(z) (order 1) or J''(z) (order 2).
double exponent_derivative(const LevyModelSpec& spec, double z, int order);

/// U(x) = int_0^x y^2 nu(dy).
double small_jump_moment(const LevyModelSpec& spec, double x);

/// int_{[lo, hi)} y nu(dy) over the positive half-line; used for drift
/// compensation of truncated jumps. Throws NonIntegrable when divergent.
double first_moment(const LevyModelSpec& spec, double lo, double hi);

/// nu([lo, hi)) for lo > 0.
double mass(const LevyModelSpec& spec, double lo, double hi);

/// int_0^eps (e^{-zy} - 1 + zy) nu(dy): the part of J carried by jumps below
/// eps. The exponent of the eps-truncated path is J(z) minus this.
double small_jump_exponent(const LevyModelSpec& spec, double eps, double z);

/// ln z - lambda_bar * T* * J'(z) on the given abscissae. Diagnostic only.
std::vector<double> log_growth_profile(const LevyModelSpec& spec, double lambda_bar, double t_star,
                                       const std::vector<double>& z);

/// Evaluates J, J', J'' for one model. For density families J and J' are served
/// from cubic Hermite tables in w = log(1 + z) (nodes carry exact J, J', J''),
/// falling back to quadrature beyond `table_limit`. Immutable after
/// construction and safe to share between threads.
class LevyExponent {
public:
    explicit LevyExponent(LevyModelSpec spec, double table_limit = 1e6);

    double value(double z) const;
    double derivative(double z) const;
    double second_derivative(double z) const;

    const LevyModelSpec& spec() const { return spec_; }
    bool tabulated() const { return !table_.empty(); }
    double table_limit() const { return table_limit_; }

private:
    struct Node {
        double j;   // J(z)
        double jp;  // J'(z)
        double dw;  // dJ'/dw = J''(z) * (1 + z)
    };

    std::pair<std::size_t, double> locate(double z) const;

    LevyModelSpec spec_;
    double table_limit_ = 0.0;
    double step_ = 1.0 / 128.0;
    std::vector<Node> table_;
};

// ---------------------------------------------------------------------------
// Growth classification
// ---------------------------------------------------------------------------

enum class Verdict { ExistenceLogGrowth, ExplosionCubicLog, Indeterminate };
enum class GrowthRule {
    NecessaryCondition,
    Subordinator,
    TauberianRhoGt1,
    TauberianRhoLt1,
    TauberianRhoEq1Integral,
    None,
};

std::string to_string(Verdict v);
std::string to_string(GrowthRule r);

struct GrowthClassification {
    Verdict verdict = Verdict::Indeterminate;
    GrowthRule rule_fired = GrowthRule::None;
    std::optional<double> rho;  // +inf when U vanishes near 0
    std::optional<std::pair<double, double>> rho_band;
    std::string notes;
};

GrowthClassification classify_growth(const LevyModelSpec& spec, double lambda_bar, double t_star);

// ---------------------------------------------------------------------------
// Standing assumptions
// ---------------------------------------------------------------------------

struct AssumptionCheck {
    std::string label;
    bool evaluated = false;
    bool passed = false;
    std::string detail;
};

struct AssumptionReport {
    AssumptionCheck a1;
    AssumptionCheck a2;
    AssumptionCheck a3;
    AssumptionCheck a4;
    double support_infimum = 0.0;
    double a4_small_jumps = 0.0;  // int_{(-1/lambda_bar, 1)} y^2 nu(dy)
    double a4_large_jumps = 0.0;  // int_1^inf y nu(dy)
    double second_moment = 0.0;   // int_0^inf y^2 nu(dy)
    bool second_moment_finite = false;

    /// All evaluated assumptions passed.
    bool all_passed() const;
    std::vector<std::string> failures() const;
};

/// (A1) is only evaluated when an initial curve and grid are supplied.
AssumptionReport check_assumptions(const LevyModelSpec& spec, const VolatilitySpec& vol,
                                   const InitialCurve* r0 = nullptr, const GridSpec* grid = nullptr);

}  // namespace hjmm
