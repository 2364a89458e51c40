#include <hjmm/volatility.hpp>

#include <hjmm/error.hpp>
#include <hjmm/grid.hpp>

#include <cmath>
#include <sstream>

namespace hjmm {

double Profile::operator()(double u) const {
    switch (kind) {
        case Kind::Constant: return c0;
        case Kind::Affine: return c0 + c1 * u;
        case Kind::ExponentialDecay: return c0 + c1 * std::exp(-k * u);
    }
    return 0.0;
}

double Profile::derivative(double u) const {
    switch (kind) {
        case Kind::Constant: return 0.0;
        case Kind::Affine: return c1;
        case Kind::ExponentialDecay: return -k * c1 * std::exp(-k * u);
    }
    return 0.0;
}

bool Profile::bounded() const {
    switch (kind) {
        case Kind::Constant: return true;
        case Kind::Affine: return c1 == 0.0;
        case Kind::ExponentialDecay: return k >= 0.0 || c1 == 0.0;
    }
    return false;
}

bool Profile::is_constant() const {
    switch (kind) {
        case Kind::Constant: return true;
        case Kind::Affine: return c1 == 0.0;
        case Kind::ExponentialDecay: return c1 == 0.0 || k == 0.0;
    }
    return false;
}

double VolatilitySpec::standard(double t, double maturity) const {
    double out = 0.0;
    for (const auto& term : terms) out += term.time_factor(t) * term.maturity_factor(maturity);
    return out;
}

double VolatilitySpec::dx(double t, double x) const {
    double out = 0.0;
    for (const auto& term : terms) out += term.time_factor(t) * term.maturity_factor.derivative(t + x);
    return out;
}

bool VolatilitySpec::time_only() const {
    for (const auto& term : terms)
        if (!term.maturity_factor.is_constant()) return false;
    return true;
}

void validate_on_grid(const VolatilitySpec& vol, const GridSpec& grid) {
    if (!(vol.lambda_lower > 0.0))
        throw Error(ErrorCode::DomainError, "volatility lower bound must be positive");
    if (!(vol.lambda_upper >= vol.lambda_lower) || !std::isfinite(vol.lambda_upper))
        throw Error(ErrorCode::DomainError, "volatility upper bound must be finite and >= lower bound");
    const double slack = 1e-12 * vol.lambda_upper;
    for (Eigen::Index i = 0; i < grid.time_nodes(); ++i) {
        const double t = grid.time(i);
        for (Eigen::Index j = i; j < grid.maturity_nodes(); ++j) {
            const double x = grid.time(j) - t;
            const double v = vol(t, x);
            if (v < vol.lambda_lower - slack || v > vol.lambda_upper + slack) {
                std::ostringstream os;
                os << "lambda(t=" << t << ", x=" << x << ") = " << v << " outside declared bounds ["
                   << vol.lambda_lower << ", " << vol.lambda_upper << "]";
                throw Error(ErrorCode::DomainError, os.str());
            }
            if (std::abs(vol.dx(t, x)) > vol.x_derivative_bound + 1e-12) {
                std::ostringstream os;
                os << "|d lambda/dx|(t=" << t << ", x=" << x << ") = " << std::abs(vol.dx(t, x))
                   << " exceeds declared bound " << vol.x_derivative_bound;
                throw Error(ErrorCode::DomainError, os.str());
            }
        }
    }
}

}  // namespace hjmm
