#include <hjmm/grid.hpp>

#include <hjmm/error.hpp>

#include <cmath>
#include <sstream>

namespace hjmm {

namespace {

Eigen::Index steps(double length, double delta) {
    return static_cast<Eigen::Index>(std::llround(length / delta));
}

bool divides(double length, double delta) {
    const double n = std::round(length / delta);
    return n >= 1.0 && std::abs(n * delta - length) <= 1e-9 * std::max(1.0, length);
}

}  // namespace

Eigen::Index GridSpec::time_nodes() const { return steps(t_star, delta) + 1; }

Eigen::Index GridSpec::maturity_nodes() const { return steps(t_max, delta) + 1; }

Eigen::Index GridSpec::index_of(double t) const {
    const double n = std::round(t / delta);
    if (n < 0.0 || std::abs(n * delta - t) > 1e-9 * std::max(1.0, std::abs(t)) ||
        static_cast<Eigen::Index>(n) >= maturity_nodes()) {
        std::ostringstream os;
        os << "time " << t << " is not a grid node (delta = " << delta << ")";
        throw Error(ErrorCode::DomainError, os.str());
    }
    return static_cast<Eigen::Index>(n);
}

GridSpec GridSpec::refined() const {
    GridSpec out = *this;
    out.delta = 0.5 * delta;
    return out;
}

void GridSpec::validate() const {
    if (!(delta > 0.0)) throw Error(ErrorCode::DomainError, "grid delta must be positive");
    if (!(t_star > 0.0)) throw Error(ErrorCode::DomainError, "grid t_star must be positive");
    if (!(t_max >= t_star)) throw Error(ErrorCode::DomainError, "grid t_max must be >= t_star");
    if (!(gamma > 0.0)) throw Error(ErrorCode::DomainError, "grid gamma must be positive");
    if (!divides(t_star, delta) || !divides(t_max, delta))
        throw Error(ErrorCode::DomainError, "grid delta must divide t_star and t_max");
}

}  // namespace hjmm
