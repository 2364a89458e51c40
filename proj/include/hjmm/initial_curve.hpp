#pragma once

#include <hjmm/volatility.hpp>

#include <utility>
#include <variant>
#include <vector>

namespace hjmm {

/// Piecewise linear curve through (x, r) nodes, flat outside the table.
struct CurveTable {
    std::vector<std::pair<double, double>> points;
};

/// Initial forward curve r0(x), x >= 0.
class InitialCurve {
public:
    InitialCurve() = default;
    InitialCurve(Profile profile) : repr_(profile) {}
    InitialCurve(CurveTable table);

    double operator()(double x) const;
    double derivative(double x) const;

    const std::variant<Profile, CurveTable>& repr() const { return repr_; }

private:
    std::variant<Profile, CurveTable> repr_ = Profile::constant(1.0);
};

}  // namespace hjmm
