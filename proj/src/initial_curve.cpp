#include <hjmm/initial_curve.hpp>

#include <hjmm/error.hpp>

#include <algorithm>

namespace hjmm {

InitialCurve::InitialCurve(CurveTable table) {
    if (table.points.empty()) throw Error(ErrorCode::DomainError, "initial curve table is empty");
    for (std::size_t k = 1; k < table.points.size(); ++k)
        if (!(table.points[k].first > table.points[k - 1].first))
            throw Error(ErrorCode::DomainError, "initial curve table abscissae must be strictly increasing");
    repr_ = std::move(table);
}

namespace {

// Index of the segment [x_k, x_{k+1}] containing x, clamped to the table.
std::size_t segment(const CurveTable& table, double x) {
    const auto& p = table.points;
    auto it = std::upper_bound(p.begin(), p.end(), x,
                               [](double v, const std::pair<double, double>& node) { return v < node.first; });
    const auto k = static_cast<std::size_t>(std::distance(p.begin(), it));
    return k == 0 ? 0 : std::min(k - 1, p.size() - 2);
}

}  // namespace

double InitialCurve::operator()(double x) const {
    if (const auto* profile = std::get_if<Profile>(&repr_)) return (*profile)(x);
    const auto& table = std::get<CurveTable>(repr_);
    const auto& p = table.points;
    if (p.size() == 1 || x <= p.front().first) return p.front().second;
    if (x >= p.back().first) return p.back().second;
    const auto k = segment(table, x);
    const double w = (x - p[k].first) / (p[k + 1].first - p[k].first);
    return (1.0 - w) * p[k].second + w * p[k + 1].second;
}

double InitialCurve::derivative(double x) const {
    if (const auto* profile = std::get_if<Profile>(&repr_)) return profile->derivative(x);
    const auto& table = std::get<CurveTable>(repr_);
    const auto& p = table.points;
    if (p.size() == 1 || x < p.front().first || x > p.back().first) return 0.0;
    const auto k = segment(table, x);
    return (p[k + 1].second - p[k].second) / (p[k + 1].first - p[k].first);
}

}  // namespace hjmm
