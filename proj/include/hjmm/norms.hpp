#pragma once

#include <hjmm/error.hpp>
#include <hjmm/grid.hpp>

#include <cmath>
#include <sstream>

namespace hjmm {

/// Norms of one Musiela slice x -> r(t, x) on the truncated range [0, X],
/// X = T_max - t.
struct WeightedNorms {
    double l2_gamma = 0.0;
    double h1_gamma = 0.0;
    double sup = 0.0;
    /// e^{-gamma X / 2} / sqrt(gamma): the factor in the tail bound.
    double tail_factor = 0.0;
    /// (sqrt(trapz e^{-gamma x}) - 1/sqrt(gamma))^+ * l2_gamma: how far the
    /// discrete Cauchy-Schwarz constant exceeds the continuous one.
    double embedding_slack = 0.0;
};

/// L2_gamma by trapezoid against e^{gamma x}. The derivative part of H1_gamma
/// uses forward differences weighted at the cell midpoints, which makes
/// sup h <= h(0) + H1_gamma / sqrt(gamma) hold exactly on the grid.
template <class Derived>
WeightedNorms slice_norms(const Eigen::MatrixBase<Derived>& slice, double delta, double gamma) {
    WeightedNorms out;
    const Eigen::Index n = slice.size();
    if (n == 0) return out;
    const double span = static_cast<double>(n - 1) * delta;
    double l2 = 0.0, dpart = 0.0, decay = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) * delta;
        const double w = (k == 0 || k == n - 1) ? 0.5 * delta : delta;
        const double h = static_cast<double>(slice(k));
        l2 += w * h * h * std::exp(gamma * x);
        decay += w * std::exp(-gamma * x);
        out.sup = std::max(out.sup, std::abs(h));
        if (k + 1 < n) {
            const double d = (static_cast<double>(slice(k + 1)) - h) / delta;
            dpart += delta * d * d * std::exp(gamma * (x + 0.5 * delta));
        }
    }
    if (n == 1) decay = 0.0;
    out.l2_gamma = std::sqrt(l2);
    out.h1_gamma = std::sqrt(l2 + dpart);
    out.tail_factor = std::exp(-0.5 * gamma * span) / std::sqrt(gamma);
    out.embedding_slack = std::max(0.0, std::sqrt(decay) - 1.0 / std::sqrt(gamma)) * out.l2_gamma;
    return out;
}

/// Norms of the Musiela slice of row i of a standard-coordinate field.
template <class Derived>
WeightedNorms row_norms(const Eigen::MatrixBase<Derived>& field, const GridSpec& grid, Eigen::Index i) {
    if (i < 0 || i >= grid.time_nodes()) {
        std::ostringstream os;
        os << "row_norms: row " << i << " outside [0, T*]";
        throw Error(ErrorCode::DomainError, os.str());
    }
    return slice_norms(musiela_slice(field, i), grid.delta, grid.gamma);
}

template <class Derived>
WeightedNorms weighted_norms(const Eigen::MatrixBase<Derived>& field, const GridSpec& grid, double t) {
    if (t > grid.t_star * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "weighted_norms: t = " << t << " exceeds T* = " << grid.t_star;
        throw Error(ErrorCode::DomainError, os.str());
    }
    return row_norms(field, grid, grid.index_of(t));
}

/// sup over t of the slice norms (the norms of the time-uniform spaces).
template <class Derived>
WeightedNorms sup_norms(const Eigen::MatrixBase<Derived>& field, const GridSpec& grid) {
    WeightedNorms out;
    for (Eigen::Index i = 0; i < grid.time_nodes(); ++i) {
        const WeightedNorms s = row_norms(field, grid, i);
        out.l2_gamma = std::max(out.l2_gamma, s.l2_gamma);
        out.h1_gamma = std::max(out.h1_gamma, s.h1_gamma);
        out.sup = std::max(out.sup, s.sup);
        out.tail_factor = std::max(out.tail_factor, s.tail_factor);
        out.embedding_slack = std::max(out.embedding_slack, s.embedding_slack);
    }
    return out;
}

}  // namespace hjmm
