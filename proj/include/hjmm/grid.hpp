#pragma once

#include <Eigen/Dense>

namespace hjmm {

/// Dense field on the (t_i, T_j) rectangle. Rows are running times
/// t_i = i * delta in [0, T*], columns are maturities T_j = j * delta in
/// [0, T_max]. Cells with T_j < t_i hold the flat extension f(t, T) = f(T, T).
template <typename Scalar>
using GridField = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RateField = GridField<double>;

struct GridSpec {
    double delta = 1.0 / 64.0;
    double t_star = 1.0;
    double t_max = 2.0;
    double gamma = 1.0;

    Eigen::Index time_nodes() const;      // T* / delta + 1
    Eigen::Index maturity_nodes() const;  // T_max / delta + 1
    double time(Eigen::Index i) const { return static_cast<double>(i) * delta; }

    /// Index of an on-grid time; throws DomainError if `t` is not a node.
    Eigen::Index index_of(double t) const;

    /// Same horizon with half the step.
    GridSpec refined() const;

    /// Throws DomainError unless delta divides T* and T_max, T_max >= T*, gamma > 0.
    void validate() const;

    template <typename Scalar = double>
    GridField<Scalar> zeros() const {
        return GridField<Scalar>::Zero(time_nodes(), maturity_nodes());
    }
};

/// Musiela slice x -> r(t_i, x) = f(t_i, t_i + x) for x in [0, T_max - t_i].
template <class Derived>
auto musiela_slice(const Eigen::MatrixBase<Derived>& field, Eigen::Index i) {
    return field.row(i).tail(field.cols() - i);
}

/// Overwrites the cells below the diagonal with f(T_j, T_j).
template <class Derived>
void apply_flat_extension(Eigen::MatrixBase<Derived>& field) {
    for (Eigen::Index i = 1; i < field.rows(); ++i)
        for (Eigen::Index j = 0; j < i && j < field.cols(); ++j) field(i, j) = field(j, j);
}

}  // namespace hjmm
