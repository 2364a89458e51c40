#pragma once

#include <hjmm/grid.hpp>
#include <hjmm/initial_curve.hpp>
#include <hjmm/levy_model.hpp>
#include <hjmm/volatility.hpp>

#include <cmath>

namespace hjmm::test {

// J(z) = -ln(1 + z) exactly (Frullani).
inline LevyModelSpec gamma_subordinator() {
    LevyModelSpec s;
    s.drift_a = 1.0 - std::exp(-1.0);
    s.measure = GammaLike{1.0, 1.0};
    s.subordinator_flag = true;
    return s;
}

inline LevyModelSpec drift_only(double c) {
    LevyModelSpec s;
    s.drift_a = c;
    s.measure = PointMasses{};
    s.subordinator_flag = true;
    return s;
}

inline LevyModelSpec stable(double alpha, double c = 1.0, double y_max = 1.0) {
    LevyModelSpec s;
    s.measure = StableLike{c, alpha, y_max};
    s.subordinator_flag = alpha < 1.0;
    return s;
}

inline LevyModelSpec point_masses(std::vector<Atom> atoms, double a = 0.0) {
    LevyModelSpec s;
    s.drift_a = a;
    s.measure = PointMasses{std::move(atoms)};
    return s;
}

inline VolatilitySpec separable(Profile time, Profile maturity, double lo, double hi, double dx_bound = 0.0) {
    VolatilitySpec v;
    v.terms.push_back({time, maturity});
    v.lambda_lower = lo;
    v.lambda_upper = hi;
    v.x_derivative_bound = dx_bound;
    return v;
}

inline VolatilitySpec constant_vol(double lambda) {
    return separable(Profile::constant(1.0), Profile::constant(lambda), lambda, lambda);
}

inline GridSpec grid(double delta, double t_star = 1.0, double t_max = 2.0, double gamma = 1.0) {
    return GridSpec{delta, t_star, t_max, gamma};
}

}  // namespace hjmm::test
