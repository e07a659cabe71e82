#pragma once

// Built-in example systems and their reference solutions.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gssm/ssm.hpp"

namespace gssm {

using ParameterMap = std::map<std::string, double>;

struct NamedSystem {
    std::string id;
    ParameterMap parameters;
    PolySystem system;
    int default_dim = 1;
    std::vector<int> default_master;  // empty: slowest eigenvalues
    // Hand-coded right-hand side of the original (unforced) equations.
    std::function<RVec(const RVec&)> closed_form;
};

struct SystemInfo {
    std::string id;
    std::string description;
    ParameterMap defaults;
};

std::vector<SystemInfo> list_systems();

// Ids: euler, dauchot_manneville, imaginary_sing, shaw_pierre. Parameters not
// given take their defaults; unknown names are rejected. Custom systems are
// read from files (see io.hpp).
NamedSystem make_system(const std::string& id, const ParameterMap& params = {});

// h(x) = x * int_0^inf e^{-t} / (1 + x t) dt, the Borel sum of
// sum_n (-1)^n n! x^{n+1}; x > 0.
double euler_exact(double x);

// Taylor coefficients of the Euler manifold, c_{n+1} = (-1)^n n!.
MultiSeries euler_series(int order);

// Taylor coefficients of x / (1 + x^2).
MultiSeries imaginary_sing_series(int order);

struct FixedPoint {
    RVec x;
    CVec eigenvalues;
    std::string type;  // stable | unstable | saddle | nonhyperbolic
};

// Damped Newton from an equispaced seed grid in the box, deduplicated at
// 1e-8. Sorted by descending first coordinate.
std::vector<FixedPoint> fixed_points_oracle(const PolySystem& sys, const RVec& lo, const RVec& hi,
                                            int seeds_per_axis = 11);

std::string stability_type(const CVec& eigenvalues, double tol = 1e-10);

}  // namespace gssm
