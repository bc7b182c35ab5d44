#ifndef MIXTURECRAFT_ANALYSIS_HPP
#define MIXTURECRAFT_ANALYSIS_HPP

#include "mixturecraft/density.hpp"
#include "mixturecraft/field.hpp"
#include "mixturecraft/mixture.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixturecraft {

/* (g_k * h)(x) = integral of k^n g(k(x-y)) h(y) dy over supp h, by adaptive
 * panels (dim 1) or tensor composite refinement (dim 2); absolute tolerance. */
double convolve_at(const DensitySpec& g, double k, const ScalarField& h,
                   std::span<const double> x, double quad_tol = 1e-8);

/* The same convolution wrapped as a field (each eval runs the quadrature). */
ScalarField convolution_field(const DensitySpec& g, double k, const ScalarField& h,
                              double quad_tol = 1e-8);

/* Max of |a-b| over the lattice, argmax tie-broken toward the lowest
 * row-major index (lexicographically smallest point). */
struct SupResult {
    double value = 0.0;
    std::vector<double> argmax;
};
SupResult sup_norm_diff_on_grid(const ScalarField& a, const ScalarField& b, const GridSpec& grid);

/* (integral of |a-b|^p over [-R,R]^n + tail_bound)^(1/p); the composite
 * quadrature refines until the relative change drops below rel_tol. */
double lp_norm_diff(const ScalarField& a, const ScalarField& b, double p, double R,
                    double tail_bound = 0.0, double rel_tol = 1e-6);

/* Analytic upper bounds on integral of (.)^p outside the origin ball of
 * radius R, used to close the L_p estimates over finite boxes. */
double density_lp_tail(const DensitySpec& d, double R, double p);
double mixture_lp_tail(const Mixture& m, double R, double p);
/* Tail of g_k * h when h has mass h_mass and support radius h_radius. */
double convolution_lp_tail(const DensitySpec& g, double k, double h_mass, double h_radius,
                           double R, double p);

/* Smallest radius (by doubling + bisection) whose analytic tail mass is
 * <= tail_eps; falls back to numeric_support without a closed-form tail. */
double effective_radius(const DensitySpec& d, double tail_eps);

/* ||f*g||_p <= ||f||_p ||g||_1, checked numerically with slack 1e-6. */
struct YoungResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};
YoungResult young_inequality_check(const DensitySpec& f, const DensitySpec& g, double p);

} // namespace mixturecraft

#endif
