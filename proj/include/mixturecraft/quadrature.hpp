#ifndef MIXTURECRAFT_QUADRATURE_HPP
#define MIXTURECRAFT_QUADRATURE_HPP

#include <functional>
#include <span>
#include <vector>

namespace mixturecraft {

/* Gauss-Legendre rule on [-1,1]. `order` is the point count. */
struct GLRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/* Cached, thread-safe lookup. order >= 2, <= 64. */
const GLRule& gl_rule(int order);

struct QuadOptions {
    double tol = 1e-8;          // absolute
    int max_intervals = 400000; // total panels before QuadratureBudget
};

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(std::span<const double>)>;

/* Single Gauss-Kronrod 7-15 panel on [a,b]; *err gets the K15-G7 estimate. */
double gk15(const Fn1& f, double a, double b, double* err);

/* Adaptive bisection driven by gk15. The interval is pre-split at the given
 * breakpoints so kinks and jumps land on panel edges. Absolute tolerance. */
double integrate_adaptive(const Fn1& f, double a, double b,
                          std::span<const double> breakpoints, QuadOptions opt = {});

/* Composite tensor Gauss-Legendre over the box [lo,hi], dim in {1,2}.
 * Tiles double per axis until the difference between successive levels is
 * below opt.tol (absolute). Axis domains are pre-split at breakpoints. */
double integrate_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                     const std::vector<std::vector<double>>& breakpoints, QuadOptions opt = {});

/* Same refinement loop with a relative-change stopping rule: stops once
 * |I_fine - I_coarse| <= rel_tol * max(|I_fine|, abs_floor). */
double integrate_box_rel(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                         const std::vector<std::vector<double>>& breakpoints,
                         double rel_tol, double abs_floor = 1e-300, int max_tiles = 1 << 14);

/* Tensor GL rule of the given order over one box; no refinement. */
double gl_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
              const GLRule& rule);

} // namespace mixturecraft

#endif
