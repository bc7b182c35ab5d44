#ifndef MIXTURECRAFT_TEST_UTIL_HPP
#define MIXTURECRAFT_TEST_UTIL_HPP

// Test-side oracles, written independently of the library's quadrature and
// evaluation paths so the two can disagree.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testutil {

inline double norm_pdf(double x, double mu = 0.0, double sigma = 1.0)
{
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::acos(-1.0)));
}

// Adaptive Simpson with Richardson correction; depth-limited bisection.
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int depth = 30)
{
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Same integrator with manual split points, for integrands with kinks/jumps.
inline double adaptive_simpson_split(const std::function<double(double)>& f, double a, double b,
                                     std::vector<double> cuts, double tol = 1e-10)
{
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]);
        const double hi = std::min(b, cuts[i + 1]);
        if (hi > lo) total += adaptive_simpson(f, lo, hi, tol);
    }
    return total;
}

inline std::mt19937& rng(unsigned seed = 0)
{
    static std::mt19937 gen(20240117u);
    if (seed) gen.seed(seed);
    return gen;
}

inline double uniform_in(double lo, double hi, std::mt19937& gen)
{
    return std::uniform_real_distribution<double>(lo, hi)(gen);
}

} // namespace testutil

#endif
