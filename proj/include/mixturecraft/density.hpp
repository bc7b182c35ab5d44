#ifndef MIXTURECRAFT_DENSITY_HPP
#define MIXTURECRAFT_DENSITY_HPP

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixturecraft {

enum class ContinuityClass { continuous, essentially_bounded, general };

/* A probability density on R^n (n in {1,2}) together with the analytic
 * metadata the construction and certification paths consume.  Fields beyond
 * family/params/dim/eval are advisory: absent values force the numeric
 * fallbacks. */
struct DensitySpec {
    std::string family;
    std::vector<double> params;
    int dim = 1;
    std::function<double(std::span<const double>)> eval;

    std::optional<double> lipschitz;      // global bound on |f(x)-f(y)| / ||x-y||
    std::optional<double> support_radius; // f == 0 outside the closed origin ball of this radius
    ContinuityClass continuity = ContinuityClass::continuous;
    std::optional<double> ess_bound;      // upper bound on sup f

    /* eval returns exactly 0.0 outside the origin ball of this radius (true
     * support or IEEE underflow of the tail). */
    double numeric_support = std::numeric_limits<double>::infinity();

    /* Per-axis abscissae where eval kinks or jumps; quadrature domains are
     * split here. */
    std::vector<std::vector<double>> breakpoints;

    /* Analytic upper bound on the mass outside the origin ball of radius R.
     * Null when no closed form is available. */
    std::function<double(double)> tail_mass;

    /* Analytic upper bound on sup_{||x|| >= R} f, valid for R >= monotone_from.
     * Null when no closed form is available. */
    std::function<double(double)> sup_beyond;
    double monotone_from = 0.0;
};

/* Axis-aligned evaluation lattice: points_per_axis equally spaced points on
 * [center - half_width, center + half_width] per axis, endpoints included. */
struct GridSpec {
    std::vector<double> center;
    std::vector<double> half_width;
    int points_per_axis = 2;
};

int grid_dim(const GridSpec& g);
long grid_total_points(const GridSpec& g);
/* Decodes flat row-major index -> lattice point. */
void grid_point(const GridSpec& g, long flat_index, std::span<double> out);

/* Families:
 *   gaussian:mu,sigma        laplace:mu,b        triangular:a,c,b
 *   epanechnikov:mu,h        uniform:a,b         gmix:w1,mu1,s1[,w2,mu2,s2...]
 *   gaussian2:mux,muy,sigma  tri2:a,c,b   (product of identical marginals)
 */
DensitySpec builtin_density(const std::string& family, const std::vector<double>& params);

double eval_density(const DensitySpec& d, std::span<const double> x);
inline double eval_density1(const DensitySpec& d, double x)
{
    return eval_density(d, std::span<const double>(&x, 1));
}

/* Max of eval over a deterministic lattice of samples_per_axis points per axis
 * restricted to the closed origin ball of radius s. */
double ess_sup_on_ball(const DensitySpec& d, double s, int samples_per_axis = 4097);

} // namespace mixturecraft

#endif
