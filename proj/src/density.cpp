#include "mixturecraft/density.hpp"
#include "mixturecraft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mixturecraft {

namespace {

constexpr double inv_sqrt_2pi = 0.3989422804014327; // 1/sqrt(2*pi)

double phi(double u) { return inv_sqrt_2pi * std::exp(-0.5 * u * u); }

/* Upper-tail mass of the standard normal. */
double normal_q(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

void require(bool cond, const std::string& msg)
{
    if (!cond) fail(errc::invalid_parameter, msg);
}

void expect_params(const std::vector<double>& p, std::size_t n, const std::string& family)
{
    if (p.size() != n)
        fail(errc::invalid_parameter, family + " takes " + std::to_string(n) + " parameters, got " +
                                          std::to_string(p.size()));
}

DensitySpec make_gaussian(const std::vector<double>& p)
{
    expect_params(p, 2, "gaussian");
    const double mu = p[0], sigma = p[1];
    require(sigma > 0.0, "gaussian: sigma must be > 0");
    DensitySpec d;
    d.family = "gaussian";
    d.params = p;
    d.dim = 1;
    d.eval = [mu, sigma](std::span<const double> x) {
        return phi((x[0] - mu) / sigma) / sigma;
    };
    d.lipschitz = phi(1.0) / (sigma * sigma);
    d.ess_bound = inv_sqrt_2pi / sigma;
    d.numeric_support = std::abs(mu) + 42.0 * sigma;
    d.tail_mass = [mu, sigma](double R) {
        if (R < std::abs(mu)) return 1.0;
        return normal_q((R - mu) / sigma) + normal_q((R + mu) / sigma);
    };
    d.monotone_from = std::abs(mu);
    d.sup_beyond = [mu, sigma](double R) {
        return std::max(phi((R - mu) / sigma), phi((-R - mu) / sigma)) / sigma;
    };
    return d;
}

DensitySpec make_laplace(const std::vector<double>& p)
{
    expect_params(p, 2, "laplace");
    const double mu = p[0], b = p[1];
    require(b > 0.0, "laplace: b must be > 0");
    DensitySpec d;
    d.family = "laplace";
    d.params = p;
    d.dim = 1;
    d.eval = [mu, b](std::span<const double> x) {
        return std::exp(-std::abs(x[0] - mu) / b) / (2.0 * b);
    };
    d.lipschitz = 1.0 / (2.0 * b * b);
    d.ess_bound = 1.0 / (2.0 * b);
    d.numeric_support = std::abs(mu) + 746.0 * b;
    d.breakpoints = {{mu}};
    d.tail_mass = [mu, b](double R) {
        if (R < std::abs(mu)) return 1.0;
        return 0.5 * (std::exp(-(R - mu) / b) + std::exp(-(R + mu) / b));
    };
    d.monotone_from = std::abs(mu);
    d.sup_beyond = [mu, b](double R) {
        return std::max(std::exp(-std::abs(R - mu) / b), std::exp(-std::abs(R + mu) / b)) / (2.0 * b);
    };
    return d;
}

DensitySpec make_triangular(const std::vector<double>& p)
{
    expect_params(p, 3, "triangular");
    const double a = p[0], c = p[1], b = p[2];
    require(a < b, "triangular: a must be < b");
    require(a < c && c < b, "triangular: mode c must satisfy a < c < b");
    DensitySpec d;
    d.family = "triangular";
    d.params = p;
    d.dim = 1;
    d.eval = [a, c, b](std::span<const double> xs) {
        const double x = xs[0];
        if (x < a || x > b) return 0.0;
        if (x <= c) return 2.0 * (x - a) / ((b - a) * (c - a));
        return 2.0 * (b - x) / ((b - a) * (b - c));
    };
    d.lipschitz = (2.0 / (b - a)) * std::max(1.0 / (c - a), 1.0 / (b - c));
    d.ess_bound = 2.0 / (b - a);
    d.support_radius = std::max(std::abs(a), std::abs(b));
    d.numeric_support = *d.support_radius;
    d.breakpoints = {{a, c, b}};
    const double sr = *d.support_radius;
    const auto cdf = [a, c, b](double x) {
        if (x <= a) return 0.0;
        if (x >= b) return 1.0;
        if (x <= c) return (x - a) * (x - a) / ((b - a) * (c - a));
        return 1.0 - (b - x) * (b - x) / ((b - a) * (b - c));
    };
    d.tail_mass = [sr, cdf](double R) { return R >= sr ? 0.0 : cdf(-R) + 1.0 - cdf(R); };
    const double ess = *d.ess_bound;
    d.sup_beyond = [sr, ess](double R) { return R >= sr ? 0.0 : ess; };
    return d;
}

DensitySpec make_epanechnikov(const std::vector<double>& p)
{
    expect_params(p, 2, "epanechnikov");
    const double mu = p[0], h = p[1];
    require(h > 0.0, "epanechnikov: h must be > 0");
    DensitySpec d;
    d.family = "epanechnikov";
    d.params = p;
    d.dim = 1;
    d.eval = [mu, h](std::span<const double> xs) {
        const double u = (xs[0] - mu) / h;
        if (std::abs(u) > 1.0) return 0.0;
        return 0.75 * (1.0 - u * u) / h;
    };
    d.lipschitz = 1.5 / (h * h);
    d.ess_bound = 0.75 / h;
    d.support_radius = std::abs(mu) + h;
    d.numeric_support = *d.support_radius;
    d.breakpoints = {{mu - h, mu + h}};
    const double sr = *d.support_radius;
    const auto cdf = [mu, h](double x) {
        const double t = std::clamp((x - mu) / h, -1.0, 1.0);
        return 0.5 + 0.75 * t - 0.25 * t * t * t;
    };
    d.tail_mass = [sr, cdf](double R) { return R >= sr ? 0.0 : cdf(-R) + 1.0 - cdf(R); };
    const double ess = *d.ess_bound;
    d.sup_beyond = [sr, ess](double R) { return R >= sr ? 0.0 : ess; };
    return d;
}

DensitySpec make_uniform(const std::vector<double>& p)
{
    expect_params(p, 2, "uniform");
    const double a = p[0], b = p[1];
    require(a < b, "uniform: a must be < b");
    DensitySpec d;
    d.family = "uniform";
    d.params = p;
    d.dim = 1;
    d.eval = [a, b](std::span<const double> xs) {
        return (xs[0] >= a && xs[0] <= b) ? 1.0 / (b - a) : 0.0;
    };
    d.continuity = ContinuityClass::essentially_bounded;
    d.ess_bound = 1.0 / (b - a);
    d.support_radius = std::max(std::abs(a), std::abs(b));
    d.numeric_support = *d.support_radius;
    d.breakpoints = {{a, b}};
    const double sr = *d.support_radius;
    const auto cdf = [a, b](double x) { return std::clamp((x - a) / (b - a), 0.0, 1.0); };
    d.tail_mass = [sr, cdf](double R) { return R >= sr ? 0.0 : cdf(-R) + 1.0 - cdf(R); };
    const double ess = *d.ess_bound;
    d.sup_beyond = [sr, ess](double R) { return R >= sr ? 0.0 : ess; };
    return d;
}

DensitySpec make_gmix(const std::vector<double>& p)
{
    if (p.size() < 3 || p.size() % 3 != 0)
        fail(errc::invalid_parameter, "gmix takes weight,mean,sigma triples");
    const std::size_t m = p.size() / 3;
    std::vector<double> w(m), mu(m), sig(m);
    double wsum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        w[i] = p[3 * i];
        mu[i] = p[3 * i + 1];
        sig[i] = p[3 * i + 2];
        require(w[i] >= 0.0, "gmix: weights must be >= 0");
        require(sig[i] > 0.0, "gmix: sigmas must be > 0");
        wsum += w[i];
    }
    require(std::abs(wsum - 1.0) <= 1e-9, "gmix: weights must sum to 1");
    for (double& wi : w) wi /= wsum;

    DensitySpec d;
    d.family = "gmix";
    d.params = p;
    d.dim = 1;
    d.eval = [w, mu, sig, m](std::span<const double> xs) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            acc += w[i] * phi((xs[0] - mu[i]) / sig[i]) / sig[i];
        return acc;
    };
    double lip = 0.0, ess = 0.0, nsup = 0.0, mono = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        lip += w[i] * phi(1.0) / (sig[i] * sig[i]);
        ess += w[i] * inv_sqrt_2pi / sig[i];
        nsup = std::max(nsup, std::abs(mu[i]) + 42.0 * sig[i]);
        mono = std::max(mono, std::abs(mu[i]));
    }
    d.lipschitz = lip;
    d.ess_bound = ess;
    d.numeric_support = nsup;
    d.monotone_from = mono;
    d.tail_mass = [w, mu, sig, m, mono](double R) {
        if (R < mono) return 1.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            acc += w[i] * (normal_q((R - mu[i]) / sig[i]) + normal_q((R + mu[i]) / sig[i]));
        return acc;
    };
    auto eval_copy = d.eval;
    d.sup_beyond = [eval_copy](double R) {
        const double xr = R, xl = -R;
        return std::max(eval_copy(std::span<const double>(&xr, 1)),
                        eval_copy(std::span<const double>(&xl, 1)));
    };
    return d;
}

DensitySpec make_gaussian2(const std::vector<double>& p)
{
    expect_params(p, 3, "gaussian2");
    const double mx = p[0], my = p[1], sigma = p[2];
    require(sigma > 0.0, "gaussian2: sigma must be > 0");
    DensitySpec d;
    d.family = "gaussian2";
    d.params = p;
    d.dim = 2;
    const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
    d.eval = [mx, my, sigma, norm](std::span<const double> x) {
        const double dx = x[0] - mx, dy = x[1] - my;
        return norm * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    };
    d.lipschitz = norm * std::exp(-0.5) / sigma;
    d.ess_bound = norm;
    const double mu_norm = std::hypot(mx, my);
    d.numeric_support = mu_norm + 42.0 * sigma;
    d.monotone_from = mu_norm;
    d.tail_mass = [mu_norm, sigma](double R) {
        if (R < mu_norm) return 1.0;
        const double t = (R - mu_norm) / sigma;
        return std::exp(-0.5 * t * t);
    };
    d.sup_beyond = [mu_norm, sigma, norm](double R) {
        if (R < mu_norm) return norm;
        const double t = (R - mu_norm) / sigma;
        return norm * std::exp(-0.5 * t * t);
    };
    return d;
}

DensitySpec make_tri2(const std::vector<double>& p)
{
    expect_params(p, 3, "tri2");
    const double a = p[0], c = p[1], b = p[2];
    require(a < b, "tri2: a must be < b");
    require(a < c && c < b, "tri2: mode c must satisfy a < c < b");
    DensitySpec d;
    d.family = "tri2";
    d.params = p;
    d.dim = 2;
    auto marg = [a, c, b](double x) {
        if (x < a || x > b) return 0.0;
        if (x <= c) return 2.0 * (x - a) / ((b - a) * (c - a));
        return 2.0 * (b - x) / ((b - a) * (b - c));
    };
    d.eval = [marg](std::span<const double> x) { return marg(x[0]) * marg(x[1]); };
    const double lt = (2.0 / (b - a)) * std::max(1.0 / (c - a), 1.0 / (b - c));
    const double mt = 2.0 / (b - a);
    d.lipschitz = std::numbers::sqrt2 * lt * mt;
    d.ess_bound = mt * mt;
    d.support_radius = std::numbers::sqrt2 * std::max(std::abs(a), std::abs(b));
    d.numeric_support = *d.support_radius;
    d.breakpoints = {{a, c, b}, {a, c, b}};
    const double sr = *d.support_radius;
    const auto cdf = [a, c, b](double x) {
        if (x <= a) return 0.0;
        if (x >= b) return 1.0;
        if (x <= c) return (x - a) * (x - a) / ((b - a) * (c - a));
        return 1.0 - (b - x) * (b - x) / ((b - a) * (b - c));
    };
    // Mass outside the ball is bounded by mass outside the inscribed square.
    d.tail_mass = [sr, cdf](double R) {
        if (R >= sr) return 0.0;
        const double s = R / std::numbers::sqrt2;
        const double inside = cdf(s) - cdf(-s);
        return 1.0 - inside * inside;
    };
    const double ess = *d.ess_bound;
    d.sup_beyond = [sr, ess](double R) { return R >= sr ? 0.0 : ess; };
    return d;
}

} // namespace

DensitySpec builtin_density(const std::string& family, const std::vector<double>& params)
{
    if (family == "gaussian") return make_gaussian(params);
    if (family == "laplace") return make_laplace(params);
    if (family == "triangular") return make_triangular(params);
    if (family == "epanechnikov") return make_epanechnikov(params);
    if (family == "uniform") return make_uniform(params);
    if (family == "gmix") return make_gmix(params);
    if (family == "gaussian2") return make_gaussian2(params);
    if (family == "tri2") return make_tri2(params);
    fail(errc::unknown_density, "no builtin density family named '" + family + "'");
}

double eval_density(const DensitySpec& d, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != d.dim)
        fail(errc::dimension_error, "density '" + d.family + "' has dim " + std::to_string(d.dim) +
                                        ", point has dim " + std::to_string(x.size()));
    return d.eval(x);
}

int grid_dim(const GridSpec& g)
{
    const int dim = static_cast<int>(g.center.size());
    if (dim < 1 || dim > 2)
        fail(errc::invalid_parameter, "grid dim must be 1 or 2");
    if (g.half_width.size() != g.center.size())
        fail(errc::invalid_parameter, "grid center and half_width size mismatch");
    for (double hw : g.half_width)
        if (!(hw > 0.0))
            fail(errc::invalid_parameter, "grid half_width must be > 0");
    if (g.points_per_axis < 2)
        fail(errc::invalid_parameter, "grid points_per_axis must be >= 2");
    return dim;
}

long grid_total_points(const GridSpec& g)
{
    const int dim = grid_dim(g);
    long total = g.points_per_axis;
    if (dim == 2) total *= g.points_per_axis;
    return total;
}

void grid_point(const GridSpec& g, long flat_index, std::span<double> out)
{
    const int dim = static_cast<int>(g.center.size());
    const long P = g.points_per_axis;
    long rest = flat_index;
    for (int a = dim - 1; a >= 0; --a) {
        const long i = rest % P;
        rest /= P;
        const double step = 2.0 * g.half_width[a] / static_cast<double>(P - 1);
        out[a] = g.center[a] - g.half_width[a] + step * static_cast<double>(i);
    }
}

double ess_sup_on_ball(const DensitySpec& d, double s, int samples_per_axis)
{
    if (!(s > 0.0)) fail(errc::invalid_parameter, "ess_sup_on_ball: radius must be > 0");
    if (samples_per_axis < 2) fail(errc::invalid_parameter, "ess_sup_on_ball: need >= 2 samples per axis");
    const long P = samples_per_axis;
    const double step = 2.0 * s / static_cast<double>(P - 1);
    double best = 0.0;
    if (d.dim == 1) {
        double x;
        for (long i = 0; i < P; ++i) {
            x = -s + step * static_cast<double>(i);
            best = std::max(best, d.eval(std::span<const double>(&x, 1)));
        }
    } else if (d.dim == 2) {
        double pt[2];
        for (long i = 0; i < P; ++i) {
            pt[0] = -s + step * static_cast<double>(i);
            for (long j = 0; j < P; ++j) {
                pt[1] = -s + step * static_cast<double>(j);
                if (pt[0] * pt[0] + pt[1] * pt[1] > s * s) continue;
                best = std::max(best, d.eval(std::span<const double>(pt, 2)));
            }
        }
    } else {
        fail(errc::invalid_parameter, "ess_sup_on_ball supports dim 1 or 2");
    }
    if (best == 0.0)
        fail(errc::zero_on_ball, "density '" + d.family + "' vanishes on the sample lattice of B(0," +
                                     std::to_string(s) + ")");
    return best;
}

} // namespace mixturecraft
