#include "mixturecraft/analysis.hpp"
#include "mixturecraft/errors.hpp"
#include "mixturecraft/kernels.hpp"
#include "mixturecraft/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace mixturecraft {

namespace {

double dilated_radius(const DensitySpec& g, double k)
{
    return g.numeric_support / k;
}

} // namespace

double convolve_at(const DensitySpec& g, double k, const ScalarField& h,
                   std::span<const double> x, double quad_tol)
{
    if (!(k > 0.0)) fail(errc::invalid_parameter, "convolve_at needs k > 0");
    if (g.dim != h.dim) fail(errc::dimension_error, "kernel dim mismatches field dim");
    if (static_cast<int>(x.size()) != h.dim) fail(errc::dimension_error, "point dim mismatch");
    const int dim = h.dim;
    const double kn = (dim == 2) ? k * k : k;
    const double w = dilated_radius(g, k); // kernel window: g(k u) == 0 beyond ||u|| > w

    double lo[2], hi[2];
    for (int a = 0; a < dim; ++a) {
        lo[a] = std::max(-h.domain_radius, x[a] - w);
        hi[a] = std::min(h.domain_radius, x[a] + w);
        if (!(lo[a] < hi[a])) return 0.0;
    }

    auto geval = g.eval;
    auto heval = h.eval;
    QuadOptions qopt;
    qopt.tol = quad_tol;

    if (dim == 1) {
        const double x0 = x[0];
        auto integrand = [&](double y) {
            const double u = k * (x0 - y);
            const double gv = geval(std::span<const double>(&u, 1));
            if (gv == 0.0) return 0.0;
            return kn * gv * heval(std::span<const double>(&y, 1));
        };
        std::vector<double> bps;
        if (!h.breakpoints.empty()) bps = h.breakpoints[0];
        if (!g.breakpoints.empty())
            for (double t : g.breakpoints[0]) bps.push_back(x0 - t / k); // g(k(x-y)) kinks here
        bps.push_back(x0); // kernel peak
        return integrate_adaptive(integrand, lo[0], hi[0], bps, qopt);
    }

    auto integrand = [&](std::span<const double> y) {
        double u[2] = {k * (x[0] - y[0]), k * (x[1] - y[1])};
        const double gv = geval(std::span<const double>(u, 2));
        if (gv == 0.0) return 0.0;
        return kn * gv * heval(y);
    };
    std::vector<std::vector<double>> bps(2);
    for (int a = 0; a < dim; ++a) {
        if (static_cast<int>(h.breakpoints.size()) > a) bps[a] = h.breakpoints[a];
        if (static_cast<int>(g.breakpoints.size()) > a)
            for (double t : g.breakpoints[a]) bps[a].push_back(x[a] - t / k);
        bps[a].push_back(x[a]);
    }
    return integrate_box(integrand, std::span<const double>(lo, 2), std::span<const double>(hi, 2),
                         bps, qopt);
}

ScalarField convolution_field(const DensitySpec& g, double k, const ScalarField& h, double quad_tol)
{
    auto gheld = std::make_shared<const DensitySpec>(g);
    auto hheld = std::make_shared<const ScalarField>(h);
    ScalarField f;
    f.dim = h.dim;
    f.eval = [gheld, k, hheld, quad_tol](std::span<const double> x) {
        return convolve_at(*gheld, k, *hheld, x, quad_tol);
    };
    f.domain_radius = h.domain_radius + dilated_radius(g, k);
    if (g.lipschitz) {
        // |grad(g_k * h)| <= k^(n+1) L_g * integral h, and densities carry mass <= 1.
        double kn1 = k * k;
        if (h.dim == 2) kn1 *= k;
        f.lipschitz = kn1 * (*g.lipschitz);
    }
    return f;
}

SupResult sup_norm_diff_on_grid(const ScalarField& a, const ScalarField& b, const GridSpec& grid)
{
    const int dim = grid_dim(grid);
    if (a.dim != dim || b.dim != dim) fail(errc::dimension_error, "field/grid dim mismatch");
    const auto va = map_on_grid(a, grid);
    const auto vb = map_on_grid(b, grid);
    const long total = static_cast<long>(va.size());
    long best_i = 0;
    double best = -1.0;
    for (long i = 0; i < total; ++i) {
        const double d = std::abs(va[static_cast<std::size_t>(i)] - vb[static_cast<std::size_t>(i)]);
        if (d > best) {
            best = d;
            best_i = i;
        }
    }
    SupResult out;
    out.value = best;
    out.argmax.resize(dim);
    grid_point(grid, best_i, out.argmax);
    return out;
}

double lp_norm_diff(const ScalarField& a, const ScalarField& b, double p, double R,
                    double tail_bound, double rel_tol)
{
    if (!(p >= 1.0)) fail(errc::invalid_parameter, "lp norm needs p >= 1");
    if (!(R > 0.0)) fail(errc::invalid_parameter, "lp norm needs R > 0");
    if (a.dim != b.dim) fail(errc::dimension_error, "field dim mismatch");
    const int dim = a.dim;

    auto ae = a.eval, be = b.eval;
    auto integrand = [ae, be, p](std::span<const double> x) {
        return std::pow(std::abs(ae(x) - be(x)), p);
    };
    std::vector<std::vector<double>> bps(dim);
    for (int ax = 0; ax < dim; ++ax) {
        if (static_cast<int>(a.breakpoints.size()) > ax)
            bps[ax].insert(bps[ax].end(), a.breakpoints[ax].begin(), a.breakpoints[ax].end());
        if (static_cast<int>(b.breakpoints.size()) > ax)
            bps[ax].insert(bps[ax].end(), b.breakpoints[ax].begin(), b.breakpoints[ax].end());
        /* Splitting at the smaller support edge keeps the refinement from
         * spreading tiles over pure-tail segments. */
        const double dr = std::min({a.domain_radius, b.domain_radius, R});
        if (dr > 0.0 && dr < R) {
            bps[ax].push_back(-dr);
            bps[ax].push_back(dr);
        }
        std::sort(bps[ax].begin(), bps[ax].end());
    }
    std::vector<double> lo(dim, -R), hi(dim, R);
    const double inner = integrate_box_rel(integrand, lo, hi, bps, rel_tol);
    return std::pow(inner + tail_bound, 1.0 / p);
}

double density_lp_tail(const DensitySpec& d, double R, double p)
{
    if (d.support_radius && R >= *d.support_radius) return 0.0;
    if (R >= d.numeric_support) return 0.0;
    if (!d.tail_mass || !d.sup_beyond || R < d.monotone_from) {
        const double sup = d.ess_bound ? *d.ess_bound : 1e300;
        return std::pow(sup, p - 1.0);
    }
    return std::pow(d.sup_beyond(R), p - 1.0) * d.tail_mass(R);
}

double mixture_lp_tail(const Mixture& m, double R, double p)
{
    const DensitySpec& g = m.kernel;
    double mass = 0.0, sup = 0.0;
    for (const auto& c : m.components) {
        double mu = 0.0;
        for (double v : c.location) mu += v * v;
        mu = std::sqrt(mu);
        double jac = 1.0 / c.scale;
        if (m.dim == 2) jac /= c.scale;
        const double t = (R - mu) / c.scale;
        if (t <= g.monotone_from || !g.tail_mass || !g.sup_beyond) {
            mass += c.weight;
            sup += c.weight * jac * (g.ess_bound ? *g.ess_bound : 1e300);
        } else {
            mass += c.weight * g.tail_mass(t);
            sup += c.weight * jac * g.sup_beyond(t);
        }
    }
    return std::pow(sup, p - 1.0) * mass;
}

double convolution_lp_tail(const DensitySpec& g, double k, double h_mass, double h_radius,
                           double R, double p)
{
    const double t = k * (R - h_radius);
    if (t >= g.numeric_support) return 0.0;
    double kn = k;
    if (g.dim == 2) kn *= k;
    if (t <= g.monotone_from || !g.tail_mass || !g.sup_beyond) {
        const double sup = kn * h_mass * (g.ess_bound ? *g.ess_bound : 1e300);
        return std::pow(sup, p - 1.0) * h_mass;
    }
    const double sup = kn * h_mass * g.sup_beyond(t);
    return std::pow(sup, p - 1.0) * h_mass * g.tail_mass(t);
}

double effective_radius(const DensitySpec& d, double tail_eps)
{
    if (d.support_radius) return *d.support_radius;
    if (!d.tail_mass) return d.numeric_support;
    double hi = 1.0;
    int guard = 0;
    while (d.tail_mass(hi) > tail_eps) {
        hi *= 2.0;
        if (++guard > 60) return d.numeric_support;
    }
    double lo = std::max(hi * 0.5, d.monotone_from);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (d.tail_mass(mid) > tail_eps)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

YoungResult young_inequality_check(const DensitySpec& f, const DensitySpec& g, double p)
{
    if (!(p >= 1.0)) fail(errc::invalid_parameter, "young check needs p >= 1");
    if (f.dim != g.dim) fail(errc::dimension_error, "density dim mismatch");

    const double Rf = effective_radius(f, 1e-14);
    const double Rg = effective_radius(g, 1e-14);

    ScalarField ff = field_of(f);
    ScalarField conv = convolution_field(g, 1.0, ff, 1e-9);
    const double Rout = Rf + Rg;

    const double conv_tail = convolution_lp_tail(g, 1.0, 1.0, Rf, Rout, p);
    const double lhs = lp_norm_diff(conv, zero_field(f.dim), p, Rout, conv_tail);

    const double fp_tail = density_lp_tail(f, Rf, p);
    const double norm_f_p = lp_norm_diff(ff, zero_field(f.dim), p, Rf, fp_tail);
    const double g1_tail = density_lp_tail(g, Rg, 1.0);
    const double norm_g_1 = lp_norm_diff(field_of(g), zero_field(g.dim), 1.0, Rg, g1_tail);

    YoungResult out;
    out.lhs = lhs;
    out.rhs = norm_f_p * norm_g_1;
    out.holds = out.lhs <= out.rhs + 1e-6;
    return out;
}

} // namespace mixturecraft
